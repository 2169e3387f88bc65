//! Link-level simulation and analysis of symbiotic radio.
//!
//! A backscatter secondary transmitter (STx) rides on the RF signal of a
//! primary transmitter (PTx) by switching its antenna load. Receivers jointly
//! decode the primary symbols `s_k` and the secondary symbol `c`, which spans
//! `K` primary symbol periods. The crate covers:
//!
//! - [`modem`]: constellations, reflection coefficients and load impedances
//!   (passive and active loads).
//! - [`channel`]: flat Rayleigh fading and received-block synthesis.
//! - [`detect`]: joint ML, linear (MRC/ZF/MMSE), SIC and semi-blind
//!   clustering detectors.
//! - [`rates`]: primary rate bounds, secondary rates and ergodic averaging.
//! - [`alloc`]: SISO power/reflection allocation and MISO beamforming.
//! - [`ris`]: RIS-assisted links with passive beamforming and modulation.
//! - [`fdsr`]: full-duplex operation with self-interference cancellation.
//! - [`harness`]: configurable Monte Carlo experiments and CSV output.

// `!(x > 0.0)` also rejects NaN, which the suggested rewrite would not.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod alloc;
pub mod channel;
pub mod detect;
pub mod error;
pub mod fdsr;
pub mod harness;
pub mod modem;
pub mod rates;
pub mod ris;
pub mod rng;
pub mod stats;
pub mod types;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use types::{ChannelState, Constellation, Scheme, SystemConfig};
