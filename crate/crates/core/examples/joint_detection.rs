// Sends one block through a two-antenna receiver and decodes it with every
// coherent detector.
//
// ```text
// cargo run --example joint_detection
// ```

use symradio::channel::synthesize_block;
use symradio::detect::DetectorKind;
use symradio::modem::build_constellation;
use symradio::rng::make_rng;
use symradio::types::LinkProfile;
use symradio::{ChannelState, Scheme, C64};

pub fn run() -> symradio::Result<()> {
    let a_s = build_constellation(Scheme::Qpsk)?;
    let a_c = build_constellation(Scheme::Bpsk)?;
    let mut rng = make_rng(7, 0);

    let state = ChannelState::rayleigh(2, &LinkProfile::weaker_by_db(6.0), 1.0, &mut rng)?;
    let (p, sigma2) = (1.0, 0.05);
    let s_idx = [0usize, 3, 1, 2, 2, 0, 1, 3];
    let s: Vec<C64> = s_idx.iter().map(|&i| a_s.point(i)).collect();
    let c_idx = 1;
    let block = synthesize_block(
        &state.direct,
        &state.composite,
        p,
        &s,
        a_c.point(c_idx),
        sigma2,
        &mut rng,
    )?;

    println!("sent      s = {s_idx:?}, c = {c_idx}");
    for det in [
        DetectorKind::Ml,
        DetectorKind::Mrc,
        DetectorKind::Zf,
        DetectorKind::Mmse,
        DetectorKind::SicZf,
        DetectorKind::SicMmse,
    ] {
        let r = det.detect(
            &block,
            &state.direct,
            &state.composite,
            p,
            sigma2,
            &a_s,
            &a_c,
        )?;
        let s_errors = r.s_idx.iter().zip(&s_idx).filter(|(a, b)| a != b).count();
        println!(
            "{:<9} s = {:?}, c = {}  ({s_errors} primary symbol errors)",
            det.name(),
            r.s_idx,
            r.c_idx
        );
    }
    Ok(())
}

fn main() -> symradio::Result<()> {
    run()
}
