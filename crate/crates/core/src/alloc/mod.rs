//! Resource allocation: transmit power and reflection efficiency over
//! fading states (SISO), and transmit beamforming for power minimization
//! (MISO).
//!
//! Both solvers are exhaustive over explicit grids so that their outputs can
//! be checked against brute force.

mod miso;
mod siso;

pub use miso::{beamform_power_min, BeamformingSettings, BeamformingSolution};
pub use siso::{
    allocate_siso, brute_force_siso, one_cell_tolerance, state_utility, PrimaryBound,
    SisoAllocation, SisoSettings, MIN_GRID,
};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Relative tolerance used when checking returned solutions.
pub const FEASIBILITY_TOL: f64 = 1e-6;

/// Constraints of an allocation problem. Absent constraints are inactive.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ConstraintSet {
    /// Per-state transmit power cap `p ≤ P_pk`.
    pub peak_power: Option<f64>,
    /// Average over fading states `E[p] ≤ P_av`.
    pub avg_power: Option<f64>,
    /// Beamformer budget `‖v‖² ≤ P_t`.
    pub power_budget: Option<f64>,
    pub min_primary_rate: Option<f64>,
    pub min_secondary_rate: Option<f64>,
}

impl ConstraintSet {
    pub fn peak(p: f64) -> Self {
        ConstraintSet {
            peak_power: Some(p),
            ..Default::default()
        }
    }

    pub fn average(p: f64) -> Self {
        ConstraintSet {
            avg_power: Some(p),
            ..Default::default()
        }
    }

    pub fn budget(p: f64, min_primary_rate: f64, min_secondary_rate: f64) -> Self {
        ConstraintSet {
            power_budget: Some(p),
            min_primary_rate: Some(min_primary_rate),
            min_secondary_rate: Some(min_secondary_rate),
            ..Default::default()
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.peak_power.is_none() && self.avg_power.is_none() && self.power_budget.is_none() {
            return Err(Error::invalid(
                "constraints",
                "at least one power constraint is required",
            ));
        }
        for (name, v) in [
            ("peak power", self.peak_power),
            ("average power", self.avg_power),
            ("power budget", self.power_budget),
        ] {
            if let Some(v) = v {
                if !(v > 0.0) {
                    return Err(Error::Infeasible {
                        binding: format!("{name} must be positive, got {v}"),
                    });
                }
            }
        }
        for (name, v) in [
            ("min_primary_rate", self.min_primary_rate),
            ("min_secondary_rate", self.min_secondary_rate),
        ] {
            if let Some(v) = v {
                if !(v >= 0.0) {
                    return Err(Error::invalid(
                        "constraints",
                        format!("{name} must be >= 0, got {v}"),
                    ));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintKind {
    PeakPower,
    AveragePower,
    PowerBudget,
    ReflectionEfficiency,
    PrimaryRate,
    SecondaryRate,
}

/// Remaining margin of one constraint; nonnegative when satisfied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintSlack {
    pub constraint: ConstraintKind,
    pub slack: f64,
}

impl ConstraintSlack {
    pub(crate) fn new(constraint: ConstraintKind, slack: f64) -> Self {
        ConstraintSlack { constraint, slack }
    }
}

/// `true` when every slack is nonnegative up to `tol` relative to `scale`.
pub fn all_satisfied(slacks: &[ConstraintSlack], scale: f64, tol: f64) -> bool {
    slacks.iter().all(|s| s.slack >= -tol * scale.max(1.0))
}

pub(crate) fn linspace(hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| hi * i as f64 / (n - 1) as f64).collect()
}
