use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("unsupported constellation: {0}")]
    UnsupportedScheme(String),

    #[error("reflection efficiency {alpha} exceeds 1 without active-load mode")]
    PassiveBoundViolation { alpha: f64 },

    #[error("active-load reflection magnitude {magnitude} exceeds the cap of {cap}")]
    ActiveCapExceeded { magnitude: f64, cap: f64 },

    #[error("reflection coefficient of 1 has no finite load impedance")]
    SingularReflection,

    #[error("load impedance cancels the antenna impedance (Z_L = -Z_a)")]
    SingularCircuit,

    #[error("effective channel is zero for secondary candidate {candidate}")]
    DegenerateChannel { candidate: usize },

    #[error("stacked channel Gram matrix is singular (condition number {condition:e})")]
    SingularModel { condition: f64 },

    #[error("k-means produced {found} distinct centroids, {expected} required")]
    ClusterCollapse { found: usize, expected: usize },

    #[error("pilots do not split the centroids into two groups of {expected} ({found:?})")]
    PilotAmbiguity { expected: usize, found: [usize; 2] },

    #[error("reflection |theta * c| = {magnitude} violates passivity")]
    PassivityViolation { magnitude: f64 },

    #[error("allocation infeasible: {binding}")]
    Infeasible { binding: String },

    #[error("config error in `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
