//! Quantitative companions to the constructions: cyclic LCS, the drift
//! bound behind random words, collision statistics and batch experiments.

mod collisions;
mod drift;
mod experiment;
mod lcs;

use thiserror::Error;

pub use collisions::{expected_collisions, monte_carlo_collisions, CollisionEstimate};
pub use drift::{
    critical_ratio, drift_analysis, min_r, optimal_x, parse_rational, potential, DriftParams,
    DriftReport, XChoice,
};
pub use experiment::{
    random_experiment, CsvRow, ExperimentConfig, ExperimentStats, Generator, Method, SubsetChoice,
    TrialRecord,
};
pub use lcs::{cyclic_lcs, prop21_bound, prop21_max_players, Prop21};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("input is not a permutation of the chairs")]
    NotPermutation,

    #[error("outside the domain: {0}")]
    Domain(String),

    #[error("bad parameter: {0}")]
    BadParameter(String),
}

pub type AnalysisResult<T> = Result<T, AnalysisError>;
