//! Fine-grid reference decompositions.
//!
//! The two-point averages used by the attribution only see period endpoints.
//! This module simulates whole paths and evaluates the left-endpoint sums
//! whose limits are the stochastic-integral decompositions of a product
//! `A·χ` and of a smooth price `A_s(r, x)`, so the gap to the two-point
//! scheme can be measured.

mod compare;
mod decompose;
mod simulate;

use thiserror::Error;

pub use compare::{
    compare_coarse_vs_fine, run_study, write_discrepancy_csv, Component, ComponentDiff,
    ComponentSummary, Discrepancy, StudyReport,
};
pub use decompose::{
    grid_ito_decomposition, grid_product_decomposition, GridDecomposition, ItoDecomposition,
    ScalarPricer, FD_RELATIVE_STEP,
};
pub use simulate::{
    simulate_paths, Dynamics, JumpSpec, PathSet, ProcessRole, ProcessSpec, SimulationParams,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("invalid correlation matrix: {0}")]
    InvalidCorrelation(String),
    #[error("invalid simulation parameter: {0}")]
    InvalidParameter(String),
    #[error("paths of unequal length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("path set has no {0:?} process")]
    MissingProcess(ProcessRole),
    #[error("non-finite derivative at grid point {0}")]
    NonFiniteDerivative(usize),
    #[error("csv: {0}")]
    Csv(String),
}
