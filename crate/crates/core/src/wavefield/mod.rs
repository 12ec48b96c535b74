//! Wavefunctions on a periodic 1-D grid, their densities, currents and
//! nonlinear functionals, and the gauge group acting on them.

mod fields;
mod grid;
pub mod io;
mod state;
mod transform;

use thiserror::Error;

use crate::gauge_algebra::AlgebraError;

pub use fields::{density_current, functionals, unwrap_phase, FieldDiagnostics, Floors, PhaseUnwrap};
pub use grid::{GridSpec, Spectral1d, SpectralDerivative};
pub use state::{WaveFunction, EDGE_FRACTION};
pub use transform::{
    apply_affine, apply_gauge, apply_gauge_two, measure_project, product_state, IntervalSet,
    TwoParticleState,
};

#[derive(Debug, Error)]
pub enum WaveError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("grid mismatch: {left} vs {right}")]
    GridMismatch { left: GridSpec, right: GridSpec },
    #[error("phase branch undefined: |psi| = {modulus:e} at index {index} is below {floor:e}")]
    PhaseBranch {
        index: usize,
        modulus: f64,
        floor: f64,
    },
    #[error("projection region carries zero probability")]
    EmptyRegion,
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("numerical domain error: {0}")]
    NumericalDomain(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("snapshot format: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl From<crate::time_fn::TimeFnError> for WaveError {
    fn from(e: crate::time_fn::TimeFnError) -> Self {
        WaveError::Algebra(e.into())
    }
}
