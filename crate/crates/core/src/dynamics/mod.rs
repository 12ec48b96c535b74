//! Time evolution under members of the ten-parameter family and the
//! diagnostics built on it.

mod diagnostics;
mod potential;
mod rhs;
mod run;
mod scenarios;
mod spec;

use thiserror::Error;

use crate::gauge_algebra::AlgebraError;
use crate::wavefield::WaveError;

pub use diagnostics::{
    continuity_at, continuity_residual, ehrenfest_check, fit_exponential_rate, five_point_first,
    five_point_second, EhrenfestReport, SecondRelation,
};
pub use potential::Potential;
pub use rhs::{Rhs, RhsFlags};
pub use run::{
    evolve, run, RunOutcome, Status, TrajectoryRecord, TrajectorySample, DIVERGENCE_DRIFT,
    NORM_TOLERANCE,
};
pub use scenarios::{
    boost_check, commuting_diagram, galilei_boost, phase_mismatch, status_of, BoostReport,
    CommutingReport,
};
pub use spec::{stiffness, EvolutionSpec, RhsForm, C_CFL};

#[derive(Debug, Error)]
pub enum DynError {
    #[error("invalid evolution spec: {0}")]
    Spec(String),
    #[error("dt = {dt} exceeds the stability bound {bound}")]
    Stability { dt: f64, bound: f64 },
    #[error("run diverged at t = {t}")]
    Diverged { t: f64 },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Wave(#[from] WaveError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<crate::time_fn::TimeFnError> for DynError {
    fn from(e: crate::time_fn::TimeFnError) -> Self {
        DynError::Algebra(e.into())
    }
}

impl DynError {
    /// Whether the failure is numerical rather than a configuration problem.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            DynError::Diverged { .. }
                | DynError::Wave(WaveError::PhaseBranch { .. })
                | DynError::Wave(WaveError::NumericalDomain(_))
        )
    }
}
