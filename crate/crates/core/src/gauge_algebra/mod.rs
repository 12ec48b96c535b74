//! The nonlinear gauge group, its representations, and its action on the
//! ten-parameter NLSE coefficient space.

mod affine;
mod coefficients;
mod group;
mod invariants;
mod presets;
pub mod sampling;

use thiserror::Error;

use crate::time_fn::TimeFnError;

pub use affine::AffineGaugeElement;
pub use coefficients::{
    act_on_coefficients, closure_coefficients, ActedCoefficients, ActionNote, CoefficientSample,
    CoefficientVector, F1Params, F3Params, LinearParams,
};
pub use group::{mat3_mul, GaugeElement, SpatialProfile, ThetaField, ThetaTerm};
pub use invariants::{
    classify, classify_restricted, invariants, Classification, FamilyTag, InvariantSample,
    InvariantVector, Window, EPS_CLS,
};
pub use presets::{preset, PresetName, PresetParams, Units};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("degenerate gauge element: lambda vanishes{}", at(*t))]
    DegenerateLambda { t: Option<f64> },
    #[error("degenerate affine element: lambda vanishes at x = {x}, t = {t}")]
    DegenerateAffine { x: f64, t: f64 },
    #[error("nu1 vanishes{}", at(*t))]
    DegenerateNu1 { t: Option<f64> },
    #[error("invariants are singular: nu1 vanishes at t = {t}")]
    SingularInvariant { t: f64 },
    #[error("the coefficient action is defined for theta = 0 only")]
    ThetaNotSupported,
    #[error("unknown preset '{0}' (expected linear, bm, kostin, dg or guerra-pusterla)")]
    UnknownPreset(String),
    #[error("invalid preset parameter: {0}")]
    InvalidPreset(String),
    #[error("empty classification window")]
    EmptyWindow,
    #[error(transparent)]
    Domain(#[from] TimeFnError),
}

fn at(t: Option<f64>) -> String {
    t.map(|t| format!(" at t = {t}")).unwrap_or_default()
}
