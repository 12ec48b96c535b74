//! JSON artifacts written by the subcommands. Every type here re-parses
//! into an equal value.

use std::path::Path;

use serde::{Deserialize, Serialize};

use nlse_gauge::dynamics::Status;
use nlse_gauge::gauge_algebra::{FamilyTag, InvariantSample, InvariantVector, Window};

use crate::commands::VerifyScenario;
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvariantsReport {
    pub window: Window,
    pub invariants: InvariantVector,
    pub samples: Vec<InvariantSample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyReport {
    pub family: FamilyTag,
    /// Only known when classifying coefficients, not bare invariants.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restricted: Option<FamilyTag>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero: Option<[bool; 8]>,
    pub window: Window,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformReport {
    pub t: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub norm: f64,
    /// `max |ρ' − ρ|`; zero up to rounding.
    pub max_density_change: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveReport {
    pub status: Status,
    pub family: FamilyTag,
    pub t0: f64,
    pub t_final: f64,
    pub dt: f64,
    pub steps: usize,
    pub regularized: bool,
    pub max_norm_drift: f64,
    pub edge_mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuityReport {
    pub status: Status,
    pub dt: f64,
    pub centre: f64,
    /// Half-widths of the centred difference, in steps.
    pub spacings: Vec<usize>,
    pub residuals: Vec<f64>,
    pub orders: Vec<f64>,
    pub min_order: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeparationReport {
    pub max_abs_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraReport {
    pub seed: u64,
    pub samples: usize,
    pub associativity: f64,
    pub inverse: f64,
    pub homomorphism: f64,
    /// Largest relative change of an invariant under the coefficient action.
    pub invariance: f64,
    pub invariance_threshold: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyReport<T> {
    pub scenario: VerifyScenario,
    pub verdict: Verdict,
    pub threshold: f64,
    pub report: T,
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(dir.join(name), text)?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de)
        .map_err(|e| CliError::Config(format!("{}: at `{}`: {}", path.display(), e.path(), e.inner())))
}
