use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{AlgebraError, CoefficientVector};
use crate::time_fn::TimeFn;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PresetName {
    Linear,
    #[serde(alias = "BM")]
    Bm,
    Kostin,
    #[serde(alias = "DG")]
    Dg,
    #[serde(alias = "GP", alias = "guerra_pusterla")]
    GuerraPusterla,
}

impl PresetName {
    pub const ALL: [PresetName; 5] = [
        PresetName::Linear,
        PresetName::Bm,
        PresetName::Kostin,
        PresetName::Dg,
        PresetName::GuerraPusterla,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PresetName::Linear => "linear",
            PresetName::Bm => "bm",
            PresetName::Kostin => "kostin",
            PresetName::Dg => "dg",
            PresetName::GuerraPusterla => "guerra-pusterla",
        }
    }
}

impl fmt::Display for PresetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PresetName {
    type Err = AlgebraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        Ok(match key.as_str() {
            "linear" => PresetName::Linear,
            "bm" => PresetName::Bm,
            "kostin" => PresetName::Kostin,
            "dg" => PresetName::Dg,
            "guerra-pusterla" | "gp" => PresetName::GuerraPusterla,
            _ => return Err(AlgebraError::UnknownPreset(s.to_string())),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Units {
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default = "one")]
    pub mass: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for Units {
    fn default() -> Self {
        Units {
            hbar: 1.0,
            mass: 1.0,
        }
    }
}

/// Preset-specific physical constants. Unused entries are ignored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetParams {
    /// Logarithmic coupling.
    #[serde(default)]
    pub b: f64,
    /// Phase friction.
    #[serde(default)]
    pub f: f64,
    /// Diffusion coefficient.
    #[serde(default)]
    pub d: f64,
    /// Scale of the `c_j` couplings; defaults to `d` for DG and to 1 for
    /// Guerra–Pusterla, where `d` vanishes.
    #[serde(default)]
    pub d_prime: Option<f64>,
    #[serde(default)]
    pub c: [f64; 5],
}

impl Default for PresetParams {
    fn default() -> Self {
        PresetParams {
            b: 0.0,
            f: 0.0,
            d: 0.0,
            d_prime: None,
            c: [0.0; 5],
        }
    }
}

/// Coefficient vector of a named equation, with `ν₁ = −ħ/2m`.
pub fn preset(
    name: PresetName,
    units: Units,
    p: &PresetParams,
) -> Result<CoefficientVector, AlgebraError> {
    let Units { hbar, mass } = units;
    if !(hbar > 0.0 && mass > 0.0) {
        return Err(AlgebraError::InvalidPreset(format!(
            "hbar and mass must be positive, got hbar = {hbar}, mass = {mass}"
        )));
    }
    let h2m = hbar / (2.0 * mass);
    let linear = CoefficientVector {
        mu0: TimeFn::constant(1.0 / hbar),
        ..CoefficientVector::linear(-h2m, 1.0)
    };
    Ok(match name {
        PresetName::Linear => linear,
        PresetName::Bm => CoefficientVector {
            alpha1: TimeFn::constant(-p.b / hbar),
            ..linear
        },
        PresetName::Kostin => CoefficientVector {
            alpha2: TimeFn::constant(p.f / mass),
            ..linear
        },
        PresetName::Dg => dg_family(units, p.d, p.d_prime.unwrap_or(p.d), p.c),
        PresetName::GuerraPusterla => {
            let [c1, c2, c3, c4, c5] = p.c;
            if p.d != 0.0 || c1 != 0.0 || c3 != 0.0 || c4 != 0.0 {
                return Err(AlgebraError::InvalidPreset(
                    "guerra-pusterla requires d = 0 and c1 = c3 = c4 = 0".into(),
                ));
            }
            if c5 != 0.0 && c5 != -0.5 * c2 {
                return Err(AlgebraError::InvalidPreset(format!(
                    "guerra-pusterla requires c5 = -c2/2, got c2 = {c2}, c5 = {c5}"
                )));
            }
            dg_family(units, 0.0, p.d_prime.unwrap_or(1.0), [0.0, c2, 0.0, 0.0, -0.5 * c2])
        }
    })
}

fn dg_family(units: Units, d: f64, d_prime: f64, c: [f64; 5]) -> CoefficientVector {
    let Units { hbar, mass } = units;
    let k = hbar * d_prime;
    let cst = TimeFn::constant;
    CoefficientVector {
        nu1: cst(-hbar / (2.0 * mass)),
        nu2: cst(hbar * d / 2.0),
        mu0: cst(1.0 / hbar),
        mu1: cst(k * c[0]),
        mu2: cst(k * c[1] - hbar / (4.0 * mass)),
        mu3: cst(k * c[2] + hbar / (2.0 * mass)),
        mu4: cst(k * c[3]),
        mu5: cst(k * c[4] + hbar / (8.0 * mass)),
        alpha1: TimeFn::zero(),
        alpha2: TimeFn::zero(),
    }
}
