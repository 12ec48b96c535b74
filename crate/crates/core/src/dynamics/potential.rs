use serde::{Deserialize, Serialize};

use super::DynError;
use crate::wavefield::GridSpec;

/// External potential V(x).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case", deny_unknown_fields)]
pub enum Potential {
    #[default]
    Zero,
    /// `½ ω² (x − center)²`.
    Harmonic {
        omega: f64,
        #[serde(default)]
        center: f64,
    },
    /// `v0 cos(2π m x / L)`, periodic on the box.
    Cosine { v0: f64, m: i64 },
    /// Values on the grid points.
    Samples(Vec<f64>),
}

impl Potential {
    pub fn is_zero(&self) -> bool {
        match self {
            Potential::Zero => true,
            Potential::Harmonic { omega, .. } => *omega == 0.0,
            Potential::Cosine { v0, .. } => *v0 == 0.0,
            Potential::Samples(v) => v.iter().all(|x| *x == 0.0),
        }
    }

    pub fn sample(&self, grid: &GridSpec) -> Result<Vec<f64>, DynError> {
        let l = grid.length();
        Ok(match self {
            Potential::Zero => vec![0.0; grid.n()],
            Potential::Harmonic { omega, center } => grid
                .xs()
                .iter()
                .map(|x| 0.5 * omega * omega * (x - center).powi(2))
                .collect(),
            Potential::Cosine { v0, m } => grid
                .xs()
                .iter()
                .map(|x| v0 * (2.0 * std::f64::consts::PI * *m as f64 * x / l).cos())
                .collect(),
            Potential::Samples(v) => {
                if v.len() != grid.n() {
                    return Err(DynError::Spec(format!(
                        "potential has {} samples, grid has {}",
                        v.len(),
                        grid.n()
                    )));
                }
                v.clone()
            }
        })
    }

    /// `∇V` on the grid: closed form where available, otherwise a periodic
    /// fourth-order difference.
    pub fn gradient(&self, grid: &GridSpec) -> Result<Vec<f64>, DynError> {
        let l = grid.length();
        Ok(match self {
            Potential::Zero => vec![0.0; grid.n()],
            Potential::Harmonic { omega, center } => {
                grid.xs().iter().map(|x| omega * omega * (x - center)).collect()
            }
            Potential::Cosine { v0, m } => {
                let q = 2.0 * std::f64::consts::PI * *m as f64 / l;
                grid.xs().iter().map(|x| -v0 * q * (q * x).sin()).collect()
            }
            Potential::Samples(_) => {
                let v = self.sample(grid)?;
                let n = v.len();
                let h = grid.dx();
                (0..n)
                    .map(|i| {
                        let at = |o: isize| v[(i as isize + o).rem_euclid(n as isize) as usize];
                        (at(-2) - 8.0 * at(-1) + 8.0 * at(1) - at(2)) / (12.0 * h)
                    })
                    .collect()
            }
        })
    }
}
