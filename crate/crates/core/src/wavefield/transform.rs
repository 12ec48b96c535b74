use std::ops::Range;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fields::unwrap_unchecked;
use super::{unwrap_phase, Floors, GridSpec, WaveError, WaveFunction};
use crate::gauge_algebra::{AffineGaugeElement, GaugeElement};

/// Whether `exp(iΛ arg ψ)` is independent of the branch of arg ψ.
fn branch_free(lambda: f64) -> bool {
    lambda.fract() == 0.0
}

fn rotate(z: Complex64, phase: f64) -> Complex64 {
    let r = z.norm();
    if r == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::from_polar(r, phase)
}

/// `ψ ↦ |ψ| exp[i(γ ln|ψ| + Λ arg ψ + θ(x, t))]` at time `t`.
///
/// For integer Λ the principal argument is used. Otherwise arg ψ is the
/// unwrapped phase, which needs |ψ| ≥ ε_phase everywhere.
pub fn apply_gauge(
    g: &GaugeElement,
    psi: &WaveFunction,
    t: f64,
    floors: &Floors,
) -> Result<WaveFunction, WaveError> {
    let (gamma, lambda) = g.params_at(t)?;
    let phase: Vec<f64> = if branch_free(lambda) {
        psi.values.iter().map(|z| z.arg()).collect()
    } else {
        unwrap_phase(psi, floors)?.phase
    };
    let grid = psi.grid;
    let mut values = Vec::with_capacity(grid.n());
    for (i, z) in psi.values.iter().enumerate() {
        let r = z.norm();
        let theta = g.theta.eval(grid.x(i), t)?;
        let log_part = if r > 0.0 { gamma * r.ln() } else { 0.0 };
        values.push(rotate(*z, log_part + lambda * phase[i] + theta));
    }
    Ok(WaveFunction {
        grid,
        time_tag: psi.time_tag,
        values,
    })
}

/// `ψ ↦ |ψ| exp[i(k(|ψ|, x, t) + λ(x, t) arg ψ)]`, with the same branch
/// rule as [`apply_gauge`] applied pointwise to λ.
pub fn apply_affine(
    a: &AffineGaugeElement,
    psi: &WaveFunction,
    t: f64,
    floors: &Floors,
) -> Result<WaveFunction, WaveError> {
    let grid = psi.grid;
    let lambdas = (0..grid.n())
        .map(|i| a.lambda(grid.x(i), t))
        .collect::<Result<Vec<_>, _>>()?;
    let phase: Vec<f64> = if lambdas.iter().all(|l| branch_free(*l)) {
        psi.values.iter().map(|z| z.arg()).collect()
    } else {
        unwrap_phase(psi, floors)?.phase
    };
    let values = psi
        .values
        .iter()
        .enumerate()
        .map(|(i, z)| {
            let r = z.norm();
            if r == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            rotate(*z, a.k(r, grid.x(i), t) + lambdas[i] * phase[i])
        })
        .collect();
    Ok(WaveFunction {
        grid,
        time_tag: psi.time_tag,
        values,
    })
}

/// Union of half-open index ranges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntervalSet(pub Vec<Range<usize>>);

impl IntervalSet {
    pub fn whole(grid: &GridSpec) -> Self {
        IntervalSet(vec![0..grid.n()])
    }

    /// Points with `x ≥ 0`.
    pub fn right_half(grid: &GridSpec) -> Self {
        IntervalSet(vec![grid.n() / 2..grid.n()])
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.iter().any(|r| r.contains(&i))
    }
}

/// Positional measurement on `b`: zero outside, renormalized inside.
pub fn measure_project(psi: &WaveFunction, b: &IntervalSet) -> Result<WaveFunction, WaveError> {
    let n = psi.grid.n();
    if let Some(r) = b.0.iter().find(|r| r.end > n || r.start > r.end) {
        return Err(WaveError::InvalidRegion(format!(
            "range {}..{} does not fit a grid of {n} points",
            r.start, r.end
        )));
    }
    let values: Vec<Complex64> = psi
        .values
        .iter()
        .enumerate()
        .map(|(i, z)| if b.contains(i) { *z } else { Complex64::new(0.0, 0.0) })
        .collect();
    let p: f64 = values.iter().map(|z| z.norm_sqr()).sum::<f64>() * psi.grid.dx();
    if !(p > 0.0) {
        return Err(WaveError::EmptyRegion);
    }
    let s = p.sqrt();
    Ok(WaveFunction {
        grid: psi.grid,
        time_tag: psi.time_tag,
        values: values.into_iter().map(|z| z / s).collect(),
    })
}

/// Two-particle amplitude on `grid × grid`, row-major in `(x₁, x₂)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoParticleState {
    pub grid: GridSpec,
    pub time_tag: f64,
    pub values: Vec<Complex64>,
}

impl TwoParticleState {
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.grid.n() + j]
    }

    pub fn norm(&self) -> f64 {
        let dx = self.grid.dx();
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx * dx
    }

    pub fn max_abs_diff(&self, other: &TwoParticleState) -> Result<f64, WaveError> {
        self.grid.check_same(&other.grid)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

pub fn product_state(a: &WaveFunction, b: &WaveFunction) -> Result<TwoParticleState, WaveError> {
    a.grid.check_same(&b.grid)?;
    let mut values = Vec::with_capacity(a.len() * b.len());
    for za in &a.values {
        for zb in &b.values {
            values.push(za * zb);
        }
    }
    Ok(TwoParticleState {
        grid: a.grid,
        time_tag: a.time_tag,
        values,
    })
}

/// The two-particle extension of [`apply_gauge`] with `θ₂(x₁, x₂) = θ(x₁) + θ(x₂)`.
///
/// For non-integer Λ the phase is unwrapped down the first column and then
/// along each row.
pub fn apply_gauge_two(
    g: &GaugeElement,
    psi: &TwoParticleState,
    t: f64,
    floors: &Floors,
) -> Result<TwoParticleState, WaveError> {
    let (gamma, lambda) = g.params_at(t)?;
    let grid = psi.grid;
    let n = grid.n();
    let phase: Vec<f64> = if branch_free(lambda) {
        psi.values.iter().map(|z| z.arg()).collect()
    } else {
        let max = psi.values.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let floor = floors.eps_phase(max);
        if let Some((index, z)) = psi.values.iter().enumerate().find(|(_, z)| !(z.norm() >= floor && z.norm() > 0.0)) {
            return Err(WaveError::PhaseBranch {
                index,
                modulus: z.norm(),
                floor,
            });
        }
        let column: Vec<Complex64> = (0..n).map(|i| psi.at(i, 0)).collect();
        let col_phase = unwrap_unchecked(&column).phase;
        let mut out = Vec::with_capacity(n * n);
        for (i, &c) in col_phase.iter().enumerate() {
            let row = &psi.values[i * n..(i + 1) * n];
            let u = unwrap_unchecked(row).phase;
            let offset = c - u[0];
            out.extend(u.iter().map(|s| s + offset));
        }
        out
    };
    let thetas = (0..n)
        .map(|i| g.theta.eval(grid.x(i), t))
        .collect::<Result<Vec<_>, _>>()?;
    let values = psi
        .values
        .iter()
        .enumerate()
        .map(|(idx, z)| {
            let (i, j) = (idx / n, idx % n);
            let r = z.norm();
            let log_part = if r > 0.0 { gamma * r.ln() } else { 0.0 };
            rotate(*z, log_part + lambda * phase[idx] + thetas[i] + thetas[j])
        })
        .collect();
    Ok(TwoParticleState {
        grid,
        time_tag: psi.time_tag,
        values,
    })
}
