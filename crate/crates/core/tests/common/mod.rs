//! Oracles shared by the integration and acceptance tests. None of them call
//! into the code paths they check.

#![allow(dead_code)]

use nlse_gauge::wavefield::{GridSpec, WaveFunction};
use num_complex::Complex64;

/// Lower-triangular action on `(ν₁, ν₂, μ₀, μ₁, …, μ₅)` for constant `(γ, Λ)`,
/// written out entry by entry.
pub fn action_matrix(gamma: f64, lambda: f64) -> [[f64; 8]; 8] {
    let (g, l) = (gamma, lambda);
    let mut m = [[0.0; 8]; 8];
    m[0][0] = 1.0 / l;
    m[1][0] = -g / (2.0 * l);
    m[1][1] = 1.0;
    m[2][2] = l;
    m[3][0] = -g / l;
    m[3][3] = 1.0;
    m[4][0] = g * g / (2.0 * l);
    m[4][1] = -g;
    m[4][3] = -g / 2.0;
    m[4][4] = l;
    m[5][5] = 1.0 / l;
    m[6][5] = -g / l;
    m[6][6] = 1.0;
    m[7][5] = g * g / (4.0 * l);
    m[7][6] = -g / 2.0;
    m[7][7] = l;
    m
}

pub fn matvec8(m: &[[f64; 8]; 8], v: &[f64; 8]) -> [f64; 8] {
    let mut out = [0.0; 8];
    for i in 0..8 {
        for j in 0..8 {
            out[i] += m[i][j] * v[j];
        }
    }
    out
}

fn free_line(nu1: f64, x0: f64, sigma: f64, k0: f64, t: f64, x: f64) -> Complex64 {
    let tau = -2.0 * nu1 * t;
    let i = Complex64::new(0.0, 1.0);
    let s = Complex64::new(sigma, tau / (2.0 * sigma));
    let pre = (2.0 * std::f64::consts::PI).powf(-0.25) / s.sqrt();
    let d = x - x0 - k0 * tau;
    let den = Complex64::new(4.0 * sigma * sigma, 2.0 * tau);
    pre * (-(d * d) / den + i * k0 * (x - 0.5 * k0 * tau)).exp()
}

/// Exact free solution of `i∂ψ/∂t = ν₁ ∂²ψ/∂x²` on the line from the
/// normalized Gaussian with density width σ, centre `x0` and wavenumber `k0`.
pub fn free_gaussian(grid: GridSpec, nu1: f64, x0: f64, sigma: f64, k0: f64, t: f64) -> WaveFunction {
    WaveFunction::from_fn(grid, t, |x| free_line(nu1, x0, sigma, k0, t, x))
}

/// The same solution summed over periodic images, exact on the box when
/// `k0` is a box wavenumber.
pub fn free_gaussian_periodic(grid: GridSpec, nu1: f64, x0: f64, sigma: f64, k0: f64, t: f64) -> WaveFunction {
    let l = grid.length();
    WaveFunction::from_fn(grid, t, |x| {
        (-4..=4).map(|m| free_line(nu1, x0, sigma, k0, t, x - m as f64 * l)).sum()
    })
}

/// Coherent state of `V = x²/2` (ħ = m = ω = 1) started at rest at `x0`.
pub fn harmonic_coherent(grid: GridSpec, x0: f64, t: f64) -> WaveFunction {
    let norm = std::f64::consts::PI.powf(-0.25);
    WaveFunction::from_fn(grid, t, |x| {
        let c = x0 * t.cos();
        let phase = -(0.5 * t + x * x0 * t.sin() - 0.25 * x0 * x0 * (2.0 * t).sin());
        Complex64::from_polar(norm * (-(x - c) * (x - c) / 2.0).exp(), phase)
    })
}

/// Stationary profile `(2b/π)^{1/4} exp(−b x²)` of the logarithmic equation.
pub fn gausson(grid: GridSpec, b: f64) -> WaveFunction {
    let a = (2.0 * b / std::f64::consts::PI).powf(0.25);
    WaveFunction::from_fn(grid, 0.0, |x| Complex64::new(a * (-b * x * x).exp(), 0.0))
}

/// Nodeless packet: Gaussian on a small floor with a periodic phase
/// `a sin(2πx/L)`, normalized.
pub fn floored_packet(grid: GridSpec, sigma: f64, floor: f64, a: f64) -> WaveFunction {
    let q = 2.0 * std::f64::consts::PI / grid.length();
    WaveFunction::from_fn(grid, 0.0, |x| {
        Complex64::from_polar((-x * x / (4.0 * sigma * sigma)).exp() + floor, a * (q * x).sin())
    })
    .normalized()
}

pub fn width(psi: &WaveFunction) -> f64 {
    (psi.mean_x2() - psi.mean_x().powi(2)).sqrt()
}

pub fn rel_l2(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}
