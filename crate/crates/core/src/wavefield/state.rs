use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{GridSpec, SpectralDerivative, WaveError};

/// Complex samples on a periodic grid plus the time they refer to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveFunction {
    pub grid: GridSpec,
    #[serde(default)]
    pub time_tag: f64,
    pub values: Vec<Complex64>,
}

/// Fraction of the box on each side treated as the edge region.
pub const EDGE_FRACTION: f64 = 0.05;

impl WaveFunction {
    pub fn new(grid: GridSpec, values: Vec<Complex64>, time_tag: f64) -> Result<Self, WaveError> {
        if values.len() != grid.n() {
            return Err(WaveError::InvalidState(format!(
                "expected {} samples, got {}",
                grid.n(),
                values.len()
            )));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(WaveError::NumericalDomain("non-finite sample".into()));
        }
        Ok(WaveFunction {
            grid,
            time_tag,
            values,
        })
    }

    pub fn from_fn(grid: GridSpec, time_tag: f64, f: impl Fn(f64) -> Complex64) -> Self {
        WaveFunction {
            grid,
            time_tag,
            values: grid.xs().into_iter().map(f).collect(),
        }
    }

    /// Normalized `exp(−(x−x₀)²/(4σ²) + i k₀ x)`, so that |ψ|² has standard
    /// deviation σ.
    pub fn gaussian(grid: GridSpec, x0: f64, sigma: f64, k0: f64) -> Self {
        WaveFunction::from_fn(grid, 0.0, |x| {
            let d = x - x0;
            Complex64::from_polar((-d * d / (4.0 * sigma * sigma)).exp(), k0 * x)
        })
        .normalized()
    }

    /// Gaussian summed over periodic images, smooth on the torus.
    pub fn periodic_gaussian(grid: GridSpec, x0: f64, sigma: f64) -> Self {
        let l = grid.length();
        WaveFunction::from_fn(grid, 0.0, |x| {
            let s: f64 = (-3..=3)
                .map(|m| {
                    let d = x - x0 - m as f64 * l;
                    (-d * d / (4.0 * sigma * sigma)).exp()
                })
                .sum();
            Complex64::new(s, 0.0)
        })
        .normalized()
    }

    /// `e^{ikx}` with `k = 2πm/L`, normalized on the box.
    pub fn plane_wave(grid: GridSpec, m: i64) -> Self {
        let k = 2.0 * PI * m as f64 / grid.length();
        WaveFunction::from_fn(grid, 0.0, |x| Complex64::from_polar(1.0, k * x)).normalized()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn modulus(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm()).collect()
    }

    pub fn max_modulus(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Squared L² norm `Σ|ψ_i|² dx`.
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    pub fn normalized(mut self) -> Self {
        let s = self.norm().sqrt();
        if s > 0.0 {
            for z in &mut self.values {
                *z /= s;
            }
        }
        self
    }

    pub fn with_time(mut self, t: f64) -> Self {
        self.time_tag = t;
        self
    }

    pub fn conj(&self) -> Self {
        WaveFunction {
            values: self.values.iter().map(|z| z.conj()).collect(),
            ..self.clone()
        }
    }

    pub fn mean_x(&self) -> f64 {
        let dx = self.grid.dx();
        let num: f64 = self
            .values
            .iter()
            .enumerate()
            .map(|(i, z)| self.grid.x(i) * z.norm_sqr())
            .sum::<f64>();
        num * dx / self.norm()
    }

    pub fn mean_x2(&self) -> f64 {
        let dx = self.grid.dx();
        let num: f64 = self
            .values
            .iter()
            .enumerate()
            .map(|(i, z)| self.grid.x(i).powi(2) * z.norm_sqr())
            .sum::<f64>();
        num * dx / self.norm()
    }

    /// `⟨−i∇⟩` with a spectral derivative.
    pub fn mean_p(&self, d: &impl SpectralDerivative) -> f64 {
        let grad = d.gradient(&self.values);
        let num: f64 = self
            .values
            .iter()
            .zip(&grad)
            .map(|(z, g)| (z.conj() * g).im)
            .sum();
        num * self.grid.dx() / self.norm()
    }

    /// Probability carried by the outer [`EDGE_FRACTION`] of the box.
    pub fn edge_mass(&self) -> f64 {
        let half = 0.5 * self.grid.length();
        let cut = half * (1.0 - 2.0 * EDGE_FRACTION);
        let dx = self.grid.dx();
        let m: f64 = self
            .values
            .iter()
            .enumerate()
            .filter(|(i, _)| self.grid.x(*i).abs() >= cut)
            .map(|(_, z)| z.norm_sqr())
            .sum();
        m * dx / self.norm()
    }

    /// Largest pointwise `|a − b|`.
    pub fn max_abs_diff(&self, other: &WaveFunction) -> Result<f64, WaveError> {
        self.grid.check_same(&other.grid)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Largest pointwise density difference.
    pub fn max_density_diff(&self, other: &WaveFunction) -> Result<f64, WaveError> {
        self.grid.check_same(&other.grid)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a.norm_sqr() - b.norm_sqr()).abs())
            .fold(0.0, f64::max))
    }
}
