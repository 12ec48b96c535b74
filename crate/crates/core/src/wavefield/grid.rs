use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::WaveError;

/// Periodic uniform grid `x_i = −L/2 + i·dx`, `dx = L/n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid")]
pub struct GridSpec {
    n: usize,
    length: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    n: usize,
    length: f64,
}

impl TryFrom<RawGrid> for GridSpec {
    type Error = WaveError;

    fn try_from(r: RawGrid) -> Result<Self, Self::Error> {
        GridSpec::new(r.n, r.length)
    }
}

impl GridSpec {
    pub const MIN_POINTS: usize = 16;

    pub fn new(n: usize, length: f64) -> Result<Self, WaveError> {
        if n < Self::MIN_POINTS || !n.is_power_of_two() {
            return Err(WaveError::InvalidGrid(format!(
                "n must be a power of two and at least {}, got {n}",
                Self::MIN_POINTS
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(WaveError::InvalidGrid(format!(
                "box length must be positive, got {length}"
            )));
        }
        Ok(GridSpec { n, length })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        -0.5 * self.length + i as f64 * self.dx()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Angular wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let dk = 2.0 * PI / self.length;
        let n = self.n as isize;
        (0..n)
            .map(|j| if j < n / 2 { j } else { j - n })
            .map(|j| j as f64 * dk)
            .collect()
    }

    pub fn spectral(&self) -> Spectral1d {
        Spectral1d::new(*self)
    }

    pub fn check_same(&self, other: &GridSpec) -> Result<(), WaveError> {
        if self != other {
            return Err(WaveError::GridMismatch {
                left: *self,
                right: *other,
            });
        }
        Ok(())
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n = {}, L = {}", self.n, self.length)
    }
}

/// Spatial derivative operators on sampled fields.
///
/// Field routines are written against this trait only.
pub trait SpectralDerivative {
    fn gradient(&self, f: &[Complex64]) -> Vec<Complex64>;
    fn laplacian(&self, f: &[Complex64]) -> Vec<Complex64>;

    /// Gradients of two real fields in one pass: `(∇a, ∇b)`.
    fn gradient_pair(&self, a: &[f64], b: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let packed: Vec<Complex64> = a.iter().zip(b).map(|(&x, &y)| Complex64::new(x, y)).collect();
        let d = self.gradient(&packed);
        (d.iter().map(|z| z.re).collect(), d.iter().map(|z| z.im).collect())
    }

    fn laplacian_real(&self, a: &[f64]) -> Vec<f64> {
        let packed: Vec<Complex64> = a.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.laplacian(&packed).iter().map(|z| z.re).collect()
    }
}

/// Fourier differentiation on a [`GridSpec`]. The Nyquist mode is dropped
/// for odd derivatives so real fields map to real fields.
#[derive(Clone)]
pub struct Spectral1d {
    grid: GridSpec,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    ik: Vec<Complex64>,
    minus_k2: Vec<f64>,
}

impl fmt::Debug for Spectral1d {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Spectral1d").field("grid", &self.grid).finish()
    }
}

impl Spectral1d {
    pub fn new(grid: GridSpec) -> Self {
        let mut planner = FftPlanner::new();
        let n = grid.n();
        let k = grid.wavenumbers();
        let ik = k
            .iter()
            .enumerate()
            .map(|(j, &kj)| if j == n / 2 { Complex64::new(0.0, 0.0) } else { Complex64::new(0.0, kj) })
            .collect();
        Spectral1d {
            grid,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            ik,
            minus_k2: k.iter().map(|kj| -kj * kj).collect(),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    fn apply(&self, f: &[Complex64], mult: impl Fn(usize) -> Complex64) -> Vec<Complex64> {
        let mut buf = f.to_vec();
        self.forward.process(&mut buf);
        let scale = 1.0 / self.grid.n() as f64;
        for (j, z) in buf.iter_mut().enumerate() {
            *z *= mult(j) * scale;
        }
        self.inverse.process(&mut buf);
        buf
    }

    /// Two-thirds rule: removes modes with `|k| > (2/3) k_max`.
    pub fn dealias(&self, f: &[Complex64]) -> Vec<Complex64> {
        let n = self.grid.n();
        let cut = n / 3;
        self.apply(f, |j| {
            let m = if j <= n / 2 { j } else { n - j };
            Complex64::new(if m <= cut { 1.0 } else { 0.0 }, 0.0)
        })
    }

    /// Multiplies the spectrum by `exp(i k a)`, i.e. samples `f(x + a)`.
    pub fn shift(&self, f: &[Complex64], a: f64) -> Vec<Complex64> {
        let k = self.grid.wavenumbers();
        let n = self.grid.n();
        self.apply(f, |j| {
            if j == n / 2 {
                Complex64::new((k[j] * a).cos(), 0.0)
            } else {
                Complex64::from_polar(1.0, k[j] * a)
            }
        })
    }
}

impl SpectralDerivative for Spectral1d {
    fn gradient(&self, f: &[Complex64]) -> Vec<Complex64> {
        self.apply(f, |j| self.ik[j])
    }

    fn laplacian(&self, f: &[Complex64]) -> Vec<Complex64> {
        self.apply(f, |j| Complex64::new(self.minus_k2[j], 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(8, 1.0).is_err());
        assert!(GridSpec::new(100, 1.0).is_err());
        assert!(GridSpec::new(64, 0.0).is_err());
        let g = GridSpec::new(64, 8.0).unwrap();
        assert_eq!(g.dx(), 0.125);
        assert_eq!(g.x(0), -4.0);
        assert_eq!(g.x(32), 0.0);
        assert!(serde_json::from_str::<GridSpec>(r#"{"n": 12, "length": 1.0}"#).is_err());
    }

    #[test]
    fn derivatives_of_trig_modes() {
        let g = GridSpec::new(64, 2.0 * PI).unwrap();
        let s = g.spectral();
        let f: Vec<Complex64> = g.xs().iter().map(|&x| Complex64::new((3.0 * x).sin(), 0.0)).collect();
        let d = s.gradient(&f);
        let l = s.laplacian(&f);
        for (i, &x) in g.xs().iter().enumerate() {
            assert!((d[i].re - 3.0 * (3.0 * x).cos()).abs() < 1e-12);
            assert!((l[i].re + 9.0 * (3.0 * x).sin()).abs() < 1e-11);
        }
        let (a, b) = s.gradient_pair(&g.xs().iter().map(|x| x.cos()).collect::<Vec<_>>(), &vec![1.0; 64]);
        for (i, &x) in g.xs().iter().enumerate() {
            assert!((a[i] + x.sin()).abs() < 1e-12);
            assert!(b[i].abs() < 1e-12);
        }
    }

    #[test]
    fn shift_translates() {
        let g = GridSpec::new(128, 20.0).unwrap();
        let s = g.spectral();
        let f: Vec<Complex64> = g.xs().iter().map(|&x| Complex64::new((-x * x).exp(), 0.0)).collect();
        let shifted = s.shift(&f, 0.3);
        for (i, &x) in g.xs().iter().enumerate() {
            assert!((shifted[i].re - (-(x + 0.3) * (x + 0.3)).exp()).abs() < 1e-12);
        }
    }
}
