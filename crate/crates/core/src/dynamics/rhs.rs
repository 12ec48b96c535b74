use num_complex::Complex64;

use super::{DynError, Potential, RhsForm};
use crate::gauge_algebra::{CoefficientSample, CoefficientVector};
use crate::wavefield::{
    functionals, unwrap_phase, Floors, GridSpec, Spectral1d, SpectralDerivative, WaveFunction,
};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Per-evaluation flags.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RhsFlags {
    pub regularized: bool,
}

/// The time derivative `∂ψ/∂t` for a fixed coefficient vector and potential.
#[derive(Debug, Clone)]
pub struct Rhs {
    grid: GridSpec,
    spectral: Spectral1d,
    coefficients: CoefficientVector,
    potential: Vec<f64>,
    floors: Floors,
    form: RhsForm,
    dealias: bool,
}

impl Rhs {
    pub fn new(
        grid: GridSpec,
        coefficients: CoefficientVector,
        potential: &Potential,
        floors: Floors,
        form: RhsForm,
    ) -> Result<Self, DynError> {
        Ok(Rhs {
            spectral: grid.spectral(),
            potential: potential.sample(&grid)?,
            grid,
            coefficients,
            floors,
            form,
            dealias: true,
        })
    }

    pub fn with_dealias(mut self, on: bool) -> Self {
        self.dealias = on;
        self
    }

    pub fn spectral(&self) -> &Spectral1d {
        &self.spectral
    }

    pub fn coefficients(&self) -> &CoefficientVector {
        &self.coefficients
    }

    pub fn eval(&self, values: &[Complex64], t: f64) -> Result<(Vec<Complex64>, RhsFlags), DynError> {
        let c = self.coefficients.sample(t)?;
        let psi = WaveFunction {
            grid: self.grid,
            time_tag: t,
            values: values.to_vec(),
        };
        match self.form {
            RhsForm::Separated => self.separated(&psi, &c),
            RhsForm::Functional => self.functional(&psi, &c),
        }
    }

    /// Real multiplicative part `α₁ ln|ψ|² + α₂ arg ψ` per point.
    fn alpha_terms(&self, psi: &WaveFunction, c: &CoefficientSample, eps: f64) -> Result<Vec<f64>, DynError> {
        let n = psi.len();
        let mut out = vec![0.0; n];
        if c.alpha1 != 0.0 {
            for (o, z) in out.iter_mut().zip(&psi.values) {
                *o += c.alpha1 * (z.norm_sqr() + eps).ln();
            }
        }
        if c.alpha2 != 0.0 {
            let s = unwrap_phase(psi, &self.floors)?;
            for (o, p) in out.iter_mut().zip(&s.phase) {
                *o += c.alpha2 * p;
            }
        }
        Ok(out)
    }

    fn log_floor(&self, psi: &WaveFunction) -> f64 {
        let rho: Vec<f64> = psi.density();
        let max = rho.iter().cloned().fold(0.0, f64::max);
        let eps = self.floors.eps_reg(max);
        if rho.iter().any(|&r| r < eps) {
            eps
        } else {
            0.0
        }
    }

    fn separated(&self, psi: &WaveFunction, c: &CoefficientSample) -> Result<(Vec<Complex64>, RhsFlags), DynError> {
        let lap = self.spectral.laplacian(&psi.values);
        let n = psi.len();
        let mut h: Vec<Complex64> = (0..n)
            .map(|i| c.nu1 * lap[i] + c.mu0 * self.potential[i] * psi.values[i])
            .collect();
        let [b_nu2, b1, b2, b3, b4, b5, _] = c.nonlinear_brackets();
        let mut flags = RhsFlags::default();
        if [b_nu2, b1, b2, b3, b4, b5].iter().any(|b| *b != 0.0) {
            let f = functionals(psi, &self.spectral, &self.floors)?;
            flags.regularized = f.regularized;
            let nl: Vec<Complex64> = (0..n)
                .map(|i| {
                    let real = b1 * f.r1[i] + b2 * f.r2[i] + b3 * f.r3[i] + b4 * f.r4[i] + b5 * f.r5[i];
                    (I * (b_nu2 * f.r2[i]) + real) * psi.values[i]
                })
                .collect();
            let nl = if self.dealias { self.spectral.dealias(&nl) } else { nl };
            for i in 0..n {
                h[i] += nl[i];
            }
        }
        if c.alpha1 != 0.0 || c.alpha2 != 0.0 {
            let eps = self.log_floor(psi);
            flags.regularized |= eps > 0.0 && c.alpha1 != 0.0;
            let a = self.alpha_terms(psi, c, eps)?;
            for i in 0..n {
                h[i] += a[i] * psi.values[i];
            }
        }
        finish(h, flags)
    }

    fn functional(&self, psi: &WaveFunction, c: &CoefficientSample) -> Result<(Vec<Complex64>, RhsFlags), DynError> {
        let f = functionals(psi, &self.spectral, &self.floors)?;
        let n = psi.len();
        let mut flags = RhsFlags {
            regularized: f.regularized,
        };
        let mut h: Vec<Complex64> = (0..n)
            .map(|i| {
                let imag = c.nu1 * f.r1[i] + c.nu2 * f.r2[i];
                let real = c.mu1 * f.r1[i]
                    + c.mu2 * f.r2[i]
                    + c.mu3 * f.r3[i]
                    + c.mu4 * f.r4[i]
                    + c.mu5 * f.r5[i]
                    + c.mu0 * self.potential[i];
                (I * imag + real) * psi.values[i]
            })
            .collect();
        if c.alpha1 != 0.0 || c.alpha2 != 0.0 {
            let eps = self.log_floor(psi);
            flags.regularized |= eps > 0.0 && c.alpha1 != 0.0;
            let a = self.alpha_terms(psi, c, eps)?;
            for i in 0..n {
                h[i] += a[i] * psi.values[i];
            }
        }
        finish(h, flags)
    }
}

/// `∂ψ/∂t = −i H`.
fn finish(h: Vec<Complex64>, flags: RhsFlags) -> Result<(Vec<Complex64>, RhsFlags), DynError> {
    if h.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(DynError::Wave(crate::wavefield::WaveError::NumericalDomain(
            "non-finite right-hand side".into(),
        )));
    }
    Ok((h.into_iter().map(|z| -I * z).collect(), flags))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time_fn::TimeFn;
    use std::f64::consts::PI;

    fn grid() -> GridSpec {
        GridSpec::new(128, 20.0).unwrap()
    }

    fn rhs(c: CoefficientVector, form: RhsForm) -> Rhs {
        Rhs::new(grid(), c, &Potential::Zero, Floors::default(), form).unwrap()
    }

    #[test]
    fn plane_wave_dispersion() {
        let psi = WaveFunction::plane_wave(grid(), 4);
        let k = 2.0 * PI * 4.0 / 20.0;
        for form in [RhsForm::Separated, RhsForm::Functional] {
            let (d, _) = rhs(CoefficientVector::linear(-0.5, 1.0), form).eval(&psi.values, 0.0).unwrap();
            for (dz, z) in d.iter().zip(&psi.values) {
                assert!((dz - (-I * 0.5 * k * k) * z).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn alpha_terms_rotate_phase_only() {
        let (r, s) = (0.6, 0.3);
        let psi = WaveFunction::from_fn(grid(), 0.0, |_| Complex64::from_polar(r, s));
        let c = CoefficientVector {
            alpha1: TimeFn::constant(0.7),
            alpha2: TimeFn::constant(-0.2),
            ..CoefficientVector::linear(-0.5, 1.0)
        };
        let (d, _) = rhs(c, RhsForm::Separated).eval(&psi.values, 0.0).unwrap();
        let rate = 0.7 * (r * r).ln() - 0.2 * s;
        for (dz, z) in d.iter().zip(&psi.values) {
            assert!((dz - (-I * rate) * z).norm() < 1e-14);
            assert!((dz * z.conj()).re.abs() < 1e-15);
        }
    }

    #[test]
    fn both_assemblies_agree_on_smooth_state() {
        let g = grid();
        let l = g.length();
        let psi = WaveFunction::from_fn(g, 0.0, |x| {
            let q = 2.0 * PI / l;
            let amp = 1.0 + 0.3 * (q * x).cos() + 0.2 * (2.0 * q * x + 0.4).sin();
            Complex64::from_polar(amp, 0.8 * (q * x).sin() - 0.3 * (3.0 * q * x).cos())
        });
        let c = CoefficientVector::from_constants([-0.5, 0.2, 1.0, 0.3, -0.4, 0.7, -0.1, 0.25, 0.0, 0.0]);
        let (a, _) = rhs(c.clone(), RhsForm::Separated).eval(&psi.values, 0.0).unwrap();
        let (b, _) = rhs(c, RhsForm::Functional).eval(&psi.values, 0.0).unwrap();
        let num: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
        let den: f64 = a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        assert!(num / den < 1e-10, "{}", num / den);
    }

    #[test]
    fn phase_term_needs_nonvanishing_state() {
        let c = CoefficientVector {
            alpha2: TimeFn::constant(0.1),
            ..CoefficientVector::linear(-0.5, 1.0)
        };
        let psi = WaveFunction::gaussian(grid(), 0.0, 0.5, 0.0);
        assert!(matches!(
            rhs(c, RhsForm::Separated).eval(&psi.values, 0.0),
            Err(DynError::Wave(crate::wavefield::WaveError::PhaseBranch { .. }))
        ));
    }
}
