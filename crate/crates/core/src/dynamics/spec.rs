use serde::{Deserialize, Serialize};

use super::{DynError, Potential};
use crate::gauge_algebra::{CoefficientSample, CoefficientVector};
use crate::wavefield::{Floors, GridSpec};

/// Safety factor in `dt ≤ C_CFL · dx² / (2 s)`.
pub const C_CFL: f64 = 0.4;

/// Number of probe times used to bound the coefficients over a run.
const PROBES: usize = 65;

/// Which algebraic assembly of the right-hand side to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhsForm {
    /// Linear part `ν₁Δ + μ₀V` separated from bracketed functional terms.
    #[default]
    Separated,
    /// `i(ν₁R₁ + ν₂R₂) + Σ μ_k R_k + μ₀V` with no explicit Laplacian.
    Functional,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionSpec {
    pub coefficients: CoefficientVector,
    #[serde(default)]
    pub potential: Potential,
    #[serde(default)]
    pub t0: f64,
    pub t1: f64,
    /// Defaults to the stability bound, shrunk to divide `t1 − t0` evenly.
    #[serde(default)]
    pub dt: Option<f64>,
    pub grid: GridSpec,
    #[serde(default)]
    pub floors: Floors,
    /// Record diagnostics every `stride` steps.
    #[serde(default = "one")]
    pub stride: usize,
    /// Keep a full snapshot every `snapshot_stride` records.
    #[serde(default)]
    pub snapshot_stride: Option<usize>,
    #[serde(default)]
    pub form: RhsForm,
    /// Apply the two-thirds rule to the functional terms of the separated
    /// form. Without it products of spectral derivatives alias into the top
    /// modes and gauge-transformed linear equations blow up.
    #[serde(default = "yes")]
    pub dealias: bool,
}

fn one() -> usize {
    1
}

fn yes() -> bool {
    true
}

/// `max(|ν₁|, 2|ν₂|, |μ₁|, 2|μ₂ − ν₁/2|)`, the coefficients of the terms
/// whose linearization is second order in the wavenumber.
pub fn stiffness(s: &CoefficientSample) -> f64 {
    s.nu1
        .abs()
        .max(2.0 * s.nu2.abs())
        .max(s.mu1.abs())
        .max(2.0 * (s.mu2 - 0.5 * s.nu1).abs())
}

impl EvolutionSpec {
    pub fn new(coefficients: CoefficientVector, grid: GridSpec, t1: f64) -> Self {
        EvolutionSpec {
            coefficients,
            potential: Potential::Zero,
            t0: 0.0,
            t1,
            dt: None,
            grid,
            floors: Floors::default(),
            stride: 1,
            snapshot_stride: None,
            form: RhsForm::default(),
            dealias: true,
        }
    }

    pub fn with_potential(mut self, p: Potential) -> Self {
        self.potential = p;
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = Some(dt);
        self
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.stride = stride;
        self
    }

    pub fn with_snapshots(mut self, every: usize) -> Self {
        self.snapshot_stride = Some(every);
        self
    }

    pub fn with_form(mut self, form: RhsForm) -> Self {
        self.form = form;
        self
    }

    pub fn with_dealias(mut self, on: bool) -> Self {
        self.dealias = on;
        self
    }

    pub fn duration(&self) -> f64 {
        self.t1 - self.t0
    }

    fn probe_times(&self) -> Vec<f64> {
        let t = self.duration();
        if t == 0.0 {
            return vec![self.t0];
        }
        (0..PROBES)
            .map(|i| self.t0 + t * i as f64 / (PROBES - 1) as f64)
            .collect()
    }

    /// Largest stable step for this grid and coefficient set.
    pub fn stability_bound(&self) -> Result<f64, DynError> {
        let mut s: f64 = 0.0;
        for t in self.probe_times() {
            s = s.max(stiffness(&self.coefficients.sample(t)?));
        }
        let dx = self.grid.dx();
        Ok(C_CFL * dx * dx / (2.0 * s))
    }

    /// Validates the settings and returns `(dt, steps)`.
    pub fn resolve(&self) -> Result<(f64, usize), DynError> {
        if !(self.t0.is_finite() && self.t1.is_finite()) || self.t1 < self.t0 {
            return Err(DynError::Spec(format!(
                "need t1 >= t0, got t0 = {}, t1 = {}",
                self.t0, self.t1
            )));
        }
        if self.stride == 0 || self.snapshot_stride == Some(0) {
            return Err(DynError::Spec("strides must be positive".into()));
        }
        self.coefficients.validate()?;
        self.potential.sample(&self.grid)?;
        let bound = self.stability_bound()?;
        let span = self.duration();
        if span == 0.0 {
            return Ok((self.dt.unwrap_or(bound), 0));
        }
        match self.dt {
            Some(dt) if !(dt > 0.0) => Err(DynError::Spec(format!("dt must be positive, got {dt}"))),
            Some(dt) if dt > bound * (1.0 + 1e-12) => Err(DynError::Stability { dt, bound }),
            Some(dt) => {
                let steps = (span / dt).round();
                if ((steps * dt) - span).abs() > 1e-9 * span {
                    return Err(DynError::Spec(format!(
                        "dt = {dt} does not divide the interval {span}"
                    )));
                }
                Ok((span / steps, steps as usize))
            }
            None => {
                let steps = (span / bound).ceil().max(1.0);
                Ok((span / steps, steps as usize))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> EvolutionSpec {
        EvolutionSpec::new(CoefficientVector::linear(-0.5, 1.0), GridSpec::new(256, 20.0).unwrap(), 1.0)
    }

    #[test]
    fn default_dt_obeys_bound() {
        let s = spec();
        let bound = s.stability_bound().unwrap();
        assert!((bound - 0.4 * (20.0f64 / 256.0).powi(2)).abs() < 1e-15);
        let (dt, steps) = s.resolve().unwrap();
        assert!(dt <= bound);
        assert!((dt * steps as f64 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn oversized_dt_rejected() {
        assert!(matches!(spec().with_dt(0.01).resolve(), Err(DynError::Stability { .. })));
        assert!(spec().with_dt(0.0003).resolve().is_err());
        assert!(spec().with_dt(0.002).resolve().is_ok());
    }

    #[test]
    fn zero_time_is_allowed() {
        let mut s = spec();
        s.t1 = 0.0;
        assert_eq!(s.resolve().unwrap().1, 0);
        s.t1 = -1.0;
        assert!(s.resolve().is_err());
    }
}
