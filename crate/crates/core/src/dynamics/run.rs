use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::diagnostics::{continuity_at, five_point_first};
use super::{DynError, EvolutionSpec, Rhs};
use crate::wavefield::WaveFunction;

/// Relative norm drift that aborts a run.
pub const DIVERGENCE_DRIFT: f64 = 1e-3;

/// Initial states must be normalized to this tolerance.
pub const NORM_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    Diverged,
    NotApplicable,
    PhaseBranchError,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub norm: f64,
    pub mean_x: f64,
    pub mean_p: f64,
    /// `⟨−∇V⟩`.
    pub mean_force: f64,
    pub continuity_resid: Option<f64>,
    pub ehrenfest1_resid: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    /// Spacing between consecutive samples.
    pub interval: f64,
    pub samples: Vec<TrajectorySample>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub snapshots: Vec<WaveFunction>,
}

impl TrajectoryRecord {
    pub const CSV_COLUMNS: [&'static str; 6] =
        ["t", "norm", "mean_x", "mean_p", "continuity_resid", "ehrenfest1_resid"];

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn mean_x(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.mean_x).collect()
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| (s.norm - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Fixed-column CSV; missing residuals are written as empty fields.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), DynError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(Self::CSV_COLUMNS)?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for s in &self.samples {
            w.write_record(&[
                s.t.to_string(),
                s.norm.to_string(),
                s.mean_x.to_string(),
                s.mean_p.to_string(),
                opt(s.continuity_resid),
                opt(s.ehrenfest1_resid),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub status: Status,
    pub dt: f64,
    pub steps: usize,
    /// Whether any right-hand-side evaluation shifted ρ by ε_reg.
    pub regularized: bool,
    pub trajectory: TrajectoryRecord,
    #[serde(rename = "final")]
    pub final_state: WaveFunction,
}

fn axpy(y: &[Complex64], a: f64, x: &[Complex64]) -> Vec<Complex64> {
    y.iter().zip(x).map(|(yi, xi)| yi + xi * a).collect()
}

struct Recorder<'a> {
    rhs: &'a Rhs,
    force: Vec<f64>,
    samples: Vec<TrajectorySample>,
    snapshots: Vec<WaveFunction>,
    snapshot_stride: Option<usize>,
    window: Vec<WaveFunction>,
    interval: f64,
}

impl Recorder<'_> {
    fn record(&mut self, psi: &WaveFunction) -> Result<(), DynError> {
        let dx = psi.grid.dx();
        let norm = psi.norm();
        let force = -self
            .force
            .iter()
            .zip(&psi.values)
            .map(|(f, z)| f * z.norm_sqr())
            .sum::<f64>()
            * dx
            / norm;
        let k = self.samples.len();
        self.samples.push(TrajectorySample {
            t: psi.time_tag,
            norm,
            mean_x: psi.mean_x(),
            mean_p: psi.mean_p(self.rhs.spectral()),
            mean_force: force,
            continuity_resid: None,
            ehrenfest1_resid: None,
        });
        if let Some(every) = self.snapshot_stride {
            if k % every == 0 {
                self.snapshots.push(psi.clone());
            }
        }
        self.window.push(psi.clone());
        if self.window.len() > 3 {
            self.window.remove(0);
        }
        if self.window.len() == 3 {
            let mid = &self.window[1];
            let c = self.rhs.coefficients().sample(mid.time_tag)?;
            let r = continuity_at(&self.window[0], mid, &self.window[2], self.interval, &c, self.rhs.spectral());
            self.samples[k - 1].continuity_resid = Some(r);
        }
        Ok(())
    }
}

/// Classical fourth-order Runge–Kutta on the method-of-lines system.
pub fn run(spec: &EvolutionSpec, psi0: &WaveFunction) -> Result<RunOutcome, DynError> {
    let (dt, steps) = spec.resolve()?;
    integrate(spec, psi0, dt, steps)
}

fn integrate(
    spec: &EvolutionSpec,
    psi0: &WaveFunction,
    dt: f64,
    steps: usize,
) -> Result<RunOutcome, DynError> {
    spec.grid.check_same(&psi0.grid)?;
    let n0 = psi0.norm();
    if (n0 - 1.0).abs() > NORM_TOLERANCE {
        return Err(DynError::Spec(format!("initial state is not normalized (norm = {n0})")));
    }
    let rhs = Rhs::new(spec.grid, spec.coefficients.clone(), &spec.potential, spec.floors, spec.form)?
        .with_dealias(spec.dealias);
    let mut rec = Recorder {
        rhs: &rhs,
        force: spec.potential.gradient(&spec.grid)?,
        samples: Vec::new(),
        snapshots: Vec::new(),
        snapshot_stride: spec.snapshot_stride,
        window: Vec::new(),
        interval: dt * spec.stride as f64,
    };

    let mut psi = psi0.clone().with_time(spec.t0);
    rec.record(&psi)?;
    let mut status = Status::Ok;
    let mut regularized = false;
    let mut taken = 0;
    for step in 1..=steps {
        let t = spec.t0 + (step - 1) as f64 * dt;
        let y = &psi.values;
        let (k1, f1) = rhs.eval(y, t)?;
        let (k2, f2) = rhs.eval(&axpy(y, 0.5 * dt, &k1), t + 0.5 * dt)?;
        let (k3, f3) = rhs.eval(&axpy(y, 0.5 * dt, &k2), t + 0.5 * dt)?;
        let (k4, f4) = rhs.eval(&axpy(y, dt, &k3), t + dt)?;
        regularized |= f1.regularized || f2.regularized || f3.regularized || f4.regularized;
        let values: Vec<Complex64> = (0..y.len())
            .map(|i| y[i] + (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (dt / 6.0))
            .collect();
        psi = WaveFunction {
            grid: psi.grid,
            time_tag: spec.t0 + step as f64 * dt,
            values,
        };
        taken = step;
        let norm = psi.norm();
        if !norm.is_finite() || (norm - n0).abs() > DIVERGENCE_DRIFT * n0 {
            log::warn!("run diverged at t = {} (norm = {norm})", psi.time_tag);
            status = Status::Diverged;
            break;
        }
        if step % spec.stride == 0 {
            rec.record(&psi)?;
        }
    }

    let mut samples = rec.samples;
    let xs: Vec<f64> = samples.iter().map(|s| s.mean_x).collect();
    let h = dt * spec.stride as f64;
    for (k, d) in five_point_first(&xs, h).into_iter().enumerate() {
        if let Some(v) = d {
            let s = &samples[k];
            let nu1 = spec.coefficients.nu1.eval(s.t)?;
            let predicted = -2.0 * nu1 * s.mean_p;
            samples[k].ehrenfest1_resid = Some((v - predicted).abs() / s.mean_p.abs().max(f64::MIN_POSITIVE));
        }
    }
    Ok(RunOutcome {
        status,
        dt,
        steps: taken,
        regularized,
        trajectory: TrajectoryRecord {
            interval: h,
            samples,
            snapshots: rec.snapshots,
        },
        final_state: psi,
    })
}

/// Evolves to `spec.t1` and returns the final state, failing on divergence.
pub fn evolve(spec: &EvolutionSpec, psi0: &WaveFunction) -> Result<WaveFunction, DynError> {
    let spec = EvolutionSpec {
        stride: usize::MAX,
        snapshot_stride: None,
        ..spec.clone()
    };
    let out = run(&spec, psi0)?;
    match out.status {
        Status::Ok => Ok(out.final_state),
        _ => Err(DynError::Diverged { t: out.final_state.time_tag }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge_algebra::CoefficientVector;
    use crate::wavefield::GridSpec;

    #[test]
    fn zero_time_run_returns_initial_state() {
        let g = GridSpec::new(64, 20.0).unwrap();
        let psi = WaveFunction::gaussian(g, 0.0, 1.0, 0.5);
        let spec = EvolutionSpec::new(CoefficientVector::linear(-0.5, 1.0), g, 0.0);
        let out = run(&spec, &psi).unwrap();
        assert_eq!(out.final_state, psi);
        assert_eq!(out.trajectory.samples.len(), 1);
        assert_eq!(out.steps, 0);
    }

    #[test]
    fn unnormalized_state_rejected() {
        let g = GridSpec::new(64, 20.0).unwrap();
        let psi = WaveFunction::from_fn(g, 0.0, |_| Complex64::new(1.0, 0.0));
        let spec = EvolutionSpec::new(CoefficientVector::linear(-0.5, 1.0), g, 0.1);
        assert!(matches!(run(&spec, &psi), Err(DynError::Spec(_))));
    }

    #[test]
    fn csv_has_fixed_columns() {
        let g = GridSpec::new(64, 20.0).unwrap();
        let psi = WaveFunction::gaussian(g, 0.0, 1.0, 0.5);
        let spec = EvolutionSpec::new(CoefficientVector::linear(-0.5, 1.0), g, 0.2).with_stride(2);
        let out = run(&spec, &psi).unwrap();
        let mut buf = Vec::new();
        out.trajectory.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,norm,mean_x,mean_p,continuity_resid,ehrenfest1_resid");
        assert_eq!(lines.count(), out.trajectory.samples.len());
        let ts = out.trajectory.times();
        assert!(ts.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn unstable_step_diverges() {
        let g = GridSpec::new(64, 20.0).unwrap();
        let psi = WaveFunction::gaussian(g, 0.0, 0.3, 0.0);
        let spec = EvolutionSpec::new(CoefficientVector::linear(-0.5, 1.0), g, 2.0);
        let bound = spec.stability_bound().unwrap();
        let out = integrate(&spec, &psi, 4.0 * bound, (2.0 / (4.0 * bound)).ceil() as usize).unwrap();
        assert_eq!(out.status, Status::Diverged);
        assert!(out.final_state.time_tag < 2.0);
    }
}
