use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{run, DynError, EvolutionSpec, Potential, RunOutcome, Status};
use crate::gauge_algebra::{
    closure_coefficients, invariants, CoefficientVector, GaugeElement, LinearParams, Window,
    EPS_CLS,
};
use crate::wavefield::{apply_gauge, Floors, WaveError, WaveFunction};

/// Maps run failures that have a report status to that status.
pub fn status_of(err: &DynError) -> Option<Status> {
    match err {
        DynError::Wave(WaveError::PhaseBranch { .. }) => Some(Status::PhaseBranchError),
        DynError::Diverged { .. } => Some(Status::Diverged),
        _ => None,
    }
}

/// Largest phase difference after removing the best global phase, over
/// points where |a| is at least `1e-3 · max|a|`.
pub fn phase_mismatch(a: &WaveFunction, b: &WaveFunction) -> f64 {
    let overlap: Complex64 = a.values.iter().zip(&b.values).map(|(x, y)| x * y.conj()).sum();
    let rot = Complex64::from_polar(1.0, -overlap.arg());
    let cut = 1e-3 * a.max_modulus();
    a.values
        .iter()
        .zip(&b.values)
        .filter(|(x, _)| x.norm() >= cut)
        .map(|(x, y)| (x * y.conj() * rot).arg().abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutingReport {
    pub status: Status,
    pub t0: f64,
    pub t1: f64,
    pub dt: f64,
    pub max_density_mismatch: Option<f64>,
    pub max_phase_mismatch: Option<f64>,
    /// Whether the nonlinear path regularized ρ at some step.
    pub regularized: bool,
}

/// Two routes from `psi0` at `t0` to time `t1`:
/// A evolves under the linear equation and then applies `g`;
/// B applies `g` first and evolves under the gauge-transformed equation.
///
/// The runs share one step size and execute concurrently.
pub fn commuting_diagram(
    linear: LinearParams,
    g: &GaugeElement,
    psi0: &WaveFunction,
    t0: f64,
    t1: f64,
    dt: Option<f64>,
    floors: Floors,
) -> Result<CommutingReport, DynError> {
    let transformed = closure_coefficients(linear, g)?.coefficients;
    let base = |c: CoefficientVector| EvolutionSpec {
        t0,
        dt,
        floors,
        stride: usize::MAX,
        ..EvolutionSpec::new(c, psi0.grid, t1)
    };
    let mut spec_a = base(linear.embed());
    let mut spec_b = base(transformed);
    if dt.is_none() {
        let (da, _) = spec_a.resolve()?;
        let (db, _) = spec_b.resolve()?;
        let step = da.min(db);
        spec_a.dt = Some(step);
        spec_b.dt = Some(step);
    }
    let (step, _) = spec_a.resolve()?;
    let psi0 = psi0.clone().with_time(t0);
    let start_b = apply_gauge(g, &psi0, t0, &floors)?;

    let (a, b) = std::thread::scope(|s| {
        let ha = s.spawn(|| run(&spec_a, &psi0));
        let hb = s.spawn(|| run(&spec_b, &start_b));
        (ha.join().expect("path A panicked"), hb.join().expect("path B panicked"))
    });
    let mut report = CommutingReport {
        status: Status::Ok,
        t0,
        t1,
        dt: step,
        max_density_mismatch: None,
        max_phase_mismatch: None,
        regularized: false,
    };
    let (a, b): (RunOutcome, RunOutcome) = match (a, b) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            return match status_of(&e) {
                Some(st) => Ok(CommutingReport { status: st, ..report }),
                None => Err(e),
            }
        }
    };
    report.regularized = b.regularized;
    if a.status != Status::Ok || b.status != Status::Ok {
        report.status = Status::Diverged;
        return Ok(report);
    }
    let end_a = match apply_gauge(g, &a.final_state, t1, &floors) {
        Ok(v) => v,
        Err(WaveError::PhaseBranch { .. }) => {
            report.status = Status::PhaseBranchError;
            return Ok(report);
        }
        Err(e) => return Err(e.into()),
    };
    report.max_density_mismatch = Some(end_a.max_density_diff(&b.final_state)?);
    report.max_phase_mismatch = Some(phase_mismatch(&end_a, &b.final_state));
    Ok(report)
}

/// `ψ(x − vt) exp[i(kx + ν₁k²t)]` with `k = −v/(2ν₁)`.
pub fn galilei_boost(psi: &WaveFunction, v: f64, nu1: f64, t: f64) -> WaveFunction {
    let k = -v / (2.0 * nu1);
    let shifted = if v * t == 0.0 {
        psi.values.clone()
    } else {
        psi.grid.spectral().shift(&psi.values, -v * t)
    };
    let grid = psi.grid;
    WaveFunction {
        grid,
        time_tag: psi.time_tag,
        values: shifted
            .iter()
            .enumerate()
            .map(|(i, z)| z * Complex64::from_polar(1.0, k * grid.x(i) + nu1 * k * k * t))
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostReport {
    pub status: Status,
    pub velocity: f64,
    pub max_density_mismatch: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

fn boost_precondition(spec: &EvolutionSpec) -> Result<Option<String>, DynError> {
    if !spec.potential.is_zero() {
        return Ok(Some("potential is not zero".into()));
    }
    let c = &spec.coefficients;
    let window = Window::new(spec.t0, spec.t1.max(spec.t0), 21);
    let iv = invariants(c)?;
    let s0 = iv.sample(spec.t0)?;
    let scale = s0.iota0.abs().max(1.0);
    for t in window.times() {
        let s = iv.sample(t)?;
        let drift = s
            .as_array()
            .iter()
            .zip(s0.as_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if drift > EPS_CLS * scale {
            return Ok(Some(format!("invariants vary in time (drift {drift:e})")));
        }
        for (k, v) in [(3, s.iota3), (4, s.iota4), (7, s.iota7)] {
            if v.abs() > EPS_CLS * scale {
                return Ok(Some(format!("iota{k} = {v} is not zero")));
            }
        }
        if (c.nu1.eval(t)? - c.nu1.eval(spec.t0)?).abs() > 0.0 {
            return Ok(Some("nu1 is time dependent".into()));
        }
    }
    Ok(None)
}

/// Compares boost-then-evolve against evolve-then-boost over `[t0, t1]`.
pub fn boost_check(spec: &EvolutionSpec, psi0: &WaveFunction, v: f64) -> Result<BoostReport, DynError> {
    let mut report = BoostReport {
        status: Status::Ok,
        velocity: v,
        max_density_mismatch: None,
        reason: None,
    };
    if let Some(reason) = boost_precondition(spec)? {
        report.status = Status::NotApplicable;
        report.reason = Some(reason);
        return Ok(report);
    }
    let nu1 = spec.coefficients.nu1.eval(spec.t0)?;
    let span = spec.t1 - spec.t0;
    let spec = EvolutionSpec {
        stride: usize::MAX,
        snapshot_stride: None,
        potential: Potential::Zero,
        ..spec.clone()
    };
    let psi0 = psi0.clone().with_time(spec.t0);
    let boosted0 = galilei_boost(&psi0, v, nu1, 0.0);
    let (a, b) = std::thread::scope(|s| {
        let ha = s.spawn(|| run(&spec, &psi0));
        let hb = s.spawn(|| run(&spec, &boosted0));
        (ha.join().expect("unboosted run panicked"), hb.join().expect("boosted run panicked"))
    });
    let (a, b) = match (a, b) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            return match status_of(&e) {
                Some(st) => Ok(BoostReport { status: st, ..report }),
                None => Err(e),
            }
        }
    };
    if a.status != Status::Ok || b.status != Status::Ok {
        report.status = Status::Diverged;
        return Ok(report);
    }
    let a_boosted = galilei_boost(&a.final_state, v, nu1, span);
    report.max_density_mismatch = Some(a_boosted.max_density_diff(&b.final_state)?);
    Ok(report)
}
