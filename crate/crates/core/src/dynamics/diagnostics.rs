use serde::{Deserialize, Serialize};

use super::{DynError, Status, TrajectoryRecord};
use crate::gauge_algebra::{classify, invariants, CoefficientSample, CoefficientVector, FamilyTag, Window};
use crate::wavefield::{density_current, Spectral1d, SpectralDerivative, WaveFunction};

fn l2(v: impl Iterator<Item = f64>) -> f64 {
    v.map(|x| x * x).sum::<f64>().sqrt()
}

/// Relative L² residual of `∂ρ/∂t = 2ν₁ ∇·J + 2ν₂ Δρ` at the middle of three
/// equally spaced snapshots, with a centered difference for `∂ρ/∂t`.
///
/// Normalized by the right-hand side, or by ρ when that is negligible.
pub fn continuity_at(
    prev: &WaveFunction,
    mid: &WaveFunction,
    next: &WaveFunction,
    h: f64,
    c: &CoefficientSample,
    d: &Spectral1d,
) -> f64 {
    let (rho, j) = density_current(mid, d);
    let (_, div_j) = d.gradient_pair(&rho, &j);
    let lap = d.laplacian_real(&rho);
    let (rp, rn) = (prev.density(), next.density());
    let rhs: Vec<f64> = (0..rho.len())
        .map(|i| 2.0 * c.nu1 * div_j[i] + 2.0 * c.nu2 * lap[i])
        .collect();
    let resid = l2((0..rho.len()).map(|i| (rn[i] - rp[i]) / (2.0 * h) - rhs[i]));
    let scale = l2(rhs.iter().cloned());
    let rho_scale = l2(rho.iter().cloned());
    let denom = if scale > 1e-10 * rho_scale { scale } else { rho_scale };
    resid / denom
}

/// Residual series over uniformly spaced snapshots; the ends are skipped.
pub fn continuity_residual(
    snapshots: &[WaveFunction],
    c: &CoefficientVector,
) -> Result<Vec<(f64, f64)>, DynError> {
    if snapshots.len() < 3 {
        return Err(DynError::InsufficientData(format!(
            "continuity residual needs at least 3 snapshots, got {}",
            snapshots.len()
        )));
    }
    let grid = snapshots[0].grid;
    for s in snapshots {
        grid.check_same(&s.grid)?;
    }
    let h = snapshots[1].time_tag - snapshots[0].time_tag;
    let uniform = snapshots
        .windows(2)
        .all(|w| ((w[1].time_tag - w[0].time_tag) - h).abs() <= 1e-9 * h.abs().max(1e-300));
    if !(h > 0.0) || !uniform {
        return Err(DynError::InsufficientData("snapshots must be uniformly spaced in time".into()));
    }
    let d = grid.spectral();
    snapshots
        .windows(3)
        .map(|w| {
            let cs = c.sample(w[1].time_tag)?;
            Ok((w[1].time_tag, continuity_at(&w[0], &w[1], &w[2], h, &cs, &d)))
        })
        .collect()
}

/// Fourth-order first derivative; `None` for the two points at each end.
pub fn five_point_first(y: &[f64], h: f64) -> Vec<Option<f64>> {
    let n = y.len();
    (0..n)
        .map(|k| {
            (k >= 2 && k + 2 < n)
                .then(|| (y[k - 2] - 8.0 * y[k - 1] + 8.0 * y[k + 1] - y[k + 2]) / (12.0 * h))
        })
        .collect()
}

/// Fourth-order second derivative; `None` for the two points at each end.
pub fn five_point_second(y: &[f64], h: f64) -> Vec<Option<f64>> {
    let n = y.len();
    (0..n)
        .map(|k| {
            (k >= 2 && k + 2 < n).then(|| {
                (-y[k - 2] + 16.0 * y[k - 1] - 30.0 * y[k] + 16.0 * y[k + 1] - y[k + 2])
                    / (12.0 * h * h)
            })
        })
        .collect()
}

/// Least-squares slope of `ln|y|` against `t`.
pub fn fit_exponential_rate(t: &[f64], y: &[f64]) -> Result<f64, DynError> {
    let pts: Vec<(f64, f64)> = t
        .iter()
        .zip(y)
        .filter(|(_, v)| v.abs() > 0.0)
        .map(|(&a, &b)| (a, b.abs().ln()))
        .collect();
    if pts.len() < 3 {
        return Err(DynError::InsufficientData("exponential fit needs 3 nonzero points".into()));
    }
    let m = pts.len() as f64;
    let (st, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (t, y)| (a + t, b + y));
    let (mt, my) = (st / m, sy / m);
    let (mut num, mut den) = (0.0, 0.0);
    for (t, y) in &pts {
        num += (t - mt) * (y - my);
        den += (t - mt) * (t - mt);
    }
    Ok(num / den)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum SecondRelation {
    NotApplicable {
        family: FamilyTag,
    },
    Ok {
        /// Max of |x'' − (−2ι₀⟨−∇V⟩ + ι₇ x')| relative to the largest term.
        max_resid: f64,
        iota0: f64,
        iota7: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EhrenfestReport {
    pub status: Status,
    pub family: FamilyTag,
    /// Max over interior samples of |x' + 2ν₁⟨−i∇⟩| / |⟨−i∇⟩|.
    pub first_max_resid: f64,
    pub second: SecondRelation,
    /// Signed least-squares rate of d⟨x⟩/dt.
    pub velocity_rate: Option<f64>,
}

/// First relation for every member; the second one only inside F₁.
pub fn ehrenfest_check(
    tr: &TrajectoryRecord,
    c: &CoefficientVector,
) -> Result<EhrenfestReport, DynError> {
    let n = tr.samples.len();
    if n < 5 {
        return Err(DynError::InsufficientData(format!(
            "Ehrenfest check needs at least 5 samples, got {n}"
        )));
    }
    let h = tr.interval;
    let t = tr.times();
    let x = tr.mean_x();
    let v = five_point_first(&x, h);
    let a = five_point_second(&x, h);
    let window = Window::new(t[0], t[n - 1], n.min(41));
    let iv = invariants(c)?;
    let family = classify(&iv, &window)?;

    let mut first: f64 = 0.0;
    let mut vt = Vec::new();
    let mut vv = Vec::new();
    for k in 0..n {
        if let Some(vk) = v[k] {
            let s = &tr.samples[k];
            let nu1 = c.nu1.eval(s.t)?;
            first = first.max((vk + 2.0 * nu1 * s.mean_p).abs() / s.mean_p.abs().max(f64::MIN_POSITIVE));
            vt.push(s.t);
            vv.push(vk);
        }
    }

    let second = if family.is_within(FamilyTag::F1) {
        let mut worst: f64 = 0.0;
        let (mut i0, mut i7) = (0.0, 0.0);
        for k in 0..n {
            if let (Some(vk), Some(ak)) = (v[k], a[k]) {
                let s = &tr.samples[k];
                let is = iv.sample(s.t)?;
                i0 = is.iota0;
                i7 = is.iota7;
                let force = -2.0 * is.iota0 * s.mean_force;
                let friction = is.iota7 * vk;
                let scale = ak.abs().max(force.abs()).max(friction.abs()).max(f64::MIN_POSITIVE);
                worst = worst.max((ak - force - friction).abs() / scale);
            }
        }
        SecondRelation::Ok {
            max_resid: worst,
            iota0: i0,
            iota7: i7,
        }
    } else {
        SecondRelation::NotApplicable { family }
    };

    Ok(EhrenfestReport {
        status: Status::Ok,
        family,
        first_max_resid: first,
        second,
        velocity_rate: fit_exponential_rate(&vt, &vv).ok(),
    })
}
