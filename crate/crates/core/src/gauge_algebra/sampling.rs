//! Random group elements and coefficient vectors for property suites.

use rand::Rng;

use super::{CoefficientVector, GaugeElement, SpatialProfile, ThetaField, ThetaTerm};
use crate::time_fn::{Table, TimeFn};

/// Sampling ranges. Defaults keep |γ| ≤ 5 and Λ ∈ ±[0.1, 10] over t ∈ [0, 1].
#[derive(Debug, Clone, Copy)]
pub struct Ranges {
    pub gamma: f64,
    pub lambda_lo: f64,
    pub lambda_hi: f64,
    pub coeff: f64,
    pub rate: f64,
    pub allow_tables: bool,
    pub allow_theta: bool,
    pub allow_negative_lambda: bool,
}

impl Default for Ranges {
    fn default() -> Self {
        Ranges {
            gamma: 5.0,
            lambda_lo: 0.1,
            lambda_hi: 10.0,
            coeff: 2.0,
            rate: 0.5,
            allow_tables: false,
            allow_theta: true,
            allow_negative_lambda: true,
        }
    }
}

/// Sample times used by the property suites.
pub const SAMPLE_TIMES: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

fn table_on_unit<R: Rng>(rng: &mut R, amp: f64) -> TimeFn {
    let a = rng.gen_range(-amp..amp);
    let b = rng.gen_range(-amp..amp);
    let w = rng.gen_range(0.5..3.0);
    let tab = Table::sample(-0.5, 0.05, 41, |t| a + b * (w * t).sin()).expect("valid table");
    TimeFn::tabulated(tab)
}

/// A function bounded by `amp` on [0, 1].
pub fn bounded_fn<R: Rng>(rng: &mut R, amp: f64, r: &Ranges) -> TimeFn {
    let kinds = if r.allow_tables { 4 } else { 3 };
    match rng.gen_range(0..kinds) {
        0 => TimeFn::constant(rng.gen_range(-amp..amp)),
        1 => {
            let intercept = rng.gen_range(-amp / 2.0..amp / 2.0);
            let slope = rng.gen_range(-amp / 2.0..amp / 2.0);
            TimeFn::linear(slope, intercept)
        }
        2 => {
            let rate = rng.gen_range(-r.rate..r.rate);
            let amplitude = rng.gen_range(-amp..amp) * (-rate.abs()).exp();
            TimeFn::exponential(amplitude, rate)
        }
        _ => table_on_unit(rng, amp / 2.0),
    }
}

/// A function whose modulus stays inside `[lo, hi]` on [0, 1].
pub fn nonvanishing_fn<R: Rng>(rng: &mut R, lo: f64, hi: f64, negative: bool, r: &Ranges) -> TimeFn {
    let sign = if negative && rng.gen_bool(0.5) { -1.0 } else { 1.0 };
    let (llo, lhi) = (lo.ln(), hi.ln());
    let kinds = if r.allow_tables { 3 } else { 2 };
    match rng.gen_range(0..kinds) {
        0 => TimeFn::constant(sign * rng.gen_range(llo..lhi).exp()),
        1 => {
            let start = rng.gen_range(llo..lhi);
            let end = rng.gen_range(llo..lhi);
            TimeFn::exponential(sign * start.exp(), end - start)
        }
        _ => {
            let start = rng.gen_range(llo..lhi);
            let end = rng.gen_range(llo..lhi);
            let tab = Table::sample(-0.5, 0.05, 41, |t| {
                let s = (t.clamp(0.0, 1.0) * (end - start) + start).exp();
                sign * s
            })
            .expect("valid table");
            TimeFn::tabulated(tab)
        }
    }
}

fn random_profile<R: Rng>(rng: &mut R) -> SpatialProfile {
    match rng.gen_range(0..5) {
        0 => SpatialProfile::Constant,
        1 => SpatialProfile::Linear,
        2 => SpatialProfile::Quadratic,
        3 => SpatialProfile::Cosine {
            wavenumber: rng.gen_range(0.1..2.0),
        },
        _ => SpatialProfile::Sine {
            wavenumber: rng.gen_range(0.1..2.0),
        },
    }
}

pub fn random_theta<R: Rng>(rng: &mut R, r: &Ranges) -> ThetaField {
    let n = rng.gen_range(0..3);
    ThetaField::from_terms(
        (0..n)
            .map(|_| ThetaTerm {
                coeff: bounded_fn(rng, 1.0, r),
                profile: random_profile(rng),
            })
            .collect(),
    )
}

pub fn random_gauge<R: Rng>(rng: &mut R, r: &Ranges) -> GaugeElement {
    let gamma = bounded_fn(rng, r.gamma, r);
    let lambda = nonvanishing_fn(rng, r.lambda_lo, r.lambda_hi, r.allow_negative_lambda, r);
    let theta = if r.allow_theta {
        random_theta(rng, r)
    } else {
        ThetaField::zero()
    };
    GaugeElement::new(gamma, lambda, theta).expect("sampled element is nondegenerate")
}

/// Pure nonlinear element (θ ≡ 0).
pub fn random_nonlinear_gauge<R: Rng>(rng: &mut R, r: &Ranges) -> GaugeElement {
    random_gauge(
        rng,
        &Ranges {
            allow_theta: false,
            ..*r
        },
    )
}

pub fn random_coefficients<R: Rng>(rng: &mut R, r: &Ranges) -> CoefficientVector {
    let nu1 = nonvanishing_fn(rng, 0.2, r.coeff.max(0.3), true, r);
    let mut rest = (0..9).map(|_| bounded_fn(rng, r.coeff, r));
    let mut next = || rest.next().expect("nine components");
    CoefficientVector {
        nu1,
        nu2: next(),
        mu0: next(),
        mu1: next(),
        mu2: next(),
        mu3: next(),
        mu4: next(),
        mu5: next(),
        alpha1: next(),
        alpha2: next(),
    }
}
