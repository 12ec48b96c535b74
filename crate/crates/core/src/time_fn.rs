//! Scalar functions of time with evaluable derivatives.
//!
//! A [`TimeFn`] is either a closed form (constant, linear, exponential), a
//! uniformly sampled table, or an algebraic combination of other `TimeFn`s.
//! The combinators fold constants eagerly, so composing closed forms with the
//! identity gauge element returns structurally identical functions.
//!
//! Serialized as `{"kind": ..., "params": ...}`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TimeFnError {
    #[error("t = {t} lies outside the table range [{lo}, {hi}]")]
    OutOfDomain { t: f64, lo: f64, hi: f64 },
    #[error("time domains [{a_lo}, {a_hi}] and [{b_lo}, {b_hi}] do not overlap")]
    DisjointDomains {
        a_lo: f64,
        a_hi: f64,
        b_lo: f64,
        b_hi: f64,
    },
    #[error("invalid table: {0}")]
    InvalidTable(String),
}

/// Closed time interval on which a function can be evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
}

impl Domain {
    pub const ALL: Domain = Domain {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn contains(&self, t: f64) -> bool {
        t >= self.lo && t <= self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() || self.hi.is_finite()
    }

    pub fn intersect(&self, other: &Domain) -> Option<Domain> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Domain { lo, hi })
    }
}

/// Uniformly sampled table `values[i] = f(t0 + i * step)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, try_from = "RawTable")]
pub struct Table {
    t0: f64,
    step: f64,
    values: Vec<f64>,
    #[serde(skip)]
    slopes: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTable {
    t0: f64,
    step: f64,
    values: Vec<f64>,
}

impl TryFrom<RawTable> for Table {
    type Error = TimeFnError;

    fn try_from(raw: RawTable) -> Result<Self, Self::Error> {
        Table::new(raw.t0, raw.step, raw.values)
    }
}

impl Table {
    pub fn new(t0: f64, step: f64, values: Vec<f64>) -> Result<Self, TimeFnError> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(TimeFnError::InvalidTable(format!(
                "step must be positive and finite, got {step}"
            )));
        }
        if values.len() < 3 {
            return Err(TimeFnError::InvalidTable(format!(
                "need at least 3 samples, got {}",
                values.len()
            )));
        }
        if !t0.is_finite() || values.iter().any(|v| !v.is_finite()) {
            return Err(TimeFnError::InvalidTable("non-finite entry".into()));
        }
        let slopes = nodal_slopes(&values, step);
        Ok(Table {
            t0,
            step,
            values,
            slopes,
        })
    }

    /// Samples `f` on `n` points starting at `t0`.
    pub fn sample(
        t0: f64,
        step: f64,
        n: usize,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self, TimeFnError> {
        Table::new(t0, step, (0..n).map(|i| f(t0 + i as f64 * step)).collect())
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn domain(&self) -> Domain {
        Domain {
            lo: self.t0,
            hi: self.t0 + (self.values.len() - 1) as f64 * self.step,
        }
    }

    fn locate(&self, t: f64) -> Result<(usize, f64), TimeFnError> {
        let d = self.domain();
        // Allow a few ulps of slack at the upper edge.
        let slack = 1e-12 * self.step;
        if !(t >= d.lo - slack && t <= d.hi + slack) {
            return Err(TimeFnError::OutOfDomain {
                t,
                lo: d.lo,
                hi: d.hi,
            });
        }
        let s = ((t - self.t0) / self.step).clamp(0.0, (self.values.len() - 1) as f64);
        let i = (s.floor() as usize).min(self.values.len() - 2);
        Ok((i, s - i as f64))
    }

    fn eval(&self, t: f64) -> Result<f64, TimeFnError> {
        let (i, w) = self.locate(t)?;
        Ok(self.values[i] * (1.0 - w) + self.values[i + 1] * w)
    }

    fn derivative(&self, t: f64) -> Result<f64, TimeFnError> {
        let (i, w) = self.locate(t)?;
        Ok(self.slopes[i] * (1.0 - w) + self.slopes[i + 1] * w)
    }

    /// True when `t` falls in the first or last table cell, where the
    /// derivative uses a one-sided stencil.
    pub fn near_boundary(&self, t: f64) -> bool {
        let d = self.domain();
        t <= d.lo + self.step || t >= d.hi - self.step
    }
}

// Second-order centered differences, second-order one-sided at the ends.
fn nodal_slopes(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    let mut out = vec![0.0; n];
    out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    out[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
    for i in 1..n - 1 {
        out[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
    }
    out
}

/// A real scalar function of time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "kind",
    content = "params",
    rename_all = "snake_case",
    deny_unknown_fields
)]
pub enum TimeFn {
    Constant { value: f64 },
    /// `slope * t + intercept`
    Linear { slope: f64, intercept: f64 },
    /// `amplitude * exp(rate * t)`
    Exponential { amplitude: f64, rate: f64 },
    Tabulated(Table),
    Sum(Vec<TimeFn>),
    Product(Vec<TimeFn>),
    Reciprocal(Box<TimeFn>),
}

impl Default for TimeFn {
    fn default() -> Self {
        TimeFn::zero()
    }
}

impl From<f64> for TimeFn {
    fn from(value: f64) -> Self {
        TimeFn::constant(value)
    }
}

impl TimeFn {
    pub fn constant(value: f64) -> Self {
        TimeFn::Constant { value }
    }

    pub fn zero() -> Self {
        TimeFn::constant(0.0)
    }

    pub fn one() -> Self {
        TimeFn::constant(1.0)
    }

    pub fn linear(slope: f64, intercept: f64) -> Self {
        if slope == 0.0 {
            TimeFn::constant(intercept)
        } else {
            TimeFn::Linear { slope, intercept }
        }
    }

    pub fn exponential(amplitude: f64, rate: f64) -> Self {
        if amplitude == 0.0 {
            TimeFn::zero()
        } else if rate == 0.0 {
            TimeFn::constant(amplitude)
        } else {
            TimeFn::Exponential { amplitude, rate }
        }
    }

    pub fn tabulated(table: Table) -> Self {
        TimeFn::Tabulated(table)
    }

    pub fn as_constant(&self) -> Option<f64> {
        match self {
            TimeFn::Constant { value } => Some(*value),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_constant() == Some(0.0)
    }

    pub fn is_one(&self) -> bool {
        self.as_constant() == Some(1.0)
    }

    /// True when no part of the expression depends on time.
    pub fn is_time_independent(&self) -> bool {
        match self {
            TimeFn::Constant { .. } => true,
            TimeFn::Linear { slope, .. } => *slope == 0.0,
            TimeFn::Exponential { rate, amplitude } => *rate == 0.0 || *amplitude == 0.0,
            TimeFn::Tabulated(_) => false,
            TimeFn::Sum(fs) | TimeFn::Product(fs) => fs.iter().all(TimeFn::is_time_independent),
            TimeFn::Reciprocal(f) => f.is_time_independent(),
        }
    }

    pub fn contains_table(&self) -> bool {
        match self {
            TimeFn::Tabulated(_) => true,
            TimeFn::Sum(fs) | TimeFn::Product(fs) => fs.iter().any(TimeFn::contains_table),
            TimeFn::Reciprocal(f) => f.contains_table(),
            _ => false,
        }
    }

    /// True when some table inside the expression uses a one-sided
    /// derivative stencil at `t`.
    pub fn derivative_near_table_boundary(&self, t: f64) -> bool {
        match self {
            TimeFn::Tabulated(tab) => tab.near_boundary(t),
            TimeFn::Sum(fs) | TimeFn::Product(fs) => {
                fs.iter().any(|f| f.derivative_near_table_boundary(t))
            }
            TimeFn::Reciprocal(f) => f.derivative_near_table_boundary(t),
            _ => false,
        }
    }

    pub fn domain(&self) -> Domain {
        match self {
            TimeFn::Tabulated(tab) => tab.domain(),
            TimeFn::Sum(fs) | TimeFn::Product(fs) => fs.iter().fold(Domain::ALL, |d, f| {
                d.intersect(&f.domain()).unwrap_or(Domain { lo: 1.0, hi: 0.0 })
            }),
            TimeFn::Reciprocal(f) => f.domain(),
            _ => Domain::ALL,
        }
    }

    /// Fails when the two functions share no evaluation time.
    pub fn check_overlap(&self, other: &TimeFn) -> Result<Domain, TimeFnError> {
        let (a, b) = (self.domain(), other.domain());
        a.intersect(&b).ok_or(TimeFnError::DisjointDomains {
            a_lo: a.lo,
            a_hi: a.hi,
            b_lo: b.lo,
            b_hi: b.hi,
        })
    }

    pub fn eval(&self, t: f64) -> Result<f64, TimeFnError> {
        Ok(match self {
            TimeFn::Constant { value } => *value,
            TimeFn::Linear { slope, intercept } => slope * t + intercept,
            TimeFn::Exponential { amplitude, rate } => amplitude * (rate * t).exp(),
            TimeFn::Tabulated(tab) => tab.eval(t)?,
            TimeFn::Sum(fs) => {
                let mut s = 0.0;
                for f in fs {
                    s += f.eval(t)?;
                }
                s
            }
            TimeFn::Product(fs) => {
                let mut p = 1.0;
                for f in fs {
                    p *= f.eval(t)?;
                }
                p
            }
            TimeFn::Reciprocal(f) => 1.0 / f.eval(t)?,
        })
    }

    pub fn derivative(&self, t: f64) -> Result<f64, TimeFnError> {
        Ok(self.eval_with_derivative(t)?.1)
    }

    /// Value and first derivative at `t`.
    pub fn eval_with_derivative(&self, t: f64) -> Result<(f64, f64), TimeFnError> {
        Ok(match self {
            TimeFn::Constant { value } => (*value, 0.0),
            TimeFn::Linear { slope, intercept } => (slope * t + intercept, *slope),
            TimeFn::Exponential { amplitude, rate } => {
                let v = amplitude * (rate * t).exp();
                (v, rate * v)
            }
            TimeFn::Tabulated(tab) => (tab.eval(t)?, tab.derivative(t)?),
            TimeFn::Sum(fs) => {
                let (mut v, mut d) = (0.0, 0.0);
                for f in fs {
                    let (fv, fd) = f.eval_with_derivative(t)?;
                    v += fv;
                    d += fd;
                }
                (v, d)
            }
            TimeFn::Product(fs) => {
                let (mut v, mut d) = (1.0, 0.0);
                for f in fs {
                    let (fv, fd) = f.eval_with_derivative(t)?;
                    d = d * fv + v * fd;
                    v *= fv;
                }
                (v, d)
            }
            TimeFn::Reciprocal(f) => {
                let (fv, fd) = f.eval_with_derivative(t)?;
                (1.0 / fv, -fd / (fv * fv))
            }
        })
    }

    /// The derivative as a new `TimeFn`.
    ///
    /// Closed forms differentiate analytically. A table becomes the table of
    /// its nodal finite-difference slopes.
    pub fn derivative_fn(&self) -> TimeFn {
        match self {
            TimeFn::Constant { .. } => TimeFn::zero(),
            TimeFn::Linear { slope, .. } => TimeFn::constant(*slope),
            TimeFn::Exponential { amplitude, rate } => {
                TimeFn::exponential(amplitude * rate, *rate)
            }
            TimeFn::Tabulated(tab) => TimeFn::Tabulated(
                Table::new(tab.t0, tab.step, tab.slopes.clone())
                    .expect("slopes of a valid table form a valid table"),
            ),
            TimeFn::Sum(fs) => fs
                .iter()
                .map(TimeFn::derivative_fn)
                .fold(TimeFn::zero(), |acc, d| acc + d),
            TimeFn::Product(fs) => {
                let mut total = TimeFn::zero();
                for i in 0..fs.len() {
                    let d = fs[i].derivative_fn();
                    if d.is_zero() {
                        continue;
                    }
                    let term = fs
                        .iter()
                        .enumerate()
                        .fold(TimeFn::one(), |acc, (j, f)| {
                            if j == i {
                                acc * d.clone()
                            } else {
                                acc * f.clone()
                            }
                        });
                    total = total + term;
                }
                total
            }
            TimeFn::Reciprocal(f) => {
                let r = TimeFn::Reciprocal(f.clone());
                -(f.derivative_fn() * r.clone() * r)
            }
        }
    }

    pub fn recip(&self) -> TimeFn {
        match self {
            TimeFn::Constant { value } => TimeFn::constant(1.0 / value),
            TimeFn::Exponential { amplitude, rate } => TimeFn::exponential(1.0 / amplitude, -rate),
            TimeFn::Reciprocal(f) => (**f).clone(),
            other => TimeFn::Reciprocal(Box::new(other.clone())),
        }
    }

    pub fn scale(&self, factor: f64) -> TimeFn {
        TimeFn::constant(factor) * self.clone()
    }

    pub fn square(&self) -> TimeFn {
        self.clone() * self.clone()
    }

    /// Whether the function is certainly zero somewhere on its own domain.
    ///
    /// Exact for constants, exponentials and tables (any zero sample or sign
    /// change). Linear functions are only flagged when their root lies inside
    /// a bounded domain, so an unbounded linear function passes and must be
    /// checked pointwise.
    pub fn provably_vanishes(&self) -> bool {
        match self {
            TimeFn::Constant { value } => *value == 0.0,
            TimeFn::Exponential { amplitude, .. } => *amplitude == 0.0,
            TimeFn::Linear { slope, intercept } => *slope == 0.0 && *intercept == 0.0,
            TimeFn::Tabulated(tab) => {
                let v = &tab.values;
                v.iter().any(|x| *x == 0.0) || v.windows(2).any(|w| w[0].signum() != w[1].signum())
            }
            TimeFn::Product(fs) => fs.iter().any(TimeFn::provably_vanishes),
            _ => false,
        }
    }
}

impl fmt::Display for TimeFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeFn::Constant { value } => write!(f, "{value}"),
            TimeFn::Linear { slope, intercept } => write!(f, "({slope}·t + {intercept})"),
            TimeFn::Exponential { amplitude, rate } => write!(f, "{amplitude}·exp({rate}·t)"),
            TimeFn::Tabulated(tab) => {
                let d = tab.domain();
                write!(f, "table[{}..{}; {}]", d.lo, d.hi, tab.values.len())
            }
            TimeFn::Sum(fs) => {
                write!(f, "(")?;
                for (i, x) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
            TimeFn::Product(fs) => {
                for (i, x) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, "·")?;
                    }
                    write!(f, "{x}")?;
                }
                Ok(())
            }
            TimeFn::Reciprocal(x) => write!(f, "1/{x}"),
        }
    }
}

impl Add for TimeFn {
    type Output = TimeFn;

    fn add(self, rhs: TimeFn) -> TimeFn {
        match (self, rhs) {
            (a, b) if a.is_zero() => b,
            (a, b) if b.is_zero() => a,
            (TimeFn::Constant { value: a }, TimeFn::Constant { value: b }) => {
                TimeFn::constant(a + b)
            }
            (TimeFn::Linear { slope, intercept }, TimeFn::Constant { value })
            | (TimeFn::Constant { value }, TimeFn::Linear { slope, intercept }) => {
                TimeFn::linear(slope, intercept + value)
            }
            (
                TimeFn::Linear {
                    slope: s1,
                    intercept: i1,
                },
                TimeFn::Linear {
                    slope: s2,
                    intercept: i2,
                },
            ) => TimeFn::linear(s1 + s2, i1 + i2),
            (TimeFn::Sum(mut a), TimeFn::Sum(b)) => {
                a.extend(b);
                TimeFn::Sum(a)
            }
            (TimeFn::Sum(mut a), b) => {
                a.push(b);
                TimeFn::Sum(a)
            }
            (a, TimeFn::Sum(mut b)) => {
                b.insert(0, a);
                TimeFn::Sum(b)
            }
            (a, b) => TimeFn::Sum(vec![a, b]),
        }
    }
}

impl Mul for TimeFn {
    type Output = TimeFn;

    fn mul(self, rhs: TimeFn) -> TimeFn {
        match (self, rhs) {
            (a, _) if a.is_zero() => TimeFn::zero(),
            (_, b) if b.is_zero() => TimeFn::zero(),
            (a, b) if a.is_one() => b,
            (a, b) if b.is_one() => a,
            (TimeFn::Constant { value: a }, TimeFn::Constant { value: b }) => {
                TimeFn::constant(a * b)
            }
            (TimeFn::Constant { value: c }, TimeFn::Linear { slope, intercept })
            | (TimeFn::Linear { slope, intercept }, TimeFn::Constant { value: c }) => {
                TimeFn::linear(c * slope, c * intercept)
            }
            (TimeFn::Constant { value: c }, TimeFn::Exponential { amplitude, rate })
            | (TimeFn::Exponential { amplitude, rate }, TimeFn::Constant { value: c }) => {
                TimeFn::exponential(c * amplitude, rate)
            }
            (
                TimeFn::Exponential {
                    amplitude: a1,
                    rate: r1,
                },
                TimeFn::Exponential {
                    amplitude: a2,
                    rate: r2,
                },
            ) => TimeFn::exponential(a1 * a2, r1 + r2),
            (TimeFn::Constant { value: c }, TimeFn::Product(mut fs))
            | (TimeFn::Product(mut fs), TimeFn::Constant { value: c }) => {
                if let Some(TimeFn::Constant { value }) = fs.first_mut() {
                    *value *= c;
                    if *value == 1.0 {
                        fs.remove(0);
                    } else if *value == 0.0 {
                        return TimeFn::zero();
                    }
                } else {
                    fs.insert(0, TimeFn::constant(c));
                }
                match fs.len() {
                    1 => fs.pop().unwrap(),
                    _ => TimeFn::Product(fs),
                }
            }
            (TimeFn::Product(mut a), TimeFn::Product(b)) => {
                a.extend(b);
                TimeFn::Product(a)
            }
            (TimeFn::Product(mut a), b) => {
                a.push(b);
                TimeFn::Product(a)
            }
            (a, TimeFn::Product(mut b)) => {
                b.insert(0, a);
                TimeFn::Product(b)
            }
            (a, b) => TimeFn::Product(vec![a, b]),
        }
    }
}

impl Neg for TimeFn {
    type Output = TimeFn;

    fn neg(self) -> TimeFn {
        TimeFn::constant(-1.0) * self
    }
}

impl Sub for TimeFn {
    type Output = TimeFn;

    fn sub(self, rhs: TimeFn) -> TimeFn {
        self + (-rhs)
    }
}

macro_rules! forward_ref_binop {
    ($imp:ident, $method:ident) => {
        impl $imp<&TimeFn> for &TimeFn {
            type Output = TimeFn;

            fn $method(self, rhs: &TimeFn) -> TimeFn {
                $imp::$method(self.clone(), rhs.clone())
            }
        }

        impl $imp<f64> for &TimeFn {
            type Output = TimeFn;

            fn $method(self, rhs: f64) -> TimeFn {
                $imp::$method(self.clone(), TimeFn::constant(rhs))
            }
        }

        impl $imp<&TimeFn> for f64 {
            type Output = TimeFn;

            fn $method(self, rhs: &TimeFn) -> TimeFn {
                $imp::$method(TimeFn::constant(self), rhs.clone())
            }
        }
    };
}

forward_ref_binop!(Add, add);
forward_ref_binop!(Mul, mul);
forward_ref_binop!(Sub, sub);

impl Neg for &TimeFn {
    type Output = TimeFn;

    fn neg(self) -> TimeFn {
        -self.clone()
    }
}
