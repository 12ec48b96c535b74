use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{AlgebraError, CoefficientVector};
use crate::time_fn::TimeFn;

/// Relative threshold below which an invariant counts as zero, measured
/// against the window maximum of |ι₀|.
pub const EPS_CLS: f64 = 1e-9;

/// The eight gauge-invariant parameters as functions of time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvariantVector {
    pub iota0: TimeFn,
    pub iota1: TimeFn,
    pub iota2: TimeFn,
    pub iota3: TimeFn,
    pub iota4: TimeFn,
    pub iota5: TimeFn,
    pub iota6: TimeFn,
    pub iota7: TimeFn,
}

/// Invariant values at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvariantSample {
    pub t: f64,
    pub iota0: f64,
    pub iota1: f64,
    pub iota2: f64,
    pub iota3: f64,
    pub iota4: f64,
    pub iota5: f64,
    pub iota6: f64,
    pub iota7: f64,
}

impl InvariantSample {
    pub fn as_array(&self) -> [f64; 8] {
        [
            self.iota0, self.iota1, self.iota2, self.iota3, self.iota4, self.iota5, self.iota6,
            self.iota7,
        ]
    }
}

impl InvariantVector {
    pub fn components(&self) -> [&TimeFn; 8] {
        [
            &self.iota0,
            &self.iota1,
            &self.iota2,
            &self.iota3,
            &self.iota4,
            &self.iota5,
            &self.iota6,
            &self.iota7,
        ]
    }

    pub fn sample(&self, t: f64) -> Result<InvariantSample, AlgebraError> {
        let v = self.components().map(|f| f.eval(t));
        let [a, b, c, d, e, f, g, h] = v;
        Ok(InvariantSample {
            t,
            iota0: a?,
            iota1: b?,
            iota2: c?,
            iota3: d?,
            iota4: e?,
            iota5: f?,
            iota6: g?,
            iota7: h?,
        })
    }
}

/// Closed-form invariants of a coefficient vector.
///
/// ι₆ and ι₇ use the time derivatives of the vector passed in.
pub fn invariants(c: &CoefficientVector) -> Result<InvariantVector, AlgebraError> {
    if c.nu1.provably_vanishes() {
        return Err(AlgebraError::DegenerateNu1 { t: None });
    }
    let inv_nu1 = c.nu1.recip();
    let nu1_rate = &c.nu1.derivative_fn() * &inv_nu1;
    let mu3_over_nu1 = &c.mu3 * &inv_nu1;

    let iota5 = &c.nu1 * &(&c.mu2 + &c.mu5.scale(2.0))
        - &c.nu2 * &(&c.mu1 + &c.mu4.scale(2.0))
        + (&c.nu2.square() * &mu3_over_nu1).scale(2.0);
    let iota6 = &c.nu1 * &c.alpha1 - &c.nu2 * &c.alpha2 + &c.nu2 * &nu1_rate
        - c.nu2.derivative_fn();

    Ok(InvariantVector {
        iota0: &c.nu1 * &c.mu0,
        iota1: &c.nu1 * &c.mu2 - &c.nu2 * &c.mu1,
        iota2: &c.mu1 - &c.nu2.scale(2.0),
        iota3: TimeFn::one() + mu3_over_nu1.clone(),
        iota4: &c.mu4 - &(&c.mu1 * &mu3_over_nu1),
        iota5,
        iota6,
        iota7: &c.alpha2 - &nu1_rate,
    })
}

/// Time window over which zero patterns are judged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Window {
    pub t0: f64,
    pub t1: f64,
    #[serde(default = "Window::default_samples")]
    pub samples: usize,
}

impl Default for Window {
    fn default() -> Self {
        Window {
            t0: 0.0,
            t1: 1.0,
            samples: Window::default_samples(),
        }
    }
}

impl Window {
    fn default_samples() -> usize {
        21
    }

    pub fn new(t0: f64, t1: f64, samples: usize) -> Self {
        Window { t0, t1, samples }
    }

    pub fn times(&self) -> Vec<f64> {
        if self.samples <= 1 || self.t1 == self.t0 {
            return vec![self.t0];
        }
        let h = (self.t1 - self.t0) / (self.samples - 1) as f64;
        (0..self.samples).map(|i| self.t0 + i as f64 * h).collect()
    }

    fn max_abs(&self, f: &TimeFn) -> Result<f64, AlgebraError> {
        let mut m: f64 = 0.0;
        for t in self.times() {
            m = m.max(f.eval(t)?.abs());
        }
        Ok(m)
    }

    fn is_constant(&self, f: &TimeFn) -> Result<bool, AlgebraError> {
        if f.is_time_independent() {
            return Ok(true);
        }
        let mut scale: f64 = 0.0;
        let mut spread: f64 = 0.0;
        let ts = self.times();
        let first = f.eval(ts[0])?;
        for t in ts {
            let v = f.eval(t)?;
            scale = scale.max(v.abs());
            spread = spread.max((v - first).abs());
        }
        Ok(spread <= EPS_CLS * scale.max(1.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyTag {
    F0,
    F1,
    F3,
    F5,
    R0,
    R1,
    R3,
    R5,
    Unclassified,
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for FamilyTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "F0" => FamilyTag::F0,
            "F1" => FamilyTag::F1,
            "F3" => FamilyTag::F3,
            "F5" => FamilyTag::F5,
            "R0" => FamilyTag::R0,
            "R1" => FamilyTag::R1,
            "R3" => FamilyTag::R3,
            "R5" => FamilyTag::R5,
            "Unclassified" => FamilyTag::Unclassified,
            other => return Err(format!("unknown family tag '{other}'")),
        })
    }
}

impl FamilyTag {
    /// Whether `self` is contained in `other` within the same chain.
    pub fn is_within(self, other: FamilyTag) -> bool {
        fn rank(t: FamilyTag) -> Option<(u8, u8)> {
            Some(match t {
                FamilyTag::F0 => (0, 0),
                FamilyTag::F1 => (0, 1),
                FamilyTag::F3 => (0, 3),
                FamilyTag::F5 => (0, 5),
                FamilyTag::R0 => (1, 0),
                FamilyTag::R1 => (1, 1),
                FamilyTag::R3 => (1, 3),
                FamilyTag::R5 => (1, 5),
                FamilyTag::Unclassified => return None,
            })
        }
        match (rank(self), rank(other)) {
            (Some((ca, a)), Some((cb, b))) => ca == cb && a <= b,
            _ => false,
        }
    }

    /// Every R-member is an F-member with the same index.
    pub fn f_counterpart(self) -> FamilyTag {
        match self {
            FamilyTag::R0 => FamilyTag::F0,
            FamilyTag::R1 => FamilyTag::F1,
            FamilyTag::R3 => FamilyTag::F3,
            FamilyTag::R5 => FamilyTag::F5,
            other => other,
        }
    }
}

/// Which invariants vanish on a window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroPattern {
    pub zero: [bool; 8],
    pub scale: f64,
}

impl ZeroPattern {
    pub fn of(iv: &InvariantVector, window: &Window) -> Result<Self, AlgebraError> {
        if window.samples == 0 {
            return Err(AlgebraError::EmptyWindow);
        }
        let comps = iv.components();
        let scale0 = window.max_abs(comps[0])?;
        let scale = if scale0 > 0.0 { scale0 } else { 1.0 };
        let mut zero = [false; 8];
        for (k, f) in comps.iter().enumerate() {
            zero[k] = window.max_abs(f)? <= EPS_CLS * scale;
        }
        Ok(ZeroPattern { zero, scale })
    }

    fn all(&self, idx: &[usize]) -> bool {
        idx.iter().all(|&k| self.zero[k])
    }

    pub fn f_tag(&self) -> FamilyTag {
        if self.all(&[2, 3, 4, 5, 6, 7]) {
            FamilyTag::F0
        } else if self.all(&[2, 3, 4, 5]) {
            FamilyTag::F1
        } else if self.all(&[3, 4]) {
            FamilyTag::F3
        } else {
            FamilyTag::F5
        }
    }

    pub fn r_tag(&self) -> FamilyTag {
        if self.all(&[2, 3, 4, 5, 6]) {
            FamilyTag::R0
        } else if self.all(&[2, 3, 4, 5]) {
            FamilyTag::R1
        } else if self.all(&[3, 4]) {
            FamilyTag::R3
        } else {
            FamilyTag::R5
        }
    }
}

/// Smallest member of the F-chain whose zero pattern matches.
pub fn classify(iv: &InvariantVector, window: &Window) -> Result<FamilyTag, AlgebraError> {
    Ok(ZeroPattern::of(iv, window)?.f_tag())
}

/// Smallest member of the R-chain, or `Unclassified` when the vector lies
/// outside the restricted space (ν₁ and μ₀ time-independent, α₂ ≡ 0).
pub fn classify_restricted(
    c: &CoefficientVector,
    window: &Window,
) -> Result<FamilyTag, AlgebraError> {
    let iv = invariants(c)?;
    let pattern = ZeroPattern::of(&iv, window)?;
    let in_space = window.is_constant(&c.nu1)?
        && window.is_constant(&c.mu0)?
        && window.max_abs(&c.alpha2)? <= EPS_CLS * pattern.scale;
    Ok(if in_space {
        pattern.r_tag()
    } else {
        FamilyTag::Unclassified
    })
}

/// Both chain tags plus the underlying zero pattern.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub family: FamilyTag,
    pub restricted: FamilyTag,
    pub zero: [bool; 8],
}

impl Classification {
    pub fn of(c: &CoefficientVector, window: &Window) -> Result<Self, AlgebraError> {
        let iv = invariants(c)?;
        let pattern = ZeroPattern::of(&iv, window)?;
        Ok(Classification {
            family: pattern.f_tag(),
            restricted: classify_restricted(c, window)?,
            zero: pattern.zero,
        })
    }
}
