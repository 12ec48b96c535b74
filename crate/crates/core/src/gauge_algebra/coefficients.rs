use serde::{Deserialize, Serialize};

use super::{AlgebraError, GaugeElement};
use crate::time_fn::TimeFn;

/// The ten time-dependent coefficients of the gauge-closed NLSE family
///
/// ```text
/// i ∂ψ/∂t = i Σ_{j=1,2} ν_j R_j ψ + Σ_{k=1..5} μ_k R_k ψ + μ₀ V ψ
///           + α₁ ln|ψ|² ψ + α₂ (arg ψ) ψ
/// ```
///
/// Storage uses the symmetric (μ₂, μ₅) parameterization; `kappa` and `xi`
/// are the derived views `κ = μ₂ − ν₁/2`, `ξ = μ₅ + ν₁/4`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientVector {
    #[serde(default)]
    pub nu1: TimeFn,
    #[serde(default)]
    pub nu2: TimeFn,
    #[serde(default)]
    pub mu0: TimeFn,
    #[serde(default)]
    pub mu1: TimeFn,
    #[serde(default)]
    pub mu2: TimeFn,
    #[serde(default)]
    pub mu3: TimeFn,
    #[serde(default)]
    pub mu4: TimeFn,
    #[serde(default)]
    pub mu5: TimeFn,
    #[serde(default)]
    pub alpha1: TimeFn,
    #[serde(default)]
    pub alpha2: TimeFn,
}

/// Coefficient values at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CoefficientSample {
    pub nu1: f64,
    pub nu2: f64,
    pub mu0: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub mu3: f64,
    pub mu4: f64,
    pub mu5: f64,
    pub alpha1: f64,
    pub alpha2: f64,
}

impl CoefficientSample {
    pub fn as_array(&self) -> [f64; 10] {
        [
            self.nu1, self.nu2, self.mu0, self.mu1, self.mu2, self.mu3, self.mu4, self.mu5,
            self.alpha1, self.alpha2,
        ]
    }

    /// True when every coefficient multiplying a nonlinear functional or
    /// the logarithmic/phase terms vanishes, i.e. the equation is linear.
    pub fn is_linear(&self) -> bool {
        let [a, b, c, d, e, f, g] = self.nonlinear_brackets();
        [a, b, c, d, e, f, g, self.alpha1, self.alpha2]
            .iter()
            .all(|v| *v == 0.0)
    }

    /// Coefficients of the functional terms after the Laplacian has been
    /// separated out: `[ν₂, μ₁, μ₂ − ν₁/2, μ₃ + ν₁, μ₄, μ₅ + ν₁/4, ν₁ − ν₁]`.
    ///
    /// The last slot is always zero; it keeps the array shape fixed for
    /// callers that zip against the five functionals plus the imaginary R₂.
    pub fn nonlinear_brackets(&self) -> [f64; 7] {
        [
            self.nu2,
            self.mu1,
            self.mu2 - 0.5 * self.nu1,
            self.mu3 + self.nu1,
            self.mu4,
            self.mu5 + 0.25 * self.nu1,
            0.0,
        ]
    }
}

impl CoefficientVector {
    pub const NAMES: [&'static str; 10] = [
        "nu1", "nu2", "mu0", "mu1", "mu2", "mu3", "mu4", "mu5", "alpha1", "alpha2",
    ];

    pub fn components(&self) -> [&TimeFn; 10] {
        [
            &self.nu1,
            &self.nu2,
            &self.mu0,
            &self.mu1,
            &self.mu2,
            &self.mu3,
            &self.mu4,
            &self.mu5,
            &self.alpha1,
            &self.alpha2,
        ]
    }

    pub fn from_components(c: [TimeFn; 10]) -> Self {
        let [nu1, nu2, mu0, mu1, mu2, mu3, mu4, mu5, alpha1, alpha2] = c;
        CoefficientVector {
            nu1,
            nu2,
            mu0,
            mu1,
            mu2,
            mu3,
            mu4,
            mu5,
            alpha1,
            alpha2,
        }
    }

    pub fn from_constants(c: [f64; 10]) -> Self {
        CoefficientVector::from_components(c.map(TimeFn::constant))
    }

    pub fn validate(&self) -> Result<(), AlgebraError> {
        if self.nu1.provably_vanishes() {
            return Err(AlgebraError::DegenerateNu1 { t: None });
        }
        Ok(())
    }

    pub fn sample(&self, t: f64) -> Result<CoefficientSample, AlgebraError> {
        let nu1 = self.nu1.eval(t)?;
        if nu1 == 0.0 || !nu1.is_finite() {
            return Err(AlgebraError::DegenerateNu1 { t: Some(t) });
        }
        Ok(CoefficientSample {
            nu1,
            nu2: self.nu2.eval(t)?,
            mu0: self.mu0.eval(t)?,
            mu1: self.mu1.eval(t)?,
            mu2: self.mu2.eval(t)?,
            mu3: self.mu3.eval(t)?,
            mu4: self.mu4.eval(t)?,
            mu5: self.mu5.eval(t)?,
            alpha1: self.alpha1.eval(t)?,
            alpha2: self.alpha2.eval(t)?,
        })
    }

    pub fn kappa(&self) -> TimeFn {
        &self.mu2 - &self.nu1.scale(0.5)
    }

    pub fn xi(&self) -> TimeFn {
        &self.mu5 + &self.nu1.scale(0.25)
    }

    pub fn is_time_independent(&self) -> bool {
        self.components().iter().all(|c| c.is_time_independent())
    }

    /// Embedding of the linear equation `i ∂ψ/∂t = (ν₁ Δ + μ₀ V) ψ`:
    /// μ₂ = ν₁/2, μ₃ = −ν₁, μ₅ = −ν₁/4 so every functional bracket vanishes.
    pub fn linear(nu1: impl Into<TimeFn>, mu0: impl Into<TimeFn>) -> Self {
        let nu1 = nu1.into();
        CoefficientVector {
            mu2: nu1.scale(0.5),
            mu3: -&nu1,
            mu5: nu1.scale(-0.25),
            mu0: mu0.into(),
            nu1,
            ..Default::default()
        }
    }

    /// Six-parameter family with ν₂ = μ₁/2, μ₃ = −ν₁, μ₄ = −μ₁,
    /// μ₂ = κ + ν₁/2 and μ₅ = −κ/2 − ν₁/4.
    pub fn f1(p: F1Params) -> Self {
        let F1Params {
            nu1,
            mu0,
            mu1,
            kappa,
            alpha1,
            alpha2,
        } = p;
        CoefficientVector {
            nu2: mu1.scale(0.5),
            mu2: &kappa + &nu1.scale(0.5),
            mu3: -&nu1,
            mu4: -&mu1,
            mu5: kappa.scale(-0.5) - nu1.scale(0.25),
            nu1,
            mu0,
            mu1,
            alpha1,
            alpha2,
        }
    }

    /// Eight-parameter family: ν₂ and ξ become free, μ₃ = −ν₁ and μ₄ = −μ₁
    /// still hold.
    pub fn f3(p: F3Params) -> Self {
        let F3Params {
            nu1,
            nu2,
            mu0,
            mu1,
            kappa,
            xi,
            alpha1,
            alpha2,
        } = p;
        CoefficientVector {
            mu2: &kappa + &nu1.scale(0.5),
            mu3: -&nu1,
            mu4: -&mu1,
            mu5: &xi - &nu1.scale(0.25),
            nu1,
            nu2,
            mu0,
            mu1,
            alpha1,
            alpha2,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct F1Params {
    pub nu1: TimeFn,
    pub mu0: TimeFn,
    pub mu1: TimeFn,
    pub kappa: TimeFn,
    pub alpha1: TimeFn,
    pub alpha2: TimeFn,
}

#[derive(Debug, Clone, Default)]
pub struct F3Params {
    pub nu1: TimeFn,
    pub nu2: TimeFn,
    pub mu0: TimeFn,
    pub mu1: TimeFn,
    pub kappa: TimeFn,
    pub xi: TimeFn,
    pub alpha1: TimeFn,
    pub alpha2: TimeFn,
}

/// Warnings attached to an acted coefficient vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ActionNote {
    /// γ̇ or Λ̇ involves a table and is one-sided near its ends.
    BoundaryDerivative { component: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActedCoefficients {
    pub coefficients: CoefficientVector,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<ActionNote>,
}

fn derivative_notes(g: &GaugeElement) -> Vec<ActionNote> {
    let mut notes = Vec::new();
    if g.gamma.contains_table() {
        notes.push(ActionNote::BoundaryDerivative {
            component: "gamma".into(),
        });
    }
    if g.lambda.contains_table() {
        notes.push(ActionNote::BoundaryDerivative {
            component: "lambda".into(),
        });
    }
    notes
}

fn require_pure(g: &GaugeElement) -> Result<(), AlgebraError> {
    g.validate()?;
    if !g.is_pure_nonlinear() {
        return Err(AlgebraError::ThetaNotSupported);
    }
    Ok(())
}

/// Action of `N_(γ, Λ)` on a coefficient vector.
///
/// Linear on (ν₁, ν₂, μ₀, …, μ₅) through a lower-triangular 8×8 matrix and
/// affine on (α₁, α₂) with an inhomogeneous part built from γ̇ and Λ̇.
pub fn act_on_coefficients(
    g: &GaugeElement,
    c: &CoefficientVector,
) -> Result<ActedCoefficients, AlgebraError> {
    require_pure(g)?;
    c.validate()?;
    g.lambda.check_overlap(&c.nu1)?;

    let gamma = &g.gamma;
    let lambda = &g.lambda;
    let inv_l = lambda.recip();
    let g_over_l = gamma * &inv_l;
    let g2_over_l = &gamma.square() * &inv_l;

    let nu1 = &c.nu1 * &inv_l;
    let nu2 = &(&g_over_l * &c.nu1).scale(-0.5) + &c.nu2;
    let mu0 = lambda * &c.mu0;
    let mu1 = &c.mu1 - &(&g_over_l * &c.nu1);
    let mu2 = (&g2_over_l * &c.nu1).scale(0.5) - gamma * &c.nu2 - (gamma * &c.mu1).scale(0.5)
        + lambda * &c.mu2;
    let mu3 = &c.mu3 * &inv_l;
    let mu4 = &c.mu4 - &(&g_over_l * &c.mu3);
    let mu5 = (&g2_over_l * &c.mu3).scale(0.25) - (gamma * &c.mu4).scale(0.5) + lambda * &c.mu5;

    let lambda_rate = &lambda.derivative_fn() * &inv_l;
    let gamma_dot = gamma.derivative_fn();
    let alpha1 = lambda * &c.alpha1 - (gamma * &c.alpha2).scale(0.5)
        + (gamma * &lambda_rate - gamma_dot).scale(0.5);
    let alpha2 = &c.alpha2 - &lambda_rate;

    Ok(ActedCoefficients {
        coefficients: CoefficientVector {
            nu1,
            nu2,
            mu0,
            mu1,
            mu2,
            mu3,
            mu4,
            mu5,
            alpha1,
            alpha2,
        },
        notes: derivative_notes(g),
    })
}

/// Parameters of the linear equation `i ∂ψ/∂t = (ν₁ Δ + μ₀ V) ψ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearParams {
    pub nu1: f64,
    pub mu0: f64,
}

impl Default for LinearParams {
    fn default() -> Self {
        LinearParams { nu1: -0.5, mu0: 1.0 }
    }
}

impl LinearParams {
    pub fn embed(&self) -> CoefficientVector {
        CoefficientVector::linear(self.nu1, self.mu0)
    }
}

/// Constrained coefficients of the gauge transform of a linear equation,
/// written directly from the closed-form constraints:
///
/// ```text
/// ν₁' = ν₁/Λ,  μ₀' = Λ μ₀,  μ₁' = −γ ν₁/Λ,  κ' = (γ² + Λ² − 1) ν₁ / (2Λ),
/// ν₂' = μ₁'/2, α₁' = γ Λ̇/(2Λ) − γ̇/2,  α₂' = −Λ̇/Λ
/// ```
///
/// mapped into the (μ₂, …, μ₅) storage with μ₃' = −ν₁', μ₄' = −μ₁',
/// μ₂' = κ' + ν₁'/2 and μ₅' = −κ'/2 − ν₁'/4.
pub fn closure_coefficients(
    linear: LinearParams,
    g: &GaugeElement,
) -> Result<ActedCoefficients, AlgebraError> {
    require_pure(g)?;
    if linear.nu1 == 0.0 {
        return Err(AlgebraError::DegenerateNu1 { t: None });
    }
    let nu1 = linear.nu1;
    let gamma = &g.gamma;
    let lambda = &g.lambda;
    let inv_l = lambda.recip();

    let nu1p = inv_l.scale(nu1);
    let mu0p = lambda.scale(linear.mu0);
    let mu1p = (gamma * &inv_l).scale(-nu1);
    let kappa = &(&(&gamma.square() + &lambda.square()) - &TimeFn::one()) * &inv_l.scale(0.5 * nu1);
    let lambda_rate = &lambda.derivative_fn() * &inv_l;
    let alpha1 = (gamma * &lambda_rate).scale(0.5) - gamma.derivative_fn().scale(0.5);
    let alpha2 = -lambda_rate;

    let params = F1Params {
        nu1: nu1p,
        mu0: mu0p,
        mu1: mu1p,
        kappa,
        alpha1,
        alpha2,
    };
    Ok(ActedCoefficients {
        coefficients: CoefficientVector::f1(params),
        notes: derivative_notes(g),
    })
}
