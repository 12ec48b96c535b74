use serde::{Deserialize, Serialize};

use super::AlgebraError;
use crate::time_fn::TimeFn;

/// Spatial factor of one term of a linear gauge phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "kind",
    content = "params",
    rename_all = "snake_case",
    deny_unknown_fields
)]
pub enum SpatialProfile {
    Constant,
    Linear,
    Quadratic,
    Cosine { wavenumber: f64 },
    Sine { wavenumber: f64 },
}

impl SpatialProfile {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            SpatialProfile::Constant => 1.0,
            SpatialProfile::Linear => x,
            SpatialProfile::Quadratic => x * x,
            SpatialProfile::Cosine { wavenumber } => (wavenumber * x).cos(),
            SpatialProfile::Sine { wavenumber } => (wavenumber * x).sin(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThetaTerm {
    pub coeff: TimeFn,
    pub profile: SpatialProfile,
}

/// A phase field `θ(x, t) = Σ coeff_j(t) · profile_j(x)` in radians.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ThetaField {
    terms: Vec<ThetaTerm>,
}

impl ThetaField {
    pub fn zero() -> Self {
        ThetaField::default()
    }

    pub fn from_terms(terms: Vec<ThetaTerm>) -> Self {
        ThetaField {
            terms: terms.into_iter().filter(|t| !t.coeff.is_zero()).collect(),
        }
    }

    pub fn single(coeff: TimeFn, profile: SpatialProfile) -> Self {
        ThetaField::from_terms(vec![ThetaTerm { coeff, profile }])
    }

    pub fn terms(&self) -> &[ThetaTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, x: f64, t: f64) -> Result<f64, AlgebraError> {
        let mut s = 0.0;
        for term in &self.terms {
            s += term.coeff.eval(t)? * term.profile.eval(x);
        }
        Ok(s)
    }

    pub fn scaled(&self, factor: &TimeFn) -> ThetaField {
        ThetaField::from_terms(
            self.terms
                .iter()
                .map(|t| ThetaTerm {
                    coeff: factor * &t.coeff,
                    profile: t.profile.clone(),
                })
                .collect(),
        )
    }

    pub fn plus(&self, other: &ThetaField) -> ThetaField {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        ThetaField::from_terms(terms)
    }

    fn coefficient_fns(&self) -> impl Iterator<Item = &TimeFn> {
        self.terms.iter().map(|t| &t.coeff)
    }
}

/// Element `N_(γ, Λ, θ)` of the nonlinear gauge group.
///
/// Acts on a wave function as
/// `ψ ↦ |ψ| exp[i(γ(t) ln|ψ| + Λ(t) arg ψ + θ(x, t))]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeElement {
    pub gamma: TimeFn,
    pub lambda: TimeFn,
    #[serde(default, skip_serializing_if = "ThetaField::is_zero")]
    pub theta: ThetaField,
}

impl GaugeElement {
    pub fn new(gamma: TimeFn, lambda: TimeFn, theta: ThetaField) -> Result<Self, AlgebraError> {
        let g = GaugeElement {
            gamma,
            lambda,
            theta,
        };
        g.validate()?;
        Ok(g)
    }

    /// Element of the pure nonlinear subgroup (θ ≡ 0).
    pub fn nonlinear(gamma: TimeFn, lambda: TimeFn) -> Result<Self, AlgebraError> {
        GaugeElement::new(gamma, lambda, ThetaField::zero())
    }

    pub fn constant(gamma: f64, lambda: f64) -> Result<Self, AlgebraError> {
        GaugeElement::nonlinear(TimeFn::constant(gamma), TimeFn::constant(lambda))
    }

    pub fn identity() -> Self {
        GaugeElement {
            gamma: TimeFn::zero(),
            lambda: TimeFn::one(),
            theta: ThetaField::zero(),
        }
    }

    /// `N_(0,-1,0)`, complex conjugation.
    pub fn conjugation() -> Self {
        GaugeElement {
            gamma: TimeFn::zero(),
            lambda: TimeFn::constant(-1.0),
            theta: ThetaField::zero(),
        }
    }

    /// Structural check: Λ must not vanish identically and every component
    /// must share a common time domain.
    pub fn validate(&self) -> Result<(), AlgebraError> {
        if self.lambda.provably_vanishes() {
            return Err(AlgebraError::DegenerateLambda { t: None });
        }
        let mut dom = self.gamma.check_overlap(&self.lambda)?;
        for c in self.theta.coefficient_fns() {
            let d = c.domain();
            dom = dom.intersect(&d).ok_or_else(|| {
                AlgebraError::Domain(crate::time_fn::TimeFnError::DisjointDomains {
                    a_lo: dom.lo,
                    a_hi: dom.hi,
                    b_lo: d.lo,
                    b_hi: d.hi,
                })
            })?;
        }
        Ok(())
    }

    pub fn is_pure_nonlinear(&self) -> bool {
        self.theta.is_zero()
    }

    /// `(γ(t), Λ(t))`, failing if Λ(t) = 0.
    pub fn params_at(&self, t: f64) -> Result<(f64, f64), AlgebraError> {
        let lambda = self.lambda.eval(t)?;
        if lambda == 0.0 || !lambda.is_finite() {
            return Err(AlgebraError::DegenerateLambda { t: Some(t) });
        }
        Ok((self.gamma.eval(t)?, lambda))
    }

    /// Group product `self ∘ other`:
    /// `(γ_a + Λ_a γ_b, Λ_a Λ_b, θ_a + Λ_a θ_b)`.
    pub fn compose(&self, other: &GaugeElement) -> Result<GaugeElement, AlgebraError> {
        self.validate()?;
        other.validate()?;
        self.lambda.check_overlap(&other.lambda)?;
        self.gamma.check_overlap(&other.gamma)?;
        let out = GaugeElement {
            gamma: &self.gamma + &(&self.lambda * &other.gamma),
            lambda: &self.lambda * &other.lambda,
            theta: self.theta.plus(&other.theta.scaled(&self.lambda)),
        };
        out.validate()?;
        Ok(out)
    }

    /// `(−γ/Λ, 1/Λ, −θ/Λ)`.
    pub fn inverse(&self) -> Result<GaugeElement, AlgebraError> {
        self.validate()?;
        let inv_lambda = self.lambda.recip();
        let neg_inv = -&inv_lambda;
        Ok(GaugeElement {
            gamma: &neg_inv * &self.gamma,
            lambda: inv_lambda,
            theta: self.theta.scaled(&neg_inv),
        })
    }

    /// Three-by-three lower-triangular representation
    /// `[[1,0,0],[θ,Λ,0],[γ,0,Λ]]` at position `x` and time `t`.
    ///
    /// Composition maps to matrix multiplication.
    pub fn matrix_rep(&self, x: f64, t: f64) -> Result<[[f64; 3]; 3], AlgebraError> {
        let (gamma, lambda) = self.params_at(t)?;
        let theta = self.theta.eval(x, t)?;
        Ok([
            [1.0, 0.0, 0.0],
            [theta, lambda, 0.0],
            [gamma, 0.0, lambda],
        ])
    }
}

pub fn mat3_mul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: f64) -> TimeFn {
        TimeFn::constant(v)
    }

    #[test]
    fn identity_is_neutral() {
        let g = GaugeElement::new(
            TimeFn::linear(0.2, 1.0),
            TimeFn::exponential(2.0, 0.1),
            ThetaField::single(c(0.5), SpatialProfile::Quadratic),
        )
        .unwrap();
        assert_eq!(GaugeElement::identity().compose(&g).unwrap(), g);
        assert_eq!(g.compose(&GaugeElement::identity()).unwrap(), g);
    }

    #[test]
    fn worked_composition() {
        let a = GaugeElement::constant(1.0, 2.0).unwrap();
        let b = GaugeElement::constant(3.0, 1.0).unwrap();
        let ab = a.compose(&b).unwrap();
        assert_eq!(ab.gamma, c(7.0));
        assert_eq!(ab.lambda, c(2.0));
        assert!(ab.theta.is_zero());
        let m = mat3_mul(&a.matrix_rep(0.0, 0.0).unwrap(), &b.matrix_rep(0.0, 0.0).unwrap());
        assert_eq!(m, ab.matrix_rep(0.0, 0.0).unwrap());
    }

    #[test]
    fn matrix_layout() {
        let g = GaugeElement::constant(3.0, 1.0).unwrap();
        let m = g.matrix_rep(1.3, 4.2).unwrap();
        assert_eq!(m, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [3.0, 0.0, 1.0]]);
        assert_eq!(
            GaugeElement::identity().matrix_rep(0.0, 0.0).unwrap(),
            [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
        );
    }

    #[test]
    fn inverses() {
        assert_eq!(GaugeElement::identity().inverse().unwrap(), GaugeElement::identity());
        let g = GaugeElement::constant(3.0, 2.0).unwrap().inverse().unwrap();
        assert_eq!(g.gamma, c(-1.5));
        assert_eq!(g.lambda, c(0.5));
        let conj = GaugeElement::conjugation();
        assert_eq!(conj.inverse().unwrap(), conj);
        assert_eq!(conj.compose(&conj).unwrap(), GaugeElement::identity());
    }

    #[test]
    fn degenerate_lambda_rejected() {
        let err = GaugeElement::constant(1.0, 0.0).unwrap_err();
        assert!(matches!(err, AlgebraError::DegenerateLambda { .. }));
        let g = GaugeElement {
            gamma: c(0.0),
            lambda: c(0.0),
            theta: ThetaField::zero(),
        };
        assert!(g.inverse().is_err());
        // A linear Λ passes structurally but fails where it crosses zero.
        let h = GaugeElement::nonlinear(c(0.0), TimeFn::linear(1.0, -0.5)).unwrap();
        assert!(matches!(
            h.params_at(0.5),
            Err(AlgebraError::DegenerateLambda { t: Some(_) })
        ));
    }

    #[test]
    fn theta_composes_with_lambda_weight() {
        let a = GaugeElement::new(c(0.0), c(2.0), ThetaField::single(c(1.0), SpatialProfile::Linear))
            .unwrap();
        let b = GaugeElement::new(c(0.0), c(1.0), ThetaField::single(c(3.0), SpatialProfile::Constant))
            .unwrap();
        let ab = a.compose(&b).unwrap();
        // θ_a + Λ_a θ_b = x + 6
        assert_eq!(ab.theta.eval(0.5, 0.0).unwrap(), 6.5);
    }

    #[test]
    fn json_field_names() {
        let g = GaugeElement::new(
            c(1.0),
            c(2.0),
            ThetaField::single(c(0.1), SpatialProfile::Cosine { wavenumber: 0.5 }),
        )
        .unwrap();
        let v: serde_json::Value = serde_json::to_value(&g).unwrap();
        assert!(v.get("gamma").is_some() && v.get("lambda").is_some() && v.get("theta").is_some());
        let back: GaugeElement = serde_json::from_value(v).unwrap();
        assert_eq!(back, g);
        let no_theta: GaugeElement = serde_json::from_str(
            r#"{"gamma":{"kind":"constant","params":{"value":0.5}},"lambda":{"kind":"constant","params":{"value":1.0}}}"#,
        )
        .unwrap();
        assert!(no_theta.theta.is_zero());
    }
}
