use std::fmt;
use std::sync::Arc;

use super::{AlgebraError, GaugeElement};

type KFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;
type LambdaFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Element `N_(k, λ)` of the larger group obtained from the intertwining
/// relation alone: `ψ ↦ |ψ| exp[i(k(|ψ|, x, t) + λ(x, t) arg ψ)]`.
///
/// `k` takes `(modulus, x, t)`, `λ` takes `(x, t)`.
#[derive(Clone)]
pub struct AffineGaugeElement {
    k: KFn,
    lambda: LambdaFn,
}

impl fmt::Debug for AffineGaugeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AffineGaugeElement").finish_non_exhaustive()
    }
}

impl AffineGaugeElement {
    pub fn new(
        k: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
        lambda: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        AffineGaugeElement {
            k: Arc::new(k),
            lambda: Arc::new(lambda),
        }
    }

    pub fn identity() -> Self {
        AffineGaugeElement::new(|_, _, _| 0.0, |_, _| 1.0)
    }

    /// Restriction `k = γ(t) ln R + θ(x, t)`, `λ = Λ(t)`.
    pub fn from_gauge(g: &GaugeElement) -> Self {
        let (g1, g2) = (g.clone(), g.clone());
        AffineGaugeElement::new(
            move |r, x, t| {
                let gamma = g1.gamma.eval(t).unwrap_or(f64::NAN);
                let theta = g1.theta.eval(x, t).unwrap_or(f64::NAN);
                gamma * r.ln() + theta
            },
            move |_, t| g2.lambda.eval(t).unwrap_or(f64::NAN),
        )
    }

    pub fn k(&self, modulus: f64, x: f64, t: f64) -> f64 {
        (self.k)(modulus, x, t)
    }

    pub fn lambda(&self, x: f64, t: f64) -> Result<f64, AlgebraError> {
        let l = (self.lambda)(x, t);
        if l == 0.0 || !l.is_finite() {
            return Err(AlgebraError::DegenerateAffine { x, t });
        }
        Ok(l)
    }

    /// `self ∘ other = (k_a + λ_a k_b, λ_a λ_b)`.
    pub fn compose(&self, other: &AffineGaugeElement) -> AffineGaugeElement {
        let (ka, la) = (self.k.clone(), self.lambda.clone());
        let (kb, lb) = (other.k.clone(), other.lambda.clone());
        let la2 = la.clone();
        AffineGaugeElement::new(
            move |r, x, t| ka(r, x, t) + la(x, t) * kb(r, x, t),
            move |x, t| la2(x, t) * lb(x, t),
        )
    }

    /// `(−k/λ, 1/λ)`.
    pub fn inverse(&self) -> AffineGaugeElement {
        let (k, l) = (self.k.clone(), self.lambda.clone());
        let l2 = l.clone();
        AffineGaugeElement::new(move |r, x, t| -k(r, x, t) / l(x, t), move |x, t| 1.0 / l2(x, t))
    }

    /// Two-by-two affine representation `[[1, 0], [k, λ]]`.
    pub fn matrix_rep(&self, modulus: f64, x: f64, t: f64) -> Result<[[f64; 2]; 2], AlgebraError> {
        let l = self.lambda(x, t)?;
        Ok([[1.0, 0.0], [self.k(modulus, x, t), l]])
    }

    /// Checks λ ≠ 0 on the given sample points.
    pub fn check_nondegenerate(&self, points: &[(f64, f64)]) -> Result<(), AlgebraError> {
        for &(x, t) in points {
            self.lambda(x, t)?;
        }
        Ok(())
    }
}
