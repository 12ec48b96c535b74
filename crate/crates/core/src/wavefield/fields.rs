use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{SpectralDerivative, WaveError, WaveFunction};

/// Relative floors guarding divisions by ρ and the phase of small values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Floors {
    /// `ε_reg = reg · max ρ`.
    #[serde(default = "Floors::default_reg")]
    pub reg: f64,
    /// `ε_phase = phase · max |ψ|`.
    #[serde(default = "Floors::default_phase")]
    pub phase: f64,
}

impl Default for Floors {
    fn default() -> Self {
        Floors {
            reg: Floors::default_reg(),
            phase: Floors::default_phase(),
        }
    }
}

impl Floors {
    fn default_reg() -> f64 {
        1e-12
    }

    fn default_phase() -> f64 {
        1e-8
    }

    pub fn eps_reg(&self, max_rho: f64) -> f64 {
        self.reg * max_rho
    }

    pub fn eps_phase(&self, max_modulus: f64) -> f64 {
        self.phase * max_modulus
    }
}

/// `ρ = |ψ|²` and `J = Im(ψ̄ ∇ψ)`.
pub fn density_current(psi: &WaveFunction, d: &impl SpectralDerivative) -> (Vec<f64>, Vec<f64>) {
    let grad = d.gradient(&psi.values);
    let rho = psi.density();
    let j = psi
        .values
        .iter()
        .zip(&grad)
        .map(|(z, g)| (z.conj() * g).im)
        .collect();
    (rho, j)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldDiagnostics {
    pub rho: Vec<f64>,
    pub current: Vec<f64>,
    pub r1: Vec<f64>,
    pub r2: Vec<f64>,
    pub r3: Vec<f64>,
    pub r4: Vec<f64>,
    pub r5: Vec<f64>,
    /// Set when some ρ fell below ε_reg and the shifted density was used.
    pub regularized: bool,
    pub eps_reg: f64,
}

/// The five functionals
/// `R₁ = ∇·J/ρ, R₂ = Δρ/ρ, R₃ = J²/ρ², R₄ = J·∇ρ/ρ², R₅ = (∇ρ)²/ρ²`.
///
/// Derivatives of ρ and J are taken spectrally from the fields themselves.
/// If min ρ < ε_reg every division uses `ρ + ε_reg`.
pub fn functionals(
    psi: &WaveFunction,
    d: &impl SpectralDerivative,
    floors: &Floors,
) -> Result<FieldDiagnostics, WaveError> {
    let (rho, current) = density_current(psi, d);
    let (grad_rho, div_j) = d.gradient_pair(&rho, &current);
    let lap_rho = d.laplacian_real(&rho);

    let max_rho = rho.iter().cloned().fold(0.0, f64::max);
    if max_rho == 0.0 {
        return Err(WaveError::NumericalDomain("density vanishes identically".into()));
    }
    let eps_reg = floors.eps_reg(max_rho);
    let regularized = rho.iter().any(|&r| r < eps_reg);
    let shift = if regularized { eps_reg } else { 0.0 };

    let n = rho.len();
    let (mut r1, mut r2, mut r3, mut r4, mut r5) =
        (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for i in 0..n {
        let inv = 1.0 / (rho[i] + shift);
        r1[i] = div_j[i] * inv;
        r2[i] = lap_rho[i] * inv;
        r3[i] = current[i] * current[i] * inv * inv;
        r4[i] = current[i] * grad_rho[i] * inv * inv;
        r5[i] = grad_rho[i] * grad_rho[i] * inv * inv;
    }
    let all = r1.iter().chain(&r2).chain(&r3).chain(&r4).chain(&r5);
    if all.into_iter().any(|v| !v.is_finite()) {
        return Err(WaveError::NumericalDomain(
            "non-finite functional after regularization".into(),
        ));
    }
    Ok(FieldDiagnostics {
        rho,
        current,
        r1,
        r2,
        r3,
        r4,
        r5,
        regularized,
        eps_reg,
    })
}

/// A continuous branch of arg ψ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseUnwrap {
    pub phase: Vec<f64>,
    /// Net number of turns picked up across the periodic seam.
    pub winding: i64,
}

fn wrap(d: f64) -> f64 {
    let mut r = d.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}

/// Unwraps arg ψ from the principal value at the leftmost grid point.
///
/// Fails if any |ψ| falls below ε_phase.
pub fn unwrap_phase(psi: &WaveFunction, floors: &Floors) -> Result<PhaseUnwrap, WaveError> {
    let floor = floors.eps_phase(psi.max_modulus());
    if let Some((index, z)) = psi
        .values
        .iter()
        .enumerate()
        .find(|(_, z)| !(z.norm() >= floor && z.norm() > 0.0))
    {
        return Err(WaveError::PhaseBranch {
            index,
            modulus: z.norm(),
            floor,
        });
    }
    Ok(unwrap_unchecked(&psi.values))
}

pub(crate) fn unwrap_unchecked(values: &[num_complex::Complex64]) -> PhaseUnwrap {
    let principal: Vec<f64> = values.iter().map(|z| z.arg()).collect();
    let mut phase = Vec::with_capacity(principal.len());
    let mut acc = principal[0];
    phase.push(acc);
    for w in principal.windows(2) {
        acc += wrap(w[1] - w[0]);
        phase.push(acc);
    }
    let closing = acc + wrap(principal[0] - principal[principal.len() - 1]);
    let winding = ((closing - phase[0]) / (2.0 * PI)).round() as i64;
    PhaseUnwrap { phase, winding }
}
