//! Bath deformation parameters and the thermal occupancy they induce.
//!
//! The bath ancillas carry a non-Hermitian but PT-symmetric Hamiltonian with
//! deformation strength `ε ≥ 0`. Its Hermitian counterpart (obtained by the
//! exponential momentum-squared similarity map) is an oscillator with mass
//! `1/μ²` and stiffness `ω²`, hence angular frequency `ωμ`, where
//! `μ = √(1 + 4ε²)`. The only trace the deformation leaves on the
//! thermodynamics is through that rescaled frequency: at inverse temperature
//! `β` the bath populates the working substance like an ordinary bath at the
//! effective inverse temperature `β_eff = μβ`.
//!
//! Natural units `ħ = m = k_B = 1` everywhere.

use serde::Serialize;

use crate::error::{Error, Result};

/// Deformation strength with its derived quantities.
///
/// `epsilon` is the fundamental parameter; `mu` is derived from it. The
/// `dyson_coeff` is the coefficient `ε/ω` multiplying `p²` in the exponent of
/// the similarity map at reference frequency `ω`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PTParams {
    pub epsilon: f64,
    pub mu: f64,
    pub dyson_coeff: f64,
}

impl PTParams {
    pub fn new(epsilon: f64, omega_ref: f64) -> Result<Self> {
        if !(omega_ref > 0.0) {
            return Err(Error::Domain(format!(
                "reference frequency must be positive, got {omega_ref}"
            )));
        }
        Ok(PTParams {
            epsilon,
            mu: mu_from_epsilon(epsilon)?,
            dyson_coeff: epsilon / omega_ref,
        })
    }
}

/// `μ = √(1 + 4ε²)`. Monotone increasing, `μ(0) = 1`.
pub fn mu_from_epsilon(epsilon: f64) -> Result<f64> {
    if !(epsilon >= 0.0) {
        return Err(Error::Domain(format!(
            "epsilon must be non-negative, got {epsilon}"
        )));
    }
    Ok((1.0 + 4.0 * epsilon * epsilon).sqrt())
}

/// Inverse of [`mu_from_epsilon`]: `ε = √(μ² − 1)/2`. Requires `μ ≥ 1`.
pub fn epsilon_from_mu(mu: f64) -> Result<f64> {
    if !(mu >= 1.0) {
        return Err(Error::Domain(format!("mu must be >= 1, got {mu}")));
    }
    Ok((mu * mu - 1.0).sqrt() / 2.0)
}

/// Effective inverse bath temperature `β_eff = μβ`.
pub fn effective_beta(beta: f64, mu: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::Domain(format!("beta must be positive, got {beta}")));
    }
    if !(mu >= 1.0) {
        return Err(Error::Domain(format!("mu must be >= 1, got {mu}")));
    }
    Ok(mu * beta)
}

/// Bose occupancy together with an underflow marker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Occupancy {
    pub value: f64,
    /// Set when `βωμ > 700` and the occupancy was flushed to zero.
    pub underflow: bool,
}

/// Mean occupancy `N = 1/(e^{βωμ} − 1)` of the deformed bath mode.
///
/// For `βωμ > 700` the result underflows; the value is clamped to exactly 0
/// and flagged.
pub fn thermal_occupancy(beta: f64, omega: f64, mu: f64) -> Result<Occupancy> {
    if !(beta > 0.0) {
        return Err(Error::Domain(format!("beta must be positive, got {beta}")));
    }
    if !(omega > 0.0) {
        return Err(Error::Domain(format!(
            "omega must be positive, got {omega}"
        )));
    }
    if !(mu >= 1.0) {
        return Err(Error::Domain(format!("mu must be >= 1, got {mu}")));
    }
    let x = beta * omega * mu;
    if x > 700.0 {
        Ok(Occupancy {
            value: 0.0,
            underflow: true,
        })
    } else {
        Ok(Occupancy {
            value: 1.0 / f64::exp_m1(x),
            underflow: false,
        })
    }
}

/// Coefficients of the Hermitian counterpart `h = (μ²/2)p² + (ω²/2)q² + ωε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HermitianCounterpart {
    pub p2_coeff: f64,
    pub q2_coeff: f64,
    pub const_shift: f64,
}

impl HermitianCounterpart {
    /// `n`-th eigenvalue `ωμ(n + 1/2) + ωε`, reconstructed from the stored
    /// coefficients (`ωμ = 2√(p2_coeff · q2_coeff)`).
    pub fn level(&self, n: usize) -> f64 {
        let omega_mu = 2.0 * (self.p2_coeff * self.q2_coeff).sqrt();
        omega_mu * (n as f64 + 0.5) + self.const_shift
    }
}

/// Coefficients of the Hermitian counterpart at frequency `ω` (with
/// `m = ħ = 1`).
pub fn hermitian_counterpart(epsilon: f64, omega: f64) -> Result<HermitianCounterpart> {
    if !(omega > 0.0) {
        return Err(Error::Domain(format!(
            "omega must be positive, got {omega}"
        )));
    }
    let mu = mu_from_epsilon(epsilon)?;
    Ok(HermitianCounterpart {
        p2_coeff: mu * mu / 2.0,
        q2_coeff: omega * omega / 2.0,
        const_shift: omega * epsilon,
    })
}
