//! Closed-form thermodynamics of the quasi-static cycle.
//!
//! Every stroke energy reduces to two scalars: the bath factor
//! `c = coth(βω₁μ/2)` and the measurement factor `s = 1/√(2πσ²)`. The four
//! internal energies are
//!
//! ```text
//! u0 = (ω₁μ/2) c        before the cycle (thermal at ω₁)
//! u1 = (ω₂/ω₁) u0       after the quasi-static expansion to ω₂
//! u2 = s · u1           after the position measurement (paper bookkeeping)
//! u3 = s · u0           after the quasi-static compression back to ω₁
//! ```
//!
//! giving `w_net = (μ/2)(ω₂−ω₁)(1−s)c`, `q2 = (ω₂μ/2)(s−1)c` and
//! `q4 = (ω₁μ/2)(1−s)c`, which sum to zero identically. All three flows
//! change sign together at the switching width `σ_s = 1/√(2π)` (where
//! `s = 1`), independent of temperature and deformation: below it the
//! machine is an engine, above it a refrigerator. The efficiency and the
//! coefficient of performance collapse to the frequency ratios
//! `1 − ω₁/ω₂` and `ω₁/(ω₂−ω₁)`.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::math::coth;
use crate::params::CycleParams;
use crate::report::{Regime, ThermoReport};

/// Energy flows within this band of zero are treated as exactly zero by the
/// regime classifier; at the switching width all three closed-form flows
/// vanish and sign tests must not pick up rounding noise.
pub const REGIME_DEAD_BAND: f64 = 1e-12;

/// Measurement factor `s = 1/√(2πσ²)`.
pub fn measurement_factor(sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::Domain(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    Ok(1.0 / (TAU * sigma * sigma).sqrt())
}

/// The switching width `σ_s = 1/√(2π)` at which every closed-form energy
/// flow vanishes.
pub fn sigma_switch() -> f64 {
    1.0 / TAU.sqrt()
}

/// Bath factor `coth(βω₁μ/2)` for the given parameters.
pub fn bath_factor(p: &CycleParams) -> f64 {
    coth(p.beta * p.omega1 * p.mu() / 2.0)
}

/// The four internal energies of the cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InternalEnergies {
    pub u0: f64,
    pub u1: f64,
    pub u2: f64,
    pub u3: f64,
}

pub fn internal_energies(p: &CycleParams) -> InternalEnergies {
    let c = bath_factor(p);
    let s = measurement_factor(p.sigma).expect("validated sigma");
    let u0 = 0.5 * p.omega1 * p.mu() * c;
    let u1 = (p.omega2 / p.omega1) * u0;
    InternalEnergies {
        u0,
        u1,
        u2: s * u1,
        u3: s * u0,
    }
}

/// Net work `(μ/2)(ω₂−ω₁)(1−s)c`. Negative values mean work is extracted.
pub fn net_work(p: &CycleParams) -> f64 {
    let s = measurement_factor(p.sigma).expect("validated sigma");
    0.5 * p.mu() * (p.omega2 - p.omega1) * (1.0 - s) * bath_factor(p)
}

/// Heat exchanged with the measurement apparatus, `(ω₂μ/2)(s−1)c`.
pub fn heat_measurement(p: &CycleParams) -> f64 {
    let s = measurement_factor(p.sigma).expect("validated sigma");
    0.5 * p.omega2 * p.mu() * (s - 1.0) * bath_factor(p)
}

/// Heat exchanged with the bath, `(ω₁μ/2)(1−s)c`.
pub fn heat_bath(p: &CycleParams) -> f64 {
    let s = measurement_factor(p.sigma).expect("validated sigma");
    0.5 * p.omega1 * p.mu() * (1.0 - s) * bath_factor(p)
}

/// Sign-pattern classification with a dead band of [`REGIME_DEAD_BAND`]
/// around zero: engine needs `w < 0, q2 > 0, q4 < 0`, refrigerator the three
/// reversed signs, anything else (including flows indistinguishable from
/// zero) is `Other`.
pub fn classify_regime(w_net: f64, q2: f64, q4: f64) -> Regime {
    let b = REGIME_DEAD_BAND;
    if w_net < -b && q2 > b && q4 < -b {
        Regime::Engine
    } else if w_net > b && q2 < -b && q4 > b {
        Regime::Refrigerator
    } else {
        Regime::Other
    }
}

/// Engine efficiency `1 − ω₁/ω₂`. Errors unless the parameters put the
/// closed-form cycle in the engine regime.
pub fn efficiency(p: &CycleParams) -> Result<f64> {
    let r = evaluate(p);
    if r.regime != Regime::Engine {
        return Err(Error::Regime(format!(
            "efficiency requested outside the engine regime (regime = {})",
            r.regime
        )));
    }
    Ok(1.0 - p.omega1 / p.omega2)
}

/// Coefficient of performance `ω₁/(ω₂−ω₁)`. Errors unless the parameters
/// put the closed-form cycle in the refrigerator regime.
pub fn cop(p: &CycleParams) -> Result<f64> {
    let r = evaluate(p);
    if r.regime != Regime::Refrigerator {
        return Err(Error::Regime(format!(
            "COP requested outside the refrigerator regime (regime = {})",
            r.regime
        )));
    }
    Ok(p.omega1 / (p.omega2 - p.omega1))
}

/// Evaluate the full closed-form report.
pub fn evaluate(p: &CycleParams) -> ThermoReport {
    let u = internal_energies(p);
    let w_net = net_work(p);
    let q2 = heat_measurement(p);
    let q4 = heat_bath(p);
    let regime = classify_regime(w_net, q2, q4);
    let merit = match regime {
        Regime::Engine => 1.0 - p.omega1 / p.omega2,
        Regime::Refrigerator => p.omega1 / (p.omega2 - p.omega1),
        Regime::Other => f64::NAN,
    };
    ThermoReport {
        u0: u.u0,
        u1: u.u1,
        u2: u.u2,
        u3: u.u3,
        w_net,
        q2,
        q4,
        regime,
        merit,
        first_law_residual: w_net + q2 + q4,
    }
}
