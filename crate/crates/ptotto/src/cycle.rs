//! Four-stroke cycle orchestration and per-stroke energy bookkeeping.
//!
//! Stroke order: (1) quasi-static ramp `ω₁ → ω₂`, (2) position measurement
//! at fixed `ω₂`, (3) quasi-static ramp back `ω₂ → ω₁`, (4) full
//! thermalization with the bath. Works are the energy changes of the
//! unitary strokes, heats those of the non-unitary ones; `q2 > 0` means the
//! measurement apparatus feeds energy into the working substance.
//!
//! In `Paper` mode the measurement stroke is pure bookkeeping (energies
//! scaled by `s = 1/√(2πσ²)`, the state untouched), which reproduces the
//! closed forms of [`crate::analytic`] on the numeric backends. In
//! `Channel` mode the measurement is applied as the physical
//! trace-preserving map; because the working substance itself is an
//! undeformed (Hermitian) oscillator, the measured quadrature is the `μ = 1`
//! position, which on the deformed-frame state amounts to an effective
//! width `σ√μ`. The channel always heats, so the refrigerator window of the
//! closed forms has no channel-mode counterpart; [`compare_modes`]
//! quantifies that gap.

use crate::analytic;
use crate::bath::{thermalize_fock, thermalize_gaussian, BathConfig};
use crate::error::{Error, Result};
use crate::fock;
use crate::gaussian;
use crate::params::{Backend, CycleParams, MeasurementMode};
use crate::report::{ComparisonReport, Regime, ThermoReport};

/// Largest Fock dimension the automatic escalation will try.
pub const MAX_AUTO_FOCK_DIM: usize = 1024;

/// Evaluate one cycle with the configured backend and measurement mode.
pub fn run_cycle(p: &CycleParams) -> Result<ThermoReport> {
    p.validate()?;
    match p.backend {
        Backend::Analytic => {
            if p.measurement_mode == MeasurementMode::Channel {
                return Err(Error::Validation(
                    "channel mode needs a state-resolving backend (fock or gaussian)".into(),
                ));
            }
            Ok(analytic::evaluate(p))
        }
        Backend::Fock => {
            let mut dim = p.fock_dim;
            loop {
                match fock_cycle(p, dim) {
                    Err(Error::Stroke { stroke, source }) if source.is_truncation() => {
                        if p.fock_dim_auto && dim * 2 <= MAX_AUTO_FOCK_DIM {
                            dim *= 2;
                        } else {
                            return Err(Error::Stroke { stroke, source });
                        }
                    }
                    other => return other,
                }
            }
        }
        Backend::Gaussian => gaussian_cycle(p),
    }
}

impl Error {
    fn is_truncation(&self) -> bool {
        match self {
            Error::Truncation(_) => true,
            Error::Stroke { source, .. } => source.is_truncation(),
            _ => false,
        }
    }
}

/// Run both measurement-stroke accounts side by side.
///
/// The paper account uses the configured backend; the channel account needs
/// a state-resolving backend and falls back to the Fock engine when the
/// configuration says analytic.
pub fn compare_modes(p: &CycleParams) -> Result<ComparisonReport> {
    let paper = run_cycle(&p.clone().with_mode(MeasurementMode::Paper))?;
    let channel_backend = match p.backend {
        Backend::Analytic => Backend::Fock,
        b => b,
    };
    let channel = run_cycle(
        &p.clone()
            .with_backend(channel_backend)
            .with_mode(MeasurementMode::Channel),
    )?;
    Ok(ComparisonReport {
        paper,
        channel,
        q2_paper: paper.q2,
        q2_channel: channel.q2,
        delta_w_net: channel.w_net - paper.w_net,
        regime_diverged: paper.regime != channel.regime,
    })
}

/// Cyclicity check: `w_net + q2 + q4`, which must vanish over a closed
/// cycle (it equals the net internal-energy change).
pub fn first_law_check(report: &ThermoReport) -> f64 {
    report.w_net + report.q2 + report.q4
}

fn assemble(u: [f64; 5], p: &CycleParams, residual_bound: f64) -> Result<ThermoReport> {
    let [u0, u1, u2, u3, u4] = u;
    let w_net = (u1 - u0) + (u3 - u2);
    let q2 = u2 - u1;
    let q4 = u4 - u3;
    let residual = w_net + q2 + q4;
    if residual.abs() > residual_bound * q2.abs().max(1.0) {
        return Err(Error::Numeric(format!(
            "first-law residual {residual:.3e} exceeds {residual_bound:.0e} of the heat scale"
        )));
    }
    let regime = analytic::classify_regime(w_net, q2, q4);
    let merit = match regime {
        Regime::Engine => -w_net / q2,
        Regime::Refrigerator => q4 / w_net,
        Regime::Other => f64::NAN,
    };
    Ok(ThermoReport {
        u0,
        u1,
        u2,
        u3,
        w_net,
        q2,
        q4,
        regime,
        merit,
        first_law_residual: residual,
    })
}

/// Effective measurement width seen by the deformed-frame quadratures when
/// the `μ = 1` position of the working substance is measured with width `σ`.
fn channel_sigma(p: &CycleParams) -> f64 {
    p.sigma * p.mu().sqrt()
}

fn fock_cycle(p: &CycleParams, dim: usize) -> Result<ThermoReport> {
    let mu = p.mu();
    let shift = |omega: f64| {
        if p.include_const_shift {
            omega * p.epsilon
        } else {
            0.0
        }
    };
    let bath_cfg = BathConfig::from_params(p)?;

    let rho0 = fock::thermal_state(dim, p.beta, p.omega1, mu, p.tol).map_err(|e| e.in_stroke(0))?;
    let u0 = rho0.energy(p.omega1, mu, shift(p.omega1));
    let u1 = rho0.energy(p.omega2, mu, shift(p.omega2));

    let (u2, u3, pre_bath) = match p.measurement_mode {
        MeasurementMode::Paper => {
            let u2 = fock::paper_mode_energy_scale(u1, p.sigma).map_err(|e| e.in_stroke(2))?;
            let u3 = fock::paper_mode_energy_scale(u0, p.sigma).map_err(|e| e.in_stroke(3))?;
            (u2, u3, rho0.clone())
        }
        MeasurementMode::Channel => {
            let measured =
                fock::measurement_channel(&rho0, channel_sigma(p), p.omega2, mu, p.tol)
                    .map_err(|e| e.in_stroke(2))?;
            let u2 = measured.energy(p.omega2, mu, shift(p.omega2));
            let u3 = measured.energy(p.omega1, mu, shift(p.omega1));
            (u2, u3, measured)
        }
    };

    let (rho4, _steps) =
        thermalize_fock(&pre_bath, p.omega1, mu, &bath_cfg, p.bath.method)
            .map_err(|e| e.in_stroke(4))?;
    let u4 = rho4.energy(p.omega1, mu, shift(p.omega1));

    assemble([u0, u1, u2, u3, u4], p, 1e-6)
}

fn gaussian_cycle(p: &CycleParams) -> Result<ThermoReport> {
    let mu = p.mu();
    let bath_cfg = BathConfig::from_params(p)?;

    let g0 = gaussian::thermal_gaussian(p.beta, p.omega1, mu).map_err(|e| e.in_stroke(0))?;
    let u0 = gaussian::gaussian_energy(&g0, p.omega1, mu, p.include_const_shift);
    let g1 = gaussian::adiabatic_map(&g0, p.omega1, p.omega2).map_err(|e| e.in_stroke(1))?;
    let u1 = gaussian::gaussian_energy(&g1, p.omega2, mu, p.include_const_shift);

    let (u2, u3, pre_bath) = match p.measurement_mode {
        MeasurementMode::Paper => {
            let u2 = fock::paper_mode_energy_scale(u1, p.sigma).map_err(|e| e.in_stroke(2))?;
            let u3 = fock::paper_mode_energy_scale(u0, p.sigma).map_err(|e| e.in_stroke(3))?;
            // the paper account leaves the physical state alone
            let g3 = gaussian::adiabatic_map(&g1, p.omega2, p.omega1).map_err(|e| e.in_stroke(3))?;
            (u2, u3, g3)
        }
        MeasurementMode::Channel => {
            let g2 = gaussian::gaussian_measurement_update(&g1, channel_sigma(p))
                .map_err(|e| e.in_stroke(2))?;
            let u2 = gaussian::gaussian_energy(&g2, p.omega2, mu, p.include_const_shift);
            let g3 = gaussian::adiabatic_map(&g2, p.omega2, p.omega1).map_err(|e| e.in_stroke(3))?;
            let u3 = gaussian::gaussian_energy(&g3, p.omega1, mu, p.include_const_shift);
            (u2, u3, g3)
        }
    };

    let (g4, _steps) =
        thermalize_gaussian(&pre_bath, p.omega1, mu, &bath_cfg, p.bath.method)
            .map_err(|e| e.in_stroke(4))?;
    let u4 = gaussian::gaussian_energy(&g4, p.omega1, mu, p.include_const_shift);

    assemble([u0, u1, u2, u3, u4], p, 1e-6)
}
