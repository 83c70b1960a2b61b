//! Result types assembled by the cycle runner.

use serde::Serialize;

/// Operating regime of the machine, decided by the signs of the energy
/// flows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    Engine,
    Refrigerator,
    Other,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::Engine => write!(f, "Engine"),
            Regime::Refrigerator => write!(f, "Refrigerator"),
            Regime::Other => write!(f, "Other"),
        }
    }
}

/// Per-stroke energies and the derived thermodynamic quantities of one
/// cycle.
///
/// Sign conventions: `w_net < 0` means net work is extracted from the
/// working substance; `q2 > 0` means the measurement apparatus feeds energy
/// into the working substance; `q4 > 0` means the bath does.
/// `merit` holds the efficiency in the engine regime, the coefficient of
/// performance in the refrigerator regime, and NaN otherwise.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ThermoReport {
    pub u0: f64,
    pub u1: f64,
    pub u2: f64,
    pub u3: f64,
    pub w_net: f64,
    pub q2: f64,
    pub q4: f64,
    pub regime: Regime,
    pub merit: f64,
    pub first_law_residual: f64,
}

/// Side-by-side evaluation of the two measurement-stroke accounts.
///
/// The closed-form bookkeeping can cool the working substance during the
/// measurement (`q2 < 0` for weak measurements), while the trace-preserving
/// channel always heats it; `regime_diverged` flags parameter points where
/// the two accounts disagree on the operating regime.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ComparisonReport {
    pub paper: ThermoReport,
    pub channel: ThermoReport,
    pub q2_paper: f64,
    pub q2_channel: f64,
    pub delta_w_net: f64,
    pub regime_diverged: bool,
}
