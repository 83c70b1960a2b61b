//! Cycle configuration shared by all backends.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pt;

/// Which implementation evaluates the cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Analytic,
    Fock,
    Gaussian,
}

impl std::str::FromStr for Backend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Backend::Analytic),
            "fock" => Ok(Backend::Fock),
            "gaussian" => Ok(Backend::Gaussian),
            other => Err(Error::Validation(format!(
                "backend must be one of analytic|fock|gaussian, got '{other}'"
            ))),
        }
    }
}

/// How the measurement stroke is accounted for.
///
/// `Paper` reproduces the closed-form bookkeeping in which the
/// post-measurement energy is the pre-measurement energy scaled by
/// `s = 1/√(2πσ²)`; no post-measurement state is materialized. `Channel`
/// applies the non-selective position-measurement channel as a completely
/// positive trace-preserving map and reads the energy off the actual state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasurementMode {
    Paper,
    Channel,
}

impl std::str::FromStr for MeasurementMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(MeasurementMode::Paper),
            "channel" => Ok(MeasurementMode::Channel),
            other => Err(Error::Validation(format!(
                "mode must be paper|channel, got '{other}'"
            ))),
        }
    }
}

/// Numerical route for the thermalization stroke.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ThermalizeMethod {
    Lindblad,
    Collisional,
}

impl std::str::FromStr for ThermalizeMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lindblad" => Ok(ThermalizeMethod::Lindblad),
            "collisional" => Ok(ThermalizeMethod::Collisional),
            other => Err(Error::Validation(format!(
                "bath.method must be lindblad|collisional, got '{other}'"
            ))),
        }
    }
}

/// Tunables of the thermalization stroke. The quasi-static cycle only needs
/// the asymptotic state, so the defaults favour speed over transient
/// fidelity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BathOptions {
    pub gamma: f64,
    pub theta: f64,
    pub method: ThermalizeMethod,
    pub max_collisions: usize,
    pub max_steps: usize,
    /// Integrator step; `None` selects `0.01/(γ(N+1))`.
    pub dt: Option<f64>,
    pub convergence_tol: f64,
}

impl Default for BathOptions {
    fn default() -> Self {
        BathOptions {
            gamma: 1.0,
            theta: 0.2,
            method: ThermalizeMethod::Lindblad,
            max_collisions: 10_000,
            max_steps: 500_000,
            dt: None,
            convergence_tol: 1e-8,
        }
    }
}

/// Full configuration of one cycle evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleParams {
    /// Initial (and final) frequency of the working substance.
    pub omega1: f64,
    /// Expanded frequency reached by the first stroke.
    pub omega2: f64,
    /// Inverse temperature of the bath.
    pub beta: f64,
    /// Bath deformation strength; `μ = √(1 + 4ε²)` is derived.
    pub epsilon: f64,
    /// Width of the position measurement.
    pub sigma: f64,
    pub measurement_mode: MeasurementMode,
    pub backend: Backend,
    /// Fock truncation dimension for the numeric backend.
    pub fock_dim: usize,
    /// Whether the Fock dimension may be doubled (up to 1024) when the
    /// truncated tail mass exceeds `tol`. Parsing an explicit `fock_dim`
    /// from a config file turns this off.
    pub fock_dim_auto: bool,
    /// Tail-mass tolerance for the truncated basis.
    pub tol: f64,
    /// Include the constant `ωε` term of the deformed Hamiltonian in energy
    /// bookkeeping. The closed forms drop it, so the default is off.
    pub include_const_shift: bool,
    pub bath: BathOptions,
}

impl CycleParams {
    /// Construct from the deformation strength `ε`, with defaults for the
    /// numeric knobs (analytic backend, paper bookkeeping, dim 128,
    /// tail tolerance 1e-10).
    pub fn new(omega1: f64, omega2: f64, beta: f64, epsilon: f64, sigma: f64) -> Result<Self> {
        let p = CycleParams {
            omega1,
            omega2,
            beta,
            epsilon,
            sigma,
            measurement_mode: MeasurementMode::Paper,
            backend: Backend::Analytic,
            fock_dim: 128,
            fock_dim_auto: true,
            tol: 1e-10,
            include_const_shift: false,
            bath: BathOptions::default(),
        };
        p.validate()?;
        Ok(p)
    }

    /// Construct from `μ ≥ 1` instead of `ε`.
    pub fn from_mu(omega1: f64, omega2: f64, beta: f64, mu: f64, sigma: f64) -> Result<Self> {
        CycleParams::new(omega1, omega2, beta, pt::epsilon_from_mu(mu)?, sigma)
    }

    pub fn mu(&self) -> f64 {
        // epsilon is validated on construction
        pt::mu_from_epsilon(self.epsilon).expect("validated epsilon")
    }

    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    pub fn with_mode(mut self, mode: MeasurementMode) -> Self {
        self.measurement_mode = mode;
        self
    }

    /// Pin the Fock dimension, disabling automatic escalation.
    pub fn with_fock_dim(mut self, dim: usize) -> Result<Self> {
        self.fock_dim = dim;
        self.fock_dim_auto = false;
        self.validate()?;
        Ok(self)
    }

    pub fn with_tol(mut self, tol: f64) -> Result<Self> {
        self.tol = tol;
        self.validate()?;
        Ok(self)
    }

    pub fn with_const_shift(mut self, on: bool) -> Self {
        self.include_const_shift = on;
        self
    }

    pub fn with_bath(mut self, bath: BathOptions) -> Result<Self> {
        self.bath = bath;
        self.validate()?;
        Ok(self)
    }

    pub fn with_sigma(mut self, sigma: f64) -> Result<Self> {
        self.sigma = sigma;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        fn positive(name: &str, v: f64) -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Validation(format!(
                    "{name} must be positive and finite, got {v}"
                )))
            }
        }
        positive("omega1", self.omega1)?;
        positive("omega2", self.omega2)?;
        positive("beta", self.beta)?;
        positive("sigma", self.sigma)?;
        positive("tol", self.tol)?;
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(Error::Validation(format!(
                "epsilon must be non-negative, got {}",
                self.epsilon
            )));
        }
        if self.fock_dim < 2 {
            return Err(Error::Validation(format!(
                "fock_dim must be >= 2, got {}",
                self.fock_dim
            )));
        }
        positive("bath.gamma", self.bath.gamma)?;
        positive("bath.convergence_tol", self.bath.convergence_tol)?;
        if !(self.bath.theta > 0.0 && self.bath.theta <= std::f64::consts::FRAC_PI_2) {
            return Err(Error::Validation(format!(
                "bath.theta must lie in (0, pi/2], got {}",
                self.bath.theta
            )));
        }
        if let Some(dt) = self.bath.dt {
            positive("bath.dt", dt)?;
        }
        Ok(())
    }
}
