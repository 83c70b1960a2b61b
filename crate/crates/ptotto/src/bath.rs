//! The thermalization stroke.
//!
//! Two routes drive the working substance back to the bath state, both
//! available on the Fock and on the moment backend and cross-validating
//! each other:
//!
//! * a master-equation integrator (fixed-step RK4) for
//!   `dρ/dt = −i[H, ρ] + γ(N+1)D[a]ρ + γN D[a†]ρ` with the standard
//!   dissipator `D[o]ρ = oρo† − ½{o†o, ρ}`, whose fixed point is the
//!   thermal state of occupancy `N`;
//! * a discrete collisional model in which the working substance meets a
//!   stream of fresh thermal ancillas through a beam splitter of mixing
//!   angle `θ`. One collision is the thermal attenuation channel of
//!   transmissivity `τ = cos²θ`, i.e. exactly the dissipator semigroup
//!   element with `e^{−γt} = τ`; occupancies relax geometrically,
//!   `n_k = τ^k n_0 + (1 − τ^k)N`.
//!
//! On the Fock backend the dissipator never mixes different coherence
//! bands `ρ_{m,m+Δ}`, so both the right-hand side (element-wise shifts) and
//! the collision propagator (one dense matrix exponential per band,
//! precomputed once) stay cheap. Building the collision channel costs
//! `O(dim⁴)` once; intended for truncations up to a couple hundred levels.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{thermal_state_from_occupancy, CMat, FockDensity};
use crate::gaussian::{
    collision_update, moment_deviation, thermal_gaussian_from_occupancy, GaussianState,
};
use crate::params::{CycleParams, ThermalizeMethod};
use crate::pt::thermal_occupancy;

/// Resolved numerical configuration of the thermalization stroke.
#[derive(Debug, Clone, Copy)]
pub struct BathConfig {
    pub gamma: f64,
    /// Target occupancy `N`; equals the bath occupancy at `(β, ω₁, μ)` when
    /// built from cycle parameters.
    pub occupancy: f64,
    pub collision_theta: f64,
    pub max_collisions: usize,
    pub max_steps: usize,
    pub integrator_dt: f64,
    pub convergence_tol: f64,
}

impl BathConfig {
    /// Derive the stroke configuration from the cycle parameters; the
    /// occupancy is pinned to `N(β, ω₁, μ)`.
    pub fn from_params(p: &CycleParams) -> Result<Self> {
        let n = thermal_occupancy(p.beta, p.omega1, p.mu())?.value;
        Ok(Self::from_occupancy(n, p))
    }

    pub fn from_occupancy(occupancy: f64, p: &CycleParams) -> Self {
        let b = &p.bath;
        BathConfig {
            gamma: b.gamma,
            occupancy,
            collision_theta: b.theta,
            max_collisions: b.max_collisions,
            max_steps: b.max_steps,
            integrator_dt: b
                .dt
                .unwrap_or(0.01 / (b.gamma * (occupancy + 1.0))),
            convergence_tol: b.convergence_tol,
        }
    }
}

/// Right-hand side of the master equation with `H = ωμ(n̂ + 1/2)`.
///
/// Exploits the ladder structure: `aρa†` is a diagonal shift of the matrix
/// and the anticommutators are element-wise scalings, so one evaluation is
/// `O(dim²)`. All operators are the truncated ones — in particular
/// `(aa†)_{dim-1,dim-1} = 0`, which keeps the generator exactly trace
/// preserving and leaves the truncated geometric state an exact fixed point
/// (detailed balance holds link by link). The dense-operator form is
/// checked against this in the tests.
pub fn lindblad_rhs(rho: &CMat, omega: f64, mu: f64, cfg: &BathConfig) -> CMat {
    let mut out = CMat::zeros(rho.nrows(), rho.ncols());
    lindblad_rhs_into(rho, omega, mu, cfg, &mut out);
    out
}

/// Allocation-free form of [`lindblad_rhs`] writing into `out`; the matrix
/// storage is column-major and traversed as flat slices.
fn lindblad_rhs_into(rho: &CMat, omega: f64, mu: f64, cfg: &BathConfig, out: &mut CMat) {
    let dim = rho.nrows();
    debug_assert_eq!(out.nrows(), dim);
    let g = cfg.gamma;
    let n_th = cfg.occupancy;
    let g_down = g * (n_th + 1.0);
    let g_up = g * n_th;
    let sqrt_n: Vec<f64> = (0..=dim).map(|k| (k as f64).sqrt()).collect();
    // diagonal of the truncated a a†
    let aad: Vec<f64> = (0..dim)
        .map(|k| if k + 1 < dim { (k + 1) as f64 } else { 0.0 })
        .collect();
    let r = rho.as_slice();
    let o = out.as_mut_slice();
    for n in 0..dim {
        let col = n * dim;
        let nf = n as f64;
        for m in 0..dim {
            let mf = m as f64;
            let x = r[col + m];
            // unitary part: H diagonal, [H, rho]_{mn} = omega*mu*(m-n) rho_{mn}
            let w = omega * mu * (mf - nf);
            let mut v = C64::new(x.im * w, -x.re * w);
            // gamma (N+1) D[a]: gain from (m+1, n+1), loss (m+n)/2
            let mut acc = x * (-0.5 * (mf + nf));
            if m + 1 < dim && n + 1 < dim {
                acc += r[col + dim + m + 1] * (sqrt_n[m + 1] * sqrt_n[n + 1]);
            }
            v += acc * g_down;
            // gamma N D[a†]: gain from (m-1, n-1), loss from truncated aa†
            let mut acc = x * (-0.5 * (aad[m] + aad[n]));
            if m >= 1 && n >= 1 {
                acc += r[col - dim + m - 1] * (sqrt_n[m] * sqrt_n[n]);
            }
            v += acc * g_up;
            o[col + m] = v;
        }
    }
}

/// One fixed-step fourth-order Runge-Kutta step of the master equation.
///
/// Requires `dt ≤ 0.1/(γ(N+1))`. The step renormalizes the trace and aborts
/// with [`Error::Stability`] if the drift exceeds 1e-12 or a diagonal entry
/// dips below -1e-8.
pub fn rk4_step(
    rho: &FockDensity,
    omega: f64,
    mu: f64,
    cfg: &BathConfig,
    dt: f64,
) -> Result<FockDensity> {
    if !(dt > 0.0 && dt <= 0.1 / (cfg.gamma * (cfg.occupancy + 1.0))) {
        return Err(Error::Domain(format!(
            "dt = {dt} outside (0, 0.1/(gamma(N+1))] = (0, {}]",
            0.1 / (cfg.gamma * (cfg.occupancy + 1.0))
        )));
    }
    let m = rho.matrix();
    let dim = m.nrows();
    let mut stage = CMat::zeros(dim, dim);
    let mut k1 = CMat::zeros(dim, dim);
    let mut k2 = CMat::zeros(dim, dim);
    let mut k3 = CMat::zeros(dim, dim);
    let mut k4 = CMat::zeros(dim, dim);
    let axpy = |dst: &mut CMat, base: &CMat, k: &CMat, w: f64| {
        let d = dst.as_mut_slice();
        let b = base.as_slice();
        let kk = k.as_slice();
        for i in 0..d.len() {
            d[i] = b[i] + kk[i] * w;
        }
    };
    lindblad_rhs_into(m, omega, mu, cfg, &mut k1);
    axpy(&mut stage, m, &k1, 0.5 * dt);
    lindblad_rhs_into(&stage.clone(), omega, mu, cfg, &mut k2);
    axpy(&mut stage, m, &k2, 0.5 * dt);
    lindblad_rhs_into(&stage.clone(), omega, mu, cfg, &mut k3);
    axpy(&mut stage, m, &k3, dt);
    lindblad_rhs_into(&stage.clone(), omega, mu, cfg, &mut k4);
    let mut next = CMat::zeros(dim, dim);
    {
        let d = next.as_mut_slice();
        let b = m.as_slice();
        let (s1, s2, s3, s4) = (k1.as_slice(), k2.as_slice(), k3.as_slice(), k4.as_slice());
        let w = dt / 6.0;
        for i in 0..d.len() {
            d[i] = b[i] + (s1[i] + (s2[i] + s3[i]) * 2.0 + s4[i]) * w;
        }
    }

    let tr = next.diagonal().sum().re;
    if (tr - 1.0).abs() > 1e-12 {
        return Err(Error::Stability(format!(
            "trace drifted by {:.2e} in one step; truncation too small or dt too large",
            tr - 1.0
        )));
    }
    next /= C64::new(tr, 0.0);
    for i in 0..next.nrows() {
        let d = next[(i, i)].re;
        if d < -1e-8 {
            return Err(Error::Stability(format!(
                "population {i} became negative ({d:.2e})"
            )));
        }
    }
    Ok(FockDensity::from_trusted(next))
}

/// Precomputed single-collision channel on the truncated Fock space.
///
/// A beam-splitter collision with a fresh thermal ancilla acts
/// independently on each coherence band; `propagators[delta]` maps the
/// band `ρ_{m,m+delta}` forward by one collision.
pub struct CollisionChannel {
    propagators: Vec<DMatrix<f64>>,
    dim: usize,
}

impl CollisionChannel {
    /// Build the per-band propagators for mixing angle `θ` and ancilla
    /// occupancy `N`. `O(dim⁴)` once.
    pub fn new(dim: usize, theta: f64, occupancy: f64) -> Result<Self> {
        if !(theta > 0.0 && theta <= std::f64::consts::FRAC_PI_2) {
            return Err(Error::Domain(format!(
                "theta must lie in (0, pi/2], got {theta}"
            )));
        }
        if !(occupancy >= 0.0) {
            return Err(Error::Domain(format!(
                "occupancy must be non-negative, got {occupancy}"
            )));
        }
        let tau = theta.cos().powi(2);
        // one collision == dissipator semigroup for time t with e^{-t} = tau
        let t = -tau.ln();
        let n_th = occupancy;
        let aad = |k: usize| if k + 1 < dim { (k + 1) as f64 } else { 0.0 };
        let mut propagators = Vec::with_capacity(dim);
        for delta in 0..dim {
            let len = dim - delta;
            let mut gen = DMatrix::<f64>::zeros(len, len);
            for m in 0..len {
                let mf = m as f64;
                let df = delta as f64;
                gen[(m, m)] = -((n_th + 1.0) * (2.0 * mf + df) / 2.0
                    + n_th * (aad(m) + aad(m + delta)) / 2.0);
                if m + 1 < len {
                    gen[(m, m + 1)] = (n_th + 1.0) * (((mf + 1.0) * (mf + 1.0 + df)).sqrt());
                }
                if m >= 1 {
                    gen[(m, m - 1)] = n_th * ((mf * (mf + df)).sqrt());
                }
            }
            propagators.push((gen * t).exp());
        }
        Ok(CollisionChannel { propagators, dim })
    }

    /// Apply one collision.
    pub fn apply(&self, rho: &FockDensity) -> Result<FockDensity> {
        if rho.dim() != self.dim {
            return Err(Error::Domain(format!(
                "collision channel built for dim {}, state has dim {}",
                self.dim,
                rho.dim()
            )));
        }
        let dim = self.dim;
        let m = rho.matrix();
        let mut out = CMat::zeros(dim, dim);
        let mut band: Vec<C64> = Vec::with_capacity(dim);
        for delta in 0..dim {
            let len = dim - delta;
            let p = &self.propagators[delta];
            band.clear();
            band.extend((0..len).map(|k| m[(k, k + delta)]));
            for i in 0..len {
                let mut acc = C64::new(0.0, 0.0);
                for (k, &b) in band.iter().enumerate() {
                    acc += b * p[(i, k)];
                }
                out[(i, i + delta)] = acc;
                if delta > 0 {
                    out[(i + delta, i)] = acc.conj();
                }
            }
        }
        // the generator preserves trace exactly; only rounding accumulates
        let tr = out.diagonal().sum().re;
        if (tr - 1.0).abs() > 1e-10 {
            return Err(Error::Stability(format!(
                "collision drifted the trace by {:.2e}",
                tr - 1.0
            )));
        }
        out /= C64::new(tr, 0.0);
        Ok(FockDensity::from_trusted(out))
    }
}

/// Conservative trace-distance bound `½√d‖ρ−σ‖_F`; cheap enough to check
/// every few steps. Stopping on it guarantees the true trace distance is
/// below tolerance.
fn trace_distance_upper_bound(a: &FockDensity, b: &FockDensity) -> f64 {
    let mut frob2 = 0.0;
    let (ma, mb) = (a.matrix(), b.matrix());
    for i in 0..ma.nrows() {
        for j in 0..ma.ncols() {
            frob2 += (ma[(i, j)] - mb[(i, j)]).norm_sqr();
        }
    }
    0.5 * (ma.nrows() as f64).sqrt() * frob2.sqrt()
}

/// Drive a Fock state to the bath state at occupancy `cfg.occupancy`.
/// Returns the final state and the number of steps (integrator steps or
/// collisions) taken.
pub fn thermalize_fock(
    rho: &FockDensity,
    omega: f64,
    mu: f64,
    cfg: &BathConfig,
    method: ThermalizeMethod,
) -> Result<(FockDensity, usize)> {
    let dim = rho.dim();
    // the target must be representable comfortably below the convergence
    // tolerance, otherwise the loop can never terminate
    let target = thermal_state_from_occupancy(dim, cfg.occupancy, 0.1 * cfg.convergence_tol)?;
    let tol = cfg.convergence_tol;
    if trace_distance_upper_bound(rho, &target) < tol {
        return Ok((rho.clone(), 0));
    }
    match method {
        ThermalizeMethod::Lindblad => {
            let dt = cfg.integrator_dt;
            let check_every = 25;
            let mut state = rho.clone();
            let mut steps = 0;
            while steps < cfg.max_steps {
                state = rk4_step(&state, omega, mu, cfg, dt)?;
                steps += 1;
                if steps % check_every == 0 && trace_distance_upper_bound(&state, &target) < tol {
                    return Ok((state, steps));
                }
            }
            Err(Error::Convergence(format!(
                "master equation not thermal after {} steps (distance bound {:.2e}, tol {:.0e})",
                cfg.max_steps,
                trace_distance_upper_bound(&state, &target),
                tol
            )))
        }
        ThermalizeMethod::Collisional => {
            let channel = CollisionChannel::new(dim, cfg.collision_theta, cfg.occupancy)?;
            let mut state = rho.clone();
            for k in 1..=cfg.max_collisions {
                state = channel.apply(&state)?;
                if trace_distance_upper_bound(&state, &target) < tol {
                    return Ok((state, k));
                }
            }
            Err(Error::Convergence(format!(
                "collisional model not thermal after {} collisions",
                cfg.max_collisions
            )))
        }
    }
}

/// Moment-backend counterpart of [`thermalize_fock`]. Convergence is judged
/// by the largest deviation of any first or second moment.
pub fn thermalize_gaussian(
    state: &GaussianState,
    omega: f64,
    mu: f64,
    cfg: &BathConfig,
    method: ThermalizeMethod,
) -> Result<(GaussianState, usize)> {
    let target = thermal_gaussian_from_occupancy(cfg.occupancy, omega, mu)?;
    let tol = cfg.convergence_tol;
    if moment_deviation(state, &target) < tol {
        return Ok((*state, 0));
    }
    match method {
        ThermalizeMethod::Lindblad => {
            let dt = cfg.integrator_dt;
            let mut s = *state;
            for steps in 1..=cfg.max_steps {
                s = moment_rk4_step(&s, omega, mu, cfg, dt);
                if moment_deviation(&s, &target) < tol {
                    return Ok((s, steps));
                }
            }
            Err(Error::Convergence(format!(
                "moment integration not thermal after {} steps",
                cfg.max_steps
            )))
        }
        ThermalizeMethod::Collisional => {
            let ancilla = thermal_gaussian_from_occupancy(cfg.occupancy, omega, mu)?;
            let mut s = *state;
            for k in 1..=cfg.max_collisions {
                s = collision_update(&s, &ancilla, cfg.collision_theta)?;
                if moment_deviation(&s, &target) < tol {
                    return Ok((s, k));
                }
            }
            Err(Error::Convergence(format!(
                "collisional model not thermal after {} collisions",
                cfg.max_collisions
            )))
        }
    }
}

/// Moment flow of the master equation: `dm/dt = Am`,
/// `dV/dt = AV + VAᵀ + D` with drift `A = [[−γ/2, μ²], [−ω², −γ/2]]` and
/// diffusion `D = γ(N+½)·diag(μ/ω, ω/μ)`; one RK4 step.
fn moment_rk4_step(
    s: &GaussianState,
    omega: f64,
    mu: f64,
    cfg: &BathConfig,
    dt: f64,
) -> GaussianState {
    let g = cfg.gamma;
    let a = [[-0.5 * g, mu * mu], [-omega * omega, -0.5 * g]];
    let d = [
        [g * (cfg.occupancy + 0.5) * mu / omega, 0.0],
        [0.0, g * (cfg.occupancy + 0.5) * omega / mu],
    ];
    type Mean = [f64; 2];
    type Cov = [[f64; 2]; 2];

    let f_mean = |m: &Mean| -> Mean {
        [
            a[0][0] * m[0] + a[0][1] * m[1],
            a[1][0] * m[0] + a[1][1] * m[1],
        ]
    };
    let f_cov = |v: &Cov| -> Cov {
        let mut out = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = d[i][j];
                for k in 0..2 {
                    acc += a[i][k] * v[k][j] + v[i][k] * a[j][k];
                }
                out[i][j] = acc;
            }
        }
        out
    };
    let add_mean = |x: &Mean, y: &Mean, w: f64| -> Mean { [x[0] + w * y[0], x[1] + w * y[1]] };
    let add_cov = |x: &Cov, y: &Cov, w: f64| -> Cov {
        let mut out = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = x[i][j] + w * y[i][j];
            }
        }
        out
    };

    let (m0, v0) = (s.mean, s.cov);
    let km1 = f_mean(&m0);
    let kv1 = f_cov(&v0);
    let km2 = f_mean(&add_mean(&m0, &km1, 0.5 * dt));
    let kv2 = f_cov(&add_cov(&v0, &kv1, 0.5 * dt));
    let km3 = f_mean(&add_mean(&m0, &km2, 0.5 * dt));
    let kv3 = f_cov(&add_cov(&v0, &kv2, 0.5 * dt));
    let km4 = f_mean(&add_mean(&m0, &km3, dt));
    let kv4 = f_cov(&add_cov(&v0, &kv3, dt));

    let mean = [
        m0[0] + dt / 6.0 * (km1[0] + 2.0 * km2[0] + 2.0 * km3[0] + km4[0]),
        m0[1] + dt / 6.0 * (km1[1] + 2.0 * km2[1] + 2.0 * km3[1] + km4[1]),
    ];
    let mut cov = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            cov[i][j] = v0[i][j]
                + dt / 6.0 * (kv1[i][j] + 2.0 * kv2[i][j] + 2.0 * kv3[i][j] + kv4[i][j]);
        }
    }
    GaussianState { mean, cov }
}
