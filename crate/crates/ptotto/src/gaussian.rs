//! Moment-level (Gaussian) backend.
//!
//! Every stroke of the cycle maps Gaussian states to Gaussian states, so the
//! first moments `(⟨q⟩, ⟨p⟩)` and the 2×2 covariance of the quadratures
//! carry the complete description. This backend propagates exactly those
//! and serves as an independent cross-check for the Fock engine. The
//! quadrature scaling follows the effective oscillator of the current
//! Hamiltonian (as in [`crate::fock`]), which makes the population
//! invariance of the quasi-static ramp a literal rescaling of the
//! covariance.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::math::coth;
use crate::pt::epsilon_from_mu;

/// First moments and covariance of one bosonic mode, ordered `(q, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianState {
    pub mean: [f64; 2],
    pub cov: [[f64; 2]; 2],
}

impl GaussianState {
    /// Validate symmetry and the uncertainty bound `det(cov) ≥ 1/4`.
    pub fn new(mean: [f64; 2], cov: [[f64; 2]; 2]) -> Result<Self> {
        if (cov[0][1] - cov[1][0]).abs() > 1e-12 * cov[0][1].abs().max(1.0) {
            return Err(Error::Domain(format!(
                "covariance must be symmetric, got qp = {} vs pq = {}",
                cov[0][1], cov[1][0]
            )));
        }
        let s = GaussianState { mean, cov };
        if s.det_cov() < 0.25 - 1e-12 {
            return Err(Error::Domain(format!(
                "uncertainty violation: det(cov) = {} < 1/4",
                s.det_cov()
            )));
        }
        Ok(s)
    }

    pub fn det_cov(&self) -> f64 {
        self.cov[0][0] * self.cov[1][1] - self.cov[0][1] * self.cov[1][0]
    }

    /// Mean occupancy when read in the `(ω, μ)` quadrature scaling:
    /// `⟨n⟩ = (⟨q²⟩ω/μ + ⟨p²⟩μ/ω)/2 − 1/2`.
    pub fn occupancy(&self, omega: f64, mu: f64) -> f64 {
        let q2 = self.cov[0][0] + self.mean[0] * self.mean[0];
        let p2 = self.cov[1][1] + self.mean[1] * self.mean[1];
        0.5 * (q2 * omega / mu + p2 * mu / omega) - 0.5
    }
}

/// Largest absolute difference over the means and covariance entries; the
/// convergence metric of the moment backend.
pub fn moment_deviation(a: &GaussianState, b: &GaussianState) -> f64 {
    let mut d = (a.mean[0] - b.mean[0]).abs().max((a.mean[1] - b.mean[1]).abs());
    for i in 0..2 {
        for j in 0..2 {
            d = d.max((a.cov[i][j] - b.cov[i][j]).abs());
        }
    }
    d
}

/// Thermal state of the `(ω, μ)` effective oscillator at inverse
/// temperature `β`: zero means, `cov = diag(μc/2ω, ωc/2μ)` with
/// `c = coth(βωμ/2)`.
pub fn thermal_gaussian(beta: f64, omega: f64, mu: f64) -> Result<GaussianState> {
    if !(beta > 0.0 && omega > 0.0 && mu >= 1.0) {
        return Err(Error::Domain(format!(
            "thermal state needs beta > 0, omega > 0, mu >= 1, got ({beta}, {omega}, {mu})"
        )));
    }
    let c = coth(beta * omega * mu / 2.0);
    GaussianState::new([0.0, 0.0], [[c * mu / (2.0 * omega), 0.0], [0.0, c * omega / (2.0 * mu)]])
}

/// Thermal state specified by its occupancy `N` in the `(ω, μ)` scaling
/// (`c = 2N + 1`).
pub fn thermal_gaussian_from_occupancy(occupancy: f64, omega: f64, mu: f64) -> Result<GaussianState> {
    if !(occupancy >= 0.0 && omega > 0.0 && mu >= 1.0) {
        return Err(Error::Domain(format!(
            "need N >= 0, omega > 0, mu >= 1, got ({occupancy}, {omega}, {mu})"
        )));
    }
    let c = 2.0 * occupancy + 1.0;
    GaussianState::new([0.0, 0.0], [[c * mu / (2.0 * omega), 0.0], [0.0, c * omega / (2.0 * mu)]])
}

/// Non-selective position measurement of width `σ` on the quadrature the
/// state is expressed in: position moments untouched, `cov_pp += 1/(4σ²)`.
pub fn gaussian_measurement_update(state: &GaussianState, sigma: f64) -> Result<GaussianState> {
    if !(sigma > 0.0) {
        return Err(Error::Domain(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    let mut cov = state.cov;
    cov[1][1] += 1.0 / (4.0 * sigma * sigma);
    GaussianState::new(state.mean, cov)
}

/// Quasi-static frequency ramp `ω_from → ω_to`: the symplectic rescaling
/// `q → q√(ω_from/ω_to)`, `p → p√(ω_to/ω_from)`. Preserves `det(cov)` and
/// the occupancy.
pub fn adiabatic_map(
    state: &GaussianState,
    omega_from: f64,
    omega_to: f64,
) -> Result<GaussianState> {
    if !(omega_from > 0.0 && omega_to > 0.0) {
        return Err(Error::Domain(format!(
            "frequencies must be positive, got ({omega_from}, {omega_to})"
        )));
    }
    let r = omega_from / omega_to;
    let (sq, sp) = (r.sqrt(), 1.0 / r.sqrt());
    GaussianState::new(
        [state.mean[0] * sq, state.mean[1] * sp],
        [
            [state.cov[0][0] * r, state.cov[0][1]],
            [state.cov[1][0], state.cov[1][1] / r],
        ],
    )
}

/// One beam-splitter collision of mixing angle `θ ∈ (0, π/2]` with a fresh
/// ancilla, which is then discarded:
/// `mean → cosθ·mean + sinθ·mean_anc`, `cov → cos²θ·cov + sin²θ·cov_anc`.
pub fn collision_update(
    state: &GaussianState,
    ancilla: &GaussianState,
    theta: f64,
) -> Result<GaussianState> {
    if !(theta > 0.0 && theta <= std::f64::consts::FRAC_PI_2) {
        return Err(Error::Domain(format!(
            "theta must lie in (0, pi/2], got {theta}"
        )));
    }
    let (c, s) = (theta.cos(), theta.sin());
    let (c2, s2) = (c * c, s * s);
    let mut cov = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            cov[i][j] = c2 * state.cov[i][j] + s2 * ancilla.cov[i][j];
        }
    }
    GaussianState::new(
        [
            c * state.mean[0] + s * ancilla.mean[0],
            c * state.mean[1] + s * ancilla.mean[1],
        ],
        cov,
    )
}

/// Energy functional `(μ²/2)⟨p²⟩ + (ω²/2)⟨q²⟩ (+ ωε)` from the second
/// moments; `ε` is reconstructed from `μ` when the constant shift is
/// requested.
pub fn gaussian_energy(state: &GaussianState, omega: f64, mu: f64, include_shift: bool) -> f64 {
    let q2 = state.cov[0][0] + state.mean[0] * state.mean[0];
    let p2 = state.cov[1][1] + state.mean[1] * state.mean[1];
    let mut e = 0.5 * mu * mu * p2 + 0.5 * omega * omega * q2;
    if include_shift {
        e += omega * epsilon_from_mu(mu).expect("mu >= 1");
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_limit() {
        let g = thermal_gaussian(300.0, 1.0, 1.0).unwrap();
        assert!((g.cov[0][0] - 0.5).abs() < 1e-12);
        assert!((g.cov[1][1] - 0.5).abs() < 1e-12);
        assert!((gaussian_energy(&g, 1.0, 1.0, false) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn thermal_energy_and_det() {
        let g = thermal_gaussian(0.2, 1.0, 10.0).unwrap();
        assert!((gaussian_energy(&g, 1.0, 10.0, false) - 6.565176427496656).abs() < 1e-12);
        let c = 1.3130352854993312f64;
        assert!((g.det_cov() - c * c / 4.0).abs() < 1e-14);
        assert!(g.det_cov() >= 0.25);
    }

    #[test]
    fn occupancy_matches_bose_factor() {
        let (beta, omega, mu) = (0.2, 1.0, 10.0);
        let g = thermal_gaussian(beta, omega, mu).unwrap();
        let n = crate::pt::thermal_occupancy(beta, omega, mu).unwrap().value;
        assert!((g.occupancy(omega, mu) - n).abs() < 1e-12);
    }

    #[test]
    fn measurement_update_examples() {
        let vac = thermal_gaussian(1e3, 1.0, 1.0).unwrap();
        let out = gaussian_measurement_update(&vac, 0.5).unwrap();
        assert!((out.cov[1][1] - 1.5).abs() < 1e-12);
        assert_eq!(out.cov[0][0], vac.cov[0][0]);

        // weak limit
        let out = gaussian_measurement_update(&vac, 1e9).unwrap();
        assert!(moment_deviation(&out, &vac) < 1e-12);

        // applying twice with sigma equals once with sigma/sqrt(2)
        let twice = gaussian_measurement_update(
            &gaussian_measurement_update(&vac, 0.8).unwrap(),
            0.8,
        )
        .unwrap();
        let once = gaussian_measurement_update(&vac, 0.8 / 2f64.sqrt()).unwrap();
        assert!(moment_deviation(&twice, &once) < 1e-12);
    }

    #[test]
    fn measurement_energy_kick() {
        let g = thermal_gaussian(0.2, 1.0, 1.0).unwrap();
        let sigma = 0.1;
        let out = gaussian_measurement_update(&g, sigma).unwrap();
        let du = gaussian_energy(&out, 1.0, 1.0, false) - gaussian_energy(&g, 1.0, 1.0, false);
        assert!((du - 12.5).abs() < 1e-12);
    }

    #[test]
    fn adiabatic_examples() {
        let g = thermal_gaussian(0.2, 1.0, 10.0).unwrap();
        let same = adiabatic_map(&g, 1.0, 1.0).unwrap();
        assert!(moment_deviation(&same, &g) < 1e-15);

        let up = adiabatic_map(&g, 1.0, 2.0).unwrap();
        // thermal shape at omega2 with the same occupancy
        let target = thermal_gaussian(0.2 / 2.0, 2.0, 10.0).unwrap();
        assert!(moment_deviation(&up, &target) < 1e-12);
        assert!((up.occupancy(2.0, 10.0) - g.occupancy(1.0, 10.0)).abs() < 1e-12);
        // energy scales with the frequency ratio
        let e_ratio =
            gaussian_energy(&up, 2.0, 10.0, false) / gaussian_energy(&g, 1.0, 10.0, false);
        assert!((e_ratio - 2.0).abs() < 1e-12);
        // determinant preserved
        assert!((up.det_cov() - g.det_cov()).abs() < 1e-12 * g.det_cov());
    }

    #[test]
    fn collision_swap_and_identity_limits() {
        let sys = thermal_gaussian(0.2, 1.0, 1.0).unwrap();
        let anc = thermal_gaussian(2.0, 1.0, 1.0).unwrap();
        let swapped = collision_update(&sys, &anc, std::f64::consts::FRAC_PI_2).unwrap();
        assert!(moment_deviation(&swapped, &anc) < 1e-12);
        let nearly = collision_update(&sys, &anc, 1e-9).unwrap();
        assert!(moment_deviation(&nearly, &sys) < 1e-12);
        assert!(collision_update(&sys, &anc, 0.0).is_err());
        assert!(collision_update(&sys, &anc, 2.0).is_err());
    }

    #[test]
    fn collision_closed_form_occupancy() {
        // k collisions: n_k = tau^k n_0 + (1 - tau^k) N with tau = cos^2(theta)
        let theta: f64 = 0.2;
        let tau = theta.cos().powi(2);
        let n_anc = 0.6;
        let anc = thermal_gaussian_from_occupancy(n_anc, 1.0, 1.0).unwrap();
        let mut state = thermal_gaussian_from_occupancy(3.0, 1.0, 1.0).unwrap();
        for k in 1..=200usize {
            state = collision_update(&state, &anc, theta).unwrap();
            let expected = tau.powi(k as i32) * 3.0 + (1.0 - tau.powi(k as i32)) * n_anc;
            assert!(
                (state.occupancy(1.0, 1.0) - expected).abs() < 1e-12,
                "k = {k}"
            );
        }
        // uncertainty preserved throughout
        assert!(state.det_cov() >= 0.25);
    }

    #[test]
    fn collision_relaxes_to_ancilla_occupancy() {
        // initial deviation small enough that 200 collisions land within 1e-6
        let theta: f64 = 0.2;
        let n_anc = 0.5;
        let anc = thermal_gaussian_from_occupancy(n_anc, 1.0, 1.0).unwrap();
        let mut state = thermal_gaussian_from_occupancy(n_anc + 2e-3, 1.0, 1.0).unwrap();
        let mut prev = (state.occupancy(1.0, 1.0) - n_anc).abs();
        for _ in 0..200 {
            state = collision_update(&state, &anc, theta).unwrap();
            let dev = (state.occupancy(1.0, 1.0) - n_anc).abs();
            assert!(dev <= prev); // monotone approach
            prev = dev;
        }
        assert!(prev < 1e-6);
    }

    #[test]
    fn state_validation() {
        assert!(GaussianState::new([0.0, 0.0], [[0.5, 0.1], [0.2, 0.5]]).is_err());
        assert!(GaussianState::new([0.0, 0.0], [[0.1, 0.0], [0.0, 0.1]]).is_err());
    }
}
