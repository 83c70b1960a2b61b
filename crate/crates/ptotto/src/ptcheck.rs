//! Structural verification of the deformed bath Hamiltonian on the
//! truncated basis.
//!
//! The non-Hermitian ancilla Hamiltonian `H = p²/2 + ω²q²/2 + 2iωε pq`
//! (with the `m = 1`, frequency-`ω` quadratures) is mapped to its Hermitian
//! counterpart `h = (μ²/2)p² + (ω²/2)q² + ωε` by the similarity transform
//! `h = η H η⁻¹` with `η = exp[(ε/ω)p²]`, and satisfies the
//! quasi-Hermiticity relation `ΘH = H†Θ` with the metric `Θ = η†η`. On a
//! finite basis both identities hold only approximately; the residuals are
//! measured on the leading `(dim/2)×(dim/2)` block, away from the
//! truncation edge that pollutes the high-index rows and columns, and
//! shrink as the dimension grows.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::fock::{quadrature_ops, CMat};
use crate::pt::hermitian_counterpart;

/// `H = p²/2 + ω²q²/2 + 2iωε pq` on the truncated basis.
pub fn pt_hamiltonian(dim: usize, omega: f64, epsilon: f64) -> CMat {
    let (q, p) = quadrature_ops(dim, omega, 1.0).expect("valid quadratures");
    let p2 = &p * &p;
    let q2 = &q * &q;
    let pq = &p * &q;
    p2.map(|z| z * 0.5) + q2.map(|z| z * (0.5 * omega * omega))
        + pq.map(|z| z * C64::new(0.0, 2.0 * omega * epsilon))
}

/// Hermitian counterpart `h` built from the same truncated quadratures.
pub fn hermitian_partner(dim: usize, omega: f64, epsilon: f64) -> CMat {
    let (q, p) = quadrature_ops(dim, omega, 1.0).expect("valid quadratures");
    let hc = hermitian_counterpart(epsilon, omega).expect("valid counterpart");
    let p2 = &p * &p;
    let q2 = &q * &q;
    p2.map(|z| z * hc.p2_coeff)
        + q2.map(|z| z * hc.q2_coeff)
        + CMat::identity(dim, dim).map(|z| z * hc.const_shift)
}

/// The exponential momentum-squared map `η = exp[(ε/ω)p²]` and its inverse,
/// built from the symmetric eigendecomposition of the truncated `p²`.
pub fn dyson_map(dim: usize, omega: f64, epsilon: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let (_, p) = quadrature_ops(dim, omega, 1.0).expect("valid quadratures");
    let p2 = (&p * &p).map(|z| z.re);
    let se = nalgebra::SymmetricEigen::new(p2);
    let coeff = epsilon / omega;
    let mut eta = DMatrix::<f64>::zeros(dim, dim);
    let mut eta_inv = DMatrix::<f64>::zeros(dim, dim);
    for k in 0..dim {
        let ek = (coeff * se.eigenvalues[k]).exp();
        let vk = se.eigenvectors.column(k);
        for i in 0..dim {
            for j in 0..dim {
                let outer = vk[i] * vk[j];
                eta[(i, j)] += ek * outer;
                eta_inv[(i, j)] += outer / ek;
            }
        }
    }
    (eta, eta_inv)
}

/// Metric operator `Θ = η†η = η²` (η is symmetric positive definite).
pub fn metric_operator(dim: usize, omega: f64, epsilon: f64) -> DMatrix<f64> {
    let (eta, _) = dyson_map(dim, omega, epsilon);
    &eta * &eta
}

fn leading_block_max(m: &CMat, half: usize) -> f64 {
    let mut max = 0.0f64;
    for i in 0..half {
        for j in 0..half {
            max = max.max(m[(i, j)].norm());
        }
    }
    max
}

/// Max-entry residual of `ηHη⁻¹ − h` on the leading `(dim/2)` block.
pub fn verify_similarity(epsilon: f64, omega: f64, dim: usize) -> f64 {
    assert!(dim >= 8, "need dim >= 8 for a meaningful residual");
    let h_pt = pt_hamiltonian(dim, omega, epsilon);
    let h = hermitian_partner(dim, omega, epsilon);
    let (eta, eta_inv) = dyson_map(dim, omega, epsilon);
    let eta_c = eta.map(|r| C64::new(r, 0.0));
    let eta_inv_c = eta_inv.map(|r| C64::new(r, 0.0));
    let residual = &eta_c * &h_pt * &eta_inv_c - h;
    leading_block_max(&residual, dim / 2)
}

/// Max-entry residual of `ΘH − H†Θ` on the leading `(dim/2)` block.
pub fn verify_quasi_hermiticity(epsilon: f64, omega: f64, dim: usize) -> f64 {
    assert!(dim >= 8, "need dim >= 8 for a meaningful residual");
    let h_pt = pt_hamiltonian(dim, omega, epsilon);
    let theta = metric_operator(dim, omega, epsilon).map(|r| C64::new(r, 0.0));
    let residual = &theta * &h_pt - h_pt.adjoint() * &theta;
    leading_block_max(&residual, dim / 2)
}

/// Largest `|Im λ|` among the `count` lowest-lying (by real part)
/// eigenvalues of the truncated `H`. In the unbroken phase the exact
/// spectrum is real; only the truncation edge produces complex values.
pub fn spectrum_max_imag(epsilon: f64, omega: f64, dim: usize, count: usize) -> f64 {
    let h_pt = pt_hamiltonian(dim, omega, epsilon);
    let schur = h_pt.schur();
    let eig = schur.eigenvalues().expect("complex Schur always resolves");
    let mut vals: Vec<C64> = eig.iter().copied().collect();
    vals.sort_by(|a, b| a.re.partial_cmp(&b.re).expect("finite eigenvalues"));
    vals.iter()
        .take(count)
        .map(|l| l.im.abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermitian_limit_is_exact() {
        assert!(verify_similarity(0.0, 1.0, 16) < 1e-12);
        assert!(verify_quasi_hermiticity(0.0, 1.0, 16) < 1e-12);
        let theta = metric_operator(16, 1.0, 0.0);
        for i in 0..16 {
            for j in 0..16 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((theta[(i, j)] - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn residuals_small_and_shrinking() {
        let s32 = verify_similarity(0.1, 1.0, 32);
        let s64 = verify_similarity(0.1, 1.0, 64);
        assert!(s64 < 1e-6, "similarity residual {s64:.3e}");
        assert!(s64 < s32);

        let q32 = verify_quasi_hermiticity(0.1, 1.0, 32);
        let q64 = verify_quasi_hermiticity(0.1, 1.0, 64);
        assert!(q64 < 1e-6, "quasi-hermiticity residual {q64:.3e}");
        assert!(q64 < q32);
    }

    #[test]
    fn low_spectrum_is_real() {
        assert!(spectrum_max_imag(0.1, 1.0, 64, 16) < 1e-8);
    }

    #[test]
    fn low_spectrum_matches_counterpart_levels() {
        // Eigenvalues of the truncated h approach omega*mu*(n + 1/2) + omega*eps.
        // The q^2/p^2 couplings split the basis into two parity chains of
        // length dim/2, and only the lower half of each chain is trustworthy,
        // so the 1e-10 agreement holds strictly below n = dim/2 - 1.
        let sorted_levels = |dim: usize, omega: f64, eps: f64| {
            let h = hermitian_partner(dim, omega, eps);
            let se = nalgebra::SymmetricEigen::new(h);
            let mut vals: Vec<f64> = se.eigenvalues.iter().copied().collect();
            vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
            vals
        };

        let (dim, omega, eps) = (128usize, 1.0, 0.1);
        let hc = hermitian_counterpart(eps, omega).unwrap();
        let vals = sorted_levels(dim, omega, eps);
        for n in 0..dim / 2 - 1 {
            assert!(
                (vals[n] - hc.level(n)).abs() < 1e-10,
                "level {n}: {} vs {}",
                vals[n],
                hc.level(n)
            );
        }

        // stronger deformation, checked on the comfortably converged range
        let (dim, omega, eps) = (128usize, 1.0, 0.5);
        let hc = hermitian_counterpart(eps, omega).unwrap();
        let vals = sorted_levels(dim, omega, eps);
        for n in 0..dim / 4 {
            assert!((vals[n] - hc.level(n)).abs() < 1e-10);
        }
    }

    #[test]
    fn metric_positive_definite_on_leading_block() {
        let dim = 64;
        let theta = metric_operator(dim, 1.0, 0.1);
        let block = theta.view((0, 0), (dim / 2, dim / 2)).into_owned();
        // symmetric
        for i in 0..dim / 2 {
            for j in 0..dim / 2 {
                assert!((block[(i, j)] - block[(j, i)]).abs() < 1e-9);
            }
        }
        let sym = (&block + block.transpose()).map(|v| 0.5 * v);
        let se = nalgebra::SymmetricEigen::new(sym);
        assert!(se.eigenvalues.iter().all(|&l| l > 0.0));
    }
}
