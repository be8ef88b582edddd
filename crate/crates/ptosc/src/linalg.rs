//! Small shared linear-algebra helpers for 4x4 moment and covariance
//! matrices.

use nalgebra::{Matrix2, Matrix4, SMatrix, Vector4};
use num_complex::Complex64;

use crate::{Error, Result};

/// Index of the conjugate operator in both moment bases used in this crate:
/// `(a, a†, b, b†)` and `(b₁†, b₁, b₂†, b₂)` both pair `0↔1`, `2↔3`.
pub const CONJ_IDX: [usize; 4] = [1, 0, 3, 2];

/// The conjugation image of a written-order moment matrix:
/// `⟨û_i û_j⟩* = ⟨û_{c(j)} û_{c(i)}⟩`.
pub fn conj_image(u: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    Matrix4::from_fn(|i, j| u[(CONJ_IDX[j], CONJ_IDX[i])].conj())
}

/// Largest absolute deviation from conjugate-pair symmetry.
pub fn conj_pair_deviation(u: &Matrix4<Complex64>) -> f64 {
    let img = conj_image(u);
    let mut dev: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            dev = dev.max((u[(i, j)] - img[(i, j)]).norm());
        }
    }
    dev
}

/// Average a moment matrix with its conjugation image, restoring exact
/// conjugate-pair symmetry.
pub fn resymmetrize(u: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    (u + conj_image(u)) * Complex64::new(0.5, 0.0)
}

/// Quadrature transition block: maps the ladder pair of one mode to `(x, p)`
/// with `x = (b + b†)/√2`, `p = i(b† - b)/√2`, vacuum variance 1/2.
///
/// `dagger_first` selects the ordering of the ladder pair in the basis:
/// `(b†, b)` (dimer convention) or `(b, b†)`.
pub fn transition_block(dagger_first: bool) -> Matrix2<Complex64> {
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let i = Complex64::new(0.0, std::f64::consts::FRAC_1_SQRT_2);
    if dagger_first {
        Matrix2::new(s, s, i, -i)
    } else {
        Matrix2::new(s, s, -i, i)
    }
}

/// Full 4x4 transition matrix `S = T ⊕ T` for a two-mode basis.
pub fn transition_matrix(dagger_first: bool) -> Matrix4<Complex64> {
    let t = transition_block(dagger_first);
    let mut s = Matrix4::zeros();
    s.fixed_view_mut::<2, 2>(0, 0).copy_from(&t);
    s.fixed_view_mut::<2, 2>(2, 2).copy_from(&t);
    s
}

/// Symmetrized quadrature covariance `C = ½[SUSᵀ + (SUSᵀ)ᵀ]` of a
/// written-order central moment matrix `U`.
///
/// Fails if the imaginary residue after symmetrization exceeds
/// `1e-10 · max(1, ‖·‖)`, which signals a broken conjugate-pair structure.
pub fn quadrature_covariance(u: &Matrix4<Complex64>, dagger_first: bool) -> Result<Matrix4<f64>> {
    let s = transition_matrix(dagger_first);
    let x = s * u * s.transpose();
    let sym = (x + x.transpose()) * Complex64::new(0.5, 0.0);
    let scale = sym.iter().fold(1.0f64, |m, z| m.max(z.norm()));
    let residue = sym.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
    if residue > 1e-10 * scale {
        return Err(Error::Unphysical(format!(
            "covariance has imaginary residue {residue:.3e} (scale {scale:.3e})"
        )));
    }
    Ok(sym.map(|z| z.re))
}

/// Two-mode symplectic form `Σ = J ⊕ J`, `J = [[0,1],[-1,0]]`.
pub fn symplectic_form() -> Matrix4<f64> {
    let mut s = Matrix4::zeros();
    s[(0, 1)] = 1.0;
    s[(1, 0)] = -1.0;
    s[(2, 3)] = 1.0;
    s[(3, 2)] = -1.0;
    s
}

/// Smallest eigenvalue of a Hermitian 4x4 complex matrix, via the real
/// symmetric embedding `[[Re, -Im], [Im, Re]]` (eigenvalues are doubled).
pub fn hermitian_min_eig(h: &Matrix4<Complex64>) -> f64 {
    let mut m = SMatrix::<f64, 8, 8>::zeros();
    for i in 0..4 {
        for j in 0..4 {
            let z = h[(i, j)];
            m[(i, j)] = z.re;
            m[(i + 4, j + 4)] = z.re;
            m[(i, j + 4)] = -z.im;
            m[(i + 4, j)] = z.im;
        }
    }
    // force exact symmetry before handing to the solver
    let m = (m + m.transpose()) * 0.5;
    m.symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

/// Smallest eigenvalue of `C + (i/2)Σ`; nonnegative (up to numerical slack)
/// exactly when `C` is a bona fide quantum covariance matrix.
pub fn bona_fide_min_eig(c: &Matrix4<f64>) -> f64 {
    let sigma = symplectic_form();
    let h = Matrix4::from_fn(|i, j| Complex64::new(c[(i, j)], 0.5 * sigma[(i, j)]));
    hermitian_min_eig(&h)
}

/// Mean-vector counterpart of [`conj_image`].
pub fn mean_conj_image(v: &Vector4<Complex64>) -> Vector4<Complex64> {
    Vector4::from_fn(|i, _| v[CONJ_IDX[i]].conj())
}

/// Whether the Hermitian matrix stored row-major in `h` (lower triangle
/// used, Hermitized on the fly) minus `shift·I` is positive definite.
///
/// Hand-rolled LDLᴴ elimination with real-pivot checks: a library Cholesky
/// over complex scalars happily takes square roots of negative pivots, so
/// it cannot serve as a definiteness test.
fn hermitian_shifted_is_pd(dim: usize, h: &[Complex64], shift: f64) -> bool {
    let mut m: Vec<Complex64> = (0..dim * dim)
        .map(|k| {
            let (i, j) = (k / dim, k % dim);
            (h[i * dim + j] + h[j * dim + i].conj()) * 0.5
        })
        .collect();
    for i in 0..dim {
        m[i * dim + i] -= Complex64::new(shift, 0.0);
    }
    for k in 0..dim {
        let d = m[k * dim + k].re;
        if !(d > 0.0) {
            return false;
        }
        for i in (k + 1)..dim {
            let f = m[i * dim + k] / d;
            for j in (k + 1)..=i {
                let upd = f * m[j * dim + k].conj();
                m[i * dim + j] -= upd;
            }
        }
    }
    true
}

/// Smallest eigenvalue of a Hermitian `dim x dim` matrix (row-major slice)
/// by bisection on the shift that breaks positive-definiteness.
///
/// Unlike an iterative eigensolver this cannot misconverge on
/// rank-deficient input, which matters for near-pure density operators.
pub fn hermitian_min_eig_bisect(dim: usize, h: &[Complex64]) -> f64 {
    // Gershgorin bound on the spectrum
    let mut bound: f64 = 1e-300;
    for i in 0..dim {
        let mut row = 0.0;
        for j in 0..dim {
            row += ((h[i * dim + j] + h[j * dim + i].conj()) * 0.5).norm();
        }
        bound = bound.max(row);
    }
    let mut lo = -bound; // min eig is >= lo
    let mut hi = bound;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if hermitian_shifted_is_pd(dim, h, mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * bound.max(1.0) {
            break;
        }
    }
    lo
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn vacuum_covariance_is_half_identity() {
        // dimer-order vacuum: <b b†> = 1 entries at (1,0) and (3,2)
        let mut u = Matrix4::<Complex64>::zeros();
        u[(1, 0)] = Complex64::new(1.0, 0.0);
        u[(3, 2)] = Complex64::new(1.0, 0.0);
        let c = quadrature_covariance(&u, true).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { 0.5 } else { 0.0 };
                assert_abs_diff_eq!(c[(i, j)], expect, epsilon = 1e-14);
            }
        }
        assert!(bona_fide_min_eig(&c) > -1e-12);
    }

    #[test]
    fn conj_symmetry_roundtrip() {
        let mut u = Matrix4::<Complex64>::zeros();
        u[(0, 2)] = Complex64::new(0.3, -0.2); // <ab>
        u[(3, 1)] = Complex64::new(0.3, 0.2); // <b†a†> = conj
        assert!(conj_pair_deviation(&u) < 1e-15);
        let r = resymmetrize(&u);
        assert_abs_diff_eq!((r - u).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn hermitian_min_eig_matches_known_spectrum() {
        let h = Matrix4::from_fn(|i, j| {
            if i == j {
                Complex64::new(i as f64, 0.0)
            } else if (i, j) == (0, 1) {
                Complex64::new(0.0, 2.0)
            } else if (i, j) == (1, 0) {
                Complex64::new(0.0, -2.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        // 2x2 block [[0, 2i], [-2i, 1]] has eigenvalues (1 ± √17)/2.
        let expect = (1.0 - 17.0f64.sqrt()) / 2.0;
        assert_abs_diff_eq!(hermitian_min_eig(&h), expect, epsilon = 1e-12);
    }
}
