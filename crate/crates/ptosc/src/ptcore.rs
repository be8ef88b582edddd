//! Spectral analysis of the PT dimer.
//!
//! The non-Hermitian Hamiltonian
//! `H = (ω - iγ/2) b₁†b₁ + (ω + iγ'/2) b₂†b₂ + μ(b₁†b₂ + b₁b₂†)`
//! has eigenvalues
//!
//! ```text
//! λ± = ω - i(γ-γ')/4 ± √(μ² - ((γ+γ')/4)²)
//! ```
//!
//! The exceptional point sits at `μ_EP = (γ+γ')/4`: below it the square
//! root is imaginary (broken phase, common real part), above it the modes
//! split with a common effective dissipation `(γ-γ')/4` each.

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::params::PtDimerParams;
use crate::{Error, Result};

/// Eigenvalue pair at one coupling value.
///
/// `lambda_plus` carries the `+` branch of the principal square root, which
/// is also the member with the larger (real, imaginary) lexicographic order,
/// so sweep curves are continuous through the exceptional point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PtSpectrum {
    pub lambda_plus: Complex64,
    pub lambda_minus: Complex64,
    /// Coupling at which the pair was evaluated.
    pub mu: f64,
}

impl PtSpectrum {
    /// `λ₊ + λ₋ - (2ω - i(γ-γ')/2)`, which must vanish (trace identity).
    pub fn trace_residual(&self, p: &PtDimerParams) -> f64 {
        let expect = Complex64::new(2.0 * p.omega, -(p.gamma_loss - p.gamma_gain) / 2.0);
        (self.lambda_plus + self.lambda_minus - expect).norm()
    }
}

/// Closed-form eigenvalues at the coupling stored in `p`.
pub fn eigenvalues(p: &PtDimerParams) -> Result<PtSpectrum> {
    p.validate()?;
    Ok(eigenvalues_at(p, p.mu))
}

/// Closed-form eigenvalues at an explicit coupling `mu`.
pub fn eigenvalues_at(p: &PtDimerParams, mu: f64) -> PtSpectrum {
    let ep = exceptional_point(p);
    let root = Complex64::new(mu * mu - ep * ep, 0.0).sqrt();
    let center = Complex64::new(p.omega, -(p.gamma_loss - p.gamma_gain) / 4.0);
    PtSpectrum {
        lambda_plus: center + root,
        lambda_minus: center - root,
        mu,
    }
}

/// Coupling at which the two eigenvalues coalesce: `(γ+γ')/4`.
pub fn exceptional_point(p: &PtDimerParams) -> f64 {
    (p.gamma_loss + p.gamma_gain) / 4.0
}

/// The dimer Hamiltonian as a literal 2x2 matrix at coupling `mu`.
pub fn dimer_matrix(p: &PtDimerParams, mu: f64) -> Matrix2<Complex64> {
    Matrix2::new(
        Complex64::new(p.omega, -p.gamma_loss / 2.0),
        Complex64::new(mu, 0.0),
        Complex64::new(mu, 0.0),
        Complex64::new(p.omega, p.gamma_gain / 2.0),
    )
}

/// Eigenvalues of a 2x2 complex matrix by the characteristic quadratic,
/// sorted ascending by (re, im).
///
/// The discriminant is computed as `((a-d)/2)² + bc` rather than
/// `(tr/2)² - det`, which would cancel catastrophically near a degeneracy.
pub fn eigenvalues_direct(m: &Matrix2<Complex64>) -> (Complex64, Complex64) {
    let half_tr = (m[(0, 0)] + m[(1, 1)]) * 0.5;
    let half_diff = (m[(0, 0)] - m[(1, 1)]) * 0.5;
    let disc = (half_diff * half_diff + m[(0, 1)] * m[(1, 0)]).sqrt();
    let (a, b) = (half_tr - disc, half_tr + disc);
    sort_pair(a, b)
}

fn sort_pair(a: Complex64, b: Complex64) -> (Complex64, Complex64) {
    if (a.re, a.im) <= (b.re, b.im) {
        (a, b)
    } else {
        (b, a)
    }
}

/// Eigenvalues on a coupling grid, cross-checked against the direct 2x2
/// eigendecomposition of the literal matrix to 1e-12.
pub fn sweep(p: &PtDimerParams, mu_grid: &[f64]) -> Result<Vec<PtSpectrum>> {
    p.validate()?;
    if mu_grid.is_empty() {
        return Err(Error::InvalidParams("empty mu grid".into()));
    }
    mu_grid
        .iter()
        .map(|&mu| {
            let spec = eigenvalues_at(p, mu);
            let (lo, hi) = sort_pair(spec.lambda_minus, spec.lambda_plus);
            let (dlo, dhi) = eigenvalues_direct(&dimer_matrix(p, mu));
            let dev = (lo - dlo).norm().max((hi - dhi).norm());
            if dev > 1e-12 {
                return Err(Error::Numerical {
                    t: mu,
                    msg: format!("closed form vs direct eigensolver deviate by {dev:.3e}"),
                });
            }
            Ok(PtSpectrum {
                lambda_minus: lo,
                lambda_plus: hi,
                mu,
            })
        })
        .collect()
}
