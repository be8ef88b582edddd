//! Quantum-complete dynamics of the PT dimer, covariance matrices and
//! logarithmic negativity.
//!
//! Moments are tracked over `û = (b₁†, b₁, b₂†, b₂)` with
//! `U_ij = ⟨û_i û_j⟩` and first moments fixed at zero. The generator pairs
//! the Hermitian Hamiltonian `H = ω(b₁†b₁ + b₂†b₂) + μ(b₁†b₂ + b₁b₂†)`
//! with a thermal loss channel of rate `γ` on `b₁` and the gain channel on
//! `b₂` entering with rate `-γ'` and occupancy `n'`, so that the moment
//! equations are exactly the component equations of the effective master
//! equation (gain drift `+γ'/2`, occupation growth `+γ'⟨b₂†b₂⟩ - γ'n'`)
//! and the commutator ledger `⟨b_k b_k†⟩ - ⟨b_k†b_k⟩ = 1` is preserved.
//!
//! Entanglement is measured by the logarithmic negativity
//! `E_n = max(0, -ln 2ζ)` with `ζ` the smallest symplectic eigenvalue of
//! the partially transposed covariance matrix.

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

use crate::linalg;
use crate::params::PtDimerParams;
use crate::rk4;
use crate::trajectory::Trajectory;
use crate::{Error, Result};

/// Basis index of `b₁†`.
pub const IDX_B1D: usize = 0;
/// Basis index of `b₁`.
pub const IDX_B1: usize = 1;
/// Basis index of `b₂†`.
pub const IDX_B2D: usize = 2;
/// Basis index of `b₂`.
pub const IDX_B2: usize = 3;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `E_n` below this value counts as dead for the death-time search.
pub const DEATH_THRESHOLD: f64 = 1e-6;

/// Second moments of the dimer at one instant (first moments are zero).
#[derive(Debug, Clone, PartialEq)]
pub struct DimerMomentState {
    pub t: f64,
    /// `U_ij = ⟨û_i û_j⟩` over `û = (b₁†, b₁, b₂†, b₂)`.
    pub u: Matrix4<Complex64>,
}

impl DimerMomentState {
    pub fn n1(&self) -> f64 {
        self.u[(IDX_B1D, IDX_B1)].re
    }

    pub fn n2(&self) -> f64 {
        self.u[(IDX_B2D, IDX_B2)].re
    }

    /// `⟨b₁b₂⟩`
    pub fn b1b2(&self) -> Complex64 {
        self.u[(IDX_B1, IDX_B2)]
    }

    /// `⟨b₁†b₂⟩`
    pub fn b1dag_b2(&self) -> Complex64 {
        self.u[(IDX_B1D, IDX_B2)]
    }

    /// Ledger residuals `(⟨b₁b₁†⟩-⟨b₁†b₁⟩-1, ⟨b₂b₂†⟩-⟨b₂†b₂⟩-1)`.
    pub fn ledger_residual(&self) -> (f64, f64) {
        let one = Complex64::new(1.0, 0.0);
        let r1 = self.u[(IDX_B1, IDX_B1D)] - self.u[(IDX_B1D, IDX_B1)] - one;
        let r2 = self.u[(IDX_B2, IDX_B2D)] - self.u[(IDX_B2D, IDX_B2)] - one;
        (r1.norm(), r2.norm())
    }
}

/// Two-mode squeezed vacuum moments with squeezing `r`:
/// `⟨b_k†b_k⟩ = sinh²r`, `⟨b₁b₂⟩ = -½ sinh 2r`, single-mode anomalous
/// moments zero. Its negativity is `E_n = 2r`.
pub fn tmsv_initial(r: f64) -> DimerMomentState {
    rotated_tmsv_initial(r, 0.0)
}

/// Two-mode squeezed vacuum carried through the beam-splitter rotation
/// `b₁ → b₁cosθ - i b₂ sinθ`, `b₂ → b₂cosθ - i b₁ sinθ` (the rotation the
/// tunneling coupling itself generates, with `θ = μt`).
///
/// At `θ = 0` this is the plain squeezed vacuum; at `θ = π/4` the pair is
/// momentarily a product of single-mode squeezed states (`E_n = 0`).
pub fn rotated_tmsv_initial(r: f64, theta: f64) -> DimerMomentState {
    let sh2 = r.sinh() * r.sinh();
    let s2 = (2.0 * r).sinh();
    let (c, s) = (theta.cos(), theta.sin());
    let b1b2 = Complex64::new(-0.5 * s2 * (c * c - s * s), 0.0);
    let anom = Complex64::new(0.0, s2 * c * s); // ⟨b₁²⟩ = ⟨b₂²⟩
    let one = Complex64::new(1.0, 0.0);
    let occ = Complex64::new(sh2, 0.0);

    let mut u = Matrix4::<Complex64>::zeros();
    u[(IDX_B1D, IDX_B1)] = occ;
    u[(IDX_B1, IDX_B1D)] = occ + one;
    u[(IDX_B2D, IDX_B2)] = occ;
    u[(IDX_B2, IDX_B2D)] = occ + one;
    u[(IDX_B1, IDX_B2)] = b1b2;
    u[(IDX_B2, IDX_B1)] = b1b2;
    u[(IDX_B1D, IDX_B2D)] = b1b2.conj();
    u[(IDX_B2D, IDX_B1D)] = b1b2.conj();
    u[(IDX_B1, IDX_B1)] = anom;
    u[(IDX_B2, IDX_B2)] = anom;
    u[(IDX_B1D, IDX_B1D)] = anom.conj();
    u[(IDX_B2D, IDX_B2D)] = anom.conj();
    DimerMomentState { t: 0.0, u }
}

/// Rotation angle `θ ∈ [π/4, π/2]` at which the rotated squeezed vacuum has
/// negativity `en_target`, found by bisection on the rising branch (so the
/// beam-splitter dynamics initially *increases* the entanglement).
pub fn rotation_angle_for_negativity(r: f64, en_target: f64) -> Result<f64> {
    let en_max = 2.0 * r;
    if !(0.0..en_max).contains(&en_target) {
        return Err(Error::Infeasible(format!(
            "target negativity {en_target} outside [0, 2r = {en_max})"
        )));
    }
    let en_at = |theta: f64| -> Result<f64> {
        log_negativity(&to_covariance(&rotated_tmsv_initial(r, theta))?)
    };
    let mut lo = std::f64::consts::FRAC_PI_4; // node, E_n = 0
    let mut hi = std::f64::consts::FRAC_PI_2; // antinode, E_n = 2r
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if en_at(mid)? < en_target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Drift and injection matrices of the dimer moment flow,
/// `dU/dt = MU + UMᵀ + N`.
pub fn dimer_drift_noise(p: &PtDimerParams) -> (Matrix4<Complex64>, Matrix4<Complex64>) {
    let (w, g, gp, mu) = (p.omega, p.gamma_loss, p.gamma_gain, p.mu);
    let mut m = Matrix4::<Complex64>::zeros();
    m[(IDX_B1D, IDX_B1D)] = I * w - 0.5 * g;
    m[(IDX_B1D, IDX_B2D)] = I * mu;
    m[(IDX_B1, IDX_B1)] = -I * w - 0.5 * g;
    m[(IDX_B1, IDX_B2)] = -I * mu;
    m[(IDX_B2D, IDX_B2D)] = I * w + 0.5 * gp;
    m[(IDX_B2D, IDX_B1D)] = I * mu;
    m[(IDX_B2, IDX_B2)] = -I * w + 0.5 * gp;
    m[(IDX_B2, IDX_B1)] = -I * mu;

    let mut n = Matrix4::<Complex64>::zeros();
    n[(IDX_B1, IDX_B1D)] = Complex64::new(g * (p.n_th_loss + 1.0), 0.0);
    n[(IDX_B1D, IDX_B1)] = Complex64::new(g * p.n_th_loss, 0.0);
    // gain channel: thermal channel of rate -γ' and occupancy n'
    n[(IDX_B2, IDX_B2D)] = Complex64::new(-gp * (p.n_th_gain + 1.0), 0.0);
    n[(IDX_B2D, IDX_B2)] = Complex64::new(-gp * p.n_th_gain, 0.0);
    (m, n)
}

fn fastest_rate(p: &PtDimerParams) -> f64 {
    p.omega.max(p.mu).max(p.gamma_loss).max(p.gamma_gain.abs())
}

/// Fixed-step RK4 trajectory of the dimer moments.
pub fn evolve_dimer(
    p: &PtDimerParams,
    init: &DimerMomentState,
    t_end: f64,
    dt: f64,
    sample_every: usize,
) -> Result<Trajectory<DimerMomentState>> {
    p.validate()?;
    if !(t_end > 0.0) || !(dt > 0.0) {
        return Err(Error::InvalidParams(format!(
            "need t_end > 0 and dt > 0, got {t_end}, {dt}"
        )));
    }
    let bound = rk4::step_bound(fastest_rate(p));
    if dt > bound {
        return Err(Error::StepTooLarge { dt, bound });
    }
    if sample_every == 0 {
        return Err(Error::InvalidParams("sample_every must be >= 1".into()));
    }

    let (m, n) = dimer_drift_noise(p);
    let mt = m.transpose();
    let rhs = |u: &Matrix4<Complex64>| m * u + u * mt + n;

    let n_steps = (t_end / dt).round() as usize;
    let mut u = init.u;
    let mut times = Vec::with_capacity(n_steps / sample_every + 2);
    let mut states = Vec::with_capacity(n_steps / sample_every + 2);
    times.push(init.t);
    states.push(DimerMomentState { t: init.t, u });
    for k in 1..=n_steps {
        let t = init.t + k as f64 * dt;
        u = rk4::step(|v: &Matrix4<Complex64>| rhs(v), &u, dt);
        if u.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Numerical {
                t,
                msg: "non-finite moment".into(),
            });
        }
        let scale = u.iter().fold(1.0f64, |mx, z| mx.max(z.norm()));
        let dev = linalg::conj_pair_deviation(&u);
        if dev > 1e-10 * scale {
            return Err(Error::Numerical {
                t,
                msg: format!("conjugate-pair symmetry broken by {dev:.3e}"),
            });
        }
        u = linalg::resymmetrize(&u);
        let st = DimerMomentState { t, u };
        if st.n1() < -1e-9 || st.n2() < -1e-9 {
            return Err(Error::Numerical {
                t,
                msg: format!("negative occupation: n1={:.3e} n2={:.3e}", st.n1(), st.n2()),
            });
        }
        if k % sample_every == 0 {
            times.push(t);
            states.push(st);
        }
    }
    Trajectory::new(times, states)
}

/// Real symmetric quadrature covariance over `ξ = (x₁, p₁, x₂, p₂)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix(pub Matrix4<f64>);

impl CovarianceMatrix {
    /// Smallest eigenvalue of `C + (i/2)Σ` (≥ 0 for physical states).
    pub fn bona_fide_min_eig(&self) -> f64 {
        linalg::bona_fide_min_eig(&self.0)
    }
}

/// Covariance matrix `C = ½[SUSᵀ + (SUSᵀ)ᵀ]` of a dimer moment state.
pub fn to_covariance(st: &DimerMomentState) -> Result<CovarianceMatrix> {
    Ok(CovarianceMatrix(linalg::quadrature_covariance(
        &st.u, true,
    )?))
}

/// Logarithmic negativity `E_n = max(0, -ln 2ζ)` of a two-mode covariance.
///
/// `ζ` is the smallest positive square root of the eigenvalues of
/// `-(ΣC̃)²`, where `C̃` flips the sign of `p₂`.
pub fn log_negativity(c: &CovarianceMatrix) -> Result<f64> {
    let mut pt = c.0;
    for k in 0..4 {
        pt[(3, k)] = -pt[(3, k)];
        pt[(k, 3)] = -pt[(k, 3)];
    }
    let sc = linalg::symplectic_form() * pt;
    let m = -(sc * sc);
    let eigs: Vector4<Complex64> = m.complex_eigenvalues();
    let scale = c.0.amax().max(1.0);
    let mut zeta2 = f64::INFINITY;
    for e in eigs.iter() {
        if e.im.abs() > 1e-8 * scale * scale {
            return Err(Error::Unphysical(format!(
                "complex squared symplectic eigenvalue {e} of the partial transpose"
            )));
        }
        zeta2 = zeta2.min(e.re);
    }
    if zeta2 < -1e-10 * scale * scale {
        return Err(Error::Unphysical(format!(
            "negative squared symplectic eigenvalue {zeta2:.3e}"
        )));
    }
    let zeta = zeta2.max(0.0).sqrt();
    if zeta == 0.0 {
        return Err(Error::Unphysical("vanishing symplectic eigenvalue".into()));
    }
    Ok((-(2.0 * zeta).ln()).max(0.0))
}

/// `E_n(t)` along a dimer trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct NegativityTrace {
    pub times: Vec<f64>,
    pub en: Vec<f64>,
}

/// Evolve the dimer and measure `E_n` at every sample.
pub fn negativity_trace(
    p: &PtDimerParams,
    init: &DimerMomentState,
    t_end: f64,
    dt: f64,
    sample_every: usize,
) -> Result<NegativityTrace> {
    let traj = evolve_dimer(p, init, t_end, dt, sample_every)?;
    let mut en = Vec::with_capacity(traj.len());
    for (_, st) in traj.iter() {
        en.push(log_negativity(&to_covariance(st)?)?);
    }
    Ok(NegativityTrace {
        times: traj.times().to_vec(),
        en,
    })
}

/// Entanglement death time: the first sample time from which `E_n` stays
/// below [`DEATH_THRESHOLD`] for the rest of the horizon. `None` means the
/// entanglement is still alive at the horizon.
pub fn death_time(trace: &NegativityTrace, horizon: f64) -> Result<Option<f64>> {
    if trace.times.is_empty() {
        return Err(Error::GridMismatch("empty negativity series".into()));
    }
    let mut death: Option<f64> = None;
    for (&t, &e) in trace.times.iter().zip(trace.en.iter()) {
        if t > horizon {
            break;
        }
        if e >= DEATH_THRESHOLD {
            death = None;
        } else if death.is_none() {
            death = Some(t);
        }
    }
    Ok(death)
}

/// Mean `E_n` over samples with `t ≤ t_max`.
pub fn time_avg(trace: &NegativityTrace, t_max: f64) -> Result<f64> {
    let kept: Vec<f64> = trace
        .times
        .iter()
        .zip(trace.en.iter())
        .filter(|(t, _)| **t <= t_max)
        .map(|(_, e)| *e)
        .collect();
    if kept.is_empty() {
        return Err(Error::GridMismatch(
            "no samples inside the averaging window".into(),
        ));
    }
    Ok(kept.iter().sum::<f64>() / kept.len() as f64)
}
