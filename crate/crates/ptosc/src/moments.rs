//! Exact first- and second-moment propagation of the full linearized
//! cavity + oscillator model.
//!
//! The master equation with `H = -Δ a†a + ω_m b†b + G(a†b† + ab)`, cavity
//! decay channel `(κ/2)L[a]` and thermal oscillator channels
//! `(γ/2)(n_th+1)L[b]`, `(γ/2)n_th L[b†]` closes on first and second
//! moments. Over the ordered basis `û = (a, a†, b, b†)` the written-order
//! moment matrix `U_ij = ⟨û_i û_j⟩` obeys the Lyapunov flow
//!
//! ```text
//! d⟨û⟩/dt = M ⟨û⟩,      dU/dt = M U + U Mᵀ + N,
//! ```
//!
//! where `M` is the first-moment drift and `N` holds only the dissipative
//! injections (`κ` into `⟨aa†⟩`, `γ(n_th+1)` into `⟨bb†⟩`, `γ n_th` into
//! `⟨b†b⟩`). Because `U` tracks operator products in written order, the
//! commutator ledger `⟨oo†⟩ - ⟨o†o⟩ = 1` is carried inside `U` and the
//! Hamiltonian needs no constant correction; projecting the flow onto
//! `(⟨a†a⟩, ⟨b†b⟩, ⟨ab⟩)` reproduces the familiar component equations,
//! including the `+1` feeding `⟨ab⟩`.

use nalgebra::{Matrix4, Vector2, Vector4};
use num_complex::Complex64;

use crate::linalg;
use crate::params::{InitialMoments, OscillatorMoments, SystemParams};
use crate::rk4;
use crate::trajectory::Trajectory;
use crate::{Error, Result};

/// Basis index of `a`.
pub const IDX_A: usize = 0;
/// Basis index of `a†`.
pub const IDX_AD: usize = 1;
/// Basis index of `b`.
pub const IDX_B: usize = 2;
/// Basis index of `b†`.
pub const IDX_BD: usize = 3;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// First moments plus the 4x4 written-order second-moment matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentState {
    /// Sample time.
    pub t: f64,
    /// `(⟨a⟩, ⟨b⟩)`; the conjugate pair is implied.
    pub mean: Vector2<Complex64>,
    /// `U_ij = ⟨û_i û_j⟩` over `û = (a, a†, b, b†)`.
    pub second: Matrix4<Complex64>,
}

impl MomentState {
    /// Assemble the moments of a Gaussian state from the closed moment set
    /// `(⟨a⟩, ⟨b⟩, ⟨a†a⟩, ⟨b†b⟩, ⟨bb⟩, ⟨ab⟩)`.
    ///
    /// The correlations outside this set (`⟨aa⟩`, `⟨a†b⟩`) are those of a
    /// state with no additional correlations beyond the first moments, and
    /// the ledger entries `⟨aa†⟩ = ⟨a†a⟩ + 1`, `⟨bb†⟩ = ⟨b†b⟩ + 1` are
    /// filled in.
    pub fn from_initial_moments(init: &InitialMoments) -> Result<Self> {
        init.validate()?;
        let a = init.a_mean;
        let b = init.b_mean;
        // central (fluctuation) moments
        let na_c = init.n_a - a.norm_sqr();
        let nb_c = init.n_b - b.norm_sqr();
        let bb_c = init.bb - b * b;
        let ab_c = init.ab - a * b;

        let mut u = Matrix4::<Complex64>::zeros();
        let one = Complex64::new(1.0, 0.0);
        // mode a block
        u[(IDX_AD, IDX_A)] = Complex64::new(na_c, 0.0);
        u[(IDX_A, IDX_AD)] = Complex64::new(na_c, 0.0) + one;
        // mode b block
        u[(IDX_BD, IDX_B)] = Complex64::new(nb_c, 0.0);
        u[(IDX_B, IDX_BD)] = Complex64::new(nb_c, 0.0) + one;
        u[(IDX_B, IDX_B)] = bb_c;
        u[(IDX_BD, IDX_BD)] = bb_c.conj();
        // cross block
        u[(IDX_A, IDX_B)] = ab_c;
        u[(IDX_B, IDX_A)] = ab_c;
        u[(IDX_AD, IDX_BD)] = ab_c.conj();
        u[(IDX_BD, IDX_AD)] = ab_c.conj();

        // add back the first-moment contribution: <u_i u_j> = <δu_i δu_j> + m_i m_j
        let m = Vector4::new(a, a.conj(), b, b.conj());
        let u = u + m * m.transpose();

        let st = Self {
            t: 0.0,
            mean: Vector2::new(a, b),
            second: u,
        };
        st.check_physical()?;
        Ok(st)
    }

    /// Full mean vector `(⟨a⟩, ⟨a†⟩, ⟨b⟩, ⟨b†⟩)`.
    pub fn mean4(&self) -> Vector4<Complex64> {
        Vector4::new(
            self.mean[0],
            self.mean[0].conj(),
            self.mean[1],
            self.mean[1].conj(),
        )
    }

    /// `⟨a†a⟩`
    pub fn n_a(&self) -> f64 {
        self.second[(IDX_AD, IDX_A)].re
    }

    /// `⟨b†b⟩`
    pub fn n_b(&self) -> f64 {
        self.second[(IDX_BD, IDX_B)].re
    }

    /// `⟨ab⟩`
    pub fn ab(&self) -> Complex64 {
        self.second[(IDX_A, IDX_B)]
    }

    /// `⟨bb⟩`
    pub fn bb(&self) -> Complex64 {
        self.second[(IDX_B, IDX_B)]
    }

    /// `⟨aa⟩`
    pub fn aa(&self) -> Complex64 {
        self.second[(IDX_A, IDX_A)]
    }

    /// Commutator ledger residuals `(⟨aa†⟩-⟨a†a⟩-1, ⟨bb†⟩-⟨b†b⟩-1)`.
    pub fn ledger_residual(&self) -> (f64, f64) {
        let ra =
            self.second[(IDX_A, IDX_AD)] - self.second[(IDX_AD, IDX_A)] - Complex64::new(1.0, 0.0);
        let rb =
            self.second[(IDX_B, IDX_BD)] - self.second[(IDX_BD, IDX_B)] - Complex64::new(1.0, 0.0);
        (ra.norm(), rb.norm())
    }

    /// Central (fluctuation) second moments, `⟨δû_i δû_j⟩`.
    pub fn central_second(&self) -> Matrix4<Complex64> {
        let m = self.mean4();
        self.second - m * m.transpose()
    }

    /// Verify Gaussian physicality: occupations nonnegative and the
    /// quadrature covariance above the vacuum floor.
    pub fn check_physical(&self) -> Result<()> {
        if self.n_a() < -1e-9 || self.n_b() < -1e-9 {
            return Err(Error::Unphysical(format!(
                "negative occupation: n_a = {:.3e}, n_b = {:.3e}",
                self.n_a(),
                self.n_b()
            )));
        }
        let c = linalg::quadrature_covariance(&self.central_second(), false)?;
        let min_eig = linalg::bona_fide_min_eig(&c);
        if min_eig < -1e-8 {
            return Err(Error::Unphysical(format!(
                "covariance violates the uncertainty bound by {min_eig:.3e}"
            )));
        }
        Ok(())
    }
}

/// Oscillator moment triple of a state.
pub fn reduced_oscillator(state: &MomentState) -> OscillatorMoments {
    OscillatorMoments {
        b_mean: state.mean[1],
        n_b: state.n_b(),
        bb: state.bb(),
    }
}

/// First-moment drift matrix `M` over `(a, a†, b, b†)`.
///
/// Row `a` is `(iΔ - κ/2)⟨a⟩ - iG⟨b†⟩`; the `a†`, `b†` rows are the
/// element-wise conjugates of their partners under the index swap.
pub fn drift_matrix(p: &SystemParams) -> Matrix4<Complex64> {
    let g = Complex64::new(p.g_lin, 0.0);
    let mut m = Matrix4::<Complex64>::zeros();
    m[(IDX_A, IDX_A)] = I * p.delta - 0.5 * p.kappa;
    m[(IDX_A, IDX_BD)] = -I * g;
    m[(IDX_AD, IDX_AD)] = -I * p.delta - 0.5 * p.kappa;
    m[(IDX_AD, IDX_B)] = I * g;
    m[(IDX_B, IDX_B)] = -I * p.omega_m - 0.5 * p.gamma;
    m[(IDX_B, IDX_AD)] = -I * g;
    m[(IDX_BD, IDX_BD)] = I * p.omega_m - 0.5 * p.gamma;
    m[(IDX_BD, IDX_A)] = I * g;
    m
}

/// Constant injection matrix `N` of the Lyapunov flow.
///
/// Purely dissipative: the Hamiltonian part needs no constant because `U`
/// tracks written-order products (the `+1`s live in the ledger entries).
pub fn noise_matrix(p: &SystemParams) -> Matrix4<Complex64> {
    let mut n = Matrix4::<Complex64>::zeros();
    n[(IDX_A, IDX_AD)] = Complex64::new(p.kappa, 0.0);
    n[(IDX_B, IDX_BD)] = Complex64::new(p.gamma * (p.n_th + 1.0), 0.0);
    n[(IDX_BD, IDX_B)] = Complex64::new(p.gamma * p.n_th, 0.0);
    n
}

/// Integration state: mean 4-vector plus the moment matrix.
#[derive(Clone)]
struct Vars {
    mean: Vector4<Complex64>,
    u: Matrix4<Complex64>,
}

impl std::ops::Add for Vars {
    type Output = Vars;
    fn add(self, o: Vars) -> Vars {
        Vars {
            mean: self.mean + o.mean,
            u: self.u + o.u,
        }
    }
}

impl rk4::Scale for Vars {
    fn scale(&self, s: f64) -> Vars {
        let c = Complex64::new(s, 0.0);
        Vars {
            mean: self.mean * c,
            u: self.u * c,
        }
    }
}

/// Fastest rate of the model, used for the step bound.
fn fastest_rate(p: &SystemParams) -> f64 {
    p.omega_m.max(p.delta.abs()).max(p.kappa)
}

/// Fixed-step RK4 trajectory of the full model.
///
/// `dt` must satisfy `dt ≤ 0.05 / max(ω_m, |Δ|, κ)`. Conjugate-pair
/// symmetry is re-enforced after every step; a deviation beyond
/// `1e-10·max(1, ‖U‖)` or any non-finite entry aborts with the offending
/// time.
pub fn evolve(
    p: &SystemParams,
    init: &MomentState,
    t_end: f64,
    dt: f64,
    sample_every: usize,
) -> Result<Trajectory<MomentState>> {
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

    let m = drift_matrix(p);
    let mt = m.transpose();
    let n = noise_matrix(p);
    let rhs = |v: &Vars| Vars {
        mean: m * v.mean,
        u: m * v.u + v.u * mt + n,
    };

    let n_steps = (t_end / dt).round() as usize;
    let mut v = Vars {
        mean: init.mean4(),
        u: init.second,
    };
    let mut times = Vec::with_capacity(n_steps / sample_every + 2);
    let mut states = Vec::with_capacity(n_steps / sample_every + 2);
    let push =
        |times: &mut Vec<f64>, states: &mut Vec<MomentState>, t: f64, v: &Vars| -> Result<()> {
            let st = MomentState {
                t,
                mean: Vector2::new(v.mean[IDX_A], v.mean[IDX_B]),
                second: v.u,
            };
            if st.n_a() < -1e-9 || st.n_b() < -1e-9 {
                return Err(Error::Numerical {
                    t,
                    msg: format!(
                        "negative occupation: n_a={:.3e} n_b={:.3e}",
                        st.n_a(),
                        st.n_b()
                    ),
                });
            }
            times.push(t);
            states.push(st);
            Ok(())
        };
    push(&mut times, &mut states, init.t, &v)?;

    for k in 1..=n_steps {
        let t = init.t + k as f64 * dt;
        v = rk4::step(rhs, &v, dt);
        if v.u.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())
            || v.mean
                .iter()
                .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::Numerical {
                t,
                msg: "non-finite moment".into(),
            });
        }
        let scale = v.u.iter().fold(1.0f64, |m, z| m.max(z.norm()));
        let dev = linalg::conj_pair_deviation(&v.u);
        if dev > 1e-10 * scale {
            return Err(Error::Numerical {
                t,
                msg: format!("conjugate-pair symmetry broken by {dev:.3e}"),
            });
        }
        v.u = linalg::resymmetrize(&v.u);
        let mean_sym = (v.mean + linalg::mean_conj_image(&v.mean)) * Complex64::new(0.5, 0.0);
        v.mean = mean_sym;
        if k % sample_every == 0 {
            push(&mut times, &mut states, t, &v)?;
        }
    }
    Trajectory::new(times, states)
}
