//! Scenario types, validation, and the closed-form effective-gain algebra of
//! the adiabatic elimination.
//!
//! The linearized optomechanical model is
//! `H = -Δ a†a + ω_m b†b + G(a†b† + ab)` with cavity decay `κ`, intrinsic
//! oscillator decay `γ` and bath occupancy `n_th`. Eliminating the cavity
//! leaves a single oscillator with
//!
//! ```text
//! ω_eff = ω_m + 4G²(Δ-ω_m)/D,   Γ_eff = γ - 4G²κ/D,   D = 4(Δ-ω_m)² + κ²,
//! ```
//!
//! a modified bath occupancy `n'_th = (γ n_th + 4G²κ/D)/Γ_eff`, and a
//! modified initial phonon number. `Γ_eff < 0` is a gain; the product
//! `Γ_eff·n'_th` (the heating rate) stays nonnegative by construction.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Linearized cavity + oscillator scenario, in units of `ω_m`.
///
/// `G` is real and nonnegative: the elimination of the cavity assumes a real
/// coupling, so a complex phase must be absorbed into the operators first.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Mechanical angular frequency (conventionally 1).
    pub omega_m: f64,
    /// Total cavity decay rate.
    pub kappa: f64,
    /// Intrinsic oscillator decay rate.
    pub gamma: f64,
    /// Drive detuning Δ (blue sideband: Δ ≈ +ω_m or larger).
    pub delta: f64,
    /// Linearized optomechanical coupling G.
    pub g_lin: f64,
    /// Thermal phonon number of the oscillator bath.
    pub n_th: f64,
}

impl SystemParams {
    pub fn new(
        omega_m: f64,
        kappa: f64,
        gamma: f64,
        delta: f64,
        g_lin: f64,
        n_th: f64,
    ) -> Result<Self> {
        let p = Self {
            omega_m,
            kappa,
            gamma,
            delta,
            g_lin,
            n_th,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if !self.omega_m.is_finite() || self.omega_m <= 0.0 {
            return bad(format!("omega_m must be > 0, got {}", self.omega_m));
        }
        if !self.kappa.is_finite() || self.kappa <= 0.0 {
            return bad(format!("kappa must be > 0, got {}", self.kappa));
        }
        if !self.gamma.is_finite() || self.gamma < 0.0 {
            return bad(format!("gamma must be >= 0, got {}", self.gamma));
        }
        if !self.delta.is_finite() {
            return bad("delta must be finite".into());
        }
        if !self.g_lin.is_finite() || self.g_lin < 0.0 {
            return bad(format!("g_lin must be real and >= 0, got {}", self.g_lin));
        }
        if !self.n_th.is_finite() || self.n_th < 0.0 {
            return bad(format!("n_th must be >= 0, got {}", self.n_th));
        }
        Ok(())
    }

    /// `4(Δ-ω_m)² + κ²`, the denominator of the elimination formulas.
    pub fn elimination_denominator(&self) -> f64 {
        let d = self.delta - self.omega_m;
        4.0 * d * d + self.kappa * self.kappa
    }

    /// Whether the cavity is fast enough for the elimination to be trusted:
    /// `κ ≥ 10γ` or `|Δ-ω_m| ≥ 10G`.
    pub fn elimination_trusted(&self) -> bool {
        self.kappa >= 10.0 * self.gamma || (self.delta - self.omega_m).abs() >= 10.0 * self.g_lin
    }
}

/// Constants of the eliminated oscillator model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveParams {
    /// Effective oscillation frequency `ω_eff`.
    pub omega_eff: f64,
    /// Effective dissipation `Γ_eff`; negative values are gain.
    pub gamma_eff: f64,
    /// Modified bath occupancy `n'_th = heating_rate / Γ_eff`.
    ///
    /// `None` when `Γ_eff = 0` exactly (0/0); downstream code must then use
    /// `heating_rate` and `gamma_eff` separately.
    pub n_th_eff: Option<f64>,
    /// `Γ_eff · n'_th = γ n_th + 4G²κ/D`, always ≥ 0.
    pub heating_rate: f64,
}

/// Effective frequency, dissipation and bath occupancy of the eliminated
/// oscillator.
pub fn effective_params(p: &SystemParams) -> EffectiveParams {
    let d = p.elimination_denominator();
    let g2 = p.g_lin * p.g_lin;
    let pump = 4.0 * g2 * p.kappa / d;
    let omega_eff = p.omega_m + 4.0 * g2 * (p.delta - p.omega_m) / d;
    let gamma_eff = p.gamma - pump;
    let heating_rate = p.gamma * p.n_th + pump;
    let n_th_eff = if gamma_eff == 0.0 {
        None
    } else {
        Some(heating_rate / gamma_eff)
    };
    EffectiveParams {
        omega_eff,
        gamma_eff,
        n_th_eff,
        heating_rate,
    }
}

/// Coupling `G*` at which the effective dissipation equals `-target_gain`.
///
/// Inverts `Γ_eff(G) = γ - 4G²κ/D`; requires `target_gain ≥ -γ`, otherwise
/// no nonnegative coupling works.
pub fn balance_coupling(p: &SystemParams, target_gain: f64) -> Result<f64> {
    if !target_gain.is_finite() || target_gain < -p.gamma {
        return Err(Error::Infeasible(format!(
            "target gain {} below -gamma = {}; Γ_eff cannot exceed γ",
            target_gain, -p.gamma
        )));
    }
    let d = p.elimination_denominator();
    Ok(((p.gamma + target_gain) * d / (4.0 * p.kappa)).sqrt())
}

/// First and second moments that seed a simulation run.
///
/// Only the moments that close under the linearized dynamics are carried;
/// unlisted correlations (`⟨aa⟩`, `⟨a†b⟩`) are taken as those of a product
/// Gaussian state with the given means.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialMoments {
    /// ⟨b⟩(0)
    pub b_mean: Complex64,
    /// ⟨b†b⟩(0)
    pub n_b: f64,
    /// ⟨bb⟩(0)
    pub bb: Complex64,
    /// ⟨a†a⟩(0)
    pub n_a: f64,
    /// ⟨ab⟩(0)
    pub ab: Complex64,
    /// ⟨a⟩(0)
    pub a_mean: Complex64,
}

impl InitialMoments {
    /// Oscillator in a coherent-like state of occupation `n_b`
    /// (`⟨b⟩ = √n_b`, `⟨bb⟩ = ⟨b⟩²`), cavity empty.
    pub fn coherent_oscillator(n_b: f64) -> Self {
        let b = Complex64::new(n_b.max(0.0).sqrt(), 0.0);
        Self {
            b_mean: b,
            n_b,
            bb: b * b,
            n_a: 0.0,
            ab: Complex64::new(0.0, 0.0),
            a_mean: Complex64::new(0.0, 0.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_b < 0.0 || self.n_a < 0.0 {
            return Err(Error::Unphysical(format!(
                "occupations must be >= 0: n_b = {}, n_a = {}",
                self.n_b, self.n_a
            )));
        }
        let all = [
            self.b_mean.re,
            self.b_mean.im,
            self.bb.re,
            self.bb.im,
            self.ab.re,
            self.ab.im,
            self.a_mean.re,
            self.a_mean.im,
            self.n_a,
            self.n_b,
        ];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::Unphysical("non-finite initial moment".into()));
        }
        Ok(())
    }
}

/// Oscillator moment triple `(⟨b⟩, ⟨b†b⟩, ⟨bb⟩)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorMoments {
    pub b_mean: Complex64,
    pub n_b: f64,
    pub bb: Complex64,
}

impl OscillatorMoments {
    pub fn new(b_mean: Complex64, n_b: f64, bb: Complex64) -> Self {
        Self { b_mean, n_b, bb }
    }
}

/// Modified oscillator initial condition for the eliminated model.
///
/// The cavity leaves a footprint on the oscillator before it is eliminated:
///
/// ```text
/// n_b' = (1 + 8G²/D)·n_b + 4G²·n_a/D - 8G(Δ-ω_m)·Re⟨ab⟩/D
/// ```
///
/// with `⟨b⟩'(0) = √n_b'` and `⟨bb⟩'(0) = ⟨b⟩'(0)²` (coherent-like phase).
pub fn modified_initial(p: &SystemParams, init: &InitialMoments) -> Result<OscillatorMoments> {
    p.validate()?;
    init.validate()?;
    let d = p.elimination_denominator();
    let g2 = p.g_lin * p.g_lin;
    let n_b_mod = (1.0 + 8.0 * g2 / d) * init.n_b + 4.0 * g2 * init.n_a / d
        - 8.0 * p.g_lin * (p.delta - p.omega_m) * init.ab.re / d;
    if n_b_mod < 0.0 {
        return Err(Error::Unphysical(format!(
            "modified initial phonon number is negative ({n_b_mod}); \
             the input correlations are outside the validity of the elimination"
        )));
    }
    let b = Complex64::new(n_b_mod.sqrt(), 0.0);
    Ok(OscillatorMoments {
        b_mean: b,
        n_b: n_b_mod,
        bb: b * b,
    })
}

/// PT dimer scenario: a lossy oscillator tunnel-coupled to a gain oscillator.
///
/// Rates are those of the non-Hermitian Hamiltonian
/// `H = (ω - iγ/2) b₁†b₁ + (ω + iγ'/2) b₂†b₂ + μ(b₁†b₂ + b₁b₂†)`.
/// A negative `gamma_gain` turns mode 2 into a second lossy oscillator
/// (the fully dissipative reference case has `γ' = -γ`). `n_th_gain` is
/// the occupancy attached to the gain channel; it may be negative (the
/// eliminated model hands over `n'_th < 0` when `Γ_eff < 0`, and the
/// product `-γ'·n_th_gain` is then the physical heating rate).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PtDimerParams {
    /// Common oscillator frequency ω.
    pub omega: f64,
    /// Loss rate γ of oscillator 1.
    pub gamma_loss: f64,
    /// Gain rate γ' of oscillator 2.
    pub gamma_gain: f64,
    /// Phonon tunneling coupling μ.
    pub mu: f64,
    /// Bath occupancy of the loss channel.
    pub n_th_loss: f64,
    /// Occupancy attached to the gain channel (may be negative, see above).
    pub n_th_gain: f64,
}

impl PtDimerParams {
    pub fn new(omega: f64, gamma_loss: f64, gamma_gain: f64, mu: f64) -> Result<Self> {
        let p = Self {
            omega,
            gamma_loss,
            gamma_gain,
            mu,
            n_th_loss: 0.0,
            n_th_gain: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if !self.omega.is_finite() || self.omega <= 0.0 {
            return bad(format!("omega must be > 0, got {}", self.omega));
        }
        if !self.mu.is_finite() || self.mu < 0.0 {
            return bad(format!("mu must be >= 0, got {}", self.mu));
        }
        if !self.gamma_loss.is_finite() || self.gamma_loss < 0.0 {
            return bad(format!("gamma_loss must be >= 0, got {}", self.gamma_loss));
        }
        if !self.gamma_gain.is_finite() {
            return bad("gamma_gain must be finite".into());
        }
        if !self.n_th_loss.is_finite() || self.n_th_loss < 0.0 {
            return bad(format!("n_th_loss must be >= 0, got {}", self.n_th_loss));
        }
        if !self.n_th_gain.is_finite() {
            return bad("n_th_gain must be finite".into());
        }
        Ok(())
    }

    /// Net moment decay rate `(γ - γ')/2`, zero for exact PT symmetry.
    pub fn gamma_eff(&self) -> f64 {
        (self.gamma_loss - self.gamma_gain) / 2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn fig2_params() -> SystemParams {
        SystemParams::new(1.0, 0.1, 1e-5, 3.0, 0.04, 1000.0).unwrap()
    }

    #[test]
    fn coupling_off_reproduces_bare_oscillator() {
        let mut p = fig2_params();
        p.g_lin = 0.0;
        let eff = effective_params(&p);
        assert_eq!(eff.gamma_eff, p.gamma);
        assert_eq!(eff.omega_eff, p.omega_m);
        assert_eq!(eff.heating_rate, p.gamma * p.n_th);
        assert_relative_eq!(eff.n_th_eff.unwrap(), p.n_th, max_relative = 1e-13);
    }

    #[test]
    fn fig2_effective_values() {
        // Direct arithmetic on the closed forms: D = 16.01,
        // Γ_eff = 1e-5 - 6.4e-4/16.01, ω_eff = 1 + 0.0128/16.01.
        let eff = effective_params(&fig2_params());
        assert_relative_eq!(eff.gamma_eff, 1e-5 - 6.4e-4 / 16.01, max_relative = 1e-12);
        assert_abs_diff_eq!(eff.gamma_eff, -2.9975e-5, epsilon = 1e-9);
        assert_relative_eq!(eff.omega_eff, 1.0 + 0.0128 / 16.01, max_relative = 1e-12);
        assert_abs_diff_eq!(eff.omega_eff, 1.0007995, epsilon = 1e-7);
        assert_relative_eq!(eff.heating_rate, 1e-2 + 3.9975015e-5, max_relative = 1e-6);
        assert!(eff.heating_rate > 0.0);
    }

    #[test]
    fn balance_trivial_and_threshold() {
        let p = fig2_params();
        // No gain requested: G* = 0.
        assert_eq!(balance_coupling(&p, -p.gamma).unwrap(), 0.0);
        // Γ_eff = 0 threshold.
        let g0 = balance_coupling(&p, 0.0).unwrap();
        let expect = (p.gamma * p.elimination_denominator() / (4.0 * p.kappa)).sqrt();
        assert_relative_eq!(g0, expect, max_relative = 1e-14);
        // balanced gain: Γ_eff/γ = -1.
        let gstar = balance_coupling(&p, p.gamma).unwrap();
        assert_relative_eq!(gstar, (2e-5f64 * 16.01 / 0.4).sqrt(), max_relative = 1e-12);
        assert_abs_diff_eq!(gstar, 0.028293, epsilon = 1e-6);
    }

    #[test]
    fn balance_round_trip() {
        let p = fig2_params();
        for target in [-p.gamma, 0.0, 0.5 * p.gamma, p.gamma, 10.0 * p.gamma] {
            let gstar = balance_coupling(&p, target).unwrap();
            let mut q = p;
            q.g_lin = gstar;
            let eff = effective_params(&q);
            let err = (eff.gamma_eff + target).abs();
            assert!(
                err <= 1e-12 * p.gamma.max(target.abs()).max(1e-30),
                "err = {err}"
            );
        }
    }

    #[test]
    fn balance_infeasible() {
        let p = fig2_params();
        assert!(matches!(
            balance_coupling(&p, -2.0 * p.gamma),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn modified_initial_matches_hand_arithmetic() {
        let p = fig2_params();
        // Coupling off: input passes through.
        let mut p0 = p;
        p0.g_lin = 0.0;
        let init = InitialMoments::coherent_oscillator(1000.0);
        let out = modified_initial(&p0, &init).unwrap();
        assert_eq!(out.n_b, 1000.0);

        // fig2 preset parameters: n_b' = (1 + 0.0128/16.01)·1000.
        let out = modified_initial(&p, &init).unwrap();
        assert_relative_eq!(
            out.n_b,
            (1.0 + 0.0128 / 16.01) * 1000.0,
            max_relative = 1e-12
        );
        assert_abs_diff_eq!(out.n_b, 1000.7995, epsilon = 1e-4);
        assert_relative_eq!(out.b_mean.re, out.n_b.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(out.bb.re, out.n_b, max_relative = 1e-14);

        // Pure cavity seed: n_b' = 4G²/D.
        let init = InitialMoments {
            b_mean: Complex64::new(0.0, 0.0),
            n_b: 0.0,
            bb: Complex64::new(0.0, 0.0),
            n_a: 1.0,
            ab: Complex64::new(0.0, 0.0),
            a_mean: Complex64::new(0.0, 0.0),
        };
        let out = modified_initial(&p, &init).unwrap();
        assert_relative_eq!(out.n_b, 0.0064 / 16.01, max_relative = 1e-12);
        assert_abs_diff_eq!(out.n_b, 3.9975e-4, epsilon = 1e-8);
    }

    #[test]
    fn modified_initial_rejects_negative_result() {
        let p = fig2_params();
        // Large positive Re⟨ab⟩ drives n_b' negative for Δ > ω_m.
        let init = InitialMoments {
            b_mean: Complex64::new(0.0, 0.0),
            n_b: 0.0,
            bb: Complex64::new(0.0, 0.0),
            n_a: 0.0,
            ab: Complex64::new(100.0, 0.0),
            a_mean: Complex64::new(0.0, 0.0),
        };
        assert!(matches!(
            modified_initial(&p, &init),
            Err(Error::Unphysical(_))
        ));
    }

    #[test]
    fn validation_rejects_bad_params() {
        assert!(SystemParams::new(0.0, 0.1, 0.0, 3.0, 0.0, 0.0).is_err());
        assert!(SystemParams::new(1.0, 0.0, 0.0, 3.0, 0.0, 0.0).is_err());
        assert!(SystemParams::new(1.0, 0.1, -1.0, 3.0, 0.0, 0.0).is_err());
        assert!(SystemParams::new(1.0, 0.1, 0.0, 3.0, -0.1, 0.0).is_err());
        assert!(SystemParams::new(1.0, 0.1, 0.0, 3.0, 0.0, -1.0).is_err());
        assert!(PtDimerParams::new(0.0, 0.0, 0.0, 0.1).is_err());
        assert!(PtDimerParams::new(1.0, -0.1, 0.0, 0.1).is_err());
        assert!(PtDimerParams::new(1.0, 0.0, 0.0, -0.1).is_err());
        // negative gain = extra loss on mode 2, admissible
        assert!(PtDimerParams::new(1.0, 0.004, -0.004, 0.02).is_ok());
    }

    #[test]
    fn validity_flag() {
        assert!(fig2_params().elimination_trusted());
        // Slow cavity and near-resonant strong coupling: untrusted.
        let p = SystemParams::new(1.0, 1e-4, 1e-3, 1.01, 0.5, 0.0).unwrap();
        assert!(!p.elimination_trusted());
    }
}
