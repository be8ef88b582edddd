//! Closed-form propagation of the adiabatically eliminated oscillator and
//! Gaussian fidelity against the full model.
//!
//! After eliminating the cavity the oscillator moments obey
//!
//! ```text
//! ⟨b⟩(t)   = ⟨b⟩(0)   e^{(-iω_eff - Γ_eff/2) t}
//! ⟨b†b⟩(t) = ⟨b†b⟩(0) e^{-Γ_eff t} + h (1 - e^{-Γ_eff t})/Γ_eff
//! ⟨bb⟩(t)  = ⟨bb⟩(0)  e^{(-2iω_eff - Γ_eff) t}
//! ```
//!
//! with `h = Γ_eff n'_th` the heating rate; the `Γ_eff → 0` limit of the
//! occupation law is linear heating `⟨b†b⟩(0) + h·t`. These are exact for
//! the effective master equation, so no integrator is involved.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

use crate::params::{EffectiveParams, OscillatorMoments};
use crate::trajectory::Trajectory;
use crate::{Error, Result};

/// Propagate the eliminated model on a given time grid (times measured from
/// the instant of `init`), with the corrected bath (`n'_th`).
pub fn evolve_effective(
    eff: &EffectiveParams,
    init: &OscillatorMoments,
    times: &[f64],
) -> Result<Trajectory<OscillatorMoments>> {
    propagate(eff, eff.heating_rate, init, times)
}

/// Same propagation but with the bath-occupancy correction disabled: the
/// injection is `Γ_eff · n_th_raw` instead of the heating rate.
///
/// This is a debug path. With `Γ_eff < 0` it reverses the heat-flow
/// direction: an oscillator that should heat relaxes toward `n_th_raw`
/// instead (and runs away below it).
pub fn evolve_effective_raw_bath(
    eff: &EffectiveParams,
    n_th_raw: f64,
    init: &OscillatorMoments,
    times: &[f64],
) -> Result<Trajectory<OscillatorMoments>> {
    propagate(eff, eff.gamma_eff * n_th_raw, init, times)
}

fn propagate(
    eff: &EffectiveParams,
    injection: f64,
    init: &OscillatorMoments,
    times: &[f64],
) -> Result<Trajectory<OscillatorMoments>> {
    let g = eff.gamma_eff;
    let states = times
        .iter()
        .map(|&t| {
            let b = init.b_mean * (Complex64::new(-0.5 * g, -eff.omega_eff) * t).exp();
            let n_b = if g == 0.0 {
                init.n_b + injection * t
            } else {
                init.n_b * (-g * t).exp() + injection * (-(-g * t).exp_m1()) / g
            };
            let bb = init.bb * (Complex64::new(-g, -2.0 * eff.omega_eff) * t).exp();
            OscillatorMoments { b_mean: b, n_b, bb }
        })
        .collect();
    Trajectory::new(times.to_vec(), states)
}

/// Mean vector and 2x2 quadrature covariance of the single-mode Gaussian
/// state with the given moment triple (`x = (b+b†)/√2`, `p = i(b†-b)/√2`).
pub fn single_mode_gaussian(tri: &OscillatorMoments) -> Result<(Vector2<f64>, Matrix2<f64>)> {
    let n_c = tri.n_b - tri.b_mean.norm_sqr();
    let m_c = tri.bb - tri.b_mean * tri.b_mean;
    // physicality: n_c(n_c+1) >= |m_c|^2 up to numerical slack
    let slack = 1e-9 * (1.0 + n_c.abs()).powi(2);
    if n_c < -1e-9 * (1.0 + tri.n_b.abs()) || n_c * (n_c + 1.0) - m_c.norm_sqr() < -slack {
        return Err(Error::Unphysical(format!(
            "triple is not a Gaussian state: n_c = {n_c:.6e}, |m_c| = {:.6e}",
            m_c.norm()
        )));
    }
    let mean = Vector2::new(
        std::f64::consts::SQRT_2 * tri.b_mean.re,
        std::f64::consts::SQRT_2 * tri.b_mean.im,
    );
    let v = Matrix2::new(n_c + 0.5 + m_c.re, m_c.im, m_c.im, n_c + 0.5 - m_c.re);
    Ok((mean, v))
}

/// Uhlmann fidelity of two single-mode Gaussian states given as moment
/// triples.
///
/// With vacuum variance 1/2 and `Δ = det(V₁+V₂)`,
/// `δ = 4(det V₁ - ¼)(det V₂ - ¼)`:
///
/// ```text
/// F = exp(-½ dᵀ(V₁+V₂)⁻¹ d) / (√(Δ+δ) - √δ)
/// ```
pub fn gaussian_fidelity(a: &OscillatorMoments, b: &OscillatorMoments) -> Result<f64> {
    let (ua, va) = single_mode_gaussian(a)?;
    let (ub, vb) = single_mode_gaussian(b)?;
    let vs = va + vb;
    let det_s = vs.determinant();
    if det_s <= 0.0 {
        return Err(Error::Unphysical("degenerate covariance sum".into()));
    }
    let delta_big = det_s;
    let d1 = (va.determinant() - 0.25).max(0.0);
    let d2 = (vb.determinant() - 0.25).max(0.0);
    let small = 4.0 * d1 * d2;
    let d = ua - ub;
    let quad = {
        // 2x2 solve by hand
        let inv = Matrix2::new(vs[(1, 1)], -vs[(0, 1)], -vs[(1, 0)], vs[(0, 0)]) / det_s;
        (d.transpose() * inv * d)[(0, 0)]
    };
    let f = (-0.5 * quad).exp() / ((delta_big + small).sqrt() - small.sqrt());
    Ok(f.clamp(0.0, 1.0))
}

/// Pointwise Gaussian fidelity between two oscillator trajectories.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityTrace {
    pub times: Vec<f64>,
    pub f: Vec<f64>,
}

impl FidelityTrace {
    /// Mean fidelity over samples with `t ≥ discard_before`.
    ///
    /// The early transient, where the eliminated model has not yet locked
    /// onto the full one, is excluded by choosing `discard_before` ≈ a few
    /// cavity lifetimes.
    pub fn time_averaged(&self, discard_before: f64) -> Option<f64> {
        let kept: Vec<f64> = self
            .times
            .iter()
            .zip(self.f.iter())
            .filter(|(t, _)| **t >= discard_before)
            .map(|(_, f)| *f)
            .collect();
        if kept.is_empty() {
            None
        } else {
            Some(kept.iter().sum::<f64>() / kept.len() as f64)
        }
    }
}

/// Fidelity between matching samples of two trajectories (grids must agree
/// within 1e-9).
pub fn fidelity_trace(
    full: &Trajectory<OscillatorMoments>,
    eff: &Trajectory<OscillatorMoments>,
) -> Result<FidelityTrace> {
    full.same_grid(eff, 1e-9)?;
    let mut f = Vec::with_capacity(full.len());
    for (a, b) in full.states().iter().zip(eff.states().iter()) {
        f.push(gaussian_fidelity(a, b)?);
    }
    Ok(FidelityTrace {
        times: full.times().to_vec(),
        f,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{effective_params, SystemParams};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn grid(t_end: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|k| t_end * k as f64 / n as f64).collect()
    }

    #[test]
    fn bare_damped_oscillator_thermalizes() {
        let p = SystemParams::new(1.0, 0.1, 0.02, 3.0, 0.0, 1.5).unwrap();
        let eff = effective_params(&p);
        let init = OscillatorMoments::new(Complex64::new(2.0, 0.0), 4.0, Complex64::new(4.0, 0.0));
        let times = grid(20.0 / p.gamma, 400);
        let traj = evolve_effective(&eff, &init, &times).unwrap();
        let last = traj.states().last().unwrap();
        assert_relative_eq!(last.n_b, p.n_th, max_relative = 1e-6);
        assert!(last.b_mean.norm() < 1e-3);
    }

    #[test]
    fn zero_gamma_eff_heats_linearly() {
        let eff = EffectiveParams {
            omega_eff: 1.0,
            gamma_eff: 0.0,
            n_th_eff: None,
            heating_rate: 0.25,
        };
        let init = OscillatorMoments::new(Complex64::new(1.0, 0.0), 1.0, Complex64::new(1.0, 0.0));
        let traj = evolve_effective(&eff, &init, &[0.0, 2.0, 8.0]).unwrap();
        assert_abs_diff_eq!(traj.states()[1].n_b, 1.0 + 0.25 * 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(traj.states()[2].n_b, 1.0 + 0.25 * 8.0, epsilon = 1e-14);
        // |<b>| stays put at Γ_eff = 0
        assert_relative_eq!(traj.states()[2].b_mean.norm(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn fig2_amplitude_grows_at_half_gain_rate() {
        let p = SystemParams::new(1.0, 0.1, 1e-5, 3.0, 0.04, 1000.0).unwrap();
        let eff = effective_params(&p);
        assert!(eff.gamma_eff < 0.0);
        let init =
            OscillatorMoments::new(Complex64::new(10.0, 0.0), 100.0, Complex64::new(100.0, 0.0));
        let traj = evolve_effective(&eff, &init, &[0.0, 100.0]).unwrap();
        let growth = traj.states()[1].b_mean.norm() / 10.0;
        assert_relative_eq!(
            growth,
            (eff.gamma_eff.abs() * 100.0 / 2.0).exp(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn heat_flow_sign_flips_without_bath_correction() {
        // heating-preset parameters, small occupation: the corrected model heats,
        // the uncorrected one cools toward the raw bath.
        let p = SystemParams::new(1.0, 0.1, 1e-5, 3.0, 0.04, 1000.0).unwrap();
        let eff = effective_params(&p);
        let init = OscillatorMoments::new(Complex64::new(3.0, 0.0), 9.0, Complex64::new(9.0, 0.0));
        let times = [0.0, 1.0, 10.0];
        let corrected = evolve_effective(&eff, &init, &times).unwrap();
        let uncorrected = evolve_effective_raw_bath(&eff, p.n_th, &init, &times).unwrap();
        assert!(corrected.states()[1].n_b > init.n_b);
        assert!(corrected.states()[2].n_b > corrected.states()[1].n_b);
        assert!(uncorrected.states()[1].n_b < init.n_b);
        assert!(uncorrected.states()[2].n_b < uncorrected.states()[1].n_b);
    }

    #[test]
    fn fidelity_identical_is_one() {
        let tri = OscillatorMoments::new(Complex64::new(1.5, -0.2), 2.5, Complex64::new(2.0, -0.6));
        assert_abs_diff_eq!(gaussian_fidelity(&tri, &tri).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn fidelity_vacuum_vs_coherent() {
        let vac = OscillatorMoments::new(Complex64::new(0.0, 0.0), 0.0, Complex64::new(0.0, 0.0));
        for alpha in [Complex64::new(0.5, 0.0), Complex64::new(0.3, -1.1)] {
            let coh = OscillatorMoments::new(alpha, alpha.norm_sqr(), alpha * alpha);
            assert_relative_eq!(
                gaussian_fidelity(&vac, &coh).unwrap(),
                (-alpha.norm_sqr()).exp(),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn fidelity_vacuum_vs_thermal() {
        let vac = OscillatorMoments::new(Complex64::new(0.0, 0.0), 0.0, Complex64::new(0.0, 0.0));
        for nbar in [0.3, 1.0, 7.5] {
            let th =
                OscillatorMoments::new(Complex64::new(0.0, 0.0), nbar, Complex64::new(0.0, 0.0));
            assert_relative_eq!(
                gaussian_fidelity(&vac, &th).unwrap(),
                1.0 / (nbar + 1.0),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn fidelity_rejects_unphysical_triple() {
        // |<bb>| > n(n+1) has no Gaussian state behind it
        let bad = OscillatorMoments::new(Complex64::new(0.0, 0.0), 0.1, Complex64::new(2.0, 0.0));
        let vac = OscillatorMoments::new(Complex64::new(0.0, 0.0), 0.0, Complex64::new(0.0, 0.0));
        assert!(gaussian_fidelity(&bad, &vac).is_err());
    }

    #[test]
    fn trace_against_itself_is_flat_one() {
        let eff = EffectiveParams {
            omega_eff: 1.0,
            gamma_eff: 0.01,
            n_th_eff: Some(2.0),
            heating_rate: 0.02,
        };
        let init = OscillatorMoments::new(Complex64::new(1.0, 0.0), 1.0, Complex64::new(1.0, 0.0));
        let times = grid(50.0, 100);
        let traj = evolve_effective(&eff, &init, &times).unwrap();
        let ft = fidelity_trace(&traj, &traj).unwrap();
        assert!(ft.f.iter().all(|f| (f - 1.0).abs() < 1e-12));
        assert_abs_diff_eq!(ft.time_averaged(0.0).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn grid_mismatch_is_an_error() {
        let eff = EffectiveParams {
            omega_eff: 1.0,
            gamma_eff: 0.01,
            n_th_eff: Some(0.0),
            heating_rate: 0.0,
        };
        let init = OscillatorMoments::new(Complex64::new(0.0, 0.0), 0.0, Complex64::new(0.0, 0.0));
        let a = evolve_effective(&eff, &init, &grid(10.0, 10)).unwrap();
        let b = evolve_effective(&eff, &init, &grid(10.0, 20)).unwrap();
        assert!(fidelity_trace(&a, &b).is_err());
    }
}
