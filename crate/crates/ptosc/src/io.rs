//! Deterministic CSV emission for trajectories, spectra and sweeps.
//!
//! All numbers are printed with 12 significant digits in scientific
//! notation, so identical runs give byte-identical files.

use std::fmt::Write as _;

use crate::elimination::FidelityTrace;
use crate::entanglement::NegativityTrace;
use crate::moments::MomentState;
use crate::omit::OmitResponse;
use crate::params::OscillatorMoments;
use crate::ptcore::PtSpectrum;
use crate::trajectory::Trajectory;

/// 12-significant-digit scientific rendering.
pub fn fmt(x: f64) -> String {
    format!("{x:.11e}")
}

fn push_row(out: &mut String, cols: &[f64]) {
    let mut first = true;
    for c in cols {
        if !first {
            out.push(',');
        }
        let _ = write!(out, "{}", fmt(*c));
        first = false;
    }
    out.push('\n');
}

/// Header `t, re_b, im_b, n_b, re_bb, im_bb, n_a, re_ab, im_ab`.
pub const TRAJECTORY_HEADER: &str = "t,re_b,im_b,n_b,re_bb,im_bb,n_a,re_ab,im_ab";

/// Full-model trajectory rows.
pub fn moment_trajectory_csv(traj: &Trajectory<MomentState>) -> String {
    let mut out = String::from(TRAJECTORY_HEADER);
    out.push('\n');
    for (t, st) in traj.iter() {
        let bb = st.bb();
        let ab = st.ab();
        push_row(
            &mut out,
            &[
                t,
                st.mean[1].re,
                st.mean[1].im,
                st.n_b(),
                bb.re,
                bb.im,
                st.n_a(),
                ab.re,
                ab.im,
            ],
        );
    }
    out
}

/// Reduced oscillator trajectory rows (cavity columns are zero).
pub fn oscillator_trajectory_csv(traj: &Trajectory<OscillatorMoments>) -> String {
    let mut out = String::from(TRAJECTORY_HEADER);
    out.push('\n');
    for (t, st) in traj.iter() {
        push_row(
            &mut out,
            &[
                t,
                st.b_mean.re,
                st.b_mean.im,
                st.n_b,
                st.bb.re,
                st.bb.im,
                0.0,
                0.0,
                0.0,
            ],
        );
    }
    out
}

/// `t, F` fidelity rows.
pub fn fidelity_csv(trace: &FidelityTrace) -> String {
    let mut out = String::from("t,F\n");
    for (t, f) in trace.times.iter().zip(trace.f.iter()) {
        push_row(&mut out, &[*t, *f]);
    }
    out
}

/// `mu, re_lp, im_lp, re_lm, im_lm` eigenvalue sweep rows.
pub fn pt_sweep_csv(specs: &[PtSpectrum]) -> String {
    let mut out = String::from("mu,re_lp,im_lp,re_lm,im_lm\n");
    for s in specs {
        push_row(
            &mut out,
            &[
                s.mu,
                s.lambda_plus.re,
                s.lambda_plus.im,
                s.lambda_minus.re,
                s.lambda_minus.im,
            ],
        );
    }
    out
}

/// `delta, re_chi, im_chi` response rows.
pub fn omit_spectrum_csv(spec: &[OmitResponse]) -> String {
    let mut out = String::from("delta,re_chi,im_chi\n");
    for r in spec {
        push_row(&mut out, &[r.delta_probe, r.chi.re, r.chi.im]);
    }
    out
}

/// `g0, gamma_m, depth` rows for a depth map.
pub fn depth_map_csv(rows: &[(f64, f64, f64)]) -> String {
    let mut out = String::from("g0,gamma_m,depth\n");
    for (g0, gm, d) in rows {
        push_row(&mut out, &[*g0, *gm, *d]);
    }
    out
}

/// `t, En` negativity rows.
pub fn negativity_csv(trace: &NegativityTrace) -> String {
    let mut out = String::from("t,En\n");
    for (t, e) in trace.times.iter().zip(trace.en.iter()) {
        push_row(&mut out, &[*t, *e]);
    }
    out
}

/// `gamma_eff, En_avg, T_s` sweep rows; a death time of `None` (no death)
/// is encoded as -1.
pub fn negativity_sweep_csv(rows: &[(f64, f64, Option<f64>)]) -> String {
    let mut out = String::from("gamma_eff,En_avg,T_s\n");
    for (ge, avg, ts) in rows {
        push_row(&mut out, &[*ge, *avg, ts.unwrap_or(-1.0)]);
    }
    out
}

/// `g, delta, gamma, gamma_eff, omega_eff, heating_rate` gain-sweep rows.
pub fn gain_sweep_csv(rows: &[(f64, f64, f64, f64, f64, f64)]) -> String {
    let mut out = String::from("g,delta,gamma,gamma_eff,omega_eff,heating_rate\n");
    for (g, d, gm, ge, oe, h) in rows {
        push_row(&mut out, &[*g, *d, *gm, *ge, *oe, *h]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting_is_fixed_width_scientific() {
        assert_eq!(fmt(1.0), "1.00000000000e0");
        assert_eq!(fmt(-0.0123456789012345), "-1.23456789012e-2");
    }

    #[test]
    fn negativity_sweep_encodes_no_death_as_minus_one() {
        let csv = negativity_sweep_csv(&[(0.0, 0.15, None), (0.004, 0.05, Some(42.0))]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "gamma_eff,En_avg,T_s");
        assert!(lines[1].ends_with(&fmt(-1.0)));
        assert!(lines[2].ends_with(&fmt(42.0)));
    }
}
