//! Brute-force truncated Fock-space Lindblad integrator.
//!
//! Integrates the density operator literally (RK4 on all matrix elements)
//! for the two quadratic models of this crate and extracts the tracked
//! moments with truncated ladder operators. Exact up to truncation, so it
//! validates the moment engines on small instances; a leakage monitor on
//! the highest Fock level rejects runs the cutoffs cannot hold.
//!
//! Only desk scale is supported (occupancies of order one, cutoffs ≤ ~20);
//! the moment engines remain the tool for hot baths, where they are exact
//! anyway.

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::entanglement::{self, DimerMomentState};
use crate::moments::MomentState;
use crate::params::{PtDimerParams, SystemParams};
use crate::trajectory::Trajectory;
use crate::{Error, Result};

const LEAKAGE_BOUND: f64 = 1e-6;
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Truncation cutoffs for the two modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockConfig {
    /// Levels kept for the first mode (cavity `a`, or dimer `b₁`).
    pub cutoff_a: usize,
    /// Levels kept for the second mode (oscillator `b`, or dimer `b₂`).
    pub cutoff_b: usize,
}

impl FockConfig {
    pub fn new(cutoff_a: usize, cutoff_b: usize) -> Result<Self> {
        if cutoff_a < 2 || cutoff_b < 2 {
            return Err(Error::InvalidParams(format!(
                "cutoffs must be >= 2, got {cutoff_a} x {cutoff_b}"
            )));
        }
        Ok(Self { cutoff_a, cutoff_b })
    }

    fn dim(&self) -> usize {
        self.cutoff_a * self.cutoff_b
    }
}

/// Which master equation the oracle integrates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FockModel {
    /// Linearized optomechanics: `H = -Δ a†a + ω_m b†b + G(a†b† + ab)`,
    /// channels `(κ/2)L[a]`, thermal oscillator bath.
    Optomech(SystemParams),
    /// PT dimer: beam-splitter Hamiltonian, thermal loss on `b₁`, gain on
    /// `b₂` (thermal channel with rate `-γ'`).
    Dimer(PtDimerParams),
}

/// Initial density operator description.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FockInit {
    /// Product of per-mode states.
    Product(ModeInit, ModeInit),
    /// Two-mode squeezed vacuum of parameter `r` (dimer runs).
    Tmsv(f64),
}

/// Single-mode initial state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModeInit {
    Vacuum,
    Coherent(Complex64),
    Thermal(f64),
}

/// Tracked two-mode moments extracted from the density operator.
///
/// Mode 1 is `a` (or `b₁`), mode 2 is `b` (or `b₂`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockMoments {
    pub m1: Complex64,
    pub m2: Complex64,
    pub n1: f64,
    pub n2: f64,
    /// `⟨o₁o₂⟩`
    pub o1o2: Complex64,
    /// `⟨o₁o₁⟩`
    pub o1o1: Complex64,
    /// `⟨o₂o₂⟩`
    pub o2o2: Complex64,
    /// `⟨o₁†o₂⟩`
    pub o1dag_o2: Complex64,
}

impl FockMoments {
    /// Written-order dimer moment matrix over `(b₁†, b₁, b₂†, b₂)`.
    pub fn dimer_state(&self, t: f64) -> DimerMomentState {
        let one = Complex64::new(1.0, 0.0);
        let mut u = Matrix4::<Complex64>::zeros();
        u[(0, 1)] = Complex64::new(self.n1, 0.0);
        u[(1, 0)] = u[(0, 1)] + one;
        u[(2, 3)] = Complex64::new(self.n2, 0.0);
        u[(3, 2)] = u[(2, 3)] + one;
        u[(1, 3)] = self.o1o2;
        u[(3, 1)] = self.o1o2;
        u[(0, 2)] = self.o1o2.conj();
        u[(2, 0)] = self.o1o2.conj();
        u[(1, 1)] = self.o1o1;
        u[(0, 0)] = self.o1o1.conj();
        u[(3, 3)] = self.o2o2;
        u[(2, 2)] = self.o2o2.conj();
        u[(0, 3)] = self.o1dag_o2;
        u[(3, 0)] = self.o1dag_o2;
        u[(1, 2)] = self.o1dag_o2.conj();
        u[(2, 1)] = self.o1dag_o2.conj();
        DimerMomentState { t, u }
    }
}

/// Health diagnostics accumulated along a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockDiagnostics {
    /// Largest `|tr ρ - 1|` seen at any sample.
    pub max_trace_dev: f64,
    /// Largest top-level population seen at any sample.
    pub max_leakage: f64,
    /// Smallest density-operator eigenvalue seen at the checked samples.
    pub min_eigenvalue: f64,
    /// Largest Hermiticity deviation `max |ρ - ρ†|`.
    pub max_hermiticity_dev: f64,
}

/// Result of a Fock-space run: sampled moments plus diagnostics.
#[derive(Debug, Clone)]
pub struct FockRun {
    pub trace: Trajectory<FockMoments>,
    pub diagnostics: FockDiagnostics,
}

/// Integrate the density operator and sample the tracked moments.
///
/// The step must satisfy the same bound as the moment engines
/// (`dt ≤ 0.05 / fastest rate`). A top-level population above 1e-6
/// rejects the run.
pub fn fock_evolve(
    cfg: &FockConfig,
    model: &FockModel,
    init: &FockInit,
    t_end: f64,
    dt: f64,
    sample_every: usize,
) -> Result<FockRun> {
    FockConfig::new(cfg.cutoff_a, cfg.cutoff_b)?;
    if !(t_end > 0.0) || !(dt > 0.0) || sample_every == 0 {
        return Err(Error::InvalidParams(
            "need t_end > 0, dt > 0, sample_every >= 1".into(),
        ));
    }
    let rate = match model {
        FockModel::Optomech(p) => {
            p.validate()?;
            p.omega_m.max(p.delta.abs()).max(p.kappa)
        }
        FockModel::Dimer(p) => {
            p.validate()?;
            p.omega.max(p.mu).max(p.gamma_loss).max(p.gamma_gain.abs())
        }
    };
    let bound = crate::rk4::step_bound(rate);
    if dt > bound {
        return Err(Error::StepTooLarge { dt, bound });
    }

    let gen = Generator::build(cfg, model);
    let mut rho = initial_density(cfg, init)?;
    let dim = cfg.dim();

    let n_steps = (t_end / dt).round() as usize;
    let mut times = Vec::new();
    let mut samples = Vec::new();
    let mut diag = FockDiagnostics {
        max_trace_dev: 0.0,
        max_leakage: 0.0,
        min_eigenvalue: f64::INFINITY,
        max_hermiticity_dev: 0.0,
    };
    let mut work = Workspace::new(dim);
    let n_samples_est = n_steps / sample_every;
    let eig_stride = (n_samples_est / 8).max(1);

    let mut sample_count = 0usize;
    let mut check_and_push =
        |t: f64, rho: &[Complex64], diag: &mut FockDiagnostics| -> Result<()> {
            let leak = top_level_population(cfg, rho);
            diag.max_leakage = diag.max_leakage.max(leak);
            if leak > LEAKAGE_BOUND {
                return Err(Error::Leakage {
                    t,
                    leakage: leak,
                    bound: LEAKAGE_BOUND,
                });
            }
            let tr = trace(dim, rho);
            diag.max_trace_dev = diag.max_trace_dev.max((tr.re - 1.0).abs().max(tr.im.abs()));
            diag.max_hermiticity_dev = diag.max_hermiticity_dev.max(hermiticity_dev(dim, rho));
            if sample_count % eig_stride == 0 {
                diag.min_eigenvalue = diag.min_eigenvalue.min(min_eigenvalue(dim, rho));
            }
            sample_count += 1;
            times.push(t);
            samples.push(extract_moments(cfg, rho));
            Ok(())
        };

    check_and_push(0.0, &rho, &mut diag)?;
    for k in 1..=n_steps {
        let t = k as f64 * dt;
        rk4_density_step(&gen, &mut rho, dt, &mut work);
        if rho.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Numerical {
                t,
                msg: "non-finite density matrix".into(),
            });
        }
        if k % sample_every == 0 {
            check_and_push(t, &rho, &mut diag)?;
        }
    }
    // always include the final state in the eigenvalue check
    diag.min_eigenvalue = diag.min_eigenvalue.min(min_eigenvalue(dim, &rho));

    Ok(FockRun {
        trace: Trajectory::new(times, samples)?,
        diagnostics: diag,
    })
}

/// Largest mixed absolute/relative deviation per observable between an
/// oracle run and a full-model moment trajectory on the same grid.
///
/// Deviation of observable `x` is `max_t |x_oracle - x_moments| /
/// max(1, |x_oracle|)`: relative for large values, absolute near zero.
pub fn compare_optomech(
    run: &FockRun,
    traj: &Trajectory<MomentState>,
) -> Result<Vec<(&'static str, f64)>> {
    run.trace.same_grid(traj, 1e-9)?;
    let mut devs = vec![
        ("n_b", 0.0f64),
        ("b", 0.0),
        ("bb", 0.0),
        ("ab", 0.0),
        ("n_a", 0.0),
        ("a", 0.0),
    ];
    for (o, (_, m)) in run.trace.states().iter().zip(traj.iter()) {
        let pairs: [(usize, Complex64, Complex64); 6] = [
            (0, Complex64::new(o.n2, 0.0), Complex64::new(m.n_b(), 0.0)),
            (1, o.m2, m.mean[1]),
            (2, o.o2o2, m.bb()),
            (3, o.o1o2, m.ab()),
            (4, Complex64::new(o.n1, 0.0), Complex64::new(m.n_a(), 0.0)),
            (5, o.m1, m.mean[0]),
        ];
        for (i, oracle, engine) in pairs {
            let d = (oracle - engine).norm() / oracle.norm().max(1.0);
            if d > devs[i].1 {
                devs[i].1 = d;
            }
        }
    }
    Ok(devs)
}

/// Same comparison for the dimer, on the negativity itself (absolute
/// deviation) plus occupations.
pub fn compare_dimer(
    run: &FockRun,
    traj: &Trajectory<DimerMomentState>,
) -> Result<Vec<(&'static str, f64)>> {
    run.trace.same_grid(traj, 1e-9)?;
    let mut dev_n1 = 0.0f64;
    let mut dev_n2 = 0.0f64;
    let mut dev_en = 0.0f64;
    for (o, (t, m)) in run.trace.states().iter().zip(traj.iter()) {
        dev_n1 = dev_n1.max((o.n1 - m.n1()).abs() / o.n1.abs().max(1.0));
        dev_n2 = dev_n2.max((o.n2 - m.n2()).abs() / o.n2.abs().max(1.0));
        let en_o = entanglement::log_negativity(&entanglement::to_covariance(&o.dimer_state(t))?)?;
        let en_m = entanglement::log_negativity(&entanglement::to_covariance(m)?)?;
        dev_en = dev_en.max((en_o - en_m).abs());
    }
    Ok(vec![("n1", dev_n1), ("n2", dev_n2), ("En", dev_en)])
}

// ---------------------------------------------------------------------------
// density-operator machinery
// ---------------------------------------------------------------------------

/// Sparse operator on the truncated two-mode space, as triplets.
struct SparseOp {
    entries: Vec<(usize, usize, Complex64)>,
}

impl SparseOp {
    /// `out += s * (op · rho)`
    fn left_mul_add(&self, dim: usize, s: Complex64, rho: &[Complex64], out: &mut [Complex64]) {
        for &(r, c, v) in &self.entries {
            let sv = s * v;
            let src = &rho[c * dim..(c + 1) * dim];
            let dst = &mut out[r * dim..(r + 1) * dim];
            for (d, x) in dst.iter_mut().zip(src.iter()) {
                *d += sv * x;
            }
        }
    }

    /// `out += s * (rho · op)`
    fn right_mul_add(&self, dim: usize, s: Complex64, rho: &[Complex64], out: &mut [Complex64]) {
        for &(r, c, v) in &self.entries {
            let sv = s * v;
            for i in 0..dim {
                out[i * dim + c] += sv * rho[i * dim + r];
            }
        }
    }

    fn dagger(&self) -> SparseOp {
        SparseOp {
            entries: self
                .entries
                .iter()
                .map(|&(r, c, v)| (c, r, v.conj()))
                .collect(),
        }
    }
}

/// One dissipation channel `(rate/2)·L[c]` with `c†c` diagonal.
struct Channel {
    rate: f64,
    c: SparseOp,
    c_dag: SparseOp,
    /// diagonal of `c†c`
    cdc: Vec<f64>,
}

struct Generator {
    dim: usize,
    h: SparseOp,
    channels: Vec<Channel>,
}

struct Workspace {
    k: [Vec<Complex64>; 4],
    stage: Vec<Complex64>,
    tmp: Vec<Complex64>,
}

impl Workspace {
    fn new(dim: usize) -> Self {
        let z = vec![ZERO; dim * dim];
        Self {
            k: [z.clone(), z.clone(), z.clone(), z.clone()],
            stage: z.clone(),
            tmp: z,
        }
    }
}

fn mode_index(cfg: &FockConfig, ia: usize, ib: usize) -> usize {
    ia * cfg.cutoff_b + ib
}

/// Annihilation operator of one mode: `which = 0` is the first mode.
fn lowering(cfg: &FockConfig, which: usize) -> SparseOp {
    let mut entries = Vec::new();
    for ia in 0..cfg.cutoff_a {
        for ib in 0..cfg.cutoff_b {
            match which {
                0 if ia >= 1 => entries.push((
                    mode_index(cfg, ia - 1, ib),
                    mode_index(cfg, ia, ib),
                    Complex64::new((ia as f64).sqrt(), 0.0),
                )),
                1 if ib >= 1 => entries.push((
                    mode_index(cfg, ia, ib - 1),
                    mode_index(cfg, ia, ib),
                    Complex64::new((ib as f64).sqrt(), 0.0),
                )),
                _ => {}
            }
        }
    }
    SparseOp { entries }
}

fn number_diagonal(cfg: &FockConfig, which: usize, raised: bool) -> Vec<f64> {
    let mut d = vec![0.0; cfg.dim()];
    for ia in 0..cfg.cutoff_a {
        for ib in 0..cfg.cutoff_b {
            let n = if which == 0 { ia } else { ib } as f64;
            d[mode_index(cfg, ia, ib)] = if raised { n + 1.0 } else { n };
        }
    }
    d
}

fn make_channel(cfg: &FockConfig, rate: f64, which: usize, raising: bool) -> Channel {
    let low = lowering(cfg, which);
    let (c, cdc) = if raising {
        (low.dagger(), number_diagonal(cfg, which, true))
    } else {
        (lowering(cfg, which), number_diagonal(cfg, which, false))
    };
    let c_dag = c.dagger();
    Channel {
        rate,
        c,
        c_dag,
        cdc,
    }
}

impl Generator {
    fn build(cfg: &FockConfig, model: &FockModel) -> Generator {
        let mut h_entries: Vec<(usize, usize, Complex64)> = Vec::new();
        let mut channels = Vec::new();
        match model {
            FockModel::Optomech(p) => {
                // diagonal -Δ n_a + ω n_b
                for ia in 0..cfg.cutoff_a {
                    for ib in 0..cfg.cutoff_b {
                        let i = mode_index(cfg, ia, ib);
                        let e = -p.delta * ia as f64 + p.omega_m * ib as f64;
                        if e != 0.0 {
                            h_entries.push((i, i, Complex64::new(e, 0.0)));
                        }
                        // G(a†b† + ab)
                        if p.g_lin != 0.0 && ia >= 1 && ib >= 1 {
                            let amp = p.g_lin * ((ia * ib) as f64).sqrt();
                            h_entries.push((
                                i,
                                mode_index(cfg, ia - 1, ib - 1),
                                Complex64::new(amp, 0.0),
                            ));
                            h_entries.push((
                                mode_index(cfg, ia - 1, ib - 1),
                                i,
                                Complex64::new(amp, 0.0),
                            ));
                        }
                    }
                }
                channels.push(make_channel(cfg, p.kappa, 0, false));
                if p.gamma > 0.0 {
                    channels.push(make_channel(cfg, p.gamma * (p.n_th + 1.0), 1, false));
                    if p.n_th > 0.0 {
                        channels.push(make_channel(cfg, p.gamma * p.n_th, 1, true));
                    }
                }
            }
            FockModel::Dimer(p) => {
                for i1 in 0..cfg.cutoff_a {
                    for i2 in 0..cfg.cutoff_b {
                        let i = mode_index(cfg, i1, i2);
                        let e = p.omega * (i1 + i2) as f64;
                        if e != 0.0 {
                            h_entries.push((i, i, Complex64::new(e, 0.0)));
                        }
                        // μ(b₁†b₂ + b₁b₂†): b₁†b₂ maps (i1, i2) -> (i1+1, i2-1)
                        if p.mu != 0.0 && i2 >= 1 && i1 + 1 < cfg.cutoff_a {
                            let amp = p.mu * (((i1 + 1) * i2) as f64).sqrt();
                            let j = mode_index(cfg, i1 + 1, i2 - 1);
                            h_entries.push((j, i, Complex64::new(amp, 0.0)));
                            h_entries.push((i, j, Complex64::new(amp, 0.0)));
                        }
                    }
                }
                if p.gamma_loss > 0.0 {
                    channels.push(make_channel(
                        cfg,
                        p.gamma_loss * (p.n_th_loss + 1.0),
                        0,
                        false,
                    ));
                    if p.n_th_loss > 0.0 {
                        channels.push(make_channel(cfg, p.gamma_loss * p.n_th_loss, 0, true));
                    }
                }
                if p.gamma_gain != 0.0 {
                    // thermal channel with rate -γ' and occupancy n'; for a
                    // genuine gain (γ' > 0) the rate is negative
                    let r = -p.gamma_gain;
                    channels.push(make_channel(cfg, r * (p.n_th_gain + 1.0), 1, false));
                    if p.n_th_gain != 0.0 {
                        channels.push(make_channel(cfg, r * p.n_th_gain, 1, true));
                    }
                }
            }
        }
        Generator {
            dim: cfg.dim(),
            h: SparseOp { entries: h_entries },
            channels,
        }
    }

    /// `out = -i[H, ρ] + Σ (rate/2)(2 c ρ c† - c†c ρ - ρ c†c)`
    fn rhs(&self, rho: &[Complex64], out: &mut [Complex64], tmp: &mut [Complex64]) {
        let dim = self.dim;
        out.fill(ZERO);
        let mi = Complex64::new(0.0, -1.0);
        self.h.left_mul_add(dim, mi, rho, out);
        self.h.right_mul_add(dim, -mi, rho, out);
        for ch in &self.channels {
            let r = Complex64::new(ch.rate, 0.0);
            // sandwich: rate · c ρ c†
            tmp.fill(ZERO);
            ch.c.left_mul_add(dim, Complex64::new(1.0, 0.0), rho, tmp);
            ch.c_dag.right_mul_add(dim, r, tmp, out);
            // anticommutator with the diagonal c†c
            for i in 0..dim {
                let di = ch.cdc[i];
                for j in 0..dim {
                    let factor = 0.5 * ch.rate * (di + ch.cdc[j]);
                    out[i * dim + j] -= factor * rho[i * dim + j];
                }
            }
        }
    }
}

fn rk4_density_step(gen: &Generator, rho: &mut [Complex64], dt: f64, w: &mut Workspace) {
    let n = rho.len();
    let half = dt / 2.0;
    // k1..k4 buffers were allocated once
    {
        let (k1, rest) = w.k.split_at_mut(1);
        gen.rhs(rho, &mut k1[0], &mut w.tmp);
        for i in 0..n {
            w.stage[i] = rho[i] + half * k1[0][i];
        }
        gen.rhs(&w.stage, &mut rest[0], &mut w.tmp); // k2
        for i in 0..n {
            w.stage[i] = rho[i] + half * rest[0][i];
        }
        gen.rhs(&w.stage, &mut rest[1], &mut w.tmp); // k3
        for i in 0..n {
            w.stage[i] = rho[i] + dt * rest[1][i];
        }
        gen.rhs(&w.stage, &mut rest[2], &mut w.tmp); // k4
    }
    let sixth = dt / 6.0;
    for i in 0..n {
        rho[i] += sixth * (w.k[0][i] + 2.0 * w.k[1][i] + 2.0 * w.k[2][i] + w.k[3][i]);
    }
}

fn initial_density(cfg: &FockConfig, init: &FockInit) -> Result<Vec<Complex64>> {
    let dim = cfg.dim();
    match init {
        FockInit::Tmsv(r) => {
            // |ψ⟩ = (1/cosh r) Σ (-tanh r)^n |n, n⟩, truncated
            let t = r.tanh();
            let nmax = cfg.cutoff_a.min(cfg.cutoff_b);
            let mut psi = vec![ZERO; dim];
            for n in 0..nmax {
                psi[mode_index(cfg, n, n)] = Complex64::new((-t).powi(n as i32) / r.cosh(), 0.0);
            }
            Ok(outer(dim, &psi))
        }
        FockInit::Product(ma, mb) => {
            let rho_a = mode_density(cfg.cutoff_a, ma)?;
            let rho_b = mode_density(cfg.cutoff_b, mb)?;
            let mut rho = vec![ZERO; dim * dim];
            for ia in 0..cfg.cutoff_a {
                for ib in 0..cfg.cutoff_b {
                    for ja in 0..cfg.cutoff_a {
                        for jb in 0..cfg.cutoff_b {
                            rho[mode_index(cfg, ia, ib) * dim + mode_index(cfg, ja, jb)] =
                                rho_a[ia * cfg.cutoff_a + ja] * rho_b[ib * cfg.cutoff_b + jb];
                        }
                    }
                }
            }
            Ok(rho)
        }
    }
}

fn mode_density(cutoff: usize, init: &ModeInit) -> Result<Vec<Complex64>> {
    let mut rho = vec![ZERO; cutoff * cutoff];
    match init {
        ModeInit::Vacuum => rho[0] = Complex64::new(1.0, 0.0),
        ModeInit::Coherent(alpha) => {
            let mut amp = vec![ZERO; cutoff];
            let norm = (-0.5 * alpha.norm_sqr()).exp();
            let mut cur = Complex64::new(norm, 0.0);
            amp[0] = cur;
            for n in 1..cutoff {
                cur *= alpha / (n as f64).sqrt();
                amp[n] = cur;
            }
            for i in 0..cutoff {
                for j in 0..cutoff {
                    rho[i * cutoff + j] = amp[i] * amp[j].conj();
                }
            }
        }
        ModeInit::Thermal(nbar) => {
            if *nbar < 0.0 {
                return Err(Error::InvalidParams(format!(
                    "thermal occupancy {nbar} < 0"
                )));
            }
            let q = nbar / (nbar + 1.0);
            let mut w = 1.0 / (nbar + 1.0);
            for n in 0..cutoff {
                rho[n * cutoff + n] = Complex64::new(w, 0.0);
                w *= q;
            }
        }
    }
    Ok(rho)
}

fn outer(dim: usize, psi: &[Complex64]) -> Vec<Complex64> {
    let mut rho = vec![ZERO; dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            rho[i * dim + j] = psi[i] * psi[j].conj();
        }
    }
    rho
}

fn trace(dim: usize, rho: &[Complex64]) -> Complex64 {
    (0..dim).map(|i| rho[i * dim + i]).sum()
}

fn hermiticity_dev(dim: usize, rho: &[Complex64]) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..dim {
        for j in i..dim {
            dev = dev.max((rho[i * dim + j] - rho[j * dim + i].conj()).norm());
        }
    }
    dev
}

fn top_level_population(cfg: &FockConfig, rho: &[Complex64]) -> f64 {
    let dim = cfg.dim();
    let mut pop: f64 = 0.0;
    for ib in 0..cfg.cutoff_b {
        let i = mode_index(cfg, cfg.cutoff_a - 1, ib);
        pop = pop.max(rho[i * dim + i].re.abs());
    }
    for ia in 0..cfg.cutoff_a {
        let i = mode_index(cfg, ia, cfg.cutoff_b - 1);
        pop = pop.max(rho[i * dim + i].re.abs());
    }
    pop
}

fn min_eigenvalue(dim: usize, rho: &[Complex64]) -> f64 {
    crate::linalg::hermitian_min_eig_bisect(dim, rho)
}

fn extract_moments(cfg: &FockConfig, rho: &[Complex64]) -> FockMoments {
    let dim = cfg.dim();
    let (ca, cb) = (cfg.cutoff_a, cfg.cutoff_b);
    let at = |ia: usize, ib: usize, ja: usize, jb: usize| {
        rho[mode_index(cfg, ia, ib) * dim + mode_index(cfg, ja, jb)]
    };
    let mut m = FockMoments {
        m1: ZERO,
        m2: ZERO,
        n1: 0.0,
        n2: 0.0,
        o1o2: ZERO,
        o1o1: ZERO,
        o2o2: ZERO,
        o1dag_o2: ZERO,
    };
    for ia in 0..ca {
        for ib in 0..cb {
            let sa = ia as f64;
            let sb = ib as f64;
            m.n1 += sa * at(ia, ib, ia, ib).re;
            m.n2 += sb * at(ia, ib, ia, ib).re;
            // ⟨o₁⟩ = Σ √(ia+1) ρ[(ia+1, ib), (ia, ib)]
            if ia + 1 < ca {
                m.m1 += (sa + 1.0).sqrt() * at(ia + 1, ib, ia, ib);
            }
            if ib + 1 < cb {
                m.m2 += (sb + 1.0).sqrt() * at(ia, ib + 1, ia, ib);
            }
            // ⟨o₁o₂⟩ = Σ √((ia+1)(ib+1)) ρ[(ia+1, ib+1), (ia, ib)]
            if ia + 1 < ca && ib + 1 < cb {
                m.o1o2 += ((sa + 1.0) * (sb + 1.0)).sqrt() * at(ia + 1, ib + 1, ia, ib);
            }
            if ia + 2 < ca {
                m.o1o1 += ((sa + 1.0) * (sa + 2.0)).sqrt() * at(ia + 2, ib, ia, ib);
            }
            if ib + 2 < cb {
                m.o2o2 += ((sb + 1.0) * (sb + 2.0)).sqrt() * at(ia, ib + 2, ia, ib);
            }
            // ⟨o₁†o₂⟩ = Σ √(ia (ib+1)) ρ[(ia-1, ib+1), (ia, ib)]
            if ia >= 1 && ib + 1 < cb {
                m.o1dag_o2 += (sa * (sb + 1.0)).sqrt() * at(ia - 1, ib + 1, ia, ib);
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn thermalization_matches_analytic_law() {
        // G = 0, vacuum start, n_th = 0.5, cutoff 20:
        // <b†b>(t) = 0.5 (1 - e^{-γt}) within 1e-5.
        let p = SystemParams::new(1.0, 1.0, 0.2, 3.0, 0.0, 0.5).unwrap();
        let cfg = FockConfig::new(2, 20).unwrap();
        let run = fock_evolve(
            &cfg,
            &FockModel::Optomech(p),
            &FockInit::Product(ModeInit::Vacuum, ModeInit::Vacuum),
            10.0,
            0.01,
            100,
        )
        .unwrap();
        for (t, m) in run.trace.iter() {
            let expect = 0.5 * (1.0 - (-0.2 * t).exp());
            assert_abs_diff_eq!(m.n2, expect, epsilon = 1e-5);
        }
        assert!(run.diagnostics.max_trace_dev < 1e-8);
        assert!(run.diagnostics.min_eigenvalue > -1e-8);
    }

    #[test]
    fn coherent_and_thermal_initial_moments() {
        let cfg = FockConfig::new(14, 16).unwrap();
        let alpha = Complex64::new(0.6, -0.3);
        let rho = initial_density(
            &cfg,
            &FockInit::Product(ModeInit::Coherent(alpha), ModeInit::Thermal(0.3)),
        )
        .unwrap();
        let m = extract_moments(&cfg, &rho);
        assert_abs_diff_eq!((m.m1 - alpha).norm(), 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(m.n1, alpha.norm_sqr(), epsilon = 1e-10);
        assert_abs_diff_eq!(m.n2, 0.3, epsilon = 1e-6);
        assert_abs_diff_eq!((m.o1o1 - alpha * alpha).norm(), 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(m.o2o2.norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn tmsv_initial_moments_match_closed_forms() {
        let cfg = FockConfig::new(14, 14).unwrap();
        let r = 0.05;
        let rho = initial_density(&cfg, &FockInit::Tmsv(r)).unwrap();
        let m = extract_moments(&cfg, &rho);
        assert_relative_eq!(m.n1, r.sinh().powi(2), max_relative = 1e-10);
        assert_relative_eq!(m.o1o2.re, -0.5 * (2.0 * r).sinh(), max_relative = 1e-10);
        assert_abs_diff_eq!(m.o1o2.im, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m.o1o1.norm(), 0.0, epsilon = 1e-12);
        // negativity of the truncated state
        let en = entanglement::log_negativity(
            &entanglement::to_covariance(&m.dimer_state(0.0)).unwrap(),
        )
        .unwrap();
        assert_abs_diff_eq!(en, 2.0 * r, epsilon = 1e-8);
    }

    #[test]
    fn leakage_rejects_overfull_cutoff() {
        let p = SystemParams::new(1.0, 1.0, 0.2, 3.0, 0.0, 0.5).unwrap();
        let cfg = FockConfig::new(2, 3).unwrap();
        let err = fock_evolve(
            &cfg,
            &FockModel::Optomech(p),
            &FockInit::Product(ModeInit::Vacuum, ModeInit::Thermal(0.5)),
            5.0,
            0.01,
            50,
        );
        assert!(matches!(err, Err(Error::Leakage { .. })));
    }

    #[test]
    fn compare_flags_shifted_traces() {
        let p = SystemParams::new(1.0, 1.0, 0.2, 3.0, 0.0, 0.5).unwrap();
        let cfg = FockConfig::new(2, 16).unwrap();
        let run = fock_evolve(
            &cfg,
            &FockModel::Optomech(p),
            &FockInit::Product(ModeInit::Vacuum, ModeInit::Vacuum),
            2.0,
            0.01,
            100,
        )
        .unwrap();
        // engine trajectory on the same grid
        let init = crate::moments::MomentState::from_initial_moments(
            &crate::params::InitialMoments::coherent_oscillator(0.0),
        )
        .unwrap();
        let traj = crate::moments::evolve(&p, &init, 2.0, 0.01, 100).unwrap();
        let devs = compare_optomech(&run, &traj).unwrap();
        for (_, d) in &devs {
            assert!(*d < 1e-6);
        }
        // shift the oracle occupations by a constant; the deviation must be
        // that constant (occupations here are < 1 so the floor is absolute)
        let mut shifted = run.clone();
        let states: Vec<FockMoments> = shifted
            .trace
            .states()
            .iter()
            .map(|m| FockMoments {
                n2: m.n2 + 0.25,
                ..*m
            })
            .collect();
        shifted.trace = Trajectory::new(shifted.trace.times().to_vec(), states).unwrap();
        let devs = compare_optomech(&shifted, &traj).unwrap();
        let nb = devs.iter().find(|(n, _)| *n == "n_b").unwrap().1;
        assert_abs_diff_eq!(nb, 0.25, epsilon = 1e-6);
    }
}
