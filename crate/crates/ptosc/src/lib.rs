//! Simulation toolkit for mechanical oscillators with quantum gain.
//!
//! A blue-detuned, lossy optical cavity anti-damps a mechanical oscillator;
//! adiabatic elimination of the cavity yields an effective master equation
//! with negative dissipation `Γ_eff` and a corrected bath occupancy `n'_th`.
//! Pairing such a gain oscillator with a lossy one through phonon tunneling
//! gives a PT-symmetric dimer. This crate covers the full chain:
//!
//! * [`params`] — scenario types and the closed-form effective-gain algebra;
//! * [`moments`] — exact first/second-moment propagation of the full
//!   linearized cavity + oscillator model (Lyapunov form `dU/dt = MU + UMᵀ + N`);
//! * [`elimination`] — closed-form propagation of the eliminated oscillator
//!   and Gaussian fidelity against the full model;
//! * [`ptcore`] — spectral analysis of the PT dimer and its exceptional point;
//! * [`omit`] — steady-state probe response of a cavity coupled to the dimer
//!   (optomechanically induced transparency) with window metrics;
//! * [`entanglement`] — dimer moment dynamics, covariance matrices and
//!   logarithmic negativity;
//! * [`oracle`] — brute-force truncated Fock-space Lindblad integrator used
//!   to validate the moment engines on small instances.
//!
//! Frequencies and rates are dimensionless, in units of the mechanical
//! frequency (`ω_m = 1` convention); `ħ = 1` and the vacuum quadrature
//! variance is 1/2 throughout.

pub mod elimination;
pub mod entanglement;
pub mod error;
pub mod io;
pub mod moments;
pub mod omit;
pub mod oracle;
pub mod params;
pub mod ptcore;
pub mod trajectory;

mod linalg;
mod rk4;

pub use error::Error;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
