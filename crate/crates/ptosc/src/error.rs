//! Error type shared by all modules.

use thiserror::Error;

/// Everything that can go wrong in a simulation run.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A scenario parameter violates its domain constraint.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// A requested target cannot be reached with any admissible input.
    #[error("infeasible target: {0}")]
    Infeasible(String),

    /// State data does not describe a physical (Gaussian) quantum state.
    #[error("unphysical state: {0}")]
    Unphysical(String),

    /// Integration blew up, produced non-finite values, or broke an invariant.
    #[error("numerical failure at t = {t}: {msg}")]
    Numerical { t: f64, msg: String },

    /// Time step too large for the fastest scale of the model.
    #[error("step size {dt} exceeds stability bound {bound}")]
    StepTooLarge { dt: f64, bound: f64 },

    /// Two traces that must share a time grid do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A truncated Fock-space run leaked population into the highest level.
    #[error("Fock truncation leakage {leakage:.3e} exceeds {bound:.1e} at t = {t}")]
    Leakage { t: f64, leakage: f64, bound: f64 },
}
