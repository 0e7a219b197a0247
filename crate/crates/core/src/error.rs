use thiserror::Error;

use crate::optimize::OptResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    /// The probability weight on the top Fock levels never dropped below the
    /// tolerance, even at the largest allowed truncation.
    #[error("truncation not converged: tail weight {tail_weight:e} at n_tr = {n_tr}")]
    TruncationNotConverged { n_tr: usize, tail_weight: f64 },

    #[error("stationarity equations require tau = 1 (got tau = {tau})")]
    NotIsotropic { tau: f64 },

    #[error("level crossing analysis requires tau < 1 (got tau = {tau})")]
    InvalidTau { tau: f64 },

    /// Squared norm of a two-state superposition collapsed (branches cancel).
    #[error("degenerate two-state ansatz: squared norm {norm:e}")]
    DegenerateAnsatz { norm: f64 },

    #[error("minimizer did not converge (best energy {}, grad {:e})", best.energy, best.grad_norm)]
    NoConvergence { best: Box<OptResult> },
}
