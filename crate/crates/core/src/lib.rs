//! Variational and exact ground states of the anisotropic quantum Rabi model
//!
//! ```text
//! H = (Δ/2) σ_z + ω a†a + g[(σ₊a + σ₋a†) + τ(σ₊a† + σ₋a)]
//! ```
//!
//! The crate offers a truncated Fock-space Hamiltonian with exact
//! diagonalization per parity sector ([`exactdiag`]), coherent-squeezed
//! oscillator states ([`states`]), closed-form energies of one- and
//! two-state trial functions ([`variational`]) and their minimization
//! ([`optimize`]). [`oracle`] rebuilds the trial states as explicit vectors
//! for cross-checking.

pub mod error;
pub mod exactdiag;
pub mod fock;
pub mod optimize;
pub mod oracle;
pub mod states;
pub mod variational;

pub use error::{Error, Result};
pub use exactdiag::{Parity, SpectrumResult, SpinFockVector};
pub use fock::{ModelParams, Spin, Truncation};
pub use optimize::{solve_ansatz, solve_ansatz_with, MinimizeOptions, OptResult, SolveOptions};
pub use states::{CoherentSqueezedParams, WavefunctionProfile};
pub use variational::{Ansatz1Params, Ansatz2Params, AnsatzKind, AnsatzParams, Family};
