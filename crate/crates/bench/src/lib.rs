//! Shared fixtures for the benchmarks.

use rabi_core::{Ansatz2Params, ModelParams};

/// Strong-coupling point where the two-state optimum is split into two packets.
pub fn split_regime() -> ModelParams {
    ModelParams::from_lambda(100.0, 1.0, 1.0, 1.2).expect("valid model")
}

/// Near the first-order point of the anisotropic model.
pub fn anisotropic_regime() -> ModelParams {
    let base = ModelParams::new(100.0, 1.0, 0.0, 0.5).expect("valid model");
    ModelParams { g: 0.95 * base.g_c1().expect("τ < 1"), ..base }
}

pub fn typical_two_state() -> Ansatz2Params {
    Ansatz2Params { c1: 0.92, c2: 0.38, beta1: 4.27, beta2: -4.15, xi: 0.086 }
}
