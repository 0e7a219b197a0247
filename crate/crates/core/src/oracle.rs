//! Trial states assembled explicitly in the truncated Fock space.
//!
//! Every closed-form energy and photon number in [`crate::variational`] is
//! checked against the Rayleigh quotient of the corresponding vector built
//! here from [`css_fock_amplitudes`] and [`build_hamiltonian`].

use nalgebra::DMatrix;

use crate::error::Result;
use crate::exactdiag::{mean_photon_ed, Parity, SpinFockVector};
use crate::fock::{build_hamiltonian, ModelParams, Truncation};
use crate::states::{css_fock_amplitudes, truncation_for, CoherentSqueezedParams};
use crate::variational::{Ansatz1Params, Ansatz2Params};

fn ket(beta: f64, xi: f64, trunc: &Truncation) -> Result<Vec<f64>> {
    css_fock_amplitudes(&CoherentSqueezedParams::new(beta, xi), trunc)
}

fn combine(c1: f64, v1: &[f64], c2: f64, v2: &[f64]) -> Vec<f64> {
    v1.iter().zip(v2).map(|(a, b)| c1 * a + c2 * b).collect()
}

/// `(|+x⟩|+f⟩ − |−x⟩|−f⟩)/√2`, unnormalized only through truncation.
pub fn ansatz1_state(a: &Ansatz1Params, trunc: &Truncation) -> Result<SpinFockVector> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = ket(a.beta, a.xi, trunc)?;
    let minus = ket(-a.beta, a.xi, trunc)?;
    let p: Vec<f64> = plus.iter().map(|x| h * x).collect();
    let m: Vec<f64> = minus.iter().map(|x| -h * x).collect();
    Ok(SpinFockVector::from_spin_x(&p, &m))
}

/// The two-state trial vector of the given parity (not normalized).
pub fn ansatz2_state(a: &Ansatz2Params, parity: Parity, trunc: &Truncation) -> Result<SpinFockVector> {
    let p1 = ket(a.beta1, a.xi, trunc)?;
    let p2 = ket(a.beta2, a.xi, trunc)?;
    let m1 = ket(-a.beta1, a.xi, trunc)?;
    let m2 = ket(-a.beta2, a.xi, trunc)?;
    let plus = combine(a.c1, &p1, a.c2, &p2);
    let s = parity.sign();
    let minus = combine(-s * a.c1, &m1, -s * a.c2, &m2);
    Ok(SpinFockVector::from_spin_x(&plus, &minus))
}

pub fn rayleigh_quotient(h: &DMatrix<f64>, v: &SpinFockVector) -> f64 {
    let hv = h * &v.coeffs;
    v.coeffs.dot(&hv) / v.coeffs.norm_squared()
}

/// Truncation large enough for both branches of a trial state.
pub fn oracle_truncation(a: &Ansatz2Params) -> Truncation {
    truncation_for(a.beta1.abs().max(a.beta2.abs()), a.xi)
}

/// `⟨H⟩` of the explicitly built two-state vector.
pub fn energy_2css_fock(params: &ModelParams, a: &Ansatz2Params, parity: Parity) -> Result<f64> {
    let t = oracle_truncation(a);
    let v = ansatz2_state(a, parity, &t)?;
    Ok(rayleigh_quotient(&build_hamiltonian(params, &t), &v))
}

pub fn energy_1css_fock(params: &ModelParams, a: &Ansatz1Params) -> Result<f64> {
    let t = truncation_for(a.beta.abs(), a.xi);
    let v = ansatz1_state(a, &t)?;
    Ok(rayleigh_quotient(&build_hamiltonian(params, &t), &v))
}

pub fn mean_photon_2css_fock(a: &Ansatz2Params) -> Result<f64> {
    let v = ansatz2_state(a, Parity::Even, &oracle_truncation(a))?;
    Ok(mean_photon_ed(&v) / v.coeffs.norm_squared())
}

pub fn mean_photon_1css_fock(a: &Ansatz1Params) -> Result<f64> {
    let v = ansatz1_state(a, &truncation_for(a.beta.abs(), a.xi))?;
    Ok(mean_photon_ed(&v) / v.coeffs.norm_squared())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::parity_diag;
    use crate::variational::{energy_1css, energy_2css, mean_photon_1css, mean_photon_2css};
    use approx::assert_abs_diff_eq;

    #[test]
    fn one_state_energy_matches_fock() {
        let p = ModelParams::new(7.0, 1.0, 1.2, 1.5).unwrap();
        let a = Ansatz1Params { beta: 0.8, xi: 0.1 };
        assert_abs_diff_eq!(energy_1css(&p, &a), energy_1css_fock(&p, &a).unwrap(), epsilon = 1e-9);
        assert_abs_diff_eq!(mean_photon_1css(&a), mean_photon_1css_fock(&a).unwrap(), epsilon = 1e-9);
    }

    #[test]
    fn two_state_energy_matches_fock() {
        let p = ModelParams::from_lambda(100.0, 1.0, 1.0, 1.05).unwrap();
        let a = Ansatz2Params { c1: 0.6, c2: 0.3, beta1: 2.0, beta2: 0.5, xi: 0.12 };
        for parity in [Parity::Even, Parity::Odd] {
            assert_abs_diff_eq!(
                energy_2css(&p, &a, parity).unwrap(),
                energy_2css_fock(&p, &a, parity).unwrap(),
                epsilon = 1e-8
            );
        }
        assert_abs_diff_eq!(mean_photon_2css(&a).unwrap(), mean_photon_2css_fock(&a).unwrap(), epsilon = 1e-8);
    }

    #[test]
    fn anisotropic_two_state_matches_fock() {
        let p = ModelParams::new(3.0, 0.7, 0.9, 0.4).unwrap();
        let a = Ansatz2Params { c1: -0.2, c2: 0.9, beta1: -1.1, beta2: 1.4, xi: 0.3 };
        for parity in [Parity::Even, Parity::Odd] {
            assert_abs_diff_eq!(
                energy_2css(&p, &a, parity).unwrap(),
                energy_2css_fock(&p, &a, parity).unwrap(),
                epsilon = 1e-8
            );
        }
    }

    #[test]
    fn states_carry_their_parity() {
        let a = Ansatz2Params { c1: 0.5, c2: 0.8, beta1: 1.2, beta2: -0.3, xi: 0.15 };
        for parity in [Parity::Even, Parity::Odd] {
            let t = oracle_truncation(&a);
            let v = ansatz2_state(&a, parity, &t).unwrap();
            let pd = parity_diag(&t);
            let pv: f64 = v.coeffs.iter().zip(&pd).map(|(c, p)| c * c * p).sum::<f64>() / v.coeffs.norm_squared();
            assert_abs_diff_eq!(pv, parity.sign(), epsilon = 1e-10);
        }
    }
}
