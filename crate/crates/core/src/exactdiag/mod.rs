//! Exact diagonalization of the truncated Hamiltonian: the numerical oracle
//! every variational result is checked against.

mod precise;

pub use precise::{parity_gap_precise, PreciseGap};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{basis_index, build_hamiltonian, parity_diag, ModelParams, Spin, Truncation, TAIL_LEVELS};

/// Parity sector label, the eigenvalue of `exp(iπN)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

impl std::str::FromStr for Parity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "even" | "+" | "+1" => Ok(Parity::Even),
            "odd" | "-" | "-1" => Ok(Parity::Odd),
            _ => Err(Error::InvalidParams(format!("unknown parity `{s}`"))),
        }
    }
}

/// Real state vector on the spin-major `|spin⟩⊗|n⟩` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinFockVector {
    pub coeffs: DVector<f64>,
    pub n_tr: usize,
}

impl SpinFockVector {
    pub fn new(coeffs: DVector<f64>, n_tr: usize) -> Self {
        assert_eq!(coeffs.len(), 2 * (n_tr + 1), "vector length must be 2(n_tr+1)");
        Self { coeffs, n_tr }
    }

    pub fn basis(spin: Spin, n: usize, n_tr: usize) -> Self {
        let mut coeffs = DVector::zeros(2 * (n_tr + 1));
        coeffs[basis_index(spin, n, n_tr)] = 1.0;
        Self { coeffs, n_tr }
    }

    /// `|spin_x⟩ ⊗ boson` with `|±x⟩ = (|↑⟩ ± |↓⟩)/√2`.
    pub fn from_spin_x(plus: &[f64], minus: &[f64]) -> Self {
        assert_eq!(plus.len(), minus.len());
        let n_tr = plus.len() - 1;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut coeffs = DVector::zeros(2 * plus.len());
        for n in 0..plus.len() {
            coeffs[basis_index(Spin::Up, n, n_tr)] = h * (plus[n] + minus[n]);
            coeffs[basis_index(Spin::Down, n, n_tr)] = h * (plus[n] - minus[n]);
        }
        Self { coeffs, n_tr }
    }

    pub fn amp(&self, spin: Spin, n: usize) -> f64 {
        self.coeffs[basis_index(spin, n, self.n_tr)]
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.norm()
    }

    /// Flips the global sign so the largest-magnitude amplitude is positive.
    pub fn fix_phase(&mut self) {
        let imax = self.coeffs.iamax();
        if self.coeffs[imax] < 0.0 {
            self.coeffs.neg_mut();
        }
    }

    /// Probability on the top `TAIL_LEVELS` Fock levels, summed over spin.
    pub fn tail_weight(&self) -> f64 {
        let lo = (self.n_tr + 1).saturating_sub(TAIL_LEVELS);
        (lo..=self.n_tr)
            .map(|n| self.amp(Spin::Up, n).powi(2) + self.amp(Spin::Down, n).powi(2))
            .sum()
    }
}

#[derive(Debug, Clone)]
pub struct SpectrumResult {
    /// Lowest eigenvalues, ascending.
    pub energies: Vec<f64>,
    pub vectors: Vec<SpinFockVector>,
    pub n_tr_used: usize,
    /// Tail weight of the lowest vector.
    pub tail_weight: f64,
    /// Largest `‖Hv − Ev‖` over the returned pairs.
    pub max_residual: f64,
    /// `max|H_ij|` of the matrix that was diagonalized.
    pub h_max: f64,
}

impl SpectrumResult {
    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }

    pub fn ground(&self) -> &SpinFockVector {
        &self.vectors[0]
    }
}

/// Indices (in the product basis) spanning the given parity sector.
pub fn sector_indices(trunc: &Truncation, parity: Parity) -> Vec<usize> {
    let want = parity.sign();
    parity_diag(trunc)
        .iter()
        .enumerate()
        .filter(|(_, &p)| p == want)
        .map(|(i, _)| i)
        .collect()
}

fn lowest_pairs(h: DMatrix<f64>, k: usize) -> (Vec<f64>, Vec<DVector<f64>>, f64) {
    let h_copy = h.clone();
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut energies = Vec::with_capacity(k);
    let mut vecs = Vec::with_capacity(k);
    let mut max_residual = 0.0f64;
    for &i in order.iter().take(k) {
        let e = eig.eigenvalues[i];
        let v = eig.eigenvectors.column(i).into_owned();
        let r = (&h_copy * &v - &v * e).norm();
        max_residual = max_residual.max(r);
        energies.push(e);
        vecs.push(v);
    }
    (energies, vecs, max_residual)
}

fn check_request(trunc: &Truncation, k: usize, dim: usize) -> Result<()> {
    trunc.validate()?;
    if k == 0 || k > dim {
        return Err(Error::InvalidParams(format!("need 1 <= k <= {dim}, got k = {k}")));
    }
    Ok(())
}

/// Drives the truncation-doubling loop shared by the full and sector solvers.
fn solve_adaptive<F>(params: &ModelParams, trunc: &Truncation, mut solve: F) -> Result<SpectrumResult>
where
    F: FnMut(&Truncation) -> Result<SpectrumResult>,
{
    params.validate()?;
    let mut t = *trunc;
    loop {
        let res = solve(&t)?;
        if res.tail_weight <= t.tail_tol {
            return Ok(res);
        }
        if t.n_tr >= t.max_n_tr {
            return Err(Error::TruncationNotConverged { n_tr: t.n_tr, tail_weight: res.tail_weight });
        }
        t.n_tr = (2 * t.n_tr.max(1)).min(t.max_n_tr);
    }
}

/// The `k` lowest eigenpairs of the full Hamiltonian, growing the truncation
/// until the ground vector's tail weight meets `trunc.tail_tol`.
pub fn solve_lowest(params: &ModelParams, trunc: &Truncation, k: usize) -> Result<SpectrumResult> {
    check_request(trunc, k, trunc.dim())?;
    solve_adaptive(params, trunc, |t| {
        let h = build_hamiltonian(params, t);
        let h_max = h.amax();
        let (energies, vecs, max_residual) = lowest_pairs(h, k);
        let vectors: Vec<SpinFockVector> = vecs
            .into_iter()
            .map(|c| {
                let mut v = SpinFockVector::new(c, t.n_tr);
                v.fix_phase();
                v
            })
            .collect();
        let tail_weight = vectors[0].tail_weight();
        Ok(SpectrumResult { energies, vectors, n_tr_used: t.n_tr, tail_weight, max_residual, h_max })
    })
}

/// Lowest eigenpairs within one parity sector. Returned vectors live on the
/// full product basis with zeros outside the sector.
pub fn solve_parity_sector(
    params: &ModelParams,
    trunc: &Truncation,
    parity: Parity,
    k: usize,
) -> Result<SpectrumResult> {
    check_request(trunc, k, trunc.levels())?;
    solve_adaptive(params, trunc, |t| {
        let idx = sector_indices(t, parity);
        let h = build_hamiltonian(params, t);
        let sub = DMatrix::from_fn(idx.len(), idx.len(), |i, j| h[(idx[i], idx[j])]);
        let h_max = sub.amax();
        let (energies, vecs, max_residual) = lowest_pairs(sub, k);
        let vectors: Vec<SpinFockVector> = vecs
            .into_iter()
            .map(|c| {
                let mut full = DVector::zeros(t.dim());
                for (i, &k) in idx.iter().enumerate() {
                    full[k] = c[i];
                }
                let mut v = SpinFockVector::new(full, t.n_tr);
                v.fix_phase();
                v
            })
            .collect();
        let tail_weight = vectors[0].tail_weight();
        Ok(SpectrumResult { energies, vectors, n_tr_used: t.n_tr, tail_weight, max_residual, h_max })
    })
}

/// Amplitudes `c_{n±}` of a state written as `Σ_n |n⟩(c_{n+}|+x⟩ + c_{n−}|−x⟩)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinXProjection {
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
}

pub fn spin_x_projection(v: &SpinFockVector) -> SpinXProjection {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (plus, minus) = (0..=v.n_tr)
        .map(|n| {
            let (u, d) = (v.amp(Spin::Up, n), v.amp(Spin::Down, n));
            (h * (u + d), h * (u - d))
        })
        .unzip();
    SpinXProjection { plus, minus }
}

/// `⟨a†a⟩` of a normalized state.
pub fn mean_photon_ed(v: &SpinFockVector) -> f64 {
    (0..=v.n_tr)
        .map(|n| n as f64 * (v.amp(Spin::Up, n).powi(2) + v.amp(Spin::Down, n).powi(2)))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Lowest eigenvalue of the τ = 0 (Jaynes–Cummings) model from its closed
    /// form: the ground state |↓,0⟩ at −Δ/2 competes with the lower member of
    /// each 2×2 block {|↑,n⟩, |↓,n+1⟩}.
    fn jc_ground(delta: f64, omega: f64, g: f64, nmax: usize) -> f64 {
        let mut e = -delta / 2.0;
        for n in 0..nmax {
            let mean = omega * (n as f64 + 0.5);
            let det = delta - omega;
            let lower = mean - (det * det / 4.0 + g * g * (n as f64 + 1.0)).sqrt();
            e = e.min(lower);
        }
        e
    }

    #[test]
    fn decoupled_ground_state() {
        let p = ModelParams::new(1.0, 1.0, 0.0, 1.0).unwrap();
        let r = solve_lowest(&p, &Truncation::new(8), 2).unwrap();
        assert_abs_diff_eq!(r.energies[0], -0.5, epsilon = 1e-14);
        let g = r.ground();
        assert_abs_diff_eq!(g.amp(Spin::Down, 0), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn jaynes_cummings_limit() {
        for g in [0.2, 0.9, 1.7] {
            let p = ModelParams::new(1.0, 1.0, g, 0.0).unwrap();
            let r = solve_lowest(&p, &Truncation::new(40), 1).unwrap();
            assert_abs_diff_eq!(r.energies[0], jc_ground(1.0, 1.0, g, 40), epsilon = 1e-10);
        }
    }

    #[test]
    fn truncation_convergence_deep_coupling() {
        let p = ModelParams::new(100.0, 1.0, 5.5, 1.0).unwrap();
        let a = solve_lowest(&p, &Truncation::new(128), 1).unwrap();
        let b = solve_lowest(&p, &Truncation::new(256), 1).unwrap();
        assert!(((a.energies[0] - b.energies[0]) / b.energies[0]).abs() <= 1e-10);
        assert!(a.tail_weight <= 1e-12);
    }

    #[test]
    fn adaptive_truncation_grows_and_caps() {
        // displacement ~ 6 needs far more than 8 levels
        let p = ModelParams::new(1.0, 1.0, 6.0, 1.0).unwrap();
        let t = Truncation { n_tr: 8, tail_tol: 1e-12, max_n_tr: 256 };
        let r = solve_lowest(&p, &t, 1).unwrap();
        assert!(r.n_tr_used > 8);
        assert!(r.tail_weight <= 1e-12);

        let capped = Truncation { n_tr: 8, tail_tol: 1e-12, max_n_tr: 16 };
        assert!(matches!(
            solve_lowest(&p, &capped, 1),
            Err(Error::TruncationNotConverged { n_tr: 16, .. })
        ));
    }

    #[test]
    fn invalid_k() {
        let p = ModelParams::new(1.0, 1.0, 0.1, 1.0).unwrap();
        assert!(solve_lowest(&p, &Truncation::new(2), 0).is_err());
        assert!(solve_lowest(&p, &Truncation::new(2), 7).is_err());
        assert!(solve_parity_sector(&p, &Truncation::new(2), Parity::Even, 4).is_err());
    }

    #[test]
    fn decoupled_sectors() {
        let p = ModelParams::new(1.0, 1.0, 0.0, 1.0).unwrap();
        let t = Truncation::new(6);
        let even = solve_parity_sector(&p, &t, Parity::Even, 1).unwrap();
        let odd = solve_parity_sector(&p, &t, Parity::Odd, 1).unwrap();
        assert_abs_diff_eq!(even.energies[0], -0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(odd.energies[0], f64::min(0.5, 1.0 - 0.5), epsilon = 1e-14);
    }

    #[test]
    fn residuals_and_norms() {
        let p = ModelParams::new(10.0, 1.0, 2.0, 1.5).unwrap();
        let r = solve_lowest(&p, &Truncation::new(64), 4).unwrap();
        assert!(r.max_residual <= 1e-10 * r.h_max);
        assert!(r.energies.windows(2).all(|w| w[0] <= w[1]));
        for v in &r.vectors {
            assert_abs_diff_eq!(v.norm(), 1.0, epsilon = 1e-12);
            let imax = v.coeffs.iamax();
            assert!(v.coeffs[imax] > 0.0);
        }
    }

    #[test]
    fn spin_x_basis_change() {
        let v = SpinFockVector::basis(Spin::Down, 0, 3);
        let c = spin_x_projection(&v);
        assert_abs_diff_eq!(c.plus[0], std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(c.minus[0], -std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);

        let v = SpinFockVector::from_spin_x(&[1.0, 0.0, 0.0], &[0.0, 0.0, 0.0]);
        let c = spin_x_projection(&v);
        assert_abs_diff_eq!(c.plus[0], 1.0, epsilon = 1e-15);
        assert!(c.plus[1..].iter().chain(&c.minus).all(|x| x.abs() < 1e-15));
    }

    #[test]
    fn even_ground_state_spin_x_structure() {
        let p = ModelParams::from_lambda(100.0, 1.0, 1.0, 1.1).unwrap();
        let r = solve_parity_sector(&p, &Truncation::default(), Parity::Even, 1).unwrap();
        let c = spin_x_projection(r.ground());
        let total: f64 = c.plus.iter().chain(&c.minus).map(|x| x * x).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        for n in 0..c.plus.len() {
            let sign = if n % 2 == 0 { -1.0 } else { 1.0 };
            assert_abs_diff_eq!(c.minus[n], sign * c.plus[n], epsilon = 1e-12);
        }
    }

    #[test]
    fn photon_number_of_fock_states() {
        assert_eq!(mean_photon_ed(&SpinFockVector::basis(Spin::Down, 0, 5)), 0.0);
        assert_eq!(mean_photon_ed(&SpinFockVector::basis(Spin::Down, 3, 5)), 3.0);
    }
}
