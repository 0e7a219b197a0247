//! Truncated boson and spin operators and the anisotropic Rabi Hamiltonian.
//!
//! The product basis is spin-major: indices `0..=n_tr` hold `|↑,n⟩` and
//! indices `n_tr+1..` hold `|↓,n⟩`, Fock index ascending within each block.
//! `σ_z|↑⟩ = +|↑⟩` and `|±x⟩ = (|↑⟩ ± |↓⟩)/√2`, so every matrix is real.

use nalgebra::{DMatrix, Matrix2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical couplings of the anisotropic Rabi model, in units where ω is the
/// energy reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Atomic transition frequency Δ.
    pub delta: f64,
    /// Field frequency ω.
    pub omega: f64,
    /// Rotating-wave coupling g.
    pub g: f64,
    /// Ratio τ of counter-rotating to rotating coupling.
    pub tau: f64,
}

impl ModelParams {
    pub fn new(delta: f64, omega: f64, g: f64, tau: f64) -> Result<Self> {
        let p = Self { delta, omega, g, tau };
        p.validate()?;
        Ok(p)
    }

    /// Builds the parameters from the scaled coupling λ = (1+τ)g/√(Δω).
    pub fn from_lambda(delta: f64, omega: f64, tau: f64, lambda: f64) -> Result<Self> {
        let g = lambda * (delta * omega).sqrt() / (1.0 + tau);
        Self::new(delta, omega, g, tau)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.delta, self.omega, self.g, self.tau].iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParams(format!("non-finite model parameters {self:?}")));
        }
        if self.omega <= 0.0 {
            return Err(Error::InvalidParams(format!("omega must be > 0, got {}", self.omega)));
        }
        if self.delta < 0.0 || self.g < 0.0 || self.tau < 0.0 {
            return Err(Error::InvalidParams(format!(
                "delta, g and tau must be >= 0, got {self:?}"
            )));
        }
        Ok(())
    }

    pub fn with_g(self, g: f64) -> Self {
        Self { g, ..self }
    }

    /// Coefficient of `(a†+a)σ_x`.
    pub fn alpha(&self) -> f64 {
        self.g * (1.0 + self.tau) / 2.0
    }

    /// Coefficient of `(a†−a)iσ_y`.
    pub fn gamma(&self) -> f64 {
        self.g * (self.tau - 1.0) / 2.0
    }

    /// Scaled coupling λ; λ = 1 is the superradiant critical point.
    pub fn lambda(&self) -> f64 {
        (1.0 + self.tau) * self.g / (self.delta * self.omega).sqrt()
    }

    /// Critical coupling √(Δω)/(1+τ) of the second-order transition.
    pub fn g_c(&self) -> f64 {
        (self.delta * self.omega).sqrt() / (1.0 + self.tau)
    }

    /// Critical coupling √(Δω/(1−τ²)) of the even/odd level crossing; only
    /// defined for τ < 1.
    pub fn g_c1(&self) -> Option<f64> {
        (self.tau < 1.0).then(|| (self.delta * self.omega / (1.0 - self.tau * self.tau)).sqrt())
    }
}

/// Fock-space truncation and the tail-weight tolerance used to certify it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    /// Highest retained Fock level N_tr.
    pub n_tr: usize,
    /// Maximum probability allowed on the top [`TAIL_LEVELS`] Fock levels.
    pub tail_tol: f64,
    /// Largest N_tr adaptive solvers may grow to.
    pub max_n_tr: usize,
}

/// Number of top Fock levels whose weight measures truncation error.
pub const TAIL_LEVELS: usize = 5;

impl Default for Truncation {
    fn default() -> Self {
        Self { n_tr: 256, tail_tol: 1e-12, max_n_tr: 4096 }
    }
}

impl Truncation {
    pub fn new(n_tr: usize) -> Self {
        Self { n_tr, ..Self::default() }
    }

    pub fn with_tail_tol(self, tail_tol: f64) -> Self {
        Self { tail_tol, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tail_tol.is_nan() || self.tail_tol <= 0.0 {
            return Err(Error::InvalidParams(format!("tail_tol must be > 0, got {}", self.tail_tol)));
        }
        Ok(())
    }

    /// Number of Fock levels, N_tr + 1.
    pub fn levels(&self) -> usize {
        self.n_tr + 1
    }

    /// Dimension of the spin ⊗ Fock space.
    pub fn dim(&self) -> usize {
        2 * self.levels()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

/// Position of `|spin, n⟩` in the spin-major product basis.
pub fn basis_index(spin: Spin, n: usize, n_tr: usize) -> usize {
    match spin {
        Spin::Up => n,
        Spin::Down => n_tr + 1 + n,
    }
}

#[derive(Debug, Clone)]
pub struct BosonOps {
    pub annihilation: DMatrix<f64>,
    pub creation: DMatrix<f64>,
    pub number: DMatrix<f64>,
}

pub fn boson_ops(trunc: &Truncation) -> BosonOps {
    let m = trunc.levels();
    let mut annihilation = DMatrix::zeros(m, m);
    for n in 1..m {
        annihilation[(n - 1, n)] = (n as f64).sqrt();
    }
    let creation = annihilation.transpose();
    let number = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(m, |n, _| n as f64));
    BosonOps { annihilation, creation, number }
}

// Spin matrices in the (↑, ↓) ordering.
fn sigma_z() -> Matrix2<f64> {
    Matrix2::new(1.0, 0.0, 0.0, -1.0)
}
fn sigma_x() -> Matrix2<f64> {
    Matrix2::new(0.0, 1.0, 1.0, 0.0)
}
/// iσ_y, which is real.
fn i_sigma_y() -> Matrix2<f64> {
    Matrix2::new(0.0, 1.0, -1.0, 0.0)
}
fn sigma_plus() -> Matrix2<f64> {
    Matrix2::new(0.0, 1.0, 0.0, 0.0)
}
fn sigma_minus() -> Matrix2<f64> {
    Matrix2::new(0.0, 0.0, 1.0, 0.0)
}

fn kron(spin: &Matrix2<f64>, boson: &DMatrix<f64>) -> DMatrix<f64> {
    let s = DMatrix::from_column_slice(2, 2, spin.as_slice());
    s.kronecker(boson)
}

/// Hamiltonian in the rotating / counter-rotating form
/// `Δ/2 σ_z + ω a†a + g(a†σ₋ + aσ₊) + gτ(a†σ₊ + aσ₋)`.
pub fn build_hamiltonian(params: &ModelParams, trunc: &Truncation) -> DMatrix<f64> {
    let ops = boson_ops(trunc);
    let id_b = DMatrix::identity(trunc.levels(), trunc.levels());
    let (a, ad) = (&ops.annihilation, &ops.creation);
    let g = params.g;
    let gt = params.g * params.tau;

    kron(&sigma_z(), &id_b) * (params.delta / 2.0)
        + kron(&Matrix2::identity(), &ops.number) * params.omega
        + (kron(&sigma_minus(), ad) + kron(&sigma_plus(), a)) * g
        + (kron(&sigma_plus(), ad) + kron(&sigma_minus(), a)) * gt
}

/// Same operator written as `Δ/2 σ_z + ω a†a + α(a†+a)σ_x + γ(a†−a)iσ_y`.
pub fn build_hamiltonian_quadrature(params: &ModelParams, trunc: &Truncation) -> DMatrix<f64> {
    let ops = boson_ops(trunc);
    let id_b = DMatrix::identity(trunc.levels(), trunc.levels());
    let x = &ops.creation + &ops.annihilation;
    let p = &ops.creation - &ops.annihilation;

    kron(&sigma_z(), &id_b) * (params.delta / 2.0)
        + kron(&Matrix2::identity(), &ops.number) * params.omega
        + kron(&sigma_x(), &x) * params.alpha()
        + kron(&i_sigma_y(), &p) * params.gamma()
}

/// Diagonal of the parity operator `exp(iπ(a†a + σ_z/2 + 1/2))`.
pub fn parity_diag(trunc: &Truncation) -> Vec<f64> {
    let sign = |k: usize| if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let m = trunc.levels();
    (0..m).map(|n| sign(n + 1)).chain((0..m).map(sign)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::SymmetricEigen;

    fn sorted_eigs(h: DMatrix<f64>) -> Vec<f64> {
        let mut e: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }

    #[test]
    fn ladder_matrices() {
        let ops = boson_ops(&Truncation::new(1));
        assert_eq!(ops.annihilation, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]));

        let ops = boson_ops(&Truncation::new(0));
        for m in [&ops.annihilation, &ops.creation, &ops.number] {
            assert_eq!(m.shape(), (1, 1));
            assert_eq!(m[(0, 0)], 0.0);
        }

        let ops = boson_ops(&Truncation::new(3));
        let n = &ops.creation * &ops.annihilation;
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { i as f64 } else { 0.0 };
                assert_abs_diff_eq!(n[(i, j)], want, epsilon = 1e-15);
            }
        }
        assert_eq!(ops.creation, ops.annihilation.transpose());
    }

    #[test]
    fn decoupled_spectrum() {
        let p = ModelParams::new(0.7, 1.3, 0.0, 1.0).unwrap();
        let e = sorted_eigs(build_hamiltonian(&p, &Truncation::new(1)));
        let mut want = vec![-0.35, 0.35, 1.3 - 0.35, 1.3 + 0.35];
        want.sort_by(f64::total_cmp);
        for (a, b) in e.iter().zip(&want) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn single_level_is_bare_spin() {
        let p = ModelParams::new(2.0, 1.0, 3.0, 0.4).unwrap();
        let h = build_hamiltonian(&p, &Truncation::new(0));
        assert_eq!(h, DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]));
    }

    #[test]
    fn two_constructions_agree() {
        let trunc = Truncation::new(60);
        for tau in [0.0, 0.5, 1.0, 1.5] {
            let p = ModelParams::new(1.0, 1.0, 0.3, tau).unwrap();
            let h1 = build_hamiltonian(&p, &trunc);
            let h7 = build_hamiltonian_quadrature(&p, &trunc);
            assert!((&h1 - &h7).amax() <= 1e-14);
            assert_eq!(h1, h1.transpose());
        }
        let p = ModelParams::new(1.0, 1.0, 0.3, 1.0).unwrap();
        let e1 = sorted_eigs(build_hamiltonian(&p, &trunc))[0];
        let e7 = sorted_eigs(build_hamiltonian_quadrature(&p, &trunc))[0];
        assert_abs_diff_eq!(e1, e7, epsilon = 1e-12);
    }

    #[test]
    fn parity_entries() {
        let t = Truncation::new(4);
        let p = parity_diag(&t);
        assert_eq!(p[basis_index(Spin::Down, 0, 4)], 1.0);
        assert_eq!(p[basis_index(Spin::Up, 0, 4)], -1.0);
        assert_eq!(p[basis_index(Spin::Up, 3, 4)], 1.0);
        assert_eq!(p[basis_index(Spin::Down, 3, 4)], -1.0);
    }

    #[test]
    fn hamiltonian_commutes_with_parity() {
        let t = Truncation::new(30);
        let par = parity_diag(&t);
        for tau in [1.0, 1.5, 0.3] {
            let p = ModelParams::new(3.1, 0.9, 1.7, tau).unwrap();
            let h = build_hamiltonian(&p, &t);
            for i in 0..t.dim() {
                for j in 0..t.dim() {
                    let php = par[i] * h[(i, j)] * par[j];
                    assert!((php - h[(i, j)]).abs() <= 1e-14);
                }
            }
        }
    }

    #[test]
    fn couplings_flip_spin_and_move_one_boson() {
        let t = Truncation::new(12);
        let p = ModelParams::new(1.0, 1.0, 0.8, 1.3).unwrap();
        let h = build_hamiltonian(&p, &t);
        let decode = |k: usize| if k <= t.n_tr { (0, k) } else { (1, k - t.levels()) };
        for i in 0..t.dim() {
            for j in 0..t.dim() {
                if i == j || h[(i, j)] == 0.0 {
                    continue;
                }
                let ((si, ni), (sj, nj)) = (decode(i), decode(j));
                assert_ne!(si, sj);
                assert_eq!(ni.abs_diff(nj), 1);
            }
        }
    }

    #[test]
    fn derived_couplings() {
        let p = ModelParams::new(100.0, 1.0, 5.0, 1.0).unwrap();
        assert_abs_diff_eq!(p.alpha(), 5.0);
        assert_abs_diff_eq!(p.gamma(), 0.0);
        assert_abs_diff_eq!(p.lambda(), 1.0);
        assert_abs_diff_eq!(p.g_c(), 5.0);
        assert!(p.g_c1().is_none());

        let p = ModelParams::new(100.0, 1.0, 5.0, 0.5).unwrap();
        assert_abs_diff_eq!(p.g_c1().unwrap(), (100.0f64 / 0.75).sqrt(), epsilon = 1e-12);
        let q = ModelParams::from_lambda(100.0, 1.0, 0.5, 1.2).unwrap();
        assert_abs_diff_eq!(q.lambda(), 1.2, epsilon = 1e-14);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(ModelParams::new(1.0, 0.0, 0.1, 1.0).is_err());
        assert!(ModelParams::new(-1.0, 1.0, 0.1, 1.0).is_err());
        assert!(ModelParams::new(1.0, 1.0, f64::NAN, 1.0).is_err());
        assert!(Truncation::new(4).with_tail_tol(0.0).validate().is_err());
    }
}
