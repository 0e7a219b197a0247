//! Coherent-squeezed oscillator states.
//!
//! A state here is `|f⟩ = U†(β) S†(ξ) |0⟩` with `U(β) = exp(β(a†−a))` and
//! `S(ξ) = exp(ξ(a²−a†²))`: the vacuum is first squeezed, then displaced to
//! `⟨a⟩ = −β`. For real β and ξ the position wavefunction is a real Gaussian
//! centred at `−√(2/ω) β` whose variance is stretched by `e^{4ξ}`.
//!
//! Closed forms (overlaps, ladder matrix elements, position profiles) live
//! next to a Fock-space construction that applies the two exponentials to the
//! vacuum numerically; the latter is the oracle the closed forms are tested
//! against.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{Truncation, TAIL_LEVELS};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherentSqueezedParams {
    pub beta: f64,
    pub xi: f64,
}

impl CoherentSqueezedParams {
    pub fn new(beta: f64, xi: f64) -> Self {
        Self { beta, xi }
    }

    /// `η = cosh 2ξ − sinh 2ξ = e^{−2ξ}`.
    pub fn eta(&self) -> f64 {
        eta(self.xi)
    }
}

pub fn eta(xi: f64) -> f64 {
    (-2.0 * xi).exp()
}

/// Which partner of a parity pair the ket refers to: `|+f⟩` is displaced to
/// `⟨a⟩ = −β`, `|−f⟩` to `⟨a⟩ = +β`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

/// `⟨+f(β_k)| ±f(β_k′)⟩ = exp(−η²(β_k ∓ β_k′)²/2)` for a shared squeezing ξ.
pub fn overlap_css(beta_k: f64, beta_kp: f64, xi: f64, branch: Branch) -> f64 {
    let d = match branch {
        Branch::Plus => beta_k - beta_kp,
        Branch::Minus => beta_k + beta_kp,
    };
    let e = eta(xi);
    (-0.5 * e * e * d * d).exp()
}

/// Matrix elements between two displaced squeezed vacua `|φ_b⟩`, `|φ_c⟩`
/// with real coherent amplitudes `⟨a⟩ = b, c` and common squeezing ξ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianElements {
    /// `⟨φ_b|φ_c⟩`
    pub overlap: f64,
    /// `⟨φ_b|a†a|φ_c⟩`
    pub number: f64,
    /// `⟨φ_b|a†+a|φ_c⟩`
    pub sum: f64,
    /// `⟨φ_b|a†−a|φ_c⟩`
    pub diff: f64,
}

pub fn gaussian_elements(b: f64, c: f64, xi: f64) -> GaussianElements {
    let e2 = eta(xi).powi(2);
    let overlap = (-0.5 * e2 * (b - c).powi(2)).exp();
    let sh = (2.0 * xi).sinh();
    let number = overlap * (sh * sh + ((b + c).powi(2) - e2 * e2 * (b - c).powi(2)) / 4.0);
    GaussianElements { overlap, number, sum: overlap * (b + c), diff: overlap * e2 * (b - c) }
}

/// Position wavefunction of the displaced squeezed vacuum with `⟨a⟩ = b`.
pub fn gaussian_wavefunction(b: f64, xi: f64, x: f64, omega: f64) -> f64 {
    let s2 = (4.0 * xi).exp();
    let x0 = (2.0 / omega).sqrt() * b;
    (omega / (PI * s2)).powf(0.25) * (-omega * (x - x0).powi(2) / (2.0 * s2)).exp()
}

/// Oscillator eigenfunctions `⟨x|n⟩` for `n = 0..=nmax` at one position.
///
/// Uses the normalized three-term recurrence
/// `ψ_{n+1} = √(2/(n+1)) y ψ_n − √(n/(n+1)) ψ_{n−1}` with `y = √ω x`,
/// carrying a separate exponent so neither the Gaussian factor nor large
/// orders under- or overflow.
pub fn hermite_functions(nmax: usize, x: f64, omega: f64) -> Vec<f64> {
    const BIG: f64 = 1e150;
    let y = omega.sqrt() * x;
    let mut log_scale = -0.5 * y * y;
    let mut out = Vec::with_capacity(nmax + 1);
    let mut prev = 0.0;
    let mut cur = (omega / PI).powf(0.25);
    out.push(cur * log_scale.exp());
    for n in 0..nmax {
        let next = (2.0 / (n + 1) as f64).sqrt() * y * cur - (n as f64 / (n + 1) as f64).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > BIG {
            cur /= BIG;
            prev /= BIG;
            log_scale += BIG.ln();
        }
        out.push(cur * log_scale.exp());
    }
    out
}

pub fn hermite_osc_wavefunction(n: usize, x: f64, omega: f64) -> f64 {
    hermite_functions(n, x, omega)[n]
}

/// Sampled spin-x resolved wavefunctions `φ_{±x}(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WavefunctionProfile {
    pub xs: Vec<f64>,
    pub phi_plus: Vec<f64>,
    pub phi_minus: Vec<f64>,
    pub peaks_plus: usize,
    pub peaks_minus: usize,
}

/// Fraction of the global maximum of `|φ|²` a local maximum must exceed to
/// count as a peak.
pub const PEAK_FLOOR: f64 = 0.01;

impl WavefunctionProfile {
    pub fn from_samples(xs: Vec<f64>, phi_plus: Vec<f64>, phi_minus: Vec<f64>) -> Self {
        let peaks_plus = count_peaks(&phi_plus, PEAK_FLOOR);
        let peaks_minus = count_peaks(&phi_minus, PEAK_FLOOR);
        Self { xs, phi_plus, phi_minus, peaks_plus, peaks_minus }
    }

    /// Trapezoid estimate of `∫(φ₊² + φ₋²) dx`.
    pub fn norm(&self) -> f64 {
        let dens: Vec<f64> =
            self.phi_plus.iter().zip(&self.phi_minus).map(|(p, m)| p * p + m * m).collect();
        trapezoid(&self.xs, &dens)
    }

    /// `∫(φ₊ψ₊ + φ₋ψ₋) dx` against another profile on the same grid.
    pub fn overlap(&self, other: &WavefunctionProfile) -> f64 {
        assert_eq!(self.xs, other.xs, "profiles must share a grid");
        let prod: Vec<f64> = (0..self.xs.len())
            .map(|i| self.phi_plus[i] * other.phi_plus[i] + self.phi_minus[i] * other.phi_minus[i])
            .collect();
        trapezoid(&self.xs, &prod)
    }
}

pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2).zip(ys.windows(2)).map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1])).sum()
}

/// Strict interior local maxima of `|φ|²` above `floor` times its maximum.
pub fn count_peaks(phi: &[f64], floor: f64) -> usize {
    let dens: Vec<f64> = phi.iter().map(|p| p * p).collect();
    let max = dens.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    dens.windows(3).filter(|w| w[1] > w[0] && w[1] > w[2] && w[1] > floor * max).count()
}

/// Uniform grid `start, start+step, …` up to and including `stop`.
pub fn uniform_grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| start + i as f64 * step).collect()
}

/// Samples `φ_{±x}(x) = Σ_n c_{n±}⟨x|n⟩` on `grid` and counts peaks.
pub fn position_profile(c_plus: &[f64], c_minus: &[f64], grid: &[f64], omega: f64) -> WavefunctionProfile {
    assert_eq!(c_plus.len(), c_minus.len());
    let nmax = c_plus.len().saturating_sub(1);
    let (phi_plus, phi_minus) = grid
        .iter()
        .map(|&x| {
            let h = hermite_functions(nmax, x, omega);
            let p = c_plus.iter().zip(&h).map(|(c, h)| c * h).sum::<f64>();
            let m = c_minus.iter().zip(&h).map(|(c, h)| c * h).sum::<f64>();
            (p, m)
        })
        .unzip();
    WavefunctionProfile::from_samples(grid.to_vec(), phi_plus, phi_minus)
}

/// Generator applied to a Fock vector in place of a matrix.
fn apply_displacement_generator(v: &[f64], out: &mut [f64]) {
    // (a† − a) v
    let m = v.len();
    for n in 0..m {
        let up = if n > 0 { (n as f64).sqrt() * v[n - 1] } else { 0.0 };
        let down = if n + 1 < m { ((n + 1) as f64).sqrt() * v[n + 1] } else { 0.0 };
        out[n] = up - down;
    }
}

fn apply_squeeze_generator(v: &[f64], out: &mut [f64]) {
    // (a†² − a²) v
    let m = v.len();
    for n in 0..m {
        let up = if n > 1 { ((n * (n - 1)) as f64).sqrt() * v[n - 2] } else { 0.0 };
        let down = if n + 2 < m { (((n + 1) * (n + 2)) as f64).sqrt() * v[n + 2] } else { 0.0 };
        out[n] = up - down;
    }
}

/// `v ← exp(t G) v` for an antisymmetric generator with norm bound
/// `gen_norm`, split into substeps of norm ≤ 1/2, each summed as a Taylor
/// series until the term norm drops below 1e-15.
fn apply_exponential<G: Fn(&[f64], &mut [f64])>(v: &mut Vec<f64>, t: f64, gen_norm: f64, gen: G) {
    if t == 0.0 {
        return;
    }
    let steps = ((t.abs() * gen_norm) / 0.5).ceil().max(1.0) as usize;
    let dt = t / steps as f64;
    let mut term = vec![0.0; v.len()];
    let mut scratch = vec![0.0; v.len()];
    for _ in 0..steps {
        term.copy_from_slice(v);
        let mut acc = v.clone();
        for k in 1..200 {
            gen(&term, &mut scratch);
            let f = dt / k as f64;
            for (t, s) in term.iter_mut().zip(&scratch) {
                *t = f * s;
            }
            let mut tn = 0.0;
            for (a, t) in acc.iter_mut().zip(&term) {
                *a += t;
                tn += t * t;
            }
            if tn.sqrt() < 1e-15 {
                break;
            }
        }
        *v = acc;
    }
}

/// Fock amplitudes of `U†(β)S†(ξ)|0⟩ = e^{−β(a†−a)} e^{−ξ(a²−a†²)} |0⟩`
/// on `0..=n_tr`, built by exponentiating the truncated generators.
pub fn css_fock_amplitudes(p: &CoherentSqueezedParams, trunc: &Truncation) -> Result<Vec<f64>> {
    let m = trunc.levels();
    let mut v = vec![0.0; m];
    v[0] = 1.0;
    let nf = m as f64;
    // squeeze first, then displace
    apply_exponential(&mut v, p.xi, 2.0 * nf, apply_squeeze_generator);
    apply_exponential(&mut v, -p.beta, 2.0 * nf.sqrt(), apply_displacement_generator);

    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    let lo = m.saturating_sub(TAIL_LEVELS);
    let tail: f64 = v[lo..].iter().map(|x| x * x).sum();
    if tail > trunc.tail_tol || (norm - 1.0).abs() > 1e-10 {
        return Err(Error::TruncationNotConverged { n_tr: trunc.n_tr, tail_weight: tail });
    }
    Ok(v)
}

/// A truncation comfortably holding coherent-squeezed states with
/// displacements up to `max_beta` and squeezing up to `xi`.
pub fn truncation_for(max_beta: f64, xi: f64) -> Truncation {
    let mean = max_beta * max_beta + (2.0 * xi).sinh().powi(2);
    let spread = (mean + 1.0).sqrt() * (2.0 * xi.abs()).exp();
    let n_tr = (mean + 14.0 * spread + 40.0).ceil() as usize;
    Truncation::new(n_tr)
}
