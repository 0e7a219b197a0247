//! Closed-form energies and observables of the coherent-squeezed trial states.
//!
//! The two-state trial function of parity `s = ±1` is
//!
//! ```text
//! |ψ_s⟩ = |+x⟩ (C₁|+f₁⟩ + C₂|+f₂⟩) − s |−x⟩ (C₁|−f₁⟩ + C₂|−f₂⟩)
//! ```
//!
//! where `|±f_k⟩` are displaced squeezed vacua with `⟨a⟩ = ∓β_k` and a shared
//! squeezing ξ. Energies are Rayleigh quotients, so the coefficients need not
//! be normalized. The one-state family is the special case `C₂ = 0`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactdiag::Parity;
use crate::fock::ModelParams;
use crate::states::{eta, gaussian_elements, gaussian_wavefunction, WavefunctionProfile};

/// Smallest squared norm accepted before a superposition is called degenerate.
pub const MIN_NORM: f64 = 1e-12;
/// Smallest squared norm relative to `2(C₁² + C₂²)`. Below it the two
/// branches nearly cancel and rounding in the overlap sums reaches the
/// energy at the 1e-10 relative level.
pub const MIN_REL_NORM: f64 = 1e-6;

/// True when the squared norm `norm` of `a` is too small to divide by.
pub fn collapsed(norm: f64, a: &Ansatz2Params) -> bool {
    let scale = 2.0 * (a.c1 * a.c1 + a.c2 * a.c2);
    !(norm >= MIN_NORM && norm >= MIN_REL_NORM * scale)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ansatz1Params {
    pub beta: f64,
    pub xi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ansatz2Params {
    pub c1: f64,
    pub c2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub xi: f64,
}

impl Ansatz2Params {
    /// The one-state parameters as a two-state point with `C₂ = 0`.
    pub fn from_single(a: Ansatz1Params) -> Self {
        Self { c1: FRAC_1_SQRT_2, c2: 0.0, beta1: a.beta, beta2: a.beta, xi: a.xi }
    }

    /// Relabels `(C₁,β₁) ↔ (C₂,β₂)`.
    pub fn swapped(&self) -> Self {
        Self { c1: self.c2, c2: self.c1, beta1: self.beta2, beta2: self.beta1, xi: self.xi }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "CS1")]
    Cs1,
    #[serde(rename = "CSS1")]
    Css1,
    #[serde(rename = "CS2")]
    Cs2,
    #[serde(rename = "CSS2")]
    Css2,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Cs1, Family::Css1, Family::Cs2, Family::Css2];

    pub fn name(self) -> &'static str {
        match self {
            Family::Cs1 => "CS1",
            Family::Css1 => "CSS1",
            Family::Cs2 => "CS2",
            Family::Css2 => "CSS2",
        }
    }

    /// Coherent-state families carry no squeezing.
    pub fn squeezed(self) -> bool {
        matches!(self, Family::Css1 | Family::Css2)
    }

    pub fn two_state(self) -> bool {
        matches!(self, Family::Cs2 | Family::Css2)
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "CS1" | "1CS" => Ok(Family::Cs1),
            "CSS1" | "1CSS" => Ok(Family::Css1),
            "CS2" | "2CS" => Ok(Family::Cs2),
            "CSS2" | "2CSS" => Ok(Family::Css2),
            _ => Err(Error::InvalidParams(format!("unknown ansatz family `{s}`"))),
        }
    }
}

/// A trial-state family together with the parity it is projected onto.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AnsatzKind {
    pub family: Family,
    pub parity: Parity,
}

impl AnsatzKind {
    pub fn new(family: Family, parity: Parity) -> Result<Self> {
        if parity == Parity::Odd && !family.two_state() {
            return Err(Error::InvalidParams(format!(
                "{} has no odd-parity variant",
                family.name()
            )));
        }
        Ok(Self { family, parity })
    }

    pub fn even(family: Family) -> Self {
        Self { family, parity: Parity::Even }
    }

    /// Number of free optimization parameters.
    pub fn dim(&self) -> usize {
        match self.family {
            Family::Cs1 => 1,
            Family::Css1 => 2,
            Family::Cs2 => 3,
            Family::Css2 => 4,
        }
    }

    /// Label such as `CSS2:even`.
    pub fn label(&self) -> String {
        format!("{}:{}", self.family.name(), self.parity.name())
    }
}

impl fmt::Display for AnsatzKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for AnsatzKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            Some((fam, par)) => AnsatzKind::new(fam.parse()?, par.parse()?),
            None => Ok(AnsatzKind::even(s.parse()?)),
        }
    }
}

/// Optimized parameters of either family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AnsatzParams {
    One(Ansatz1Params),
    Two(Ansatz2Params),
}

impl AnsatzParams {
    pub fn as_two(&self) -> Ansatz2Params {
        match *self {
            AnsatzParams::One(a) => Ansatz2Params::from_single(a),
            AnsatzParams::Two(a) => a,
        }
    }

    pub fn xi(&self) -> f64 {
        match self {
            AnsatzParams::One(a) => a.xi,
            AnsatzParams::Two(a) => a.xi,
        }
    }
}

/// `E = ω(sinh²2ξ + β²) − 2αβ − (Δ/2 + 2γβη²) e^{−2β²η²}`.
pub fn energy_1css(params: &ModelParams, a: &Ansatz1Params) -> f64 {
    let e2 = eta(a.xi).powi(2);
    let overlap = (-2.0 * a.beta * a.beta * e2).exp();
    params.omega * ((2.0 * a.xi).sinh().powi(2) + a.beta * a.beta) - 2.0 * a.beta * params.alpha()
        - (params.delta / 2.0 + 2.0 * params.gamma() * a.beta * e2) * overlap
}

/// `(r_ξ, r_β)` with `r_ξ = ∂E/∂ξ` and `r_β = ½ ∂E/∂β` of the isotropic
/// one-state energy.
pub fn stationarity_residuals_iso(params: &ModelParams, a: &Ansatz1Params) -> Result<(f64, f64)> {
    if params.tau != 1.0 {
        return Err(Error::NotIsotropic { tau: params.tau });
    }
    let e2 = eta(a.xi).powi(2);
    let overlap = (-2.0 * a.beta * a.beta * e2).exp();
    let w = params.omega;
    let r_xi = w * ((4.0 * a.xi).exp() - (-4.0 * a.xi).exp()) - 4.0 * params.delta * a.beta * a.beta * e2 * overlap;
    let r_beta = (w * a.beta - params.g) + params.delta * a.beta * e2 * overlap;
    Ok((r_xi, r_beta))
}

/// Large-Δ estimates `β ≈ g/Δ`, `ξ ≈ ln(1 + 4g²/(ωΔ))/8`.
pub fn asymptotic_params(params: &ModelParams) -> (f64, f64) {
    asymptotic_from_coupling(params, params.g)
}

fn asymptotic_from_coupling(params: &ModelParams, g: f64) -> (f64, f64) {
    let beta = g / params.delta;
    let xi = (1.0 + 4.0 * g * g / (params.omega * params.delta)).ln() / 8.0;
    (beta, xi)
}

/// Asymptotic estimates with `g` replaced by the co-rotating strength α, a
/// usable starting point for any anisotropy.
pub fn asymptotic_seed(params: &ModelParams) -> (f64, f64) {
    asymptotic_from_coupling(params, params.alpha())
}

pub fn mean_photon_1css(a: &Ansatz1Params) -> f64 {
    (2.0 * a.xi).sinh().powi(2) + a.beta * a.beta
}

/// Unnormalized pieces of `⟨ψ_+|H|ψ_+⟩` and the squared norm.
///
/// The odd-parity functional flips the sign of `atom` and `aniso`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyComponents {
    pub atom: f64,
    pub photon: f64,
    pub iso: f64,
    pub aniso: f64,
    pub norm: f64,
}

impl EnergyComponents {
    pub fn energy(&self, parity: Parity) -> f64 {
        let s = parity.sign();
        (s * self.atom + self.photon + self.iso + s * self.aniso) / self.norm
    }
}

/// Double sum over branches of `C_k C_l F(b_k, b_l)` with `b_k = −β_k`, the
/// coherent amplitude of `|+f_k⟩`.
fn branch_sum<F: Fn(f64, f64) -> f64>(a: &Ansatz2Params, f: F) -> f64 {
    let c = [a.c1, a.c2];
    let b = [-a.beta1, -a.beta2];
    let mut acc = 0.0;
    for k in 0..2 {
        for l in 0..2 {
            if c[k] != 0.0 && c[l] != 0.0 {
                acc += c[k] * c[l] * f(b[k], b[l]);
            }
        }
    }
    acc
}

/// Energy components without the degeneracy check.
pub fn raw_components(params: &ModelParams, a: &Ansatz2Params) -> EnergyComponents {
    let xi = a.xi;
    let e2 = eta(xi).powi(2);
    let norm = 2.0 * branch_sum(a, |b, c| gaussian_elements(b, c, xi).overlap);
    // ⟨u|Π|u⟩ pairs |φ_b⟩ with Π|φ_c⟩ = |φ_{−c}⟩
    let atom = -params.delta * branch_sum(a, |b, c| gaussian_elements(b, -c, xi).overlap);
    let photon = 2.0 * params.omega * branch_sum(a, |b, c| gaussian_elements(b, c, xi).number);
    let iso = 2.0 * params.alpha() * branch_sum(a, |b, c| gaussian_elements(b, c, xi).sum);
    let aniso = 2.0 * params.gamma() * branch_sum(a, |b, c| gaussian_elements(b, -c, xi).diff);
    debug_assert!(e2 > 0.0);
    EnergyComponents { atom, photon, iso, aniso, norm }
}

pub fn energy_2css_components(params: &ModelParams, a: &Ansatz2Params) -> Result<EnergyComponents> {
    let comp = raw_components(params, a);
    if collapsed(comp.norm, a) {
        return Err(Error::DegenerateAnsatz { norm: comp.norm });
    }
    Ok(comp)
}

pub fn energy_2css(params: &ModelParams, a: &Ansatz2Params, parity: Parity) -> Result<f64> {
    Ok(energy_2css_components(params, a)?.energy(parity))
}

/// Photon number of the two-state trial function (either parity).
pub fn mean_photon_2css(a: &Ansatz2Params) -> Result<f64> {
    let xi = a.xi;
    let norm = 2.0 * branch_sum(a, |b, c| gaussian_elements(b, c, xi).overlap);
    if collapsed(norm, a) {
        return Err(Error::DegenerateAnsatz { norm });
    }
    Ok(2.0 * branch_sum(a, |b, c| gaussian_elements(b, c, xi).number) / norm)
}

/// `E_even − E_odd` at fixed trial parameters, `2(E^atom + E^ani)/N`.
///
/// Unlike subtracting two energies this keeps full relative precision when
/// the splitting is exponentially small.
pub fn parity_splitting_2css(params: &ModelParams, a: &Ansatz2Params) -> Result<f64> {
    let c = energy_2css_components(params, a)?;
    Ok(2.0 * (c.atom + c.aniso) / c.norm)
}

/// Which odd-parity parameters an even trial state is paired with when the
/// two parity levels are compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Partner {
    /// The same parameters.
    Same,
    /// `C₁ → −C₁`; pairs states whose branches sit on opposite sides.
    FlipFirst,
}

impl Partner {
    pub const ALL: [Partner; 2] = [Partner::Same, Partner::FlipFirst];

    /// The map is an involution.
    pub fn apply(self, a: &Ansatz2Params) -> Ansatz2Params {
        match self {
            Partner::Same => *a,
            Partner::FlipFirst => Ansatz2Params { c1: -a.c1, ..*a },
        }
    }
}

/// Components restricted to the branch pairs `(k, l)` selected by `keep`.
fn pair_components(params: &ModelParams, a: &Ansatz2Params, keep: fn(usize, usize) -> bool) -> EnergyComponents {
    let xi = a.xi;
    let c = [a.c1, a.c2];
    let b = [-a.beta1, -a.beta2];
    let mut out = EnergyComponents { atom: 0.0, photon: 0.0, iso: 0.0, aniso: 0.0, norm: 0.0 };
    for k in 0..2 {
        for l in 0..2 {
            if !keep(k, l) || c[k] == 0.0 || c[l] == 0.0 {
                continue;
            }
            let w = c[k] * c[l];
            let direct = gaussian_elements(b[k], b[l], xi);
            let mirrored = gaussian_elements(b[k], -b[l], xi);
            out.norm += 2.0 * w * direct.overlap;
            out.atom -= params.delta * w * mirrored.overlap;
            out.photon += 2.0 * params.omega * w * direct.number;
            out.iso += 2.0 * params.alpha() * w * direct.sum;
            out.aniso += 2.0 * params.gamma() * w * mirrored.diff;
        }
    }
    out
}

/// `E_even(a) − E_odd(partner(a))`, arranged so that only the terms that
/// change between the two states enter as differences. Keeps full relative
/// precision for exponentially small splittings.
pub fn parity_gap_2css(params: &ModelParams, a: &Ansatz2Params, partner: Partner) -> Result<f64> {
    match partner {
        Partner::Same => parity_splitting_2css(params, a),
        Partner::FlipFirst => {
            let d = pair_components(params, a, |k, l| k == l);
            let x = pair_components(params, a, |k, l| k != l);
            let large = d.photon + d.iso + x.atom + x.aniso;
            let small = d.atom + d.aniso + x.photon + x.iso;
            let den = (d.norm - x.norm) * (d.norm + x.norm);
            let smallest = d.norm - x.norm.abs();
            if smallest.is_nan() || smallest < MIN_NORM {
                return Err(Error::DegenerateAnsatz { norm: smallest });
            }
            Ok(2.0 * (small * d.norm - large * x.norm) / den)
        }
    }
}

/// Spin-x resolved position wavefunctions of the normalized trial state.
pub fn profile_2css(a: &Ansatz2Params, parity: Parity, xs: &[f64], omega: f64) -> Result<WavefunctionProfile> {
    let xi = a.xi;
    let norm = 2.0 * branch_sum(a, |b, c| gaussian_elements(b, c, xi).overlap);
    if collapsed(norm, a) {
        return Err(Error::DegenerateAnsatz { norm });
    }
    let scale = norm.sqrt().recip();
    let s = parity.sign();
    let u = |x: f64| {
        a.c1 * gaussian_wavefunction(-a.beta1, xi, x, omega) + a.c2 * gaussian_wavefunction(-a.beta2, xi, x, omega)
    };
    let plus = xs.iter().map(|&x| scale * u(x)).collect();
    let minus = xs.iter().map(|&x| -s * scale * u(-x)).collect();
    Ok(WavefunctionProfile::from_samples(xs.to_vec(), plus, minus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn model(delta: f64, g: f64, tau: f64) -> ModelParams {
        ModelParams::new(delta, 1.0, g, tau).unwrap()
    }

    #[test]
    fn one_state_examples() {
        let p = model(100.0, 3.0, 1.3);
        assert_eq!(energy_1css(&p, &Ansatz1Params { beta: 0.0, xi: 0.0 }), -50.0);
        let e = energy_1css(&model(100.0, 3.0, 1.0), &Ansatz1Params { beta: 0.0, xi: 0.3 });
        assert_abs_diff_eq!(e, 0.6f64.sinh().powi(2) - 50.0, epsilon = 1e-12);
        assert_eq!(mean_photon_1css(&Ansatz1Params { beta: 0.0, xi: 0.0 }), 0.0);
        assert_eq!(mean_photon_1css(&Ansatz1Params { beta: 2.0, xi: 0.0 }), 4.0);
        assert_abs_diff_eq!(mean_photon_1css(&Ansatz1Params { beta: 1.0, xi: 0.1 }), 1.0405362, epsilon = 1e-7);
    }

    #[test]
    fn asymptotic_examples() {
        assert_eq!(asymptotic_params(&model(100.0, 0.0, 1.0)), (0.0, 0.0));
        let (b, x) = asymptotic_params(&model(100.0, 5.0, 1.0));
        assert_abs_diff_eq!(b, 0.05, epsilon = 1e-15);
        assert_abs_diff_eq!(x, 2f64.ln() / 8.0, epsilon = 1e-15);
        assert_abs_diff_eq!(x, 0.086643, epsilon = 1e-6);
    }

    #[test]
    fn residuals_vanish_at_decoupled_point() {
        let r = stationarity_residuals_iso(&model(10.0, 0.0, 1.0), &Ansatz1Params { beta: 0.0, xi: 0.0 }).unwrap();
        assert_eq!(r, (0.0, 0.0));
        assert!(matches!(
            stationarity_residuals_iso(&model(10.0, 1.0, 1.5), &Ansatz1Params { beta: 0.0, xi: 0.0 }),
            Err(Error::NotIsotropic { .. })
        ));
    }

    #[test]
    fn residuals_are_gradient_components() {
        let p = model(20.0, 2.5, 1.0);
        for (beta, xi) in [(0.3, 0.05), (1.7, 0.2), (-0.8, 0.4), (2.5, -0.1)] {
            let a = Ansatz1Params { beta, xi };
            let h = 1e-6;
            let e = |b: f64, x: f64| energy_1css(&p, &Ansatz1Params { beta: b, xi: x });
            let d_beta = (e(beta + h, xi) - e(beta - h, xi)) / (2.0 * h);
            let d_xi = (e(beta, xi + h) - e(beta, xi - h)) / (2.0 * h);
            let (r_xi, r_beta) = stationarity_residuals_iso(&p, &a).unwrap();
            assert_relative_eq!(d_xi, r_xi, max_relative = 1e-6, epsilon = 1e-7);
            assert_relative_eq!(d_beta, 2.0 * r_beta, max_relative = 1e-6, epsilon = 1e-7);
        }
    }

    #[test]
    fn two_state_reduces_to_one_state() {
        let p = model(7.0, 1.2, 1.5);
        let a = Ansatz1Params { beta: 0.8, xi: 0.1 };
        let two = Ansatz2Params::from_single(a);
        assert_relative_eq!(energy_2css(&p, &two, Parity::Even).unwrap(), energy_1css(&p, &a), max_relative = 1e-14);
        assert_relative_eq!(mean_photon_2css(&two).unwrap(), mean_photon_1css(&a), max_relative = 1e-14);
        // any nonzero scale of C₁ gives the same quotient
        let scaled = Ansatz2Params { c1: -3.0, ..two };
        assert_relative_eq!(energy_2css(&p, &scaled, Parity::Even).unwrap(), energy_1css(&p, &a), max_relative = 1e-14);
    }

    #[test]
    fn odd_state_at_origin() {
        let p = model(100.0, 4.0, 1.2);
        let a = Ansatz2Params { c1: 0.4, c2: 0.4, beta1: 0.0, beta2: 0.0, xi: 0.0 };
        assert_abs_diff_eq!(energy_2css(&p, &a, Parity::Odd).unwrap(), 50.0, epsilon = 1e-12);
        assert_eq!(mean_photon_2css(&a).unwrap(), 0.0);
    }

    #[test]
    fn degenerate_superposition_rejected() {
        let p = model(10.0, 1.0, 1.0);
        let a = Ansatz2Params { c1: 0.5, c2: -0.5, beta1: 0.3, beta2: 0.3, xi: 0.1 };
        assert!(matches!(energy_2css(&p, &a, Parity::Even), Err(Error::DegenerateAnsatz { .. })));
        assert!(matches!(mean_photon_2css(&a), Err(Error::DegenerateAnsatz { .. })));
    }

    #[test]
    fn splitting_matches_difference() {
        let p = model(5.0, 2.0, 0.7);
        let a = Ansatz2Params { c1: 0.6, c2: 0.3, beta1: 1.0, beta2: -0.4, xi: 0.1 };
        let diff = energy_2css(&p, &a, Parity::Even).unwrap() - energy_2css(&p, &a, Parity::Odd).unwrap();
        assert_relative_eq!(parity_splitting_2css(&p, &a).unwrap(), diff, max_relative = 1e-12);
    }

    #[test]
    fn partner_gap_matches_difference() {
        let p = model(5.0, 2.0, 0.7);
        let a = Ansatz2Params { c1: 0.6, c2: 0.3, beta1: 1.0, beta2: -0.4, xi: 0.1 };
        for partner in Partner::ALL {
            let b = partner.apply(&a);
            let diff = energy_2css(&p, &a, Parity::Even).unwrap() - energy_2css(&p, &b, Parity::Odd).unwrap();
            assert_relative_eq!(parity_gap_2css(&p, &a, partner).unwrap(), diff, max_relative = 1e-11);
            assert_eq!(partner.apply(&b), a);
        }
    }

    #[test]
    fn two_sided_partner_gap_is_small() {
        // branches on opposite sides: the flipped partner is the near-degenerate cat
        let p = model(10.0, 3.0, 0.5);
        let a = Ansatz2Params { c1: 0.95, c2: 0.3, beta1: 4.0, beta2: -4.0, xi: 0.0 };
        let flip = parity_gap_2css(&p, &a, Partner::FlipFirst).unwrap();
        let same = parity_gap_2css(&p, &a, Partner::Same).unwrap();
        assert!(flip.abs() < 1e-9 && flip != 0.0, "{flip}");
        assert!(same.abs() > 1.0, "{same}");
        let diff = energy_2css(&p, &a, Parity::Even).unwrap()
            - energy_2css(&p, &Partner::FlipFirst.apply(&a), Parity::Odd).unwrap();
        assert!((flip - diff).abs() < 1e-12);
    }

    #[test]
    fn profile_is_normalized() {
        let a = Ansatz2Params { c1: 0.74, c2: 0.67, beta1: 2.0, beta2: -1.0, xi: 0.2 };
        let xs = crate::states::uniform_grid(-25.0, 25.0, 0.01);
        for parity in [Parity::Even, Parity::Odd] {
            let prof = profile_2css(&a, parity, &xs, 1.0).unwrap();
            assert_abs_diff_eq!(prof.norm(), 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn kind_labels_round_trip() {
        for fam in Family::ALL {
            let k = AnsatzKind::even(fam);
            assert_eq!(k.label().parse::<AnsatzKind>().unwrap(), k);
        }
        let odd: AnsatzKind = "CSS2:odd".parse().unwrap();
        assert_eq!(odd.parity, Parity::Odd);
        assert!("CSS1:odd".parse::<AnsatzKind>().is_err());
        assert!("foo".parse::<AnsatzKind>().is_err());
    }

    fn arb_two() -> impl Strategy<Value = Ansatz2Params> {
        (0.05..1.0f64, -1.0..1.0f64, -3.0..3.0f64, -3.0..3.0f64, -0.3..0.5f64)
            .prop_map(|(c1, c2, beta1, beta2, xi)| Ansatz2Params { c1, c2, beta1, beta2, xi })
    }

    fn arb_model() -> impl Strategy<Value = ModelParams> {
        (0.5..50.0f64, 0.2..3.0f64, 0.0..4.0f64, 0.0..2.0f64)
            .prop_map(|(d, w, g, t)| ModelParams::new(d, w, g, t).unwrap())
    }

    proptest! {
        #[test]
        fn relabeling_and_sign_invariance(p in arb_model(), a in arb_two(), odd in any::<bool>()) {
            let parity = if odd { Parity::Odd } else { Parity::Even };
            let Ok(e) = energy_2css(&p, &a, parity) else { return Ok(()) };
            let sw = energy_2css(&p, &a.swapped(), parity).unwrap();
            let neg = energy_2css(&p, &Ansatz2Params { c1: -a.c1, c2: -a.c2, ..a }, parity).unwrap();
            let tol = 1e-10 * (1.0 + e.abs());
            prop_assert!((e - sw).abs() < tol);
            prop_assert!((e - neg).abs() < tol);
        }

        #[test]
        fn reflection_with_coupling_sign(p in arb_model(), a in arb_two(), odd in any::<bool>()) {
            // Π maps the coupled model onto the one with opposite α and γ
            let parity = if odd { Parity::Odd } else { Parity::Even };
            let Ok(e) = energy_2css(&p, &a, parity) else { return Ok(()) };
            let flipped = ModelParams { g: -p.g, ..p };
            let refl = Ansatz2Params { beta1: -a.beta1, beta2: -a.beta2, ..a };
            let e2 = energy_2css(&flipped, &refl, parity).unwrap();
            prop_assert!((e - e2).abs() < 1e-10 * (1.0 + e.abs()));
        }

        #[test]
        fn isotropic_decoupled_mirror(delta in 0.5..50.0f64, a in arb_two()) {
            // with no coupling the functional depends on β only through the pair geometry
            let p = ModelParams::new(delta, 1.0, 0.0, 1.0).unwrap();
            let Ok(e) = energy_2css(&p, &a, Parity::Even) else { return Ok(()) };
            let m = Ansatz2Params { c1: a.c2, c2: a.c1, beta1: -a.beta2, beta2: -a.beta1, xi: a.xi };
            let e2 = energy_2css(&p, &m, Parity::Even).unwrap();
            prop_assert!((e - e2).abs() < 1e-10 * (1.0 + e.abs()));
        }

        #[test]
        fn photon_number_nonnegative(a in arb_two()) {
            if let Ok(n) = mean_photon_2css(&a) {
                prop_assert!(n >= -1e-12);
            }
        }
    }
}
