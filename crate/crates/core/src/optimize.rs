//! Multi-start simplex minimization of the trial-state energies.
//!
//! Each start runs a Nelder–Mead descent that is restarted from its best
//! vertex until a restart stops improving, then a damped Newton polish on
//! finite-difference derivatives takes the result to full precision.

use std::f64::consts::{FRAC_PI_4, PI};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactdiag::Parity;
use crate::fock::ModelParams;
use crate::variational::{
    asymptotic_seed, collapsed, energy_1css, raw_components, Ansatz1Params, Ansatz2Params, AnsatzKind, AnsatzParams,
    Family,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizeOptions {
    /// Simplex diameter / relative value spread at which a descent stops.
    pub tol: f64,
    /// Objective evaluations allowed per start.
    pub max_evals: usize,
    /// Central-difference step for the reported gradient.
    pub fd_step: f64,
    /// Largest gradient component accepted as converged.
    pub grad_tol: f64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_evals: 100_000, fd_step: 1e-6, grad_tol: 1e-5 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldMinimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub grad_norm: f64,
    pub converged: bool,
    pub starts_tried: usize,
    /// Index into the start list that produced `x`.
    pub best_start: usize,
    pub evaluations: usize,
}

struct Counted<F> {
    f: F,
    evals: usize,
}

impl<F: Fn(&[f64]) -> f64> Counted<F> {
    fn eval(&mut self, x: &[f64]) -> f64 {
        self.evals += 1;
        let v = (self.f)(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }
}

/// One Nelder–Mead descent. Returns the best vertex, its value and whether a
/// stopping criterion (rather than the budget) ended it.
fn nelder_mead<F: Fn(&[f64]) -> f64>(
    f: &mut Counted<F>,
    x0: &[f64],
    steps: &[f64],
    tol: f64,
    budget: usize,
) -> (Vec<f64>, f64, bool) {
    let n = x0.len();
    let start_evals = f.evals;
    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += steps[i];
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f.eval(v)).collect();

    loop {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let best = values[0];
        let diameter = simplex[1..]
            .iter()
            .flat_map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        let spread = values[n] - best;
        if best.is_finite() && (diameter < tol || spread <= tol * best.abs().max(1.0)) {
            return (simplex[0].clone(), best, true);
        }
        if f.evals - start_evals >= budget {
            return (simplex[0].clone(), best, false);
        }

        let centroid: Vec<f64> =
            (0..n).map(|j| simplex[..n].iter().map(|v| v[j]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| -> Vec<f64> {
            centroid.iter().zip(&simplex[n]).map(|(c, w)| c + t * (c - w)).collect()
        };
        let xr = along(1.0);
        let fr = f.eval(&xr);
        if fr < values[0] {
            let xe = along(2.0);
            let fe = f.eval(&xe);
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
            continue;
        }
        let (xc, fc, accept) = if fr < values[n] {
            let xc = along(0.5);
            let fc = f.eval(&xc);
            (xc, fc, fc <= fr)
        } else {
            let xc = along(-0.5);
            let fc = f.eval(&xc);
            (xc, fc, fc < values[n])
        };
        if accept {
            simplex[n] = xc;
            values[n] = fc;
            continue;
        }
        for i in 1..=n {
            let v: Vec<f64> = simplex[i].iter().zip(&simplex[0]).map(|(x, b)| b + 0.5 * (x - b)).collect();
            values[i] = f.eval(&v);
            simplex[i] = v;
        }
    }
}

fn fd_gradient<F: Fn(&[f64]) -> f64>(f: &mut Counted<F>, x: &[f64], h: f64) -> Vec<f64> {
    let mut g = vec![0.0; x.len()];
    let mut y = x.to_vec();
    for i in 0..x.len() {
        y[i] = x[i] + h;
        let fp = f.eval(&y);
        y[i] = x[i] - h;
        let fm = f.eval(&y);
        y[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    g
}

fn fd_hessian<F: Fn(&[f64]) -> f64>(f: &mut Counted<F>, x: &[f64], fx: f64, h: f64) -> DMatrix<f64> {
    let n = x.len();
    let mut hess = DMatrix::zeros(n, n);
    let mut y = x.to_vec();
    for i in 0..n {
        y[i] = x[i] + h;
        let fp = f.eval(&y);
        y[i] = x[i] - h;
        let fm = f.eval(&y);
        y[i] = x[i];
        hess[(i, i)] = (fp - 2.0 * fx + fm) / (h * h);
        for j in 0..i {
            let mut corner = |si: f64, sj: f64| {
                let mut z = x.to_vec();
                z[i] += si * h;
                z[j] += sj * h;
                f.eval(&z)
            };
            let v = (corner(1.0, 1.0) - corner(1.0, -1.0) - corner(-1.0, 1.0) + corner(-1.0, -1.0)) / (4.0 * h * h);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    hess
}

/// Levenberg-damped Newton iterations on finite-difference derivatives.
fn polish<F: Fn(&[f64]) -> f64>(f: &mut Counted<F>, mut x: Vec<f64>, mut fx: f64) -> (Vec<f64>, f64) {
    let n = x.len();
    for _ in 0..40 {
        let g = fd_gradient(f, &x, 1e-6);
        if g.iter().any(|v| !v.is_finite()) || g.iter().all(|v| v.abs() < 1e-12) {
            break;
        }
        let hess = fd_hessian(f, &x, fx, 1e-4);
        if hess.iter().any(|v| !v.is_finite()) {
            break;
        }
        let gv = DVector::from_column_slice(&g);
        let scale = hess.diagonal().abs().max().max(1e-12);
        let mut mu = 0.0;
        let mut improved = false;
        for _ in 0..12 {
            let damped = &hess + DMatrix::identity(n, n) * mu;
            if let Some(chol) = damped.cholesky() {
                let step = chol.solve(&(-&gv));
                let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, d)| a + d).collect();
                let ft = f.eval(&trial);
                if ft < fx {
                    x = trial;
                    fx = ft;
                    improved = true;
                    break;
                }
            }
            mu = if mu == 0.0 { 1e-6 * scale } else { mu * 10.0 };
        }
        if !improved {
            break;
        }
    }
    (x, fx)
}

fn initial_steps(x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| 0.1 + 0.1 * v.abs()).collect()
}

fn minimize_one<F: Fn(&[f64]) -> f64>(
    f: &mut Counted<F>,
    start: &[f64],
    steps: &[f64],
    opts: &MinimizeOptions,
) -> (Vec<f64>, f64, bool) {
    let begin = f.evals;
    let mut x = start.to_vec();
    let mut fx = f.eval(&x);
    let mut ok = false;
    // Ill-conditioned valleys can stall both the simplex and the Newton
    // polish; later rounds restart from the polished point on a finer scale.
    for round in 0..POLISH_ROUNDS {
        let scale = 0.1f64.powi(round as i32);
        let round_steps: Vec<f64> = steps.iter().map(|s| s * scale).collect();
        for _ in 0..20 {
            let used = f.evals - begin;
            if used >= opts.max_evals {
                ok = false;
                break;
            }
            let (x2, f2, ok2) = nelder_mead(f, &x, &round_steps, opts.tol, opts.max_evals - used);
            let gain = fx - f2;
            if f2 <= fx {
                x = x2;
                fx = f2;
            }
            ok = ok2;
            if !ok || gain <= opts.tol * fx.abs().max(1.0) {
                break;
            }
        }
        (x, fx) = polish(f, x, fx);
        let g = fd_gradient(f, &x, opts.fd_step);
        if !ok || g.iter().all(|v| v.abs() < 0.1 * opts.grad_tol) {
            break;
        }
    }
    (x, fx, ok)
}

/// Simplex-plus-Newton rounds per start.
const POLISH_ROUNDS: usize = 4;

fn minimize_with_steps<F: Fn(&[f64]) -> f64>(
    f: F,
    starts: &[(Vec<f64>, Vec<f64>)],
    opts: &MinimizeOptions,
) -> Result<FieldMinimum> {
    if starts.is_empty() {
        return Err(Error::InvalidParams("no start points".into()));
    }
    let dim = starts[0].0.len();
    if !(1..=5).contains(&dim) || starts.iter().any(|(s, st)| s.len() != dim || st.len() != dim) {
        return Err(Error::InvalidParams(format!("start points must share a dimension in 1..=5 (got {dim})")));
    }
    let mut counted = Counted { f, evals: 0 };
    let mut best: Option<(Vec<f64>, f64, bool, usize)> = None;
    for (i, (start, steps)) in starts.iter().enumerate() {
        let (x, fx, ok) = minimize_one(&mut counted, start, steps, opts);
        if best.as_ref().is_none_or(|b| fx < b.1) {
            best = Some((x, fx, ok, i));
        }
    }
    let (x, value, ok, best_start) = best.expect("at least one start");
    let grad = fd_gradient(&mut counted, &x, opts.fd_step);
    let grad_norm = grad.iter().map(|g| g.abs()).fold(0.0, f64::max);
    let grad_norm = if grad.iter().all(|g| g.is_finite()) { grad_norm } else { f64::INFINITY };
    let converged = ok && value.is_finite() && grad_norm < opts.grad_tol;
    Ok(FieldMinimum {
        x,
        value,
        grad_norm,
        converged,
        starts_tried: starts.len(),
        best_start,
        evaluations: counted.evals,
    })
}

/// Lowest local minimum of `f` over all `starts`.
///
/// The result carries `converged = false` when the best descent ran out of
/// budget or its finite-difference gradient exceeds `opts.grad_tol`.
pub fn minimize_scalar_field<F: Fn(&[f64]) -> f64>(
    f: F,
    starts: &[Vec<f64>],
    opts: &MinimizeOptions,
) -> Result<FieldMinimum> {
    let with_steps: Vec<_> = starts.iter().map(|s| (s.clone(), initial_steps(s))).collect();
    minimize_with_steps(f, &with_steps, opts)
}

/// Outcome of optimizing one trial-state family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    pub kind: AnsatzKind,
    pub energy: f64,
    pub params: AnsatzParams,
    pub starts_tried: usize,
    pub grad_norm: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    pub minimize: MinimizeOptions,
    /// Optimum of the same kind at a neighbouring coupling.
    pub warm_start: Option<AnsatzParams>,
    /// Further seeds, typically optima of smaller families at this coupling.
    pub extra_seeds: Vec<AnsatzParams>,
}

fn to_vector(kind: &AnsatzKind, p: &AnsatzParams) -> Vec<f64> {
    match (kind.family, p) {
        (Family::Cs1, p) => vec![p.as_two().beta1],
        (Family::Css1, p) => {
            let a = p.as_two();
            vec![a.beta1, a.xi]
        }
        (fam, AnsatzParams::One(a)) => {
            // embed with the second packet mirrored and switched off
            let mut v = vec![0.0, a.beta, -a.beta];
            if fam == Family::Css2 {
                v.push(a.xi);
            }
            v
        }
        (fam, AnsatzParams::Two(a)) => {
            let mut v = vec![a.c2.atan2(a.c1), a.beta1, a.beta2];
            if fam == Family::Css2 {
                v.push(a.xi);
            }
            v
        }
    }
}

fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(PI);
    if t >= PI {
        0.0
    } else {
        t
    }
}

fn from_vector(kind: &AnsatzKind, x: &[f64]) -> AnsatzParams {
    match kind.family {
        Family::Cs1 => AnsatzParams::One(Ansatz1Params { beta: x[0], xi: 0.0 }),
        Family::Css1 => AnsatzParams::One(Ansatz1Params { beta: x[0], xi: x[1] }),
        Family::Cs2 | Family::Css2 => {
            let xi = if kind.family == Family::Css2 { x[3] } else { 0.0 };
            let (mut theta, mut b1, mut b2) = (x[0], x[1], x[2]);
            if b1 < b2 {
                // (C₁,β₁) ↔ (C₂,β₂): cos θ′ = sin θ, sin θ′ = cos θ
                theta = PI / 2.0 - theta;
                std::mem::swap(&mut b1, &mut b2);
            }
            let theta = wrap_angle(theta);
            AnsatzParams::Two(Ansatz2Params { c1: theta.cos(), c2: theta.sin(), beta1: b1, beta2: b2, xi })
        }
    }
}

/// Energy of `kind` at the parameter vector `x`; infinite for a collapsed
/// superposition so the simplex steps away from it.
pub fn objective(params: &ModelParams, kind: &AnsatzKind, x: &[f64]) -> f64 {
    match kind.family {
        Family::Cs1 => energy_1css(params, &Ansatz1Params { beta: x[0], xi: 0.0 }),
        Family::Css1 => energy_1css(params, &Ansatz1Params { beta: x[0], xi: x[1] }),
        Family::Cs2 | Family::Css2 => {
            let xi = if kind.family == Family::Css2 { x[3] } else { 0.0 };
            let a = Ansatz2Params { c1: x[0].cos(), c2: x[0].sin(), beta1: x[1], beta2: x[2], xi };
            let c = raw_components(params, &a);
            if collapsed(c.norm, &a) {
                f64::INFINITY
            } else {
                c.energy(kind.parity)
            }
        }
    }
}

fn steps_for(kind: &AnsatzKind, x: &[f64]) -> Vec<f64> {
    let beta_step = |b: f64| 0.1 + 0.1 * b.abs();
    match kind.family {
        Family::Cs1 => vec![beta_step(x[0])],
        Family::Css1 => vec![beta_step(x[0]), 0.05],
        Family::Cs2 => vec![0.2, beta_step(x[1]), beta_step(x[2])],
        Family::Css2 => vec![0.2, beta_step(x[1]), beta_step(x[2]), 0.05],
    }
}

fn generic_seeds(params: &ModelParams, kind: &AnsatzKind) -> Vec<Vec<f64>> {
    let (ba, xa) = asymptotic_seed(params);
    let mf = params.alpha() / params.omega;
    match (kind.family, kind.parity) {
        (Family::Cs1, _) => vec![vec![ba], vec![mf], vec![2.0 * mf], vec![0.0]],
        (Family::Css1, _) => vec![vec![ba, xa], vec![mf, 0.0], vec![2.0 * mf, 0.0]],
        (fam, parity) => {
            let mut seeds = match parity {
                Parity::Even => vec![
                    vec![0.0, ba, -ba, xa],
                    vec![0.0, mf, -mf, 0.0],
                    vec![FRAC_PI_4, mf, -mf, 0.1],
                    vec![FRAC_PI_4, 0.5, -0.5, 0.2],
                ],
                Parity::Odd => vec![
                    vec![0.0, ba, -ba, xa],
                    vec![0.0, mf, -mf, 0.0],
                    vec![FRAC_PI_4, mf, -mf, 0.1],
                    vec![3.0 * FRAC_PI_4 - 0.2, 0.6, -0.6, 0.0],
                    vec![3.0 * FRAC_PI_4 - 0.2, mf + 0.5, -mf - 0.5, 0.1],
                ],
            };
            if fam == Family::Cs2 {
                seeds.iter_mut().for_each(|s| s.truncate(3));
            }
            seeds
        }
    }
}

/// Families whose optimum is embedded as a seed of `family`.
fn nested_families(family: Family) -> &'static [Family] {
    match family {
        Family::Cs1 => &[],
        Family::Css1 => &[Family::Cs1],
        Family::Cs2 => &[Family::Cs1],
        Family::Css2 => &[Family::Css1, Family::Cs2],
    }
}

/// Optimizes `kind` from its default seeds.
pub fn solve_ansatz(params: &ModelParams, kind: AnsatzKind) -> Result<OptResult> {
    solve_ansatz_with(params, kind, &SolveOptions::default())
}

/// Optimizes `kind` from the default seeds, the optima of the contained
/// smaller families, `opts.extra_seeds` and `opts.warm_start`, returning the
/// lowest result. A failed convergence test is reported as
/// [`Error::NoConvergence`] carrying the best point found.
pub fn solve_ansatz_with(params: &ModelParams, kind: AnsatzKind, opts: &SolveOptions) -> Result<OptResult> {
    params.validate()?;
    let kind = AnsatzKind::new(kind.family, kind.parity)?;
    let mut seeds = generic_seeds(params, &kind);
    for &fam in nested_families(kind.family) {
        let sub = AnsatzKind::even(fam);
        let inner = SolveOptions { minimize: opts.minimize, ..Default::default() };
        let res = match solve_ansatz_with(params, sub, &inner) {
            Ok(r) => r,
            Err(Error::NoConvergence { best }) => *best,
            Err(e) => return Err(e),
        };
        seeds.push(to_vector(&kind, &res.params));
    }
    for p in &opts.extra_seeds {
        seeds.push(to_vector(&kind, p));
    }
    if let Some(w) = &opts.warm_start {
        seeds.push(to_vector(&kind, w));
    }
    let starts: Vec<(Vec<f64>, Vec<f64>)> = seeds
        .into_iter()
        .filter(|s| objective(params, &kind, s).is_finite())
        .map(|s| {
            let st = steps_for(&kind, &s);
            (s, st)
        })
        .collect();
    let m = minimize_with_steps(|x: &[f64]| objective(params, &kind, x), &starts, &opts.minimize)?;
    let result = OptResult {
        kind,
        energy: m.value,
        params: from_vector(&kind, &m.x),
        starts_tried: m.starts_tried,
        grad_norm: m.grad_norm,
        converged: m.converged,
    };
    if result.converged {
        Ok(result)
    } else {
        Err(Error::NoConvergence { best: Box::new(result) })
    }
}
