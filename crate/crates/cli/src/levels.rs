//! Even/odd ground levels across the first-order transition (τ < 1).
//!
//! The two parity sectors become nearly degenerate cat partners on the
//! superradiant side, so the sign of `E_even − E_odd` is taken from the
//! extended-precision gap for the exact spectrum and from variational bounds
//! on the splitting for the trial states whenever the direct difference
//! drowns in rounding.

use rabi_core::exactdiag::{mean_photon_ed, parity_gap_precise, solve_parity_sector};
use rabi_core::optimize::{solve_ansatz_with, SolveOptions};
use rabi_core::variational::{mean_photon_2css, parity_gap_2css, Partner};
use rabi_core::{AnsatzKind, Error, Family, ModelParams, OptResult, Parity, Truncation};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::CliResult;
use crate::scan::write_meta;
use crate::table::{write_table, write_text};

/// Bisection steps used to pin a crossing between two grid points.
const REFINE_STEPS: usize = 30;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRow {
    pub g: f64,
    /// `g / g_c^(1)`
    pub g_ratio: f64,
    pub ed_even: Option<f64>,
    pub ed_odd: Option<f64>,
    /// `E_even − E_odd` from the exact spectrum.
    pub ed_gap: Option<f64>,
    pub css2_even: Option<f64>,
    pub css2_odd: Option<f64>,
    pub css2_gap: Option<f64>,
    /// Photon number of whichever sector lies lowest.
    pub ed_photon: Option<f64>,
    pub css2_photon: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub source: String,
    pub g: Option<f64>,
    pub g_ratio: Option<f64>,
    /// Ground-state photon number just below and just above the crossing.
    pub photon_below: Option<f64>,
    pub photon_above: Option<f64>,
    pub photon_jump: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelsReport {
    pub g_c1: f64,
    pub rows: Vec<LevelRow>,
    pub ed: Crossing,
    pub css2: Crossing,
}

/// Exact sector levels at one coupling.
#[derive(Debug, Clone, Copy)]
pub struct ExactPoint {
    pub even: f64,
    pub odd: f64,
    pub gap: f64,
    /// Zero when the sectors could not be told apart.
    pub sign: i8,
}

pub fn exact_point(params: &ModelParams, trunc: &Truncation) -> Option<ExactPoint> {
    let gap = parity_gap_precise(params, trunc).ok()?;
    let sign = if !gap.resolved || gap.gap == 0.0 { 0 } else if gap.gap > 0.0 { 1 } else { -1 };
    Some(ExactPoint { even: gap.even, odd: gap.odd, gap: gap.gap, sign })
}

fn exact_ground_photon(params: &ModelParams, trunc: &Truncation, p: &ExactPoint) -> Option<f64> {
    let parity = if p.gap > 0.0 { Parity::Odd } else { Parity::Even };
    let res = solve_parity_sector(params, trunc, parity, 1).ok()?;
    Some(mean_photon_ed(res.ground()))
}

/// Optimized even and odd trial states at one coupling.
#[derive(Debug, Clone)]
pub struct TrialPoint {
    pub even: OptResult,
    pub odd: OptResult,
    pub gap: f64,
}

impl TrialPoint {
    pub fn sign(&self) -> i8 {
        if self.gap > 0.0 {
            1
        } else if self.gap < 0.0 {
            -1
        } else {
            0
        }
    }

    pub fn ground(&self) -> &OptResult {
        if self.gap > 0.0 {
            &self.odd
        } else {
            &self.even
        }
    }

    pub fn ground_photon(&self) -> Option<f64> {
        mean_photon_2css(&self.ground().params.as_two()).ok()
    }
}

fn best_effort(params: &ModelParams, kind: AnsatzKind, opts: &SolveOptions) -> Option<OptResult> {
    match solve_ansatz_with(params, kind, opts) {
        Ok(r) => Some(r),
        Err(Error::NoConvergence { best }) => Some(*best),
        Err(_) => None,
    }
}

/// Both parities, each seeded with the other's optimum and with the
/// previous point's results.
pub fn trial_point(params: &ModelParams, prev: Option<&TrialPoint>) -> Option<TrialPoint> {
    let even_kind = AnsatzKind::new(Family::Css2, Parity::Even).ok()?;
    let odd_kind = AnsatzKind::new(Family::Css2, Parity::Odd).ok()?;
    let mut even_opts = SolveOptions::default();
    let mut odd_opts = SolveOptions::default();
    if let Some(p) = prev {
        even_opts.warm_start = Some(p.even.params);
        even_opts.extra_seeds.push(p.odd.params);
        odd_opts.warm_start = Some(p.odd.params);
    }
    let even = best_effort(params, even_kind, &even_opts)?;
    odd_opts.extra_seeds.push(even.params);
    let odd = best_effort(params, odd_kind, &odd_opts)?;
    // the odd optimum may in turn improve the even one
    let even = {
        let again = SolveOptions { warm_start: Some(odd.params), ..even_opts };
        match best_effort(params, even_kind, &again) {
            Some(r) if r.energy < even.energy => r,
            _ => even,
        }
    };
    let gap = trial_gap(params, &even, &odd);
    Some(TrialPoint { even, odd, gap })
}

/// `E_even − E_odd` of the optimized trial states.
///
/// When the direct difference is below rounding level, each optimum is
/// paired with the trial state of the other parity that differs from it only
/// through the exponentially small cross terms. The difference of such a pair
/// is evaluated without cancellation and agrees with the gap to first order
/// in the distance between the optima. The estimates from both optima are
/// averaged.
pub fn trial_gap(params: &ModelParams, even: &OptResult, odd: &OptResult) -> f64 {
    let direct = even.energy - odd.energy;
    if direct.abs() > 1e-10 * even.energy.abs().max(1.0) {
        return direct;
    }
    let (e, o) = (even.params.as_two(), odd.params.as_two());
    let closest = |v: &mut Option<f64>, x: Result<f64, Error>| {
        if let Ok(x) = x {
            if v.is_none_or(|v| x.abs() < v.abs()) {
                *v = Some(x);
            }
        }
    };
    let (mut from_even, mut from_odd) = (None, None);
    for partner in Partner::ALL {
        closest(&mut from_even, parity_gap_2css(params, &e, partner));
        closest(&mut from_odd, parity_gap_2css(params, &partner.apply(&o), partner));
    }
    match (from_even, from_odd) {
        (Some(a), Some(b)) => 0.5 * (a + b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => direct,
    }
}

/// First sign change of a gap sequence, ignoring unresolved points.
pub fn first_sign_change(signs: &[i8]) -> Option<(usize, usize)> {
    let mut last: Option<usize> = None;
    for (i, &s) in signs.iter().enumerate() {
        if s == 0 {
            continue;
        }
        if let Some(j) = last {
            if signs[j] != s {
                return Some((j, i));
            }
        }
        last = Some(i);
    }
    None
}

/// Bisects a sign change of `eval` between `lo` and `hi`, then interpolates
/// linearly between the final bracket ends. Returns the crossing and the
/// final bracket.
fn refine<T, F>(mut lo: (f64, T, f64), mut hi: (f64, T, f64), mut eval: F) -> (f64, (f64, T), (f64, T))
where
    F: FnMut(f64, &T) -> Option<(T, f64)>,
{
    for _ in 0..REFINE_STEPS {
        let mid = 0.5 * (lo.0 + hi.0);
        let Some((state, gap)) = eval(mid, &lo.1) else { break };
        if gap == 0.0 {
            break;
        }
        if (gap > 0.0) == (lo.2 > 0.0) {
            lo = (mid, state, gap);
        } else {
            hi = (mid, state, gap);
        }
    }
    let x = lo.0 - lo.2 * (hi.0 - lo.0) / (hi.2 - lo.2);
    (x, (lo.0, lo.1), (hi.0, hi.1))
}

fn crossing_row(source: &str, g: Option<f64>, g_c1: f64, below: Option<f64>, above: Option<f64>) -> Crossing {
    Crossing {
        source: source.into(),
        g,
        g_ratio: g.map(|g| g / g_c1),
        photon_below: below,
        photon_above: above,
        photon_jump: below.zip(above).map(|(b, a)| (a - b).abs()),
    }
}

pub fn g_grid(cfg: &Config, g_c1: f64) -> Vec<f64> {
    let lo = cfg.g_min.unwrap_or(0.9 * g_c1);
    let hi = cfg.g_max.unwrap_or(1.1 * g_c1);
    let step = cfg.g_step.unwrap_or((hi - lo) / 40.0);
    if step.is_nan() || step <= 0.0 {
        return vec![lo];
    }
    rabi_core::states::uniform_grid(lo, hi, step)
}

/// Level scan around `g_c^(1)`; writes `levels.tsv`, `crossing.tsv`,
/// `meta.json` and `plot.gp`.
pub fn cmd_levels(cfg: &Config) -> CliResult<LevelsReport> {
    let base = cfg.model_at_g(0.0)?;
    let g_c1 = base.g_c1().ok_or(Error::InvalidTau { tau: cfg.tau })?;
    let trunc = cfg.truncation();
    let grid = g_grid(cfg, g_c1);
    let models: Vec<ModelParams> = grid.iter().map(|&g| cfg.model_at_g(g)).collect::<CliResult<_>>()?;

    let exact: Vec<Option<(ExactPoint, Option<f64>)>> = models
        .par_iter()
        .map(|p| exact_point(p, &trunc).map(|e| (e, exact_ground_photon(p, &trunc, &e))))
        .collect();
    let mut trials: Vec<Option<TrialPoint>> = Vec::with_capacity(models.len());
    for p in &models {
        let prev = trials.iter().rev().find_map(|t| t.as_ref());
        let t = trial_point(p, prev);
        trials.push(t);
    }

    let rows: Vec<LevelRow> = grid
        .iter()
        .enumerate()
        .map(|(i, &g)| {
            let e = exact[i].as_ref();
            let t = trials[i].as_ref();
            LevelRow {
                g,
                g_ratio: g / g_c1,
                ed_even: e.map(|e| e.0.even),
                ed_odd: e.map(|e| e.0.odd),
                ed_gap: e.map(|e| e.0.gap),
                css2_even: t.map(|t| t.even.energy),
                css2_odd: t.map(|t| t.odd.energy),
                css2_gap: t.map(|t| t.gap),
                ed_photon: e.and_then(|e| e.1),
                css2_photon: t.and_then(TrialPoint::ground_photon),
            }
        })
        .collect();

    let ed_signs: Vec<i8> = exact.iter().map(|e| e.as_ref().map_or(0, |e| e.0.sign)).collect();
    let ed = match first_sign_change(&ed_signs) {
        Some((i, j)) => {
            let (ei, ej) = (exact[i].unwrap().0, exact[j].unwrap().0);
            let (x, lo, hi) = refine((grid[i], ei, ei.gap), (grid[j], ej, ej.gap), |g, _| {
                let p = cfg.model_at_g(g).ok()?;
                let e = exact_point(&p, &trunc)?;
                (e.sign != 0).then_some((e, e.gap))
            });
            let photon = |(g, e): (f64, ExactPoint)| exact_ground_photon(&cfg.model_at_g(g).ok()?, &trunc, &e);
            crossing_row("ED", Some(x), g_c1, photon(lo), photon(hi))
        }
        None => crossing_row("ED", None, g_c1, None, None),
    };

    let trial_signs: Vec<i8> = trials.iter().map(|t| t.as_ref().map_or(0, TrialPoint::sign)).collect();
    let css2 = match first_sign_change(&trial_signs) {
        Some((i, j)) => {
            let (ti, tj) = (trials[i].clone().unwrap(), trials[j].clone().unwrap());
            let (gi, gj) = (ti.gap, tj.gap);
            let (x, lo, hi) = refine((grid[i], ti, gi), (grid[j], tj, gj), |g, near| {
                let p = cfg.model_at_g(g).ok()?;
                let t = trial_point(&p, Some(near))?;
                let gap = t.gap;
                Some((t, gap))
            });
            crossing_row("CSS2", Some(x), g_c1, lo.1.ground_photon(), hi.1.ground_photon())
        }
        None => crossing_row("CSS2", None, g_c1, None, None),
    };

    let dir = cfg.out.as_path();
    std::fs::create_dir_all(dir)?;
    write_table(&dir.join("levels.tsv"), &rows)?;
    write_table(&dir.join("crossing.tsv"), &[ed.clone(), css2.clone()])?;
    write_meta(dir, "levels", cfg)?;
    write_text(&dir.join("plot.gp"), PLOT)?;
    Ok(LevelsReport { g_c1, rows, ed, css2 })
}

const PLOT: &str = "# gnuplot script; run `gnuplot plot.gp` inside the output directory
set datafile separator \"\\t\"
set key autotitle columnhead
set xlabel \"g / g_c1\"
set terminal pngcairo size 900,600
set output \"levels.png\"
set ylabel \"E\"
plot \"levels.tsv\" using 2:3 with lines title \"ED even\", \\
     \"levels.tsv\" using 2:4 with lines title \"ED odd\", \\
     \"levels.tsv\" using 2:6 with points title \"CSS2 even\", \\
     \"levels.tsv\" using 2:7 with points title \"CSS2 odd\"
set output \"levels_photon.png\"
set ylabel \"<a^+ a>\"
plot \"levels.tsv\" using 2:9 with lines title \"ED\", \\
     \"levels.tsv\" using 2:10 with points title \"CSS2\"
";
