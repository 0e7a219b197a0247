//! Energy, photon number and trial parameters along a λ grid.

use std::collections::HashMap;
use std::path::Path;

use rabi_core::exactdiag::{mean_photon_ed, solve_parity_sector};
use rabi_core::optimize::{solve_ansatz_with, SolveOptions};
use rabi_core::variational::{mean_photon_1css, mean_photon_2css};
use rabi_core::{
    Ansatz1Params, Ansatz2Params, AnsatzKind, AnsatzParams, Error, Family, ModelParams, OptResult, Parity, Truncation,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Config, Method};
use crate::error::CliResult;
use crate::table::{read_table, write_table, write_text, ScanRow};

/// Sidecar written next to every dataset.
#[derive(Serialize)]
pub struct Meta<'a> {
    pub command: &'a str,
    pub version: &'a str,
    pub config: &'a Config,
}

pub fn write_meta(dir: &Path, command: &str, cfg: &Config) -> CliResult<()> {
    let meta = Meta { command, version: env!("CARGO_PKG_VERSION"), config: cfg };
    write_text(&dir.join("meta.json"), &(serde_json::to_string_pretty(&meta)? + "\n"))
}

pub fn exact_row(params: &ModelParams, trunc: &Truncation, parity: Parity, lambda: f64) -> ScanRow {
    let mut row = ScanRow::empty(lambda, params.g, Method::Exact(parity).label());
    if let Ok(res) = solve_parity_sector(params, trunc, parity, 1) {
        let e = res.ground_energy();
        row.energy = Some(e);
        row.energy_scaled = Some(e / (params.delta * params.omega));
        row.mean_photon = Some(mean_photon_ed(res.ground()));
        row.converged = true;
    }
    row
}

pub fn variational_row(params: &ModelParams, res: &OptResult, lambda: f64) -> ScanRow {
    let mut row = ScanRow::empty(lambda, params.g, res.kind.label());
    row.energy = Some(res.energy);
    row.energy_scaled = Some(res.energy / (params.delta * params.omega));
    row.converged = res.converged;
    match res.params {
        AnsatzParams::One(a) => {
            row.mean_photon = Some(mean_photon_1css(&a));
            row.beta1 = Some(a.beta);
            row.xi = Some(a.xi);
        }
        AnsatzParams::Two(a) => {
            row.mean_photon = mean_photon_2css(&a).ok();
            row.beta1 = Some(a.beta1);
            row.beta2 = Some(a.beta2);
            row.c1 = Some(a.c1);
            row.c2 = Some(a.c2);
            row.xi = Some(a.xi);
        }
    }
    row
}

/// Trial parameters stored in a row, if it has any.
pub fn row_params(row: &ScanRow) -> Option<AnsatzParams> {
    match (row.c1, row.c2, row.beta1, row.beta2, row.xi) {
        (Some(c1), Some(c2), Some(beta1), Some(beta2), Some(xi)) => {
            Some(AnsatzParams::Two(Ansatz2Params { c1, c2, beta1, beta2, xi }))
        }
        (None, _, Some(beta), None, Some(xi)) => Some(AnsatzParams::One(Ansatz1Params { beta, xi })),
        _ => None,
    }
}

/// Optimizes one kind, keeping the best point even when the convergence
/// test fails.
pub fn solve_row(params: &ModelParams, kind: AnsatzKind, opts: &SolveOptions, lambda: f64) -> ScanRow {
    match solve_ansatz_with(params, kind, opts) {
        Ok(r) => variational_row(params, &r, lambda),
        Err(Error::NoConvergence { best }) => variational_row(params, &best, lambda),
        Err(_) => ScanRow::empty(lambda, params.g, kind.label()),
    }
}

fn family_rank(f: Family) -> usize {
    Family::ALL.iter().position(|&x| x == f).unwrap()
}

/// Rows already on disk for `method`, keyed by the exact λ value.
fn existing_rows(dir: &Path, method: &Method) -> CliResult<HashMap<u64, ScanRow>> {
    let path = dir.join(format!("{}.tsv", method.file_stem()));
    if !path.exists() {
        return Ok(HashMap::new());
    }
    let rows: Vec<ScanRow> = read_table(&path)?;
    Ok(rows.into_iter().filter(|r| r.method == method.label()).map(|r| (r.lambda.to_bits(), r)).collect())
}

/// Runs the scan described by `cfg`, reusing rows already present in the
/// output directory, and writes `<method>.tsv`, `combined.tsv`, `meta.json`
/// and `plot.gp`. Returns the combined rows.
pub fn cmd_scan(cfg: &Config) -> CliResult<Vec<ScanRow>> {
    let dir = cfg.out.as_path();
    std::fs::create_dir_all(dir)?;
    let methods = cfg.kinds()?;
    let grid = cfg.lambda_grid();
    let models: Vec<ModelParams> = grid.iter().map(|&l| cfg.model_at_lambda(l)).collect::<CliResult<_>>()?;
    let trunc = cfg.truncation();

    let mut table: HashMap<Method, Vec<ScanRow>> = HashMap::new();
    let mut known: HashMap<Method, HashMap<u64, ScanRow>> = HashMap::new();
    for m in &methods {
        known.insert(*m, existing_rows(dir, m)?);
    }

    for m in &methods {
        if let Method::Exact(parity) = *m {
            let have = &known[m];
            let rows: Vec<ScanRow> = grid
                .par_iter()
                .zip(models.par_iter())
                .map(|(&l, p)| match have.get(&l.to_bits()) {
                    Some(r) => r.clone(),
                    None => exact_row(p, &trunc, parity, l),
                })
                .collect();
            table.insert(*m, rows);
        }
    }

    // Variational kinds in nesting order so that smaller families seed larger
    // ones at the same coupling; each kind is warm-started along the grid.
    let mut kinds: Vec<AnsatzKind> = methods
        .iter()
        .filter_map(|m| match m {
            Method::Variational(k) => Some(*k),
            Method::Exact(_) => None,
        })
        .collect();
    kinds.sort_by_key(|k| (family_rank(k.family), k.parity == Parity::Odd));
    let mut warm: HashMap<AnsatzKind, AnsatzParams> = HashMap::new();
    for (&lambda, params) in grid.iter().zip(&models) {
        let mut here: Vec<(AnsatzKind, AnsatzParams)> = Vec::new();
        for &kind in &kinds {
            let m = Method::Variational(kind);
            let row = match known[&m].get(&lambda.to_bits()) {
                Some(r) => r.clone(),
                None => {
                    let extra = here
                        .iter()
                        .filter(|(k, _)| {
                            family_rank(k.family) < family_rank(kind.family)
                                || (k.family == kind.family && k.parity != kind.parity)
                        })
                        .map(|(_, p)| *p)
                        .collect();
                    let opts = SolveOptions { warm_start: warm.get(&kind).copied(), extra_seeds: extra, ..Default::default() };
                    solve_row(params, kind, &opts, lambda)
                }
            };
            if let Some(p) = row_params(&row) {
                here.push((kind, p));
                warm.insert(kind, p);
            }
            table.entry(m).or_default().push(row);
        }
    }

    let mut combined = Vec::new();
    for m in &methods {
        let rows = &table[m];
        write_table(&dir.join(format!("{}.tsv", m.file_stem())), rows)?;
    }
    // interleave the per-method columns λ by λ
    let mut columns: Vec<_> = methods.iter().map(|m| table[m].iter()).collect();
    for _ in &grid {
        combined.extend(columns.iter_mut().filter_map(Iterator::next).cloned());
    }
    write_table(&dir.join("combined.tsv"), &combined)?;
    write_meta(dir, "scan", cfg)?;
    write_text(&dir.join("plot.gp"), &plot_script(&methods))?;
    Ok(combined)
}

fn plot_script(methods: &[Method]) -> String {
    let stems: Vec<String> = methods.iter().map(Method::file_stem).collect();
    let list = stems.join(" ");
    let mut s = String::new();
    s.push_str("# gnuplot script; run `gnuplot plot.gp` inside the output directory\n");
    s.push_str("set datafile separator \"\\t\"\nset key autotitle columnhead\nset xlabel \"lambda\"\n");
    s.push_str("set terminal pngcairo size 900,600\n");
    s.push_str(&format!("files = \"{list}\"\n"));
    s.push_str("set output \"energy.png\"\nset ylabel \"E / (Delta omega)\"\n");
    s.push_str("plot for [f in files] f.\".tsv\" using 1:5 with lines title f\n");
    s.push_str("set output \"photon.png\"\nset ylabel \"<a^+ a>\"\n");
    s.push_str("plot for [f in files] f.\".tsv\" using 1:6 with lines title f\n");
    if let Some(stem) = stems.iter().find(|s| s.starts_with("CSS2")) {
        s.push_str("set output \"css2_parameters.png\"\nset ylabel \"parameter\"\n");
        s.push_str(&format!(
            "plot \"{stem}.tsv\" using 1:9 with lines title \"C1\", \\\n     \"{stem}.tsv\" using 1:10 with lines title \"C2\", \\\n     \"{stem}.tsv\" using 1:7 with lines title \"beta1\", \\\n     \"{stem}.tsv\" using 1:8 with lines title \"beta2\", \\\n     \"{stem}.tsv\" using 1:11 with lines title \"xi\"\n"
        ));
    }
    s
}
