//! Spin-x resolved ground-state wavefunctions in position space.

use rabi_core::exactdiag::{solve_lowest, spin_x_projection};
use rabi_core::optimize::solve_ansatz;
use rabi_core::states::position_profile;
use rabi_core::variational::profile_2css;
use rabi_core::{AnsatzKind, Error, Family, ModelParams, OptResult, Parity, Truncation, WavefunctionProfile};
use serde::{Deserialize, Serialize};

use crate::config::{Config, Source};
use crate::error::CliResult;
use crate::scan::write_meta;
use crate::table::{write_table, write_text};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakRow {
    pub source: String,
    pub lambda: f64,
    pub peaks_plus: usize,
    pub peaks_minus: usize,
    /// Grid estimate of the norm.
    pub norm: f64,
    /// `|∫(φ₊ψ₊ + φ₋ψ₋)dx|` against the exact profile at the same coupling.
    pub overlap_with_ed: Option<f64>,
}

#[derive(Serialize)]
struct ProfileRow {
    x: f64,
    phi_plus: f64,
    phi_minus: f64,
}

pub fn exact_profile(params: &ModelParams, trunc: &Truncation, xs: &[f64]) -> CliResult<WavefunctionProfile> {
    let res = solve_lowest(params, trunc, 1)?;
    let proj = spin_x_projection(res.ground());
    Ok(position_profile(&proj.plus, &proj.minus, xs, params.omega))
}

fn optimum(params: &ModelParams, parity: Parity) -> CliResult<OptResult> {
    match solve_ansatz(params, AnsatzKind::new(Family::Css2, parity)?) {
        Ok(r) => Ok(r),
        Err(Error::NoConvergence { best }) => Ok(*best),
        Err(e) => Err(e.into()),
    }
}

/// Profile of the optimized two-state trial function of the lower parity.
pub fn css2_profile(params: &ModelParams, xs: &[f64]) -> CliResult<WavefunctionProfile> {
    let even = optimum(params, Parity::Even)?;
    let (best, parity) = if params.tau < 1.0 {
        let odd = optimum(params, Parity::Odd)?;
        if odd.energy < even.energy {
            (odd, Parity::Odd)
        } else {
            (even, Parity::Even)
        }
    } else {
        (even, Parity::Even)
    };
    Ok(profile_2css(&best.params.as_two(), parity, xs, params.omega)?)
}

/// Writes `profile_<source>_lambda<λ>.tsv` per coupling and source, plus
/// `peaks.tsv`, `meta.json` and `plot.gp`.
pub fn cmd_wavefunction(cfg: &Config) -> CliResult<Vec<PeakRow>> {
    let dir = cfg.out.as_path();
    std::fs::create_dir_all(dir)?;
    let xs = cfg.x_grid();
    let trunc = cfg.truncation();
    let sources = cfg.sources()?;
    let mut peaks = Vec::new();
    let mut files = Vec::new();
    for &lambda in &cfg.lambdas {
        let params = cfg.model_at_lambda(lambda)?;
        let exact = exact_profile(&params, &trunc, &xs)?;
        for &source in &sources {
            let prof = match source {
                Source::Exact => exact.clone(),
                Source::Css2 => css2_profile(&params, &xs)?,
            };
            let rows: Vec<ProfileRow> = (0..xs.len())
                .map(|i| ProfileRow { x: xs[i], phi_plus: prof.phi_plus[i], phi_minus: prof.phi_minus[i] })
                .collect();
            let name = format!("profile_{}_lambda{}.tsv", source.name(), lambda);
            write_table(&dir.join(&name), &rows)?;
            files.push(name);
            peaks.push(PeakRow {
                source: source.name().into(),
                lambda,
                peaks_plus: prof.peaks_plus,
                peaks_minus: prof.peaks_minus,
                norm: prof.norm(),
                overlap_with_ed: match source {
                    Source::Exact => None,
                    Source::Css2 => Some(prof.overlap(&exact).abs()),
                },
            });
        }
    }
    write_table(&dir.join("peaks.tsv"), &peaks)?;
    write_meta(dir, "wavefunction", cfg)?;
    write_text(&dir.join("plot.gp"), &plot_script(&files))?;
    Ok(peaks)
}

fn plot_script(files: &[String]) -> String {
    let mut s = String::from(
        "# gnuplot script; run `gnuplot plot.gp` inside the output directory\n\
         set datafile separator \"\\t\"\nset key autotitle columnhead\nset xlabel \"x\"\n\
         set terminal pngcairo size 900,600\n",
    );
    for f in files {
        let png = f.trim_end_matches(".tsv");
        s.push_str(&format!(
            "set output \"{png}.png\"\nplot \"{f}\" using 1:2 with lines title \"phi_+x\", \"{f}\" using 1:3 with lines title \"phi_-x\"\n"
        ));
    }
    s
}
