use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rabi_cli::{cmd_levels, cmd_scan, cmd_verify, cmd_wavefunction, CliResult, Config, Overrides};

#[derive(Parser)]
#[command(name = "rabi", version, about = "Variational and exact ground states of the anisotropic Rabi model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Energies, photon numbers and trial parameters along a λ grid.
    Scan(Overrides),
    /// Even/odd levels and their crossing around g_c^(1) (needs τ < 1).
    Levels(Overrides),
    /// Spin-resolved position wavefunctions and their peak counts.
    Wavefunction(Overrides),
    /// Closed forms against Fock-space oracles, bounds and stationarity.
    Verify(Overrides),
}

fn run(cli: Cli) -> CliResult<bool> {
    match cli.command {
        Command::Scan(ov) => {
            let cfg = Config::resolve(&ov)?;
            let rows = cmd_scan(&cfg)?;
            let bad = rows.iter().filter(|r| !r.converged).count();
            println!("wrote {} rows to {} ({} unconverged)", rows.len(), cfg.out.display(), bad);
        }
        Command::Levels(ov) => {
            let cfg = Config::resolve(&ov)?;
            let rep = cmd_levels(&cfg)?;
            println!("g_c1 = {}", rep.g_c1);
            for c in [&rep.ed, &rep.css2] {
                match c.g_ratio {
                    Some(r) => println!(
                        "{:<4} crossing at g/g_c1 = {:.6}, photon jump {}",
                        c.source,
                        r,
                        c.photon_jump.map_or("n/a".into(), |j| format!("{j:.4}"))
                    ),
                    None => println!("{:<4} no crossing on the grid", c.source),
                }
            }
        }
        Command::Wavefunction(ov) => {
            let cfg = Config::resolve(&ov)?;
            for p in cmd_wavefunction(&cfg)? {
                println!(
                    "{:<4} lambda={} peaks(+x)={} peaks(-x)={} norm={:.6}{}",
                    p.source,
                    p.lambda,
                    p.peaks_plus,
                    p.peaks_minus,
                    p.norm,
                    p.overlap_with_ed.map_or(String::new(), |o| format!(" overlap={o:.6}"))
                );
            }
        }
        Command::Verify(ov) => {
            let cfg = Config::resolve(&ov)?;
            let rep = cmd_verify(&cfg)?;
            for l in &rep.lines {
                println!("{}", l.render());
            }
            return Ok(rep.all_passed());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
