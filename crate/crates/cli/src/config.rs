//! Run configuration: a JSON file overlaid with command-line flags.

use std::path::{Path, PathBuf};

use clap::Args;
use rabi_core::{AnsatzKind, Family, ModelParams, Parity, Truncation};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Every setting a subcommand may read. Energies and couplings are in units
/// of ω.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub delta: f64,
    pub omega: f64,
    pub tau: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub lambda_step: f64,
    /// Couplings for `wavefunction`.
    pub lambdas: Vec<f64>,
    /// Absolute g range for `levels`; defaults to 0.9–1.1 g_c^(1).
    pub g_min: Option<f64>,
    pub g_max: Option<f64>,
    pub g_step: Option<f64>,
    /// Any of `ED`, `CS1`, `CSS1`, `CS2`, `CSS2`.
    pub methods: Vec<String>,
    /// `even`, `odd` or `both`.
    pub parity: String,
    /// Starting Fock truncation; grown automatically when too small.
    pub ntr: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub x_step: f64,
    /// `ED`, `CSS2` or `both`.
    pub source: String,
    /// Anisotropies checked by `verify`.
    pub taus: Vec<f64>,
    /// Random parameter sets per oracle check in `verify`.
    pub samples: usize,
    pub seed: u64,
    pub out: PathBuf,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            delta: 100.0,
            omega: 1.0,
            tau: 1.0,
            lambda_min: 0.0,
            lambda_max: 1.5,
            lambda_step: 0.01,
            lambdas: vec![0.9, 1.1, 1.5],
            g_min: None,
            g_max: None,
            g_step: None,
            methods: ["ED", "CS1", "CSS1", "CS2", "CSS2"].map(String::from).to_vec(),
            parity: "even".into(),
            ntr: 256,
            x_min: -25.0,
            x_max: 25.0,
            x_step: 0.01,
            source: "both".into(),
            taus: vec![1.0, 1.5, 0.5],
            samples: 24,
            seed: 7,
            out: PathBuf::from("out"),
        }
    }
}

/// Flags shared by all subcommands; any flag given wins over the file.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// JSON configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub lambda_min: Option<f64>,
    #[arg(long)]
    pub lambda_max: Option<f64>,
    #[arg(long)]
    pub lambda_step: Option<f64>,
    /// Comma-separated couplings for `wavefunction`.
    #[arg(long, value_delimiter = ',')]
    pub lambdas: Option<Vec<f64>>,
    #[arg(long)]
    pub g_min: Option<f64>,
    #[arg(long)]
    pub g_max: Option<f64>,
    #[arg(long)]
    pub g_step: Option<f64>,
    /// Comma-separated list, e.g. `ED,CSS1,CSS2`.
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<String>>,
    #[arg(long)]
    pub parity: Option<String>,
    #[arg(long)]
    pub ntr: Option<usize>,
    #[arg(long)]
    pub x_min: Option<f64>,
    #[arg(long)]
    pub x_max: Option<f64>,
    #[arg(long)]
    pub x_step: Option<f64>,
    #[arg(long)]
    pub source: Option<String>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

macro_rules! overlay {
    ($cfg:ident, $ov:ident, $($field:ident),*) => {
        $( if let Some(v) = $ov.$field.clone() { $cfg.$field = v; } )*
    };
}

impl Config {
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// File (if any) first, then flags.
    pub fn resolve(ov: &Overrides) -> CliResult<Self> {
        let mut cfg = match &ov.config {
            Some(p) => Self::from_file(p)?,
            None => Self::default(),
        };
        cfg.apply(ov);
        if ov.tau.is_some() {
            cfg.taus = vec![cfg.tau];
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply(&mut self, ov: &Overrides) {
        overlay!(
            self, ov, delta, omega, tau, lambda_min, lambda_max, lambda_step, lambdas, methods, parity, ntr,
            x_min, x_max, x_step, source, samples, seed, out
        );
        if ov.g_min.is_some() {
            self.g_min = ov.g_min;
        }
        if ov.g_max.is_some() {
            self.g_max = ov.g_max;
        }
        if ov.g_step.is_some() {
            self.g_step = ov.g_step;
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        self.model_at_g(0.0)?;
        for (name, step) in [("lambda_step", self.lambda_step), ("x_step", self.x_step)] {
            if step.is_nan() || step <= 0.0 {
                return Err(CliError::Config(format!("{name} must be positive")));
            }
        }
        if self.lambda_max < self.lambda_min || self.x_max < self.x_min {
            return Err(CliError::Config("grid maximum below minimum".into()));
        }
        self.kinds()?;
        self.sources()?;
        Ok(())
    }

    pub fn model_at_g(&self, g: f64) -> CliResult<ModelParams> {
        Ok(ModelParams::new(self.delta, self.omega, g, self.tau)?)
    }

    pub fn model_at_lambda(&self, lambda: f64) -> CliResult<ModelParams> {
        Ok(ModelParams::from_lambda(self.delta, self.omega, self.tau, lambda)?)
    }

    pub fn truncation(&self) -> Truncation {
        Truncation::new(self.ntr)
    }

    pub fn lambda_grid(&self) -> Vec<f64> {
        rabi_core::states::uniform_grid(self.lambda_min, self.lambda_max, self.lambda_step)
    }

    pub fn x_grid(&self) -> Vec<f64> {
        rabi_core::states::uniform_grid(self.x_min, self.x_max, self.x_step)
    }

    pub fn parities(&self) -> CliResult<Vec<Parity>> {
        match self.parity.as_str() {
            "both" => Ok(vec![Parity::Even, Parity::Odd]),
            p => Ok(vec![p.parse()?]),
        }
    }

    /// Requested methods crossed with the requested parities. One-state
    /// families only exist with even parity and are skipped for odd.
    pub fn kinds(&self) -> CliResult<Vec<Method>> {
        let parities = self.parities()?;
        let mut out = Vec::new();
        for name in &self.methods {
            for &parity in &parities {
                let m = if name.eq_ignore_ascii_case("ED") {
                    Method::Exact(parity)
                } else {
                    let family: Family = name.parse()?;
                    if parity == Parity::Odd && !family.two_state() {
                        continue;
                    }
                    Method::Variational(AnsatzKind::new(family, parity)?)
                };
                if !out.contains(&m) {
                    out.push(m);
                }
            }
        }
        if out.is_empty() {
            return Err(CliError::Config("no methods selected".into()));
        }
        Ok(out)
    }

    pub fn sources(&self) -> CliResult<Vec<Source>> {
        match self.source.to_ascii_uppercase().as_str() {
            "ED" => Ok(vec![Source::Exact]),
            "CSS2" => Ok(vec![Source::Css2]),
            "BOTH" => Ok(vec![Source::Exact, Source::Css2]),
            other => Err(CliError::Config(format!("unknown source `{other}`"))),
        }
    }
}

/// A row producer in a scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Lowest state of one parity sector by exact diagonalization.
    Exact(Parity),
    Variational(AnsatzKind),
}

impl Method {
    /// e.g. `ED:even`, `CSS2:odd`.
    pub fn label(&self) -> String {
        match self {
            Method::Exact(p) => format!("ED:{}", p.name()),
            Method::Variational(k) => k.label(),
        }
    }

    /// File stem, e.g. `CSS2_odd`.
    pub fn file_stem(&self) -> String {
        self.label().replace(':', "_")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Exact,
    Css2,
}

impl Source {
    pub fn name(self) -> &'static str {
        match self {
            Source::Exact => "ED",
            Source::Css2 => "CSS2",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let cfg = Config::resolve(&Overrides::default()).unwrap();
        assert_eq!(cfg, Config::default());
        assert_eq!(cfg.lambda_grid().len(), 151);
        assert_eq!(cfg.kinds().unwrap().len(), 5);
    }

    #[test]
    fn flags_win_over_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"delta": 10.0, "tau": 0.5, "methods": ["ED"]}"#).unwrap();
        let ov = Overrides { config: Some(path), delta: Some(3.0), ..Default::default() };
        let cfg = Config::resolve(&ov).unwrap();
        assert_eq!(cfg.delta, 3.0);
        assert_eq!(cfg.tau, 0.5);
        assert_eq!(cfg.methods, vec!["ED".to_string()]);
    }

    #[test]
    fn unknown_keys_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"detla": 10.0}"#).unwrap();
        assert!(Config::resolve(&Overrides { config: Some(path), ..Default::default() }).is_err());
    }

    #[test]
    fn odd_parity_skips_one_state_families() {
        let cfg = Config { parity: "both".into(), ..Default::default() };
        let labels: Vec<String> = cfg.kinds().unwrap().iter().map(Method::label).collect();
        assert_eq!(
            labels,
            ["ED:even", "ED:odd", "CS1:even", "CSS1:even", "CS2:even", "CS2:odd", "CSS2:even", "CSS2:odd"]
        );
    }

    #[test]
    fn bad_values_rejected() {
        for cfg in [
            Config { methods: vec!["XYZ".into()], ..Default::default() },
            Config { parity: "sideways".into(), ..Default::default() },
            Config { omega: 0.0, ..Default::default() },
            Config { lambda_step: 0.0, ..Default::default() },
            Config { source: "nope".into(), ..Default::default() },
        ] {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
    }
}
