//! Tab-separated tables with a header row.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliResult;

/// One method at one coupling. Fields a method does not produce stay empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub lambda: f64,
    pub g: f64,
    pub method: String,
    pub energy: Option<f64>,
    /// `energy / (Δω)`
    pub energy_scaled: Option<f64>,
    pub mean_photon: Option<f64>,
    pub beta1: Option<f64>,
    pub beta2: Option<f64>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub xi: Option<f64>,
    pub converged: bool,
}

impl ScanRow {
    pub fn empty(lambda: f64, g: f64, method: String) -> Self {
        Self {
            lambda,
            g,
            method,
            energy: None,
            energy_scaled: None,
            mean_photon: None,
            beta1: None,
            beta2: None,
            c1: None,
            c2: None,
            xi: None,
            converged: false,
        }
    }
}

pub fn write_table<T: Serialize>(path: &Path, rows: &[T]) -> CliResult<()> {
    let mut w = csv::WriterBuilder::new().delimiter(b'\t').from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_table<T: DeserializeOwned>(path: &Path) -> CliResult<Vec<T>> {
    let mut r = csv::ReaderBuilder::new().delimiter(b'\t').from_path(path)?;
    let mut rows = Vec::new();
    for rec in r.deserialize() {
        rows.push(rec?);
    }
    Ok(rows)
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    let mut f = File::create(path)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn opt() -> impl Strategy<Value = Option<f64>> {
        prop_oneof![Just(None), any::<f64>().prop_filter("finite", |v| v.is_finite()).prop_map(Some)]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn rows_round_trip(
            lambda in -10.0..10.0f64, g in 0.0..1e4f64, e in opt(), n in opt(), b in opt(), xi in opt(),
            conv in any::<bool>()
        ) {
            let row = ScanRow {
                lambda, g, method: "CSS2:even".into(), energy: e, energy_scaled: e.map(|v| v / 7.0),
                mean_photon: n, beta1: b, beta2: b.map(|v| -v), c1: xi, c2: None, xi, converged: conv,
            };
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("t.tsv");
            write_table(&path, std::slice::from_ref(&row)).unwrap();
            let back: Vec<ScanRow> = read_table(&path).unwrap();
            prop_assert_eq!(back, vec![row]);
        }
    }

    #[test]
    fn missing_fields_are_empty_cells() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.tsv");
        write_table(&path, &[ScanRow::empty(0.5, 2.5, "ED:even".into())]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let line = text.lines().nth(1).unwrap();
        assert_eq!(line, "0.5\t2.5\tED:even\t\t\t\t\t\t\t\t\tfalse");
    }
}
