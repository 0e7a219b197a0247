//! Drivers behind the `rabi` command: λ scans, the level crossing of the
//! anisotropic model, position-space wavefunctions and a self-check suite.
//! Each writes tab-separated tables, a `meta.json` sidecar and a gnuplot
//! script into the output directory.

pub mod config;
pub mod error;
pub mod levels;
pub mod scan;
pub mod table;
pub mod verify;
pub mod wavefunction;

pub use config::{Config, Method, Overrides, Source};
pub use error::{CliError, CliResult};
pub use levels::cmd_levels;
pub use scan::cmd_scan;
pub use table::ScanRow;
pub use verify::cmd_verify;
pub use wavefunction::cmd_wavefunction;
