//! Command-line driver for the interferometer simulations: config handling,
//! experiment runners and CSV/JSON output.

pub mod config;
pub mod error;
pub mod experiment;
pub mod output;

use std::path::{Path, PathBuf};

pub use config::{Kind, RawConfig, RunConfig, FORMAT_VERSION};
pub use error::{Category, CliError};

/// Validates, computes and writes. Nothing is written unless the whole run
/// succeeds.
pub fn execute(cfg: &RunConfig, out: &Path) -> Result<PathBuf, CliError> {
    if out.extension().is_some_and(|e| e == "json") {
        return Err(CliError::validation(
            "--out names the CSV; the sidecar takes the same name with .json",
        ));
    }
    let report = match cfg.count("parallel") {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CliError::validation(format!("thread pool: {e}")))?
            .install(|| experiment::run(cfg)),
        None => experiment::run(cfg),
    }?;
    output::write(cfg, &report, out)
}
