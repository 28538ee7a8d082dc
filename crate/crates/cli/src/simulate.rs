//! Writes a synthetic community table and its environment block to disk.

use std::path::{Path, PathBuf};

use varboot::synth::{generate_dataset, ScenarioConfig};

use crate::config::{parse_config, to_document};
use crate::csv_io::write_table_csv;
use crate::error::{CliError, Result};
use crate::provenance::Provenance;

pub const SITE_HEADER: &str = "site";

/// Paths written by [`simulate`].
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedFiles {
    pub community: PathBuf,
    pub env: PathBuf,
}

pub fn output_paths(prefix: &Path) -> SimulatedFiles {
    let with = |suffix: &str| {
        let mut s = prefix.as_os_str().to_owned();
        s.push(suffix);
        PathBuf::from(s)
    };
    SimulatedFiles {
        community: with("_community.csv"),
        env: with("_env.csv"),
    }
}

/// Parses a scenario document and writes `<prefix>_community.csv` and
/// `<prefix>_env.csv`.
pub fn simulate(document: &str, source: &Path, prefix: &Path) -> Result<(ScenarioConfig, SimulatedFiles)> {
    let cfg = parse_config(document).map_err(|e| CliError::input(source, e))?;
    let files = simulate_config(&cfg, prefix)?;
    Ok((cfg, files))
}

pub fn simulate_config(cfg: &ScenarioConfig, prefix: &Path) -> Result<SimulatedFiles> {
    let (table, env) = generate_dataset::<f64>(cfg)?;
    let provenance = Provenance::new("simulate", Some(cfg.seed), Some(cfg.replicates), &to_document(cfg));
    let files = output_paths(prefix);
    if let Some(dir) = files.community.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    write_table_csv(
        &files.community,
        SITE_HEADER,
        table.site_ids(),
        table.species_ids(),
        table.values(),
        &provenance,
    )?;
    write_table_csv(
        &files.env,
        SITE_HEADER,
        env.site_ids(),
        env.variable_ids(),
        env.values(),
        &provenance,
    )?;
    Ok(files)
}
