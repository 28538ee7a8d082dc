//! Bootstrapped two-block variance partitioning of a real dataset.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use varboot::ordination::{log1p_transform, varpart, PartitionResult};
use varboot::resample::{bootstrap_statistic, BootstrapSummary};
use varboot::{CommunityTable64, Matrix64, Method, PredictorBlock64};

use crate::csv_io::read_table_csv;
use crate::error::{CliError, Result};
use crate::provenance::{sha256_hex, Provenance};

pub const DEFAULT_BOOTSTRAP: usize = 1000;

/// Names of the bootstrapped statistics, in report order.
pub const STATISTICS: [&str; 6] = [
    "env_pure",
    "spatial_including_shared",
    "residual",
    "frac_pure_env",
    "frac_shared",
    "frac_pure_spatial",
];

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisSettings {
    pub method: Method,
    pub bootstrap: usize,
    pub seed: u64,
    pub log1p: bool,
    pub timing: bool,
}

impl AnalysisSettings {
    /// `ln(1 + N)` is applied by default for CCA only.
    pub fn new(method: Method, bootstrap: usize, seed: u64) -> Self {
        Self {
            method,
            bootstrap,
            seed,
            log1p: method == Method::Cca,
            timing: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    pub community: PathBuf,
    pub env: PathBuf,
    pub spatial: PathBuf,
    /// Expand a two-column coordinate file into `x, y, x², xy, y²`.
    pub trend_surface: bool,
    pub settings: AnalysisSettings,
}

/// Three-way split: purely environmental, spatial (including the shared
/// part), and unexplained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rollup {
    pub env_pure: f64,
    pub spatial_including_shared: f64,
    pub residual: f64,
}

impl Rollup {
    pub fn from_partition(p: &PartitionResult<f64>) -> Self {
        let env_pure = p.r2_xw - p.r2_w;
        Self {
            env_pure,
            spatial_including_shared: p.r2_xw - env_pure,
            residual: 1.0 - p.r2_xw,
        }
    }

    pub fn sum(&self) -> f64 {
        self.env_pure + self.spatial_including_shared + self.residual
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartitionFractions {
    pub frac_pure_env: f64,
    pub frac_shared: f64,
    pub frac_pure_spatial: f64,
    pub frac_residual: f64,
    pub r2_env: f64,
    pub r2_spatial: f64,
    pub r2_combined: f64,
}

impl From<&PartitionResult<f64>> for PartitionFractions {
    fn from(p: &PartitionResult<f64>) -> Self {
        Self {
            frac_pure_env: p.frac_pure_x,
            frac_shared: p.frac_shared,
            frac_pure_spatial: p.frac_pure_w,
            frac_residual: p.frac_residual,
            r2_env: p.r2_x,
            r2_spatial: p.r2_w,
            r2_combined: p.r2_xw,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRecord {
    pub statistic: String,
    pub replicates: usize,
    pub mean: f64,
    pub sd: f64,
    pub relative_uncertainty: Option<f64>,
    pub ci95_low: f64,
    pub ci95_high: f64,
}

impl From<&BootstrapSummary<f64>> for SummaryRecord {
    fn from(s: &BootstrapSummary<f64>) -> Self {
        Self {
            statistic: s.statistic_name.clone(),
            replicates: s.replicate_count,
            mean: s.mean,
            sd: s.sd,
            // JSON has no infinity; a zero mean is reported as null
            relative_uncertainty: s.relative_uncertainty.is_finite().then_some(s.relative_uncertainty),
            ci95_low: s.ci95_low,
            ci95_high: s.ci95_high,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub dataset_name: String,
    pub method: String,
    pub log1p: bool,
    pub n_sites: usize,
    pub n_species: usize,
    pub env_variables: Vec<String>,
    pub spatial_variables: Vec<String>,
    /// Point estimates on the full dataset.
    pub fractions: Rollup,
    pub partition: PartitionFractions,
    /// One summary per entry of [`STATISTICS`].
    pub bootstrap: Vec<SummaryRecord>,
    pub redraws: usize,
    pub seed: u64,
    #[serde(rename = "M")]
    pub replicates: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_seconds: Option<f64>,
    pub provenance: Provenance,
}

impl AnalysisReport {
    pub fn summary(&self, statistic: &str) -> Option<&SummaryRecord> {
        self.bootstrap.iter().find(|s| s.statistic == statistic)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self, runtime_seconds: f64) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{} ({} sites x {} species), {}{}, M = {}, seed = {}",
            self.dataset_name,
            self.n_sites,
            self.n_species,
            self.method.to_uppercase(),
            if self.log1p { " on ln(1+N)" } else { "" },
            self.replicates,
            self.seed
        );
        let rows = [
            ("environment (pure)", self.fractions.env_pure, "env_pure"),
            (
                "spatial (incl. shared)",
                self.fractions.spatial_including_shared,
                "spatial_including_shared",
            ),
            ("unexplained", self.fractions.residual, "residual"),
        ];
        for (label, point, key) in rows {
            let b = self.summary(key).expect("rollup summaries present");
            let rel = b
                .relative_uncertainty
                .map_or_else(|| "n/a".to_string(), |r| format!("{:.1}%", 100.0 * r));
            let _ = writeln!(
                s,
                "  {label:<24} {:>6.1}%  (bootstrap mean {:.1}%, 95% CI [{:.1}%; {:.1}%], SD {:.2}%, relative uncertainty {rel})",
                100.0 * point,
                100.0 * b.mean,
                100.0 * b.ci95_low,
                100.0 * b.ci95_high,
                100.0 * b.sd,
            );
        }
        let _ = writeln!(
            s,
            "  partition: pure env {:.4}, shared {:.4}, pure spatial {:.4}, residual {:.4}",
            self.partition.frac_pure_env,
            self.partition.frac_shared,
            self.partition.frac_pure_spatial,
            self.partition.frac_residual
        );
        if self.redraws > 0 {
            let _ = writeln!(s, "  {} degenerate resamples were redrawn", self.redraws);
        }
        let _ = writeln!(s, "  runtime: {runtime_seconds:.2} s");
        s
    }
}

/// Second-order trend surface `x, y, x², xy, y²` of a coordinate block.
pub fn trend_surface(coords: &PredictorBlock64) -> varboot::Result<PredictorBlock64> {
    if coords.n_variables() != 2 {
        return Err(varboot::Error::InvalidInput(format!(
            "trend surface needs exactly 2 coordinate columns, got {}",
            coords.n_variables()
        )));
    }
    let x = coords.values().col(0);
    let y = coords.values().col(1);
    let sq = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(p, q)| p * q).collect() };
    let cols = [x.to_vec(), y.to_vec(), sq(x, x), sq(x, y), sq(y, y)];
    let (nx, ny) = (&coords.variable_ids()[0], &coords.variable_ids()[1]);
    let names = vec![
        nx.clone(),
        ny.clone(),
        format!("{nx}^2"),
        format!("{nx}*{ny}"),
        format!("{ny}^2"),
    ];
    let values = Matrix64::from_columns(coords.n_sites(), &cols)?;
    PredictorBlock64::new(coords.name(), coords.site_ids().to_vec(), names, values)
}

fn check_alignment(table: &CommunityTable64, block: &PredictorBlock64, path: &Path) -> Result<()> {
    let a = table.site_ids();
    let b = block.site_ids();
    if a == b {
        return Ok(());
    }
    let mut msg = String::new();
    if a.len() != b.len() {
        let _ = write!(msg, "{} sites vs {} in the community table; ", b.len(), a.len());
    }
    let mismatches: Vec<String> = a
        .iter()
        .zip(b)
        .enumerate()
        .filter(|(_, (x, y))| x != y)
        .map(|(i, (x, y))| format!("row {}: '{y}' (community has '{x}')", i + 1))
        .collect();
    let shown = mismatches.len().min(10);
    let _ = write!(msg, "site labels do not match: {}", mismatches[..shown].join(", "));
    if mismatches.len() > shown {
        let _ = write!(msg, ", ... ({} mismatches)", mismatches.len());
    }
    Err(CliError::input(path, msg))
}

/// Runs the analysis on in-memory data.
pub fn analyze_data(
    dataset_name: &str,
    table: &CommunityTable64,
    env: &PredictorBlock64,
    spatial: &PredictorBlock64,
    settings: &AnalysisSettings,
    canonical_inputs: &str,
) -> Result<AnalysisReport> {
    let start = Instant::now();
    check_alignment(table, env, Path::new(env.name()))?;
    check_alignment(table, spatial, Path::new(spatial.name()))?;
    if settings.bootstrap < 2 {
        return Err(CliError::Usage("--bootstrap must be at least 2".into()));
    }

    let response = if settings.log1p {
        CommunityTable64::new(
            table.site_ids().to_vec(),
            table.species_ids().to_vec(),
            log1p_transform(table.values())?,
        )?
    } else {
        table.clone()
    };
    let method = settings.method;
    let evaluate = |t: &CommunityTable64, blocks: &[PredictorBlock64]| -> varboot::Result<Vec<f64>> {
        let t = match method {
            Method::Cca => t
                .drop_empty_species()
                .ok_or_else(|| varboot::Error::InvalidInput("resample has no species left".into()))?,
            Method::Rda => t.clone(),
        };
        let p = varpart(method, t.values(), &blocks[0], &blocks[1])?;
        let r = Rollup::from_partition(&p);
        Ok(vec![
            r.env_pure,
            r.spatial_including_shared,
            r.residual,
            p.frac_pure_x,
            p.frac_shared,
            p.frac_pure_w,
        ])
    };

    let point = varpart(method, response.values(), env, spatial)?;
    let blocks = [env.clone(), spatial.clone()];
    let run = bootstrap_statistic(
        &response,
        &blocks,
        &STATISTICS,
        evaluate,
        settings.bootstrap,
        settings.seed,
    )?;

    let canonical = format!(
        "analyze\nmethod={}\nlog1p={}\nbootstrap={}\nseed={}\n{canonical_inputs}",
        method, settings.log1p, settings.bootstrap, settings.seed
    );
    let runtime = start.elapsed().as_secs_f64();
    Ok(AnalysisReport {
        dataset_name: dataset_name.to_string(),
        method: method.to_string(),
        log1p: settings.log1p,
        n_sites: table.n_sites(),
        n_species: table.n_species(),
        env_variables: env.variable_ids().to_vec(),
        spatial_variables: spatial.variable_ids().to_vec(),
        fractions: Rollup::from_partition(&point),
        partition: PartitionFractions::from(&point),
        bootstrap: run.summaries.iter().map(SummaryRecord::from).collect(),
        redraws: run.redraws,
        seed: settings.seed,
        replicates: settings.bootstrap,
        runtime_seconds: settings.timing.then_some(runtime),
        provenance: Provenance::new(
            "analyze",
            Some(settings.seed),
            Some(settings.bootstrap),
            &canonical,
        ),
    })
}

fn file_digest(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(sha256_hex(&bytes))
}

/// Reads the three CSV files and runs [`analyze_data`].
pub fn analyze(opts: &AnalyzeOptions) -> Result<AnalysisReport> {
    let table = read_table_csv(&opts.community)?.into_community(&opts.community)?;
    let env = read_table_csv(&opts.env)?.into_block("env", &opts.env)?;
    let mut spatial = read_table_csv(&opts.spatial)?.into_block("spatial", &opts.spatial)?;
    check_alignment(&table, &env, &opts.env)?;
    check_alignment(&table, &spatial, &opts.spatial)?;
    if opts.trend_surface {
        spatial = trend_surface(&spatial).map_err(|e| CliError::input(&opts.spatial, e.to_string()))?;
    }
    let name = opts
        .community
        .file_stem()
        .map_or_else(|| "dataset".to_string(), |s| s.to_string_lossy().into_owned());
    let canonical = format!(
        "community={}\nenv={}\nspatial={}\ntrend_surface={}\n",
        file_digest(&opts.community)?,
        file_digest(&opts.env)?,
        file_digest(&opts.spatial)?,
        opts.trend_surface
    );
    analyze_data(&name, &table, &env, &spatial, &opts.settings, &canonical)
}
