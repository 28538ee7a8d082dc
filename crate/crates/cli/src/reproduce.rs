//! Re-runs the simulation studies and writes tidy CSV, SVG and a JSON of
//! trend checks.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use varboot::experiments::{
    bootstrap_validation, cca_validation, optimum_distance_cells, pairs_in_band, pearson_r,
    run_replicated_scenario, sample_size_cells, sampling_range_cells, spearman_rho, y2_values,
    y_max_values, CcaValidationOptions, CcaValidationRow, ScenarioOutcome, NOISE_LEVELS,
    SAMPLE_SIZES, VALIDATION_TABLES,
};
use varboot::synth::ScenarioConfig;
use rayon::prelude::*;

use crate::error::{CliError, Result};
use crate::provenance::Provenance;
use crate::svg::{line_chart, scatter_loglog, Point, Series};

/// Noise level at which the trend checks are evaluated.
pub const CHECK_NOISE: f64 = 0.01;
pub const TREND_THRESHOLD: f64 = -0.9;
pub const FIG5_BAND: (f64, f64) = (0.03, 1.0);
pub const FIG5_MIN_R: f64 = 0.85;
pub const FIG6_MIN_R: f64 = 0.9;
pub const FIG6_SPAN: (f64, f64) = (0.01, 0.25);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
}

impl Figure {
    pub const ALL: [Figure; 5] = [Figure::Fig2, Figure::Fig3, Figure::Fig4, Figure::Fig5, Figure::Fig6];

    pub fn as_str(self) -> &'static str {
        match self {
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
            Figure::Fig6 => "fig6",
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Figure {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Figure::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| format!("unknown figure '{s}' (expected fig2, fig3, fig4, fig5 or fig6)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scale {
    #[default]
    Desk,
    Paper,
}

impl Scale {
    pub fn replicates(self) -> usize {
        match self {
            Scale::Desk => 200,
            Scale::Paper => 1000,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Scale::Desk => "desk",
            Scale::Paper => "paper",
        }
    }
}

impl FromStr for Scale {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "desk" => Ok(Scale::Desk),
            "paper" => Ok(Scale::Paper),
            _ => Err(format!("unknown scale '{s}' (expected desk or paper)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

impl Check {
    fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            passed: value <= threshold,
            value,
            threshold,
            detail: format!("{value:.4} <= {threshold}"),
        }
    }

    fn at_least(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            passed: value >= threshold,
            value,
            threshold,
            detail: format!("{value:.4} >= {threshold}"),
        }
    }

    fn strictly_above(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            passed: value > threshold,
            value,
            threshold,
            detail: format!("{value:.4} > {threshold}"),
        }
    }
}

/// Everything a reproduce run emits, before it touches the disk.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureRun {
    pub figure: Figure,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub svg: String,
    pub checks: Vec<Check>,
    pub stats: BTreeMap<String, f64>,
}

impl FigureRun {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed_checks(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub figure: String,
    pub scale: String,
    pub seed: u64,
    #[serde(rename = "M")]
    pub replicates: usize,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub stats: BTreeMap<String, f64>,
    pub provenance: Provenance,
}

fn base_config(seed: u64, replicates: usize) -> ScenarioConfig {
    let mut c = ScenarioConfig::two_species(ScenarioConfig::DEFAULT_Y2_OPT, seed);
    c.replicates = replicates;
    c
}

fn num(v: f64) -> String {
    v.to_string()
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, num)
}

const SWEEP_HEADER: [&str; 10] = [
    "sweep",
    "n_sites",
    "y_max",
    "y2_opt",
    "sigma_noise",
    "replicates",
    "observed_mean_r2",
    "observed_sd",
    "observed_relative_error",
    "bootstrap_relative_error",
];

fn sweep_row(sweep: &str, o: &ScenarioOutcome) -> Vec<String> {
    vec![
        sweep.to_string(),
        o.config.n_sites.to_string(),
        num(o.config.y_max),
        num(o.config.niches[1].y_opt),
        num(o.config.sigma_noise),
        o.replicate_count().to_string(),
        num(o.observed_mean_r2),
        num(o.observed_sd),
        num(o.observed_relative_error),
        opt(o.bootstrap_relative_error),
    ]
}

#[derive(Clone, Copy)]
struct SweepAxis {
    sweep: &'static str,
    x_label: &'static str,
    log_x: bool,
    param: fn(&ScenarioConfig) -> f64,
}

fn sweep_axis(figure: Figure) -> SweepAxis {
    match figure {
        Figure::Fig2 => SweepAxis {
            sweep: "sample_size",
            x_label: "number of sites n",
            log_x: true,
            param: |c| c.n_sites as f64,
        },
        Figure::Fig3 => SweepAxis {
            sweep: "sampling_range",
            x_label: "sampling range maximum y_max",
            log_x: false,
            param: |c| c.y_max,
        },
        _ => SweepAxis {
            sweep: "optimum_distance",
            x_label: "optimum of species 2 along y",
            log_x: false,
            param: |c| c.niches[1].y_opt,
        },
    }
}

fn sweep_cells(figure: Figure, base: &ScenarioConfig) -> Vec<ScenarioConfig> {
    match figure {
        Figure::Fig2 => sample_size_cells(base, &SAMPLE_SIZES, &NOISE_LEVELS),
        Figure::Fig3 => sampling_range_cells(base, &y_max_values(), &NOISE_LEVELS),
        _ => optimum_distance_cells(base, &y2_values(), &NOISE_LEVELS),
    }
}

fn noise_label(noise: f64) -> String {
    format!("noise {noise}")
}

fn trend_stats(axis: SweepAxis, outcomes: &[ScenarioOutcome], stats: &mut BTreeMap<String, f64>) -> Result<Option<f64>> {
    let mut at_check = None;
    for &noise in &NOISE_LEVELS {
        let cell: Vec<&ScenarioOutcome> = outcomes.iter().filter(|o| o.config.sigma_noise == noise).collect();
        let xs: Vec<f64> = cell.iter().map(|o| (axis.param)(&o.config)).collect();
        let errs: Vec<f64> = cell.iter().map(|o| o.observed_relative_error).collect();
        let rho = spearman_rho(&xs, &errs)?;
        stats.insert(format!("spearman_relative_error_noise_{noise}"), rho);
        if noise == CHECK_NOISE {
            at_check = Some(rho);
        }
    }
    Ok(at_check)
}

fn run_sweep(figure: Figure, seed: u64, replicates: usize) -> Result<FigureRun> {
    let axis = sweep_axis(figure);
    let cells = sweep_cells(figure, &base_config(seed, replicates));
    let outcomes = cells
        .par_iter()
        .map(run_replicated_scenario)
        .collect::<varboot::Result<Vec<_>>>()?;

    let mut stats = BTreeMap::new();
    let rho = trend_stats(axis, &outcomes, &mut stats)?
        .ok_or_else(|| CliError::Usage("check noise level missing from sweep".into()))?;
    let mut checks = vec![Check::at_most(
        &format!("{}: relative error decreases (Spearman, noise {CHECK_NOISE})", axis.sweep),
        rho,
        TREND_THRESHOLD,
    )];
    if figure == Figure::Fig3 {
        let mean_at = |v: f64| {
            outcomes
                .iter()
                .find(|o| o.config.sigma_noise == CHECK_NOISE && o.config.y_max == v)
                .map_or(f64::NAN, |o| o.observed_mean_r2)
        };
        let (narrow, wide) = (mean_at(0.1), mean_at(1.0));
        stats.insert("mean_r2_y_max_0.1".into(), narrow);
        stats.insert("mean_r2_y_max_1".into(), wide);
        checks.push(Check::strictly_above(
            "sampling_range: mean R2 at y_max = 1 exceeds mean at y_max = 0.1",
            wide - narrow,
            0.0,
        ));
    }

    let series: Vec<Series> = NOISE_LEVELS
        .iter()
        .map(|&noise| Series {
            name: noise_label(noise),
            points: outcomes
                .iter()
                .filter(|o| o.config.sigma_noise == noise)
                .map(|o| Point {
                    x: (axis.param)(&o.config),
                    y: o.observed_mean_r2,
                    err: o.observed_sd,
                })
                .collect(),
        })
        .collect();
    let svg = line_chart(
        &format!("{}: adjusted R2 of y (mean +/- sd over M = {replicates})", figure),
        axis.x_label,
        "adjusted R2",
        &series,
        axis.log_x,
    );
    Ok(FigureRun {
        figure,
        header: SWEEP_HEADER.iter().map(|s| s.to_string()).collect(),
        rows: outcomes.iter().map(|o| sweep_row(axis.sweep, o)).collect(),
        svg,
        checks,
        stats,
    })
}

fn run_fig5(seed: u64, replicates: usize) -> Result<FigureRun> {
    let base = base_config(seed, replicates);
    let mut labels = Vec::new();
    let mut cells = Vec::new();
    for figure in [Figure::Fig2, Figure::Fig3, Figure::Fig4] {
        let c = sweep_cells(figure, &base);
        labels.extend(std::iter::repeat_n(sweep_axis(figure).sweep, c.len()));
        cells.extend(c);
    }
    let outcomes = bootstrap_validation(&cells, VALIDATION_TABLES)?;
    let observed: Vec<f64> = outcomes.iter().map(|o| o.observed_relative_error).collect();
    let boot: Vec<f64> = outcomes
        .iter()
        .map(|o| o.bootstrap_relative_error.unwrap_or(f64::NAN))
        .collect();

    let (lo, hi) = FIG5_BAND;
    let (bo, bb) = pairs_in_band(&observed, &boot, lo, hi);
    let band = pearson_r(&bo, &bb)?;
    let above: Vec<f64> = observed
        .iter()
        .zip(&boot)
        .filter(|(o, b)| **o > hi && b.is_finite())
        .map(|(o, b)| b - o)
        .collect();
    let over = if above.is_empty() {
        f64::NAN
    } else {
        above.iter().sum::<f64>() / above.len() as f64
    };

    let mut stats = BTreeMap::new();
    stats.insert("band_pairs".into(), bo.len() as f64);
    stats.insert("band_pearson_r".into(), band.r);
    stats.insert("band_pearson_t".into(), band.t);
    stats.insert("band_pearson_df".into(), band.df as f64);
    stats.insert("above_band_pairs".into(), above.len() as f64);
    stats.insert("above_band_mean_bootstrap_minus_observed".into(), over);
    let mut checks = vec![Check::at_least(
        &format!("pearson r on observed error in [{lo}, {hi}]"),
        band.r,
        FIG5_MIN_R,
    )];
    let mut over_check = Check::strictly_above(
        &format!("bootstrap over-estimates when observed error > {hi}"),
        over,
        0.0,
    );
    if above.is_empty() {
        over_check.detail = format!("no pairs with observed error > {hi}");
    }
    checks.push(over_check);

    let groups: Vec<(String, Vec<(f64, f64)>)> = NOISE_LEVELS
        .iter()
        .map(|&noise| {
            let pts = outcomes
                .iter()
                .filter(|o| o.config.sigma_noise == noise)
                .map(|o| (o.observed_relative_error, o.bootstrap_relative_error.unwrap_or(f64::NAN)))
                .collect();
            (noise_label(noise), pts)
        })
        .collect();
    let svg = scatter_loglog(
        &format!("fig5: bootstrap vs observed relative error (M = {replicates})"),
        "observed relative error",
        "bootstrap relative error",
        &groups,
    );
    Ok(FigureRun {
        figure: Figure::Fig5,
        header: SWEEP_HEADER.iter().map(|s| s.to_string()).collect(),
        rows: outcomes.iter().zip(&labels).map(|(o, l)| sweep_row(l, o)).collect(),
        svg,
        checks,
        stats,
    })
}

fn cca_row(r: &CcaValidationRow) -> Vec<String> {
    let optima = r
        .niches
        .iter()
        .map(|n| format!("{}:{}", n.x_opt, n.y_opt))
        .collect::<Vec<_>>()
        .join(" ");
    vec![
        r.n_sites.to_string(),
        num(r.sigma_noise),
        r.repeat.to_string(),
        optima,
        num(r.observed_mean),
        num(r.observed_sd),
        num(r.observed_relative_error),
        num(r.bootstrap_relative_error),
    ]
}

fn run_fig6(seed: u64, replicates: usize) -> Result<FigureRun> {
    let mut opts = CcaValidationOptions::new(seed);
    opts.replicates = replicates;
    let rows = cca_validation(&opts)?;
    let observed: Vec<f64> = rows.iter().map(|r| r.observed_relative_error).collect();
    let boot: Vec<f64> = rows.iter().map(|r| r.bootstrap_relative_error).collect();
    let p = pearson_r(&observed, &boot)?;
    let min = observed.iter().copied().fold(f64::INFINITY, f64::min);
    let max = observed.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let mut stats = BTreeMap::new();
    stats.insert("pearson_r".into(), p.r);
    stats.insert("pearson_t".into(), p.t);
    stats.insert("pearson_df".into(), p.df as f64);
    stats.insert("observed_error_min".into(), min);
    stats.insert("observed_error_max".into(), max);
    let (lo, hi) = FIG6_SPAN;
    let checks = vec![
        Check::at_least("pearson r over all cca cells", p.r, FIG6_MIN_R),
        Check::at_most(&format!("observed errors reach down to {lo}"), min, lo),
        Check::at_least(&format!("observed errors reach up to {hi}"), max, hi),
    ];

    let groups: Vec<(String, Vec<(f64, f64)>)> = opts
        .noise_levels
        .iter()
        .map(|&noise| {
            let pts = rows
                .iter()
                .filter(|r| r.sigma_noise == noise)
                .map(|r| (r.observed_relative_error, r.bootstrap_relative_error))
                .collect();
            (noise_label(noise), pts)
        })
        .collect();
    let svg = scatter_loglog(
        &format!("fig6: CCA bootstrap vs observed relative error (M = {replicates})"),
        "observed relative error",
        "bootstrap relative error",
        &groups,
    );
    Ok(FigureRun {
        figure: Figure::Fig6,
        header: [
            "n_sites",
            "sigma_noise",
            "repeat",
            "optima",
            "observed_mean",
            "observed_sd",
            "observed_relative_error",
            "bootstrap_relative_error",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect(),
        rows: rows.iter().map(cca_row).collect(),
        svg,
        checks,
        stats,
    })
}

/// Runs one figure in memory.
pub fn run_figure(figure: Figure, seed: u64, replicates: usize) -> Result<FigureRun> {
    if replicates < 2 {
        return Err(CliError::Usage("at least 2 replicates are required".into()));
    }
    match figure {
        Figure::Fig2 | Figure::Fig3 | Figure::Fig4 => run_sweep(figure, seed, replicates),
        Figure::Fig5 => run_fig5(seed, replicates),
        Figure::Fig6 => run_fig6(seed, replicates),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outputs {
    pub csv: PathBuf,
    pub svg: PathBuf,
    pub json: PathBuf,
}

pub fn output_paths(dir: &Path, figure: Figure) -> Outputs {
    Outputs {
        csv: dir.join(format!("{figure}.csv")),
        svg: dir.join(format!("{figure}.svg")),
        json: dir.join(format!("{figure}.json")),
    }
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

/// Writes a run to `dir` as `<figure>.csv`, `<figure>.svg` and `<figure>.json`.
pub fn write_outputs(run: &FigureRun, scale: Scale, seed: u64, replicates: usize, dir: &Path) -> Result<(Outputs, RunSummary)> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let paths = output_paths(dir, run.figure);
    let canonical = format!(
        "reproduce\nfigure={}\nscale={}\nseed={seed}\nreplicates={replicates}\n",
        run.figure,
        scale.as_str()
    );
    let provenance = Provenance::new(&format!("reproduce {}", run.figure), Some(seed), Some(replicates), &canonical);

    let mut buf = Vec::new();
    provenance.write_comments(&mut buf).expect("write to Vec");
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        let csv_err = |e: csv::Error| CliError::input(&paths.csv, e.to_string());
        w.write_record(&run.header).map_err(csv_err)?;
        for row in &run.rows {
            w.write_record(row).map_err(csv_err)?;
        }
        w.flush().map_err(|e| CliError::io(&paths.csv, e))?;
    }
    write(&paths.csv, &buf)?;
    write(&paths.svg, run.svg.as_bytes())?;

    let summary = RunSummary {
        figure: run.figure.to_string(),
        scale: scale.as_str().into(),
        seed,
        replicates,
        passed: run.passed(),
        checks: run.checks.clone(),
        stats: run.stats.clone(),
        provenance,
    };
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    write(&paths.json, format!("{json}\n").as_bytes())?;
    Ok((paths, summary))
}
