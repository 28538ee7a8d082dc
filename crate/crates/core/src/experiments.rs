//! Replicated simulation studies.
//!
//! A scenario is simulated `M` times with fresh sites and noise to measure
//! the observed spread of a variance-partitioning estimate. Separate
//! validation tables are bootstrapped to check how well the bootstrap
//! recovers that spread. All cells of one sweep share the base seed, so
//! neighbouring cells see common random numbers and the trends are not
//! masked by cell-to-cell sampling noise.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::ordination::{cca_explained, log1p_transform, CommunityTable};
use crate::ordination::{adjusted_r2, rda_r2};
use crate::resample::{bootstrap_indices, relative_error};
use crate::rng::{derive_seed, tag};
use crate::stats::{mean, sample_sd};
use crate::synth::{complex_config, generate_dataset, random_niches, ScenarioConfig, SpeciesNiche};

pub use crate::stats::{pearson_r, spearman_rho, Pearson};

pub const NOISE_LEVELS: [f64; 3] = [0.01, 0.05, 0.1];
pub const SAMPLE_SIZES: [usize; 6] = [25, 50, 100, 250, 500, 1000];
pub const VALIDATION_TABLES: usize = 10;

pub const CCA_SITE_COUNTS: [usize; 5] = [20, 40, 60, 80, 100];
pub const CCA_NOISE_LEVELS: [f64; 4] = [0.0, 0.01, 0.05, 0.1];
pub const CCA_REPEATS: usize = 5;
pub const CCA_SPECIES: usize = 5;

/// `0.1, 0.2, ..., 1.0`
pub fn y_max_values() -> Vec<f64> {
    (1..=10).map(|i| i as f64 / 10.0).collect()
}

/// `0.0, 0.1, ..., 1.0`
pub fn y2_values() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

/// How the explanatory power of the `y` gradient is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EffectMeasure {
    /// `adjR²([x y]) − adjR²(x)`: what `y` adds on top of `x`.
    #[default]
    Semipartial,
    /// `adjR²(y)` alone.
    Marginal,
}

/// Summary of one replicated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutcome {
    pub config: ScenarioConfig,
    pub observed_mean_r2: f64,
    pub observed_sd: f64,
    /// `observed_sd / |observed_mean_r2|`
    pub observed_relative_error: f64,
    /// Mean bootstrap relative uncertainty over the validation tables.
    pub bootstrap_relative_error: Option<f64>,
    pub replicate_values: Vec<f64>,
}

impl ScenarioOutcome {
    pub fn replicate_count(&self) -> usize {
        self.replicate_values.len()
    }
}

/// Explanatory power of `y` (column 1 of `env`) for the response `y_counts`.
pub fn y_effect(counts: &Matrix<f64>, env: &Matrix<f64>, measure: EffectMeasure) -> Result<f64> {
    if env.ncols() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "expected an env block with columns x and y, got {} columns",
            env.ncols()
        )));
    }
    let n = counts.nrows();
    let fit = |cols: &[usize], block: &str| -> Result<f64> {
        let x = env.select_cols(cols);
        let (r2, rank) = crate::ordination::rda_fit_rank(counts, &x)?;
        crate::ordination::adjusted_r2_for(r2, n, rank, block)
    };
    match measure {
        EffectMeasure::Semipartial => Ok(fit(&[0, 1], "x+y")? - fit(&[0], "x")?),
        EffectMeasure::Marginal => fit(&[1], "y"),
    }
}

fn replicate_config(config: &ScenarioConfig, replicate: usize) -> ScenarioConfig {
    ScenarioConfig {
        seed: derive_seed(config.seed, &[tag::REPLICATE, replicate as u64]),
        ..config.clone()
    }
}

fn validation_config(config: &ScenarioConfig, table: usize) -> ScenarioConfig {
    ScenarioConfig {
        seed: derive_seed(config.seed, &[tag::VALIDATION, table as u64]),
        ..config.clone()
    }
}

fn wrap(replicate: usize) -> impl FnOnce(Error) -> Error {
    move |e| Error::Replicate {
        replicate,
        source: Box::new(e),
    }
}

/// Simulates `config.replicates` independent datasets and summarizes the
/// semipartial adjusted R² of `y`.
pub fn run_replicated_scenario(config: &ScenarioConfig) -> Result<ScenarioOutcome> {
    run_replicated_scenario_with(config, EffectMeasure::default())
}

pub fn run_replicated_scenario_with(
    config: &ScenarioConfig,
    measure: EffectMeasure,
) -> Result<ScenarioOutcome> {
    config.validate()?;
    let values = (0..config.replicates)
        .into_par_iter()
        .map(|r| {
            let (table, env) = generate_dataset::<f64>(&replicate_config(config, r)).map_err(wrap(r))?;
            y_effect(table.values(), env.values(), measure).map_err(wrap(r))
        })
        .collect::<Result<Vec<f64>>>()?;
    let m = mean(&values);
    let sd = sample_sd(&values);
    Ok(ScenarioOutcome {
        config: config.clone(),
        observed_mean_r2: m,
        observed_sd: sd,
        observed_relative_error: relative_error(sd, m),
        bootstrap_relative_error: None,
        replicate_values: values,
    })
}

fn run_cells(configs: Vec<ScenarioConfig>) -> Result<Vec<ScenarioOutcome>> {
    configs.par_iter().map(run_replicated_scenario).collect()
}

fn cells<V: Copy>(
    base: &ScenarioConfig,
    values: &[V],
    noise_levels: &[f64],
    set: impl Fn(&mut ScenarioConfig, V),
) -> Vec<ScenarioConfig> {
    let mut out = Vec::with_capacity(values.len() * noise_levels.len());
    for &noise in noise_levels {
        for &v in values {
            let mut cfg = base.clone();
            cfg.sigma_noise = noise;
            set(&mut cfg, v);
            out.push(cfg);
        }
    }
    out
}

/// Sample-size sweep; outcomes are ordered by noise level, then size.
pub fn sample_size_cells(base: &ScenarioConfig, sizes: &[usize], noise: &[f64]) -> Vec<ScenarioConfig> {
    cells(base, sizes, noise, |c, n| c.n_sites = n)
}

pub fn sampling_range_cells(base: &ScenarioConfig, y_max: &[f64], noise: &[f64]) -> Vec<ScenarioConfig> {
    cells(base, y_max, noise, |c, v| c.y_max = v)
}

pub fn optimum_distance_cells(base: &ScenarioConfig, y2: &[f64], noise: &[f64]) -> Vec<ScenarioConfig> {
    cells(base, y2, noise, |c, v| {
        c.niches[0].y_opt = 0.0;
        c.niches[1].y_opt = v;
    })
}

pub fn sweep_sample_size(
    base: &ScenarioConfig,
    sizes: &[usize],
    noise_levels: &[f64],
) -> Result<Vec<ScenarioOutcome>> {
    run_cells(sample_size_cells(base, sizes, noise_levels))
}

pub fn sweep_sampling_range(
    base: &ScenarioConfig,
    y_max_values: &[f64],
    noise_levels: &[f64],
) -> Result<Vec<ScenarioOutcome>> {
    run_cells(sampling_range_cells(base, y_max_values, noise_levels))
}

pub fn sweep_optimum_distance(
    base: &ScenarioConfig,
    y2_values: &[f64],
    noise_levels: &[f64],
) -> Result<Vec<ScenarioOutcome>> {
    if base.niches.len() != 2 {
        return Err(Error::InvalidInput(format!(
            "optimum-distance sweep needs the two-species model, got {} species",
            base.niches.len()
        )));
    }
    run_cells(optimum_distance_cells(base, y2_values, noise_levels))
}

/// Bootstrap relative uncertainty of the `y` effect on one table.
pub fn bootstrap_relative_uncertainty(
    counts: &Matrix<f64>,
    env: &Matrix<f64>,
    measure: EffectMeasure,
    replicates: usize,
    seed: u64,
) -> Result<f64> {
    let run = bootstrap_indices(counts.nrows(), &["y"], replicates, seed, |idx| {
        let c = counts.select_rows(idx);
        let e = env.select_rows(idx);
        y_effect(&c, &e, measure).map(|v| vec![v])
    })?;
    Ok(run.summaries[0].relative_uncertainty)
}

/// Observed error of each scenario paired with the bootstrap estimate
/// averaged over `tables` fresh datasets (each resampled `replicates` times).
pub fn bootstrap_validation(
    scenarios: &[ScenarioConfig],
    tables: usize,
) -> Result<Vec<ScenarioOutcome>> {
    if tables == 0 {
        return Err(Error::InvalidInput("need at least one validation table".into()));
    }
    scenarios
        .par_iter()
        .map(|cfg| {
            let mut outcome = run_replicated_scenario(cfg)?;
            let estimates = (0..tables)
                .into_par_iter()
                .map(|t| {
                    let vcfg = validation_config(cfg, t);
                    let (table, env) = generate_dataset::<f64>(&vcfg).map_err(wrap(t))?;
                    let seed = derive_seed(vcfg.seed, &[tag::BOOTSTRAP]);
                    bootstrap_relative_uncertainty(
                        table.values(),
                        env.values(),
                        EffectMeasure::default(),
                        cfg.replicates,
                        seed,
                    )
                    .map_err(wrap(t))
                })
                .collect::<Result<Vec<f64>>>()?;
            outcome.bootstrap_relative_error = Some(mean(&estimates));
            Ok(outcome)
        })
        .collect()
}

/// Explained inertia proportion of a CCA on the `ln(1 + N)` table.
///
/// Species absent from every site are dropped first.
pub fn cca_statistic(counts: &Matrix<f64>, env: &Matrix<f64>) -> Result<f64> {
    let logged = log1p_transform(counts)?;
    let keep: Vec<usize> = logged
        .col_sums()
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > 0.0)
        .map(|(j, _)| j)
        .collect();
    let y = if keep.len() == logged.ncols() {
        logged
    } else {
        logged.select_cols(&keep)
    };
    cca_explained(&y, env).map(|f| f.proportion)
}

/// Settings for the multi-species CCA validation study.
#[derive(Debug, Clone, PartialEq)]
pub struct CcaValidationOptions {
    pub site_counts: Vec<usize>,
    pub noise_levels: Vec<f64>,
    pub repeats: usize,
    pub species: usize,
    /// Replicate datasets for the observed error and resamples per bootstrap.
    pub replicates: usize,
    pub tables: usize,
    pub seed: u64,
}

impl CcaValidationOptions {
    pub fn new(seed: u64) -> Self {
        Self {
            site_counts: CCA_SITE_COUNTS.to_vec(),
            noise_levels: CCA_NOISE_LEVELS.to_vec(),
            repeats: CCA_REPEATS,
            species: CCA_SPECIES,
            replicates: ScenarioConfig::DEFAULT_REPLICATES,
            tables: VALIDATION_TABLES,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CcaValidationRow {
    pub n_sites: usize,
    pub sigma_noise: f64,
    pub repeat: usize,
    pub niches: Vec<SpeciesNiche>,
    pub observed_mean: f64,
    pub observed_sd: f64,
    pub observed_relative_error: f64,
    pub bootstrap_relative_error: f64,
}

/// Observed vs bootstrap relative error of the CCA explained proportion.
///
/// Repeat `k` uses the same random niche optima in every (n, noise) cell.
pub fn cca_validation(opts: &CcaValidationOptions) -> Result<Vec<CcaValidationRow>> {
    if opts.repeats == 0 || opts.tables == 0 || opts.replicates < 2 {
        return Err(Error::InvalidInput(
            "cca validation needs repeats ≥ 1, tables ≥ 1 and replicates ≥ 2".into(),
        ));
    }
    let mut jobs = Vec::new();
    for &noise in &opts.noise_levels {
        for &n in &opts.site_counts {
            for k in 0..opts.repeats {
                jobs.push((n, noise, k));
            }
        }
    }
    jobs.par_iter()
        .map(|&(n, noise, k)| {
            let repeat_seed = derive_seed(opts.seed, &[tag::CELL, k as u64]);
            let niches = random_niches(opts.species, repeat_seed);
            let mut cfg = complex_config(n, niches.clone(), noise, repeat_seed);
            cfg.replicates = opts.replicates;
            cfg.validate()?;

            let observed = (0..opts.replicates)
                .into_par_iter()
                .map(|r| {
                    let (t, env) = generate_dataset::<f64>(&replicate_config(&cfg, r)).map_err(wrap(r))?;
                    cca_statistic(t.values(), env.values()).map_err(wrap(r))
                })
                .collect::<Result<Vec<f64>>>()?;

            let estimates = (0..opts.tables)
                .into_par_iter()
                .map(|t| {
                    let vcfg = validation_config(&cfg, t);
                    let (table, env) = generate_dataset::<f64>(&vcfg).map_err(wrap(t))?;
                    let seed = derive_seed(vcfg.seed, &[tag::BOOTSTRAP]);
                    cca_bootstrap_relative_uncertainty(&table, env.values(), opts.replicates, seed)
                        .map_err(wrap(t))
                })
                .collect::<Result<Vec<f64>>>()?;

            let m = mean(&observed);
            let sd = sample_sd(&observed);
            Ok(CcaValidationRow {
                n_sites: n,
                sigma_noise: noise,
                repeat: k,
                niches,
                observed_mean: m,
                observed_sd: sd,
                observed_relative_error: relative_error(sd, m),
                bootstrap_relative_error: mean(&estimates),
            })
        })
        .collect()
}

fn cca_bootstrap_relative_uncertainty(
    table: &CommunityTable<f64>,
    env: &Matrix<f64>,
    replicates: usize,
    seed: u64,
) -> Result<f64> {
    let counts = table.values();
    let run = bootstrap_indices(counts.nrows(), &["cca"], replicates, seed, |idx| {
        cca_statistic(&counts.select_rows(idx), &env.select_rows(idx)).map(|v| vec![v])
    })?;
    Ok(run.summaries[0].relative_uncertainty)
}

/// Pairs whose observed error lies in `[lo, hi]`.
pub fn pairs_in_band(observed: &[f64], estimated: &[f64], lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
    observed
        .iter()
        .zip(estimated)
        .filter(|(o, e)| (lo..=hi).contains(*o) && e.is_finite())
        .map(|(&o, &e)| (o, e))
        .unzip()
}

/// Marginal adjusted R² of a single predictor column, exposed for callers
/// that want the non-semipartial reading.
pub fn marginal_adjusted_r2(counts: &Matrix<f64>, predictor: &[f64]) -> Result<f64> {
    let x = Matrix::from_columns(predictor.len(), &[predictor])?;
    let r2 = rda_r2(counts, &x)?;
    let rank = crate::linalg::rank(&crate::ordination::center_columns(&x)?);
    adjusted_r2(r2, counts.nrows(), rank)
}
