//! Bootstrap across sites.
//!
//! Whole rows are drawn with replacement, and the same row indices are
//! applied to the community table and to every predictor block, so a site's
//! abundances and predictors always travel together.

use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ordination::{CommunityTable, PredictorBlock};
use crate::rng::{stream, tag};
use crate::scalar::Scalar;
use crate::stats::{mean, quantile_sorted, sample_sd};

/// Fraction of replicates that may fail (and be redrawn) before giving up.
pub const FAILURE_BUDGET: f64 = 0.05;

/// Uncertainty summary of one bootstrapped statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapSummary<T> {
    pub statistic_name: String,
    pub replicate_count: usize,
    pub mean: T,
    /// Sample standard deviation across replicates.
    pub sd: T,
    /// `sd / |mean|`; infinite or NaN when the mean is zero.
    pub relative_uncertainty: T,
    pub ci95_low: T,
    pub ci95_high: T,
}

impl<T: Scalar> BootstrapSummary<T> {
    pub fn from_values(name: impl Into<String>, values: &[T]) -> Self {
        assert!(!values.is_empty(), "summary of zero replicates");
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        // moments from the sorted copy: bit-identical for any replicate order
        let m = mean(&sorted);
        let sd = sample_sd(&sorted);
        Self {
            statistic_name: name.into(),
            replicate_count: values.len(),
            mean: m,
            sd,
            relative_uncertainty: relative_error(sd, m),
            ci95_low: quantile_sorted(&sorted, 0.025),
            ci95_high: quantile_sorted(&sorted, 0.975),
        }
    }
}

/// `sd / |mean|`, with `0 / 0 = 0` so constant statistics report no uncertainty.
pub fn relative_error<T: Scalar>(sd: T, mean: T) -> T {
    if sd == T::zero() {
        return T::zero();
    }
    sd / mean.abs()
}

/// All replicate values plus their summaries.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapRun<T> {
    pub summaries: Vec<BootstrapSummary<T>>,
    /// `values[k][r]`: statistic component `k` on replicate `r`.
    pub values: Vec<Vec<T>>,
    /// Number of degenerate resamples that were redrawn.
    pub redraws: usize,
}

/// `n` indices drawn uniformly from `0..n` with replacement.
pub fn resample_indices<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..n)).collect()
}

/// Site labels for a resample; repeated draws get `#2`, `#3`, ... suffixes.
pub fn resampled_labels(labels: &[String], idx: &[usize]) -> Vec<String> {
    let mut seen: HashMap<usize, usize> = HashMap::with_capacity(idx.len());
    idx.iter()
        .map(|&i| {
            let count = seen.entry(i).or_insert(0);
            *count += 1;
            if *count == 1 {
                labels[i].clone()
            } else {
                format!("{}#{}", labels[i], count)
            }
        })
        .collect()
}

/// Applies one row-index sequence to the table and every block.
pub fn apply_indices<T: Scalar>(
    table: &CommunityTable<T>,
    blocks: &[PredictorBlock<T>],
    idx: &[usize],
) -> (CommunityTable<T>, Vec<PredictorBlock<T>>) {
    let labels = resampled_labels(table.site_ids(), idx);
    let blocks = blocks
        .iter()
        .map(|b| b.with_rows(labels.clone(), idx))
        .collect();
    (table.with_rows(labels, idx), blocks)
}

pub fn resample_rows<T: Scalar, R: Rng + ?Sized>(
    table: &CommunityTable<T>,
    blocks: &[PredictorBlock<T>],
    rng: &mut R,
) -> (CommunityTable<T>, Vec<PredictorBlock<T>>) {
    let idx = resample_indices(table.n_sites(), rng);
    apply_indices(table, blocks, &idx)
}

fn check_aligned<T: Scalar>(table: &CommunityTable<T>, blocks: &[PredictorBlock<T>]) -> Result<()> {
    for b in blocks {
        if b.n_sites() != table.n_sites() {
            return Err(Error::DimensionMismatch(format!(
                "block '{}' has {} sites, table has {}",
                b.name(),
                b.n_sites(),
                table.n_sites()
            )));
        }
    }
    Ok(())
}

/// Bootstrap engine over raw row indices.
///
/// Replicate `r` draws its indices from the stream `(seed, r, attempt)`; a
/// failing statistic is retried with the next attempt number. More than
/// `⌊0.05 M⌋` failures in total abort the run. Results do not depend on the
/// rayon thread count.
pub fn bootstrap_indices<T, F>(
    n: usize,
    names: &[&str],
    replicates: usize,
    seed: u64,
    statistic: F,
) -> Result<BootstrapRun<T>>
where
    T: Scalar,
    F: Fn(&[usize]) -> Result<Vec<T>> + Sync,
{
    if replicates < 2 {
        return Err(Error::InvalidInput(format!(
            "bootstrap needs at least 2 replicates, got {replicates}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidInput("cannot resample zero rows".into()));
    }
    let budget = (FAILURE_BUDGET * replicates as f64).floor() as usize;

    let outcomes: Vec<(Result<Vec<T>>, usize)> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let mut failures = 0;
            loop {
                let mut rng = stream(seed, &[tag::BOOTSTRAP, r as u64, failures as u64]);
                let idx = resample_indices(n, &mut rng);
                match statistic(&idx) {
                    Ok(v) => return (Ok(v), failures),
                    Err(e) => {
                        failures += 1;
                        if failures > budget {
                            return (Err(e), failures);
                        }
                    }
                }
            }
        })
        .collect();

    let redraws: usize = outcomes.iter().map(|(_, f)| f).sum();
    let first_err = outcomes.iter().find_map(|(r, _)| r.as_ref().err().cloned());
    if redraws > budget || first_err.is_some() {
        let last = first_err
            .map(|e| e.to_string())
            .unwrap_or_else(|| "degenerate resample".into());
        return Err(Error::BootstrapFailureRate {
            failed: redraws,
            requested: replicates,
            last,
        });
    }

    let mut values: Vec<Vec<T>> = vec![Vec::with_capacity(replicates); names.len()];
    for (res, _) in outcomes {
        let v = res.expect("errors handled above");
        if v.len() != names.len() {
            return Err(Error::DimensionMismatch(format!(
                "statistic returned {} components, {} names given",
                v.len(),
                names.len()
            )));
        }
        for (dst, x) in values.iter_mut().zip(v) {
            dst.push(x);
        }
    }
    let summaries = names
        .iter()
        .zip(&values)
        .map(|(name, v)| BootstrapSummary::from_values(*name, v))
        .collect();
    Ok(BootstrapRun {
        summaries,
        values,
        redraws,
    })
}

/// Evaluates `statistic` on `replicates` site resamples of `(table, blocks)`.
pub fn bootstrap_statistic<T, F>(
    table: &CommunityTable<T>,
    blocks: &[PredictorBlock<T>],
    names: &[&str],
    statistic: F,
    replicates: usize,
    seed: u64,
) -> Result<BootstrapRun<T>>
where
    T: Scalar,
    F: Fn(&CommunityTable<T>, &[PredictorBlock<T>]) -> Result<Vec<T>> + Sync,
{
    check_aligned(table, blocks)?;
    bootstrap_indices(table.n_sites(), names, replicates, seed, |idx| {
        let (t, b) = apply_indices(table, blocks, idx);
        statistic(&t, &b)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;

    fn table_and_block() -> (CommunityTable<f64>, PredictorBlock<f64>) {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, 10.0 - i as f64]).collect();
        let t = CommunityTable::from_matrix(Matrix::from_rows(&rows).unwrap()).unwrap();
        let env: Vec<[f64; 1]> = (0..10).map(|i| [100.0 + i as f64]).collect();
        let b = PredictorBlock::from_matrix("env", Matrix::from_rows(&env).unwrap()).unwrap();
        (t, b)
    }

    #[test]
    fn identical_rows_resample_to_themselves() {
        let t = CommunityTable::from_matrix(Matrix::from_rows(&[[2.0, 3.0]; 6]).unwrap()).unwrap();
        let mut rng = stream(3, &[]);
        let (r, _) = resample_rows(&t, &[], &mut rng);
        assert_eq!(r.values(), t.values());
    }

    #[test]
    fn fixed_seed_same_indices() {
        let a = resample_indices(50, &mut stream(11, &[1]));
        let b = resample_indices(50, &mut stream(11, &[1]));
        assert_eq!(a, b);
    }

    #[test]
    fn uniform_row_frequencies() {
        let mut counts = [0usize; 10];
        let mut rng = stream(2024, &[]);
        for _ in 0..10_000 {
            for i in resample_indices(10, &mut rng) {
                counts[i] += 1;
            }
        }
        for c in counts {
            let f = c as f64 / 100_000.0;
            assert!((f - 0.1).abs() < 0.01, "{f}");
        }
    }

    #[test]
    fn rows_stay_glued() {
        let (t, b) = table_and_block();
        let mut rng = stream(5, &[]);
        let (rt, rb) = resample_rows(&t, &[b], &mut rng);
        for i in 0..rt.n_sites() {
            let src = rt.values()[(i, 0)];
            assert_eq!(rb[0].values()[(i, 0)], 100.0 + src);
            assert_eq!(rt.site_ids()[i], rb[0].site_ids()[i]);
        }
    }

    #[test]
    fn duplicate_labels_get_suffixes() {
        let labels: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        assert_eq!(resampled_labels(&labels, &[1, 1, 0, 1]), vec!["b", "b#2", "a", "b#3"]);
    }

    #[test]
    fn constant_statistic() {
        let (t, b) = table_and_block();
        let run = bootstrap_statistic(&t, &[b], &["c"], |_, _| Ok(vec![0.7]), 50, 1).unwrap();
        let s = &run.summaries[0];
        assert_eq!(s.sd, 0.0);
        assert_eq!(s.relative_uncertainty, 0.0);
        assert_eq!((s.ci95_low, s.ci95_high), (0.7, 0.7));
        assert_eq!(s.replicate_count, 50);
    }

    #[test]
    fn three_point_summary() {
        let s = BootstrapSummary::from_values("s", &[0.1f64, 0.2, 0.3]);
        assert!((s.mean - 0.2).abs() < 1e-15);
        assert!((s.sd - 0.1).abs() < 1e-15);
        assert!((s.relative_uncertainty - 0.5).abs() < 1e-14);
    }

    #[test]
    fn zero_mean_is_reported_non_finite() {
        let s = BootstrapSummary::from_values("s", &[-1.0f64, 1.0]);
        assert!(!s.relative_uncertainty.is_finite());
    }

    #[test]
    fn failure_budget() {
        let (t, _) = table_and_block();
        // ~1 in 40 replicates fail: within budget, redrawn
        let run = bootstrap_statistic(
            &t,
            &[],
            &["first"],
            |tab, _| {
                let v = tab.values()[(0, 0)];
                if tab.site_ids()[0] == "s1" && tab.site_ids()[1] == "s2" {
                    Err(Error::InvalidInput("degenerate".into()))
                } else {
                    Ok(vec![v])
                }
            },
            200,
            9,
        )
        .unwrap();
        assert_eq!(run.values[0].len(), 200);

        let err = bootstrap_statistic(
            &t,
            &[],
            &["x"],
            |tab, _| {
                if tab.values()[(0, 0)] < 5.0 {
                    Err(Error::InvalidInput("degenerate".into()))
                } else {
                    Ok(vec![1.0])
                }
            },
            100,
            9,
        )
        .unwrap_err();
        assert!(matches!(err, Error::BootstrapFailureRate { .. }), "{err}");
    }

    #[test]
    fn thread_count_does_not_matter() {
        let (t, b) = table_and_block();
        let stat = |tab: &CommunityTable<f64>, _: &[PredictorBlock<f64>]| {
            Ok(vec![crate::stats::mean(tab.values().col(0))])
        };
        let run_with = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| bootstrap_statistic(&t, std::slice::from_ref(&b), &["m"], stat, 300, 77).unwrap())
        };
        assert_eq!(run_with(1), run_with(4));
    }
}
