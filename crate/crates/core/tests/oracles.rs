mod support;

use support::{cca_wls_oracle, chi2_inertia_oracle, ols_r2_oracle};
use varboot::experiments::{
    cca_statistic, cca_validation, run_replicated_scenario, spearman_rho, sweep_optimum_distance,
    y2_values, CcaValidationOptions,
};
use varboot::ordination::{adjusted_r2, cca_explained, chi_square_transform, fit_projection, rda_r2};
use varboot::resample::bootstrap_statistic;
use varboot::rng::stream;
use varboot::synth::{gaussian_response, generate_complex_dataset, site_abundances, ScenarioConfig};
use varboot::{CommunityTable64, Matrix64, PredictorBlock64};
use rand_distr::{Distribution, StandardNormal};

#[test]
fn rda_six_by_two_against_ols() {
    let y = Matrix64::from_rows(&[
        [3.0, 1.0],
        [5.0, 0.0],
        [4.0, 2.0],
        [8.0, 1.0],
        [9.0, 4.0],
        [12.0, 3.0],
    ])
    .unwrap();
    let x = Matrix64::from_rows(&[[0.5], [1.0], [1.5], [2.5], [3.0], [4.0]]).unwrap();
    let want = ols_r2_oracle(&y, &x).unwrap();
    assert!((rda_r2(&y, &x).unwrap() - want).abs() < 1e-12);
    assert!(want > 0.5 && want < 1.0);
}

#[test]
fn projection_matches_per_column_regression_through_origin() {
    let y = Matrix64::from_rows(&[[1.0, 2.0], [2.0, 1.0], [4.0, 0.5], [3.0, 3.0], [5.0, 1.5]]).unwrap();
    let x = Matrix64::from_rows(&[[1.0], [2.0], [3.0], [4.0], [5.0]]).unwrap();
    let fit = fit_projection(&y, &x, None).unwrap();
    let xx: f64 = x.col(0).iter().map(|v| v * v).sum();
    for j in 0..2 {
        let b = x.col(0).iter().zip(y.col(j)).map(|(a, c)| a * c).sum::<f64>() / xx;
        for i in 0..5 {
            assert!((fit[(i, j)] - b * x[(i, 0)]).abs() < 1e-12);
        }
    }
}

#[test]
fn cca_six_by_three_against_weighted_ols() {
    let y = Matrix64::from_rows(&[
        [10.0, 2.0, 0.0],
        [8.0, 4.0, 1.0],
        [5.0, 6.0, 2.0],
        [2.0, 7.0, 5.0],
        [1.0, 4.0, 9.0],
        [0.0, 2.0, 12.0],
    ])
    .unwrap();
    let xv = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0];
    let x = Matrix64::from_columns(6, &[&xv[..]]).unwrap();
    let fit = cca_explained(&y, &x).unwrap();
    assert!((fit.constrained_inertia - cca_wls_oracle(&y, &xv)).abs() < 1e-12);
    assert!((fit.total_inertia - chi2_inertia_oracle(&y)).abs() < 1e-12);
    assert!(fit.proportion > 0.5, "gradient table, {}", fit.proportion);
}

#[test]
fn chi_square_cross_check() {
    let y = Matrix64::from_rows(&[[4.0, 1.0, 0.0], [2.0, 2.0, 3.0], [0.0, 5.0, 1.0], [1.0, 1.0, 1.0]]).unwrap();
    let chi = chi_square_transform(&y).unwrap();
    let grand: f64 = y.iter().sum();
    let mut direct = 0.0;
    for i in 0..4 {
        for j in 0..3 {
            let (r, c) = (chi.row_weights[i], chi.col_weights[j]);
            direct += (y[(i, j)] / grand - r * c).powi(2) / (r * c);
        }
    }
    assert!((chi.total_inertia - direct).abs() < 1e-12);
}

#[test]
fn reference_values() {
    assert!((adjusted_r2(0.5f64, 100, 2).unwrap() - (1.0 - 0.5 * 99.0 / 97.0)).abs() < 1e-15);
    assert!((gaussian_response(1.0f64, 0.5, 0.5) - 0.483941).abs() < 1e-6);
    assert_eq!(site_abundances(&[1.0, 1.0], 10_000).unwrap(), vec![5000, 5000]);
    assert_eq!(site_abundances(&[1.0, 3.0], 10_000).unwrap(), vec![2500, 7500]);
    assert_eq!(site_abundances(&[1.0, 2.0], 10_000).unwrap(), vec![3334, 6667]);
}

#[test]
fn cca_captures_nonlinearity_missed_by_linear_fit() {
    let wins = (0..20u64)
        .filter(|&seed| {
            let (t, env) = generate_complex_dataset::<f64>(60, 5, 0.0, seed).unwrap();
            let linear = rda_r2(t.values(), env.values()).unwrap();
            cca_statistic(t.values(), env.values()).unwrap() > linear
        })
        .count();
    assert!(wins > 0, "cca never exceeded linear R² on 20 seeds");
}

#[test]
fn bootstrap_sd_of_mean_matches_standard_error() {
    let n = 100;
    let sigma = 2.0;
    let mut rng = stream(99, &[]);
    let col: Vec<f64> = (0..n)
        .map(|_| 10.0 + sigma * Distribution::<f64>::sample(&StandardNormal, &mut rng))
        .collect();
    let table = CommunityTable64::from_matrix(Matrix64::from_columns(n, &[&col[..]]).unwrap()).unwrap();
    let run = bootstrap_statistic(
        &table,
        &[] as &[PredictorBlock64],
        &["mean"],
        |t, _| Ok(vec![t.values().col(0).iter().sum::<f64>() / n as f64]),
        2000,
        5,
    )
    .unwrap();
    let se = sigma / (n as f64).sqrt();
    let sd = run.summaries[0].sd;
    assert!((sd - se).abs() / se < 0.1, "bootstrap sd {sd}, analytic {se}");
}

#[test]
fn null_configuration_explains_nothing() {
    let mut cfg = ScenarioConfig::two_species(0.0, 8);
    cfg.sigma_noise = 0.0;
    cfg.y_max = 0.05;
    cfg.replicates = 50;
    let out = run_replicated_scenario(&cfg).unwrap();
    assert!(out.observed_mean_r2.abs() < 0.02, "{}", out.observed_mean_r2);
}

#[test]
fn niche_separation_raises_explained_variance() {
    let mut base = ScenarioConfig::two_species(0.5, 21);
    base.replicates = 40;
    let out = sweep_optimum_distance(&base, &y2_values(), &[0.01]).unwrap();
    let y2: Vec<f64> = out.iter().map(|o| o.config.niches[1].y_opt).collect();
    let means: Vec<f64> = out.iter().map(|o| o.observed_mean_r2).collect();
    assert!(spearman_rho(&y2, &means).unwrap() >= 0.9, "{means:?}");
}

/// Desk-scale settings (M = 200, seed 20240601). At noise 0 both errors sit
/// at rounding level, so only the noisy levels are compared.
#[test]
fn cca_error_does_not_shrink_with_fewer_sites() {
    let mut opts = CcaValidationOptions::new(20240601);
    opts.site_counts = vec![20, 100];
    opts.noise_levels = vec![0.01, 0.05, 0.1];
    opts.tables = 1;
    let rows = cca_validation(&opts).unwrap();
    for &noise in &opts.noise_levels {
        let mean_at = |n: usize| {
            let v: Vec<f64> = rows
                .iter()
                .filter(|r| r.sigma_noise == noise && r.n_sites == n)
                .map(|r| r.observed_relative_error)
                .collect();
            v.iter().sum::<f64>() / v.len() as f64
        };
        assert!(mean_at(20) >= mean_at(100), "noise {noise}: {} < {}", mean_at(20), mean_at(100));
    }
}
