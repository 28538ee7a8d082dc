//! Brute-force oracles, input strategies and property checks shared by the
//! integration suites.
#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use varboot::ordination::{cca_explained, chi_square_transform, fit_projection, rda_r2, varpart_two};
use varboot::resample::{resample_rows, BootstrapSummary};
use varboot::rng::stream;
use varboot::synth::site_abundances;
use varboot::{CommunityTable64, Matrix64, PredictorBlock64};

pub type Check = Result<(), TestCaseError>;

fn centered(v: &[f64]) -> Vec<f64> {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    v.iter().map(|x| x - m).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves the ≤ 2×2 normal equations `S b = s` by Cramer's rule and returns
/// the regression sum of squares `b·s`, or `None` when `S` is near singular.
fn regression_ssq(cols: &[Vec<f64>], y: &[f64]) -> Option<f64> {
    match cols {
        [] => Some(0.0),
        [a] => {
            let saa = dot(a, a);
            (saa > 1e-12).then(|| dot(a, y).powi(2) / saa)
        }
        [a, b] => {
            let (saa, sbb, sab) = (dot(a, a), dot(b, b), dot(a, b));
            let det = saa * sbb - sab * sab;
            if det <= 1e-8 * saa * sbb {
                return None;
            }
            let (say, sby) = (dot(a, y), dot(b, y));
            let ba = (say * sbb - sab * sby) / det;
            let bb = (saa * sby - sab * say) / det;
            Some(ba * say + bb * sby)
        }
        _ => panic!("oracle handles at most two predictors"),
    }
}

/// R² as the ratio of summed per-column OLS regression and total sums of
/// squares; `None` for near-collinear predictors.
pub fn ols_r2_oracle(y: &Matrix64, x: &Matrix64) -> Option<f64> {
    let xc: Vec<Vec<f64>> = x.columns().map(centered).collect();
    let (mut fit, mut total) = (0.0, 0.0);
    for col in y.columns() {
        let yc = centered(col);
        fit += regression_ssq(&xc, &yc)?;
        total += dot(&yc, &yc);
    }
    Some(if total == 0.0 { 0.0 } else { fit / total })
}

/// Pearson χ² of a contingency table divided by its grand total.
pub fn chi2_inertia_oracle(y: &Matrix64) -> f64 {
    let rows = y.row_sums();
    let cols = y.col_sums();
    let grand: f64 = rows.iter().sum();
    let mut chi2 = 0.0;
    for i in 0..y.nrows() {
        for j in 0..y.ncols() {
            let e = rows[i] * cols[j] / grand;
            chi2 += (y[(i, j)] - e).powi(2) / e;
        }
    }
    chi2 / grand
}

/// Constrained CCA inertia via explicit weighted least squares of every
/// `Q̄` column on `[1, x]` with row weights `r`, fitted values scaled back
/// to the `√r` metric.
pub fn cca_wls_oracle(y: &Matrix64, x: &[f64]) -> f64 {
    let chi = chi_square_transform(y).unwrap();
    let r = &chi.row_weights;
    let xm = dot(r, x) / r.iter().sum::<f64>();
    let xd: Vec<f64> = x.iter().map(|v| v - xm).collect();
    let sxx: f64 = r.iter().zip(&xd).map(|(w, d)| w * d * d).sum();
    let mut ssq = 0.0;
    for q in chi.q_bar.columns() {
        // response in the unweighted scale: q_i / √r_i
        let z: Vec<f64> = q.iter().zip(r).map(|(v, w)| v / w.sqrt()).collect();
        let zm = dot(r, &z) / r.iter().sum::<f64>();
        let sxz: f64 = r.iter().zip(&xd).zip(&z).map(|((w, d), v)| w * d * (v - zm)).sum();
        let slope = sxz / sxx;
        ssq += r
            .iter()
            .zip(&xd)
            .map(|(w, d)| w * (slope * d).powi(2))
            .sum::<f64>();
    }
    ssq
}

/// `rows × cols` matrix with entries in `[lo, hi)`.
pub fn matrix(rows: usize, cols: usize, lo: f64, hi: f64) -> impl Strategy<Value = Matrix64> {
    prop::collection::vec(lo..hi, rows * cols)
        .prop_map(move |v| Matrix64::from_col_major(rows, cols, v).unwrap())
}

/// Small RDA instance: `n ≤ 6`, `p ≤ 3`, `m ≤ 2`.
pub fn small_rda() -> impl Strategy<Value = (Matrix64, Matrix64)> {
    (3usize..=6, 1usize..=3, 1usize..=2).prop_flat_map(|(n, p, m)| {
        let m = m.min(n - 1);
        (matrix(n, p, 0.0, 20.0), matrix(n, m, -5.0, 5.0))
    })
}

/// Strictly positive small table, so every margin is non-empty.
pub fn positive_table() -> impl Strategy<Value = Matrix64> {
    (2usize..=6, 2usize..=3).prop_flat_map(|(n, p)| matrix(n, p, 0.1, 20.0))
}

/// Table with some zero cells, at least one positive entry per row and column.
pub fn sparse_table() -> impl Strategy<Value = Matrix64> {
    (3usize..=8, 2usize..=5)
        .prop_flat_map(|(n, p)| (matrix(n, p, 0.0, 30.0), prop::collection::vec(any::<bool>(), n * p)))
        .prop_map(|(mut y, zero)| {
            let (n, p) = (y.nrows(), y.ncols());
            for i in 0..n {
                for j in 0..p {
                    if zero[j * n + i] && i != j % n && j != i % p {
                        y[(i, j)] = 0.0;
                    }
                }
            }
            y
        })
}

/// Fitting the fitted values again changes nothing.
pub fn check_projection_idempotent(y: &Matrix64, x: &Matrix64, weights: Option<&[f64]>) -> Check {
    let once = fit_projection(y, x, weights).unwrap();
    let twice = fit_projection(&once, x, weights).unwrap();
    let scale = 1.0 + once.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    prop_assert!(once.max_abs_diff(&twice) <= 1e-10 * scale, "diff {}", once.max_abs_diff(&twice));
    Ok(())
}

/// R² lies in [0, 1] and survives `x ↦ x A + 1 b'` with invertible `A`.
pub fn check_r2_affine(y: &Matrix64, x: &Matrix64, a: [f64; 4], shift: [f64; 2]) -> Check {
    let r2 = rda_r2(y, x).unwrap();
    prop_assert!((0.0..=1.0).contains(&r2), "r2 = {r2}");
    let m = x.ncols();
    let mut recoded = Matrix64::zeros(x.nrows(), m);
    for i in 0..x.nrows() {
        for k in 0..m {
            let mut v = shift[k];
            for l in 0..m {
                v += x[(i, l)] * a[l * 2 + k];
            }
            recoded[(i, k)] = v;
        }
    }
    let r2b = rda_r2(y, &recoded).unwrap();
    prop_assert!((r2 - r2b).abs() <= 1e-10, "{r2} vs {r2b}");
    Ok(())
}

pub fn check_partition_identity(y: &Matrix64, x: &Matrix64, w: &Matrix64) -> Check {
    let xb = PredictorBlock64::from_matrix("x", x.clone()).unwrap();
    let wb = PredictorBlock64::from_matrix("w", w.clone()).unwrap();
    if let Ok(p) = varpart_two(y, &xb, &wb) {
        let gap = p.frac_pure_x + p.frac_shared + p.frac_pure_w - p.r2_xw;
        prop_assert!(gap.abs() <= 1e-12, "gap {gap}");
        prop_assert_eq!(p.frac_residual, 1.0 - p.r2_xw);
    }
    Ok(())
}

/// Rows of `Q̄` are orthogonal to `√c`, columns to `√r`.
pub fn check_chi_square_marginals(y: &Matrix64) -> Check {
    let chi = chi_square_transform(y).unwrap();
    let q = &chi.q_bar;
    for i in 0..q.nrows() {
        let s: f64 = (0..q.ncols()).map(|j| q[(i, j)] * chi.col_weights[j].sqrt()).sum();
        prop_assert!(s.abs() <= 1e-10, "row {i}: {s}");
    }
    for j in 0..q.ncols() {
        let s: f64 = (0..q.nrows()).map(|i| q[(i, j)] * chi.row_weights[i].sqrt()).sum();
        prop_assert!(s.abs() <= 1e-10, "column {j}: {s}");
    }
    Ok(())
}

pub fn check_cca_scale_invariant(y: &Matrix64, x: &Matrix64, factor: f64) -> Check {
    let a = cca_explained(y, x).unwrap().proportion;
    let b = cca_explained(&y.map(|v| v * factor), x).unwrap().proportion;
    prop_assert!((0.0..=1.0).contains(&a));
    prop_assert!((a - b).abs() <= 1e-10, "{a} vs {b}");
    Ok(())
}

/// Integer abundances with row total in `[K, K + S)`, zero exactly where α is.
pub fn check_row_sum_bounds(alphas: &[f64], k: u64) -> Check {
    let s = alphas.len() as u64;
    match site_abundances(alphas, k) {
        None => prop_assert!(alphas.iter().all(|&a| a == 0.0)),
        Some(n) => {
            let total: u64 = n.iter().sum();
            prop_assert!(total >= k && total < k + s, "total {total}, K {k}, S {s}");
            for (a, c) in alphas.iter().zip(&n) {
                prop_assert_eq!(*a == 0.0, *c == 0);
            }
        }
    }
    Ok(())
}

/// Each resampled row of the table and of every block comes from the same
/// source site, and its label names that site.
pub fn check_gluing(n: usize, p: usize, seed: u64) -> Check {
    // entry encodes its source site so the origin of every row is recoverable
    let t = Matrix64::from_col_major(n, p, (0..n * p).map(|k| (k % n) as f64).collect()).unwrap();
    let table = CommunityTable64::from_matrix(t).unwrap();
    let e = Matrix64::from_col_major(n, 2, (0..2 * n).map(|k| (k % n) as f64 * 10.0 + 1.0).collect()).unwrap();
    let s = Matrix64::from_col_major(n, 1, (0..n).map(|k| -(k as f64)).collect()).unwrap();
    let blocks = [
        PredictorBlock64::from_matrix("env", e).unwrap(),
        PredictorBlock64::from_matrix("space", s).unwrap(),
    ];
    let mut rng = stream(seed, &[]);
    let (rt, rb) = resample_rows(&table, &blocks, &mut rng);
    prop_assert_eq!(rt.n_sites(), n);
    for k in 0..n {
        let src = rt.values()[(k, 0)] as usize;
        prop_assert!(rt.values().row(k).iter().all(|&v| v as usize == src));
        prop_assert_eq!(rb[0].values()[(k, 0)], src as f64 * 10.0 + 1.0);
        prop_assert_eq!(rb[0].values()[(k, 1)], src as f64 * 10.0 + 1.0);
        prop_assert_eq!(rb[1].values()[(k, 0)], -(src as f64));
        let label = &rt.site_ids()[k];
        prop_assert_eq!(label.split('#').next().unwrap(), &table.site_ids()[src]);
        prop_assert_eq!(&rb[0].site_ids()[k], label);
        prop_assert_eq!(&rb[1].site_ids()[k], label);
    }
    Ok(())
}

pub fn check_summary_permutation(values: &[f64], perm_seed: u64) -> Check {
    use rand::seq::SliceRandom;
    let mut shuffled = values.to_vec();
    shuffled.shuffle(&mut stream(perm_seed, &[]));
    let a = BootstrapSummary::from_values("s", values);
    let b = BootstrapSummary::from_values("s", &shuffled);
    prop_assert_eq!(&a, &b);
    prop_assert!(a.sd >= 0.0 && a.ci95_low <= a.ci95_high);
    Ok(())
}

pub fn affine_map() -> impl Strategy<Value = ([f64; 4], [f64; 2])> {
    (prop::array::uniform4(-3.0..3.0f64), prop::array::uniform2(-10.0..10.0f64))
        .prop_filter("invertible", |(a, _)| (a[0] * a[3] - a[1] * a[2]).abs() > 0.1 && a[0].abs() > 0.1)
}

pub fn weights(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05..5.0f64, n)
}

pub fn alphas() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![1 => Just(0.0), 4 => 0.0..3.0f64, 1 => 1e-9..1e-6f64], 1..12)
}
