//! Descriptive statistics and correlation coefficients.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub fn mean<T: Scalar>(xs: &[T]) -> T {
    xs.iter().copied().sum::<T>() / T::from_count(xs.len())
}

/// Sample standard deviation (n − 1 denominator); zero for fewer than two values.
pub fn sample_sd<T: Scalar>(xs: &[T]) -> T {
    if xs.len() < 2 || xs.iter().all(|&x| x == xs[0]) {
        return T::zero();
    }
    let m = mean(xs);
    let ss: T = xs.iter().map(|&x| (x - m) * (x - m)).sum();
    (ss / T::from_count(xs.len() - 1)).sqrt()
}

/// Empirical quantile with linear interpolation between order statistics
/// (`h = (n − 1) p`). `sorted` must be ascending.
pub fn quantile_sorted<T: Scalar>(sorted: &[T], p: f64) -> T {
    assert!(!sorted.is_empty(), "quantile of empty sample");
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    let frac = T::lit(h - lo as f64);
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// Product-moment correlation with its t statistic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pearson {
    pub r: f64,
    pub t: f64,
    pub df: usize,
}

pub fn pearson_r(xs: &[f64], ys: &[f64]) -> Result<Pearson> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} x-values vs {} y-values",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "correlation needs at least 3 pairs, got {}",
            xs.len()
        )));
    }
    let (mx, my) = (mean(xs), mean(ys));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::ZeroVariance("x"));
    }
    if syy == 0.0 {
        return Err(Error::ZeroVariance("y"));
    }
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    let df = xs.len() - 2;
    let t = if r.abs() == 1.0 {
        f64::INFINITY.copysign(r)
    } else {
        r * (df as f64 / (1.0 - r * r)).sqrt()
    };
    Ok(Pearson { r, t, df })
}

/// Ranks starting at 1, ties receive their average rank.
pub fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut out = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            out[k] = avg;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation (Pearson on average ranks).
pub fn spearman_rho(xs: &[f64], ys: &[f64]) -> Result<f64> {
    pearson_r(&ranks(xs), &ranks(ys)).map(|p| p.r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_and_sd() {
        let xs = [0.1f64, 0.2, 0.3];
        assert!((mean(&xs) - 0.2).abs() < 1e-15);
        assert!((sample_sd(&xs) - 0.1).abs() < 1e-15);
        assert_eq!(sample_sd(&[4.0f64]), 0.0);
    }

    #[test]
    fn quantiles_interpolate() {
        let s = [1.0f64, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile_sorted(&s, 0.5), 3.0);
        assert!((quantile_sorted(&s, 0.025) - 1.1).abs() < 1e-12);
        assert!((quantile_sorted(&s, 0.975) - 4.9).abs() < 1e-12);
        assert_eq!(quantile_sorted(&[7.0f64], 0.3), 7.0);
    }

    #[test]
    fn pearson_perfect() {
        let xs = [1.0, 2.0, 3.5, 7.0];
        let up: Vec<f64> = xs.iter().map(|x| 2.0 * x).collect();
        let down: Vec<f64> = xs.iter().map(|x| -x).collect();
        assert!((pearson_r(&xs, &up).unwrap().r - 1.0).abs() < 1e-15);
        assert!((pearson_r(&xs, &down).unwrap().r + 1.0).abs() < 1e-15);
    }

    #[test]
    fn pearson_hand_computed() {
        // Sxy = 4, Sxx = Syy = 5
        let p = pearson_r(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
        assert!((p.r - 0.8).abs() < 1e-15);
        assert_eq!(p.df, 2);
        assert!((p.t - 0.8 * (2.0f64 / 0.36).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn pearson_errors() {
        assert_eq!(
            pearson_r(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).unwrap_err(),
            Error::ZeroVariance("x")
        );
        assert!(pearson_r(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(pearson_r(&[1.0, 2.0, 3.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn ranks_with_ties() {
        assert_eq!(ranks(&[10.0, 20.0, 10.0, 5.0]), vec![2.5, 4.0, 2.5, 1.0]);
        let rho = spearman_rho(&[1.0, 2.0, 3.0, 4.0], &[1.0, 4.0, 9.0, 16.0]).unwrap();
        assert!((rho - 1.0).abs() < 1e-15);
    }
}
