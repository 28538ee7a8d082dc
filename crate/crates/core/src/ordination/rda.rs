//! Redundancy analysis: least-squares projection, R² and adjusted R².

use crate::error::{Error, Result};
use crate::linalg::ColumnBasis;
use crate::matrix::Matrix;
use crate::scalar::Scalar;

pub fn column_means<T: Scalar>(m: &Matrix<T>) -> Vec<T> {
    let n = T::from_count(m.nrows());
    m.columns().map(|c| c.iter().copied().sum::<T>() / n).collect()
}

/// Subtracts each column's mean from that column.
pub fn center_columns<T: Scalar>(m: &Matrix<T>) -> Result<Matrix<T>> {
    if m.nrows() == 0 {
        return Err(Error::InvalidInput("cannot center a matrix with no rows".into()));
    }
    let mut out = m.clone();
    for j in 0..m.ncols() {
        let col = out.col_mut(j);
        if let Some(i) = col.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: i, col: j });
        }
        let mean = col.iter().copied().sum::<T>() / T::from_count(col.len());
        col.iter_mut().for_each(|v| *v = *v - mean);
    }
    Ok(out)
}

/// Centers columns under row weights summing to one.
pub(crate) fn weighted_center_columns<T: Scalar>(m: &Matrix<T>, weights: &[T]) -> Matrix<T> {
    let mut out = m.clone();
    for j in 0..m.ncols() {
        let col = out.col_mut(j);
        let mean: T = col.iter().zip(weights).map(|(&v, &w)| v * w).sum();
        col.iter_mut().for_each(|v| *v = *v - mean);
    }
    out
}

/// Least-squares fitted values of every column of `y` on the columns of `x`.
///
/// With `weights`, the projection is orthogonal in the inner product
/// `<a, b> = Σ wᵢ aᵢ bᵢ`. Rank deficiency is handled by discarding singular
/// directions below `1e-10 · σ_max`; an `x` with nothing left projects
/// everything to zero.
pub fn fit_projection<T: Scalar>(
    y: &Matrix<T>,
    x: &Matrix<T>,
    weights: Option<&[T]>,
) -> Result<Matrix<T>> {
    if y.nrows() != x.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "response has {} rows, predictors have {}",
            y.nrows(),
            x.nrows()
        )));
    }
    match weights {
        None => Ok(ColumnBasis::new(x).project(y)),
        Some(w) => {
            if w.len() != y.nrows() {
                return Err(Error::DimensionMismatch(format!(
                    "{} weights for {} rows",
                    w.len(),
                    y.nrows()
                )));
            }
            if let Some(i) = w.iter().position(|&v| v.is_nan() || v <= T::zero() || !v.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "weight {i} is {}, weights must be positive",
                    w[i]
                )));
            }
            let root: Vec<T> = w.iter().map(|v| v.sqrt()).collect();
            let inv_root: Vec<T> = root.iter().map(|v| v.recip()).collect();
            let basis = ColumnBasis::new(&x.scale_rows(&root));
            Ok(basis.project(&y.scale_rows(&root)).scale_rows(&inv_root))
        }
    }
}

/// R² of the RDA of `y` on `x` together with the rank of centered `x`.
pub(crate) fn rda_fit<T: Scalar>(y: &Matrix<T>, x: &Matrix<T>) -> Result<(T, usize)> {
    let n = y.nrows();
    if n != x.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "response has {n} sites, predictors have {}",
            x.nrows()
        )));
    }
    if n < 3 {
        return Err(Error::InvalidInput(format!("RDA needs at least 3 sites, got {n}")));
    }
    let yc = center_columns(y)?;
    let xc = center_columns(x)?;
    let basis = ColumnBasis::new(&xc);
    let total = yc.ssq();
    if total == T::zero() {
        return Ok((T::zero(), basis.rank()));
    }
    let r2 = basis.projected_ssq(&yc) / total;
    Ok((r2.min(T::one()).max(T::zero()), basis.rank()))
}

/// Fraction of the total (centered) sum of squares of `y` explained by a
/// linear fit on `x`. A constant response table yields 0.
pub fn rda_r2<T: Scalar>(y: &Matrix<T>, x: &Matrix<T>) -> Result<T> {
    rda_fit(y, x).map(|(r2, _)| r2)
}

/// Ezekiel's adjustment `1 − (1 − R²)(n − 1)/(n − m − 1)`, where `m` is the
/// rank of the predictor block.
pub fn adjusted_r2<T: Scalar>(r2: T, n: usize, m: usize) -> Result<T> {
    adjusted_r2_named(r2, n, m, "predictor block")
}

pub(crate) fn adjusted_r2_named<T: Scalar>(r2: T, n: usize, m: usize, block: &str) -> Result<T> {
    if n < m + 2 {
        return Err(Error::InsufficientDf {
            block: block.to_string(),
            n,
            rank: m,
        });
    }
    if m == 0 {
        return Ok(r2);
    }
    let n1 = T::from_count(n - 1);
    let dfr = T::from_count(n - m - 1);
    Ok(T::one() - (T::one() - r2) * n1 / dfr)
}
