//! Chi-square standardization and constrained inertia for CCA.

use crate::error::{Error, Result};
use crate::linalg::ColumnBasis;
use crate::matrix::Matrix;
use crate::scalar::Scalar;

use super::rda::weighted_center_columns;

/// Chi-square standardized table and its margins.
#[derive(Debug, Clone)]
pub struct ChiSquare<T> {
    /// `(P_ij − r_i c_j) / √(r_i c_j)`
    pub q_bar: Matrix<T>,
    pub row_weights: Vec<T>,
    pub col_weights: Vec<T>,
    /// Pearson χ² divided by the grand total.
    pub total_inertia: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CcaFit<T> {
    pub total_inertia: T,
    pub constrained_inertia: T,
    pub proportion: T,
}

pub fn chi_square_transform<T: Scalar>(y: &Matrix<T>) -> Result<ChiSquare<T>> {
    for j in 0..y.ncols() {
        for (i, &v) in y.col(j).iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
            if v < T::zero() {
                return Err(Error::InvalidInput(format!(
                    "negative entry {v} at row {i}, column {j}"
                )));
            }
        }
    }
    let row_sums = y.row_sums();
    let col_sums = y.col_sums();
    let empty_rows: Vec<usize> = positions_of_zero(&row_sums);
    let empty_cols: Vec<usize> = positions_of_zero(&col_sums);
    if !empty_rows.is_empty() || !empty_cols.is_empty() {
        return Err(Error::EmptyMargins {
            rows: empty_rows,
            cols: empty_cols,
        });
    }
    let grand: T = row_sums.iter().copied().sum();
    let r: Vec<T> = row_sums.iter().map(|&s| s / grand).collect();
    let c: Vec<T> = col_sums.iter().map(|&s| s / grand).collect();

    let mut q_bar = Matrix::zeros(y.nrows(), y.ncols());
    let mut total = T::zero();
    for (j, &cj) in c.iter().enumerate() {
        let src = y.col(j);
        let dst = q_bar.col_mut(j);
        for ((d, &v), &ri) in dst.iter_mut().zip(src).zip(&r) {
            let expected = ri * cj;
            let q = (v / grand - expected) / expected.sqrt();
            *d = q;
            total = total + q * q;
        }
    }
    Ok(ChiSquare {
        q_bar,
        row_weights: r,
        col_weights: c,
        total_inertia: total,
    })
}

/// Inertia of the chi-square standardized table captured by the predictors.
pub fn cca_explained<T: Scalar>(y: &Matrix<T>, x: &Matrix<T>) -> Result<CcaFit<T>> {
    let chi = chi_square_transform(y)?;
    chi.constrained(x)
}

impl<T: Scalar> ChiSquare<T> {
    /// Constrained inertia of an already transformed table under predictors `x`.
    pub fn constrained(&self, x: &Matrix<T>) -> Result<CcaFit<T>> {
        if x.nrows() != self.q_bar.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "table has {} sites, predictors have {}",
                self.q_bar.nrows(),
                x.nrows()
            )));
        }
        if let Some((i, j)) = first_non_finite(x) {
            return Err(Error::NonFinite { row: i, col: j });
        }
        let root: Vec<T> = self.row_weights.iter().map(|r| r.sqrt()).collect();
        let xw = weighted_center_columns(x, &self.row_weights).scale_rows(&root);
        let basis = ColumnBasis::new(&xw);
        let total = self.total_inertia;
        if basis.rank() == 0 || total == T::zero() {
            return Ok(CcaFit {
                total_inertia: total,
                constrained_inertia: T::zero(),
                proportion: T::zero(),
            });
        }
        let constrained = basis.projected_ssq(&self.q_bar);
        Ok(CcaFit {
            total_inertia: total,
            constrained_inertia: constrained,
            proportion: (constrained / total).min(T::one()).max(T::zero()),
        })
    }
}

/// `ln(1 + y)` elementwise; zeros stay zero.
pub fn log1p_transform<T: Scalar>(y: &Matrix<T>) -> Result<Matrix<T>> {
    for j in 0..y.ncols() {
        if let Some(i) = y.col(j).iter().position(|&v| v < T::zero() || !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "cannot log-transform {} at row {i}, column {j}",
                y[(i, j)]
            )));
        }
    }
    Ok(y.map(|v| v.ln_1p()))
}

fn positions_of_zero<T: Scalar>(v: &[T]) -> Vec<usize> {
    v.iter()
        .enumerate()
        .filter(|(_, &s)| s <= T::zero())
        .map(|(i, _)| i)
        .collect()
}

fn first_non_finite<T: Scalar>(x: &Matrix<T>) -> Option<(usize, usize)> {
    (0..x.ncols()).find_map(|j| x.col(j).iter().position(|v| !v.is_finite()).map(|i| (i, j)))
}
