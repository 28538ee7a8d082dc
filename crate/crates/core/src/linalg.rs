//! Orthonormal column-space bases via one-sided Jacobi SVD.
//!
//! The ordination code only ever needs projections onto the column space of a
//! (tall, thin) predictor matrix, so instead of a general pseudo-inverse we
//! keep the left singular vectors whose singular values survive the relative
//! cutoff. Projecting onto their span is the same as applying `X X⁺`.

use crate::matrix::{dot, Matrix};
use crate::scalar::Scalar;

const MAX_SWEEPS: usize = 60;

/// Orthonormal basis of the numerically significant column space of a matrix.
#[derive(Debug, Clone)]
pub struct ColumnBasis<T> {
    rows: usize,
    vectors: Vec<Vec<T>>,
    singular_values: Vec<T>,
}

impl<T: Scalar> ColumnBasis<T> {
    /// Computes the basis with the default cutoff `Scalar::rank_cutoff() * σ_max`.
    pub fn new(x: &Matrix<T>) -> Self {
        Self::with_cutoff(x, T::rank_cutoff())
    }

    pub fn with_cutoff(x: &Matrix<T>, rel_cutoff: T) -> Self {
        let rows = x.nrows();
        let mut cols: Vec<Vec<T>> = x.columns().map(<[T]>::to_vec).collect();
        jacobi_orthogonalize(&mut cols);

        let norms: Vec<T> = cols.iter().map(|c| dot(c, c).sqrt()).collect();
        let sigma_max = norms.iter().copied().fold(T::zero(), T::max);
        let threshold = rel_cutoff * sigma_max;

        let mut kept: Vec<(T, Vec<T>)> = cols
            .into_iter()
            .zip(norms)
            .filter(|(_, s)| *s > threshold && *s > T::zero())
            .map(|(mut c, s)| {
                c.iter_mut().for_each(|v| *v = *v / s);
                (s, c)
            })
            .collect();
        kept.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));

        let (singular_values, vectors) = kept.into_iter().unzip();
        Self {
            rows,
            vectors,
            singular_values,
        }
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    /// Retained singular values, largest first.
    pub fn singular_values(&self) -> &[T] {
        &self.singular_values
    }

    /// Orthogonal projection of every column of `y` onto the basis span.
    pub fn project(&self, y: &Matrix<T>) -> Matrix<T> {
        assert_eq!(y.nrows(), self.rows, "row mismatch in projection");
        let mut out = Matrix::zeros(y.nrows(), y.ncols());
        for j in 0..y.ncols() {
            let yj = y.col(j);
            let dst = out.col_mut(j);
            for u in &self.vectors {
                let coef = dot(u, yj);
                for (d, &ui) in dst.iter_mut().zip(u) {
                    *d = *d + coef * ui;
                }
            }
        }
        out
    }

    /// Sum of squares of the projection of `y`, without materializing it.
    pub fn projected_ssq(&self, y: &Matrix<T>) -> T {
        assert_eq!(y.nrows(), self.rows, "row mismatch in projection");
        let mut total = T::zero();
        for yj in y.columns() {
            for u in &self.vectors {
                let c = dot(u, yj);
                total = total + c * c;
            }
        }
        total
    }
}

/// Numerical rank with the default relative cutoff.
pub fn rank<T: Scalar>(x: &Matrix<T>) -> usize {
    ColumnBasis::new(x).rank()
}

/// Hestenes one-sided Jacobi: rotates column pairs until all are mutually
/// orthogonal to working precision. Column norms are then the singular values.
fn jacobi_orthogonalize<T: Scalar>(cols: &mut [Vec<T>]) {
    let k = cols.len();
    if k < 2 {
        return;
    }
    let tol = T::epsilon() * T::lit(4.0);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..k - 1 {
            for q in p + 1..k {
                let (left, right) = cols.split_at_mut(q);
                let (a, b) = (&mut left[p], &mut right[0]);
                let alpha = dot(a, a);
                let beta = dot(b, b);
                let gamma = dot(a, b);
                if alpha == T::zero() || beta == T::zero() {
                    continue;
                }
                if gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (T::lit(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for (ai, bi) in a.iter_mut().zip(b.iter_mut()) {
                    let (x, y) = (*ai, *bi);
                    *ai = c * x - s * y;
                    *bi = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_duplicated_columns() {
        let x = Matrix::from_rows(&[[1.0, 1.0, 0.0], [2.0, 2.0, 1.0], [3.0, 3.0, 0.0], [4.0, 4.0, 2.0]])
            .unwrap();
        assert_eq!(rank(&x), 2);
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        let x: Matrix<f64> = Matrix::zeros(5, 3);
        let b = ColumnBasis::new(&x);
        assert_eq!(b.rank(), 0);
        let y = Matrix::from_rows(&[[1.0], [2.0], [3.0], [4.0], [5.0]]).unwrap();
        assert_eq!(b.project(&y).ssq(), 0.0);
    }

    #[test]
    fn singular_values_of_diagonal() {
        let x = Matrix::<f64>::from_rows(&[[3.0, 0.0], [0.0, 4.0], [0.0, 0.0]]).unwrap();
        let b = ColumnBasis::new(&x);
        let sv = b.singular_values();
        assert!((sv[0] - 4.0).abs() < 1e-14);
        assert!((sv[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn basis_is_orthonormal() {
        let x = Matrix::<f64>::from_rows(&[
            [1.0, 0.3, 2.0],
            [0.5, 1.2, -1.0],
            [2.2, -0.7, 0.1],
            [0.0, 1.0, 1.0],
            [1.5, 1.5, 1.5],
        ])
        .unwrap();
        let b = ColumnBasis::new(&x);
        assert_eq!(b.rank(), 3);
        for i in 0..3 {
            for j in 0..3 {
                let d = dot(&b.vectors[i], &b.vectors[j]);
                let want: f64 = if i == j { 1.0 } else { 0.0 };
                assert!((d - want).abs() < 1e-13, "{i},{j}: {d}");
            }
        }
    }
}
