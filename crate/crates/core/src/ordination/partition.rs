//! Two-block variance partitioning.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

use super::cca::chi_square_transform;
use super::rda::{adjusted_r2_named, rda_fit};
use super::table::PredictorBlock;

/// Ordination method behind a partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Adjusted R² of a redundancy analysis.
    Rda,
    /// Unadjusted constrained-inertia proportion of a CCA.
    Cca,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Rda => "rda",
            Method::Cca => "cca",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rda" => Ok(Method::Rda),
            "cca" => Ok(Method::Cca),
            other => Err(Error::InvalidInput(format!("unknown method '{other}'"))),
        }
    }
}

/// Fractions of a two-block partition of `Y` by predictor sets X and W.
///
/// `frac_pure_x + frac_shared + frac_pure_w == r2_xw` always holds; the
/// individual fractions can be negative when built from adjusted R².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionResult<T> {
    pub frac_pure_x: T,
    pub frac_shared: T,
    pub frac_pure_w: T,
    pub frac_residual: T,
    pub r2_x: T,
    pub r2_w: T,
    pub r2_xw: T,
}

impl<T: Scalar> PartitionResult<T> {
    /// Inclusion–exclusion from the three sub-model fits.
    pub fn from_fits(r2_x: T, r2_w: T, r2_xw: T) -> Self {
        Self {
            frac_pure_x: r2_xw - r2_w,
            frac_shared: r2_x + r2_w - r2_xw,
            frac_pure_w: r2_xw - r2_x,
            frac_residual: T::one() - r2_xw,
            r2_x,
            r2_w,
            r2_xw,
        }
    }
}

/// Adjusted-R² partition of an RDA.
pub fn varpart_two<T: Scalar>(
    y: &Matrix<T>,
    x: &PredictorBlock<T>,
    w: &PredictorBlock<T>,
) -> Result<PartitionResult<T>> {
    let xw = x.concat(w, format!("{}+{}", x.name(), w.name()))?;
    let n = y.nrows();
    let fit = |block: &PredictorBlock<T>| -> Result<T> {
        let (r2, rank) = rda_fit(y, block.values())?;
        adjusted_r2_named(r2, n, rank, block.name())
    };
    Ok(PartitionResult::from_fits(fit(x)?, fit(w)?, fit(&xw)?))
}

/// Constrained-inertia partition of a CCA.
pub fn varpart_cca<T: Scalar>(
    y: &Matrix<T>,
    x: &PredictorBlock<T>,
    w: &PredictorBlock<T>,
) -> Result<PartitionResult<T>> {
    let xw = x.concat(w, format!("{}+{}", x.name(), w.name()))?;
    let chi = chi_square_transform(y)?;
    let ab = chi.constrained(x.values())?.proportion;
    let bc = chi.constrained(w.values())?.proportion;
    let abc = chi.constrained(xw.values())?.proportion;
    Ok(PartitionResult::from_fits(ab, bc, abc))
}

pub fn varpart<T: Scalar>(
    method: Method,
    y: &Matrix<T>,
    x: &PredictorBlock<T>,
    w: &PredictorBlock<T>,
) -> Result<PartitionResult<T>> {
    match method {
        Method::Rda => varpart_two(y, x, w),
        Method::Cca => varpart_cca(y, x, w),
    }
}
