use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::Matrix;
use crate::scalar::Scalar;

use super::rda::center_columns;

/// Sites × species abundance matrix with labels.
#[derive(Debug, Clone, PartialEq)]
pub struct CommunityTable<T> {
    site_ids: Vec<String>,
    species_ids: Vec<String>,
    values: Matrix<T>,
}

impl<T: Scalar> CommunityTable<T> {
    pub fn new(site_ids: Vec<String>, species_ids: Vec<String>, values: Matrix<T>) -> Result<Self> {
        check_labels(&site_ids, values.nrows(), "site")?;
        check_labels(&species_ids, values.ncols(), "species")?;
        if values.nrows() < 2 {
            return Err(Error::InvalidInput(format!(
                "community table needs at least 2 sites, got {}",
                values.nrows()
            )));
        }
        if values.ncols() < 1 {
            return Err(Error::InvalidInput("community table has no species".into()));
        }
        for (j, species) in species_ids.iter().enumerate() {
            for (i, &v) in values.col(j).iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
                if v < T::zero() {
                    return Err(Error::InvalidInput(format!(
                        "negative abundance {v} at site {} (row {i}), species {} (column {j})",
                        site_ids[i], species
                    )));
                }
            }
        }
        Ok(Self {
            site_ids,
            species_ids,
            values,
        })
    }

    /// Unlabelled table; sites and species get `s1..`, `sp1..` labels.
    pub fn from_matrix(values: Matrix<T>) -> Result<Self> {
        let sites = numbered("s", values.nrows());
        let species = numbered("sp", values.ncols());
        Self::new(sites, species, values)
    }

    pub fn site_ids(&self) -> &[String] {
        &self.site_ids
    }

    pub fn species_ids(&self) -> &[String] {
        &self.species_ids
    }

    pub fn values(&self) -> &Matrix<T> {
        &self.values
    }

    pub fn n_sites(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_species(&self) -> usize {
        self.values.ncols()
    }

    /// Copy of the table without species whose column sum is zero.
    ///
    /// Returns `None` when no species would remain.
    pub fn drop_empty_species(&self) -> Option<Self> {
        let keep: Vec<usize> = self
            .values
            .col_sums()
            .iter()
            .enumerate()
            .filter(|(_, &s)| s > T::zero())
            .map(|(j, _)| j)
            .collect();
        if keep.is_empty() {
            return None;
        }
        if keep.len() == self.n_species() {
            return Some(self.clone());
        }
        Some(Self {
            site_ids: self.site_ids.clone(),
            species_ids: keep.iter().map(|&j| self.species_ids[j].clone()).collect(),
            values: self.values.select_cols(&keep),
        })
    }

    pub(crate) fn with_rows(&self, site_ids: Vec<String>, idx: &[usize]) -> Self {
        Self {
            site_ids,
            species_ids: self.species_ids.clone(),
            values: self.values.select_rows(idx),
        }
    }
}

/// Named sites × variables predictor matrix.
#[derive(Debug, Clone)]
pub struct PredictorBlock<T> {
    name: String,
    site_ids: Vec<String>,
    variable_ids: Vec<String>,
    values: Matrix<T>,
    rank: OnceLock<usize>,
}

impl<T: Scalar> PredictorBlock<T> {
    pub fn new(
        name: impl Into<String>,
        site_ids: Vec<String>,
        variable_ids: Vec<String>,
        values: Matrix<T>,
    ) -> Result<Self> {
        check_labels(&site_ids, values.nrows(), "site")?;
        check_labels(&variable_ids, values.ncols(), "variable")?;
        for j in 0..values.ncols() {
            if let Some(i) = values.col(j).iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
        Ok(Self {
            name: name.into(),
            site_ids,
            variable_ids,
            values,
            rank: OnceLock::new(),
        })
    }

    pub fn from_matrix(name: impl Into<String>, values: Matrix<T>) -> Result<Self> {
        let sites = numbered("s", values.nrows());
        let vars = numbered("v", values.ncols());
        Self::new(name, sites, vars, values)
    }

    /// Block with `n` sites and no variables.
    pub fn empty(name: impl Into<String>, site_ids: Vec<String>) -> Self {
        let n = site_ids.len();
        Self {
            name: name.into(),
            site_ids,
            variable_ids: Vec::new(),
            values: Matrix::zeros(n, 0),
            rank: OnceLock::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn site_ids(&self) -> &[String] {
        &self.site_ids
    }

    pub fn variable_ids(&self) -> &[String] {
        &self.variable_ids
    }

    pub fn values(&self) -> &Matrix<T> {
        &self.values
    }

    pub fn n_sites(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_variables(&self) -> usize {
        self.values.ncols()
    }

    /// Numerical rank of the column-centered block.
    pub fn rank(&self) -> usize {
        *self.rank.get_or_init(|| match center_columns(&self.values) {
            Ok(c) => linalg::rank(&c),
            Err(_) => 0,
        })
    }

    /// Column concatenation of two row-aligned blocks.
    pub fn concat(&self, other: &Self, name: impl Into<String>) -> Result<Self> {
        if self.site_ids != other.site_ids {
            return Err(Error::DimensionMismatch(format!(
                "blocks '{}' and '{}' are not site-aligned",
                self.name, other.name
            )));
        }
        let mut vars = self.variable_ids.clone();
        vars.extend(other.variable_ids.iter().cloned());
        Ok(Self {
            name: name.into(),
            site_ids: self.site_ids.clone(),
            variable_ids: vars,
            values: self.values.hstack(&other.values)?,
            rank: OnceLock::new(),
        })
    }

    /// Sub-block with the named subset of columns.
    pub fn select(&self, name: impl Into<String>, cols: &[usize]) -> Self {
        Self {
            name: name.into(),
            site_ids: self.site_ids.clone(),
            variable_ids: cols.iter().map(|&j| self.variable_ids[j].clone()).collect(),
            values: self.values.select_cols(cols),
            rank: OnceLock::new(),
        }
    }

    pub(crate) fn with_rows(&self, site_ids: Vec<String>, idx: &[usize]) -> Self {
        Self {
            name: self.name.clone(),
            site_ids,
            variable_ids: self.variable_ids.clone(),
            values: self.values.select_rows(idx),
            rank: OnceLock::new(),
        }
    }
}

impl<T: PartialEq> PartialEq for PredictorBlock<T> {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.site_ids == other.site_ids
            && self.variable_ids == other.variable_ids
            && self.values == other.values
    }
}

pub(crate) fn numbered(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn check_labels(labels: &[String], expected: usize, what: &str) -> Result<()> {
    if labels.len() != expected {
        return Err(Error::DimensionMismatch(format!(
            "{} {what} labels for {expected} {what}s",
            labels.len()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_abundance_rejected() {
        let m = Matrix::from_rows(&[[1.0, 2.0], [-1.0, 0.0]]).unwrap();
        let err = CommunityTable::from_matrix(m).unwrap_err();
        assert!(err.to_string().contains("row 1"), "{err}");
    }

    #[test]
    fn single_site_rejected() {
        let m = Matrix::from_rows(&[[1.0, 2.0]]).unwrap();
        assert!(CommunityTable::from_matrix(m).is_err());
    }

    #[test]
    fn nan_predictor_rejected() {
        let m = Matrix::from_rows(&[[1.0], [f64::NAN]]).unwrap();
        assert_eq!(
            PredictorBlock::from_matrix("env", m).unwrap_err(),
            Error::NonFinite { row: 1, col: 0 }
        );
    }

    #[test]
    fn rank_ignores_constant_and_duplicate_columns() {
        let m = Matrix::from_rows(&[[1.0, 5.0, 1.0], [2.0, 5.0, 2.0], [4.0, 5.0, 4.0], [3.0, 5.0, 3.0]])
            .unwrap();
        let b = PredictorBlock::from_matrix("x", m).unwrap();
        assert_eq!(b.rank(), 1);
        assert_eq!(PredictorBlock::<f64>::empty("w", numbered("s", 4)).rank(), 0);
    }

    #[test]
    fn drop_empty_species_keeps_labels() {
        let m = Matrix::from_rows(&[[1.0, 0.0, 2.0], [3.0, 0.0, 0.0]]).unwrap();
        let t = CommunityTable::from_matrix(m).unwrap();
        let d = t.drop_empty_species().unwrap();
        assert_eq!(d.species_ids(), &["sp1".to_string(), "sp3".to_string()]);
        let z = CommunityTable::from_matrix(Matrix::<f64>::zeros(2, 2)).unwrap();
        assert!(z.drop_empty_species().is_none());
    }
}
