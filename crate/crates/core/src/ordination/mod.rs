//! Multivariate statistics behind variance partitioning.
//!
//! - **RDA**: centered least-squares projection, R² and adjusted R²
//! - **CCA**: chi-square standardization and weighted constrained inertia
//! - **Partition**: pure/shared/residual fractions for two predictor blocks

mod cca;
mod partition;
mod rda;
mod table;

pub use cca::{cca_explained, chi_square_transform, log1p_transform, CcaFit, ChiSquare};
pub use partition::{varpart, varpart_cca, varpart_two, Method, PartitionResult};
pub use rda::{adjusted_r2, center_columns, column_means, fit_projection, rda_r2};
pub use table::{CommunityTable, PredictorBlock};
pub(crate) use rda::{adjusted_r2_named as adjusted_r2_for, rda_fit as rda_fit_rank};
