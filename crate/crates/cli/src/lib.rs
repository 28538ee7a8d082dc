//! Command-line front end: CSV ingestion, bootstrapped analyses of real
//! tables, simulation export and reproduction of the simulation studies.

pub mod analyze;
pub mod config;
pub mod csv_io;
pub mod error;
pub mod provenance;
pub mod reproduce;
pub mod simulate;
pub mod svg;

pub use error::{CliError, Result};
