//! Command-line front end for `dhstab`: region spec documents, matrix
//! files, reports and SVG eigenvalue plots.

pub mod app;
pub mod complex;
pub mod error;
pub mod matio;
pub mod plot;
pub mod report;
pub mod spec;

pub use complex::parse_complex_literal;
pub use error::{CliError, CliResult};
pub use spec::RegionSpec;
