//! Chart catalog and domain sampling.

mod catalog;
mod grid;

pub use catalog::{catalog, catalog_lookup, CatalogEntry, CatalogSummary, ExpectedData, KnownSoliton, CATALOG_NAMES};
pub use grid::{random_points, sample_grid, GridPurpose, GridSpec};
