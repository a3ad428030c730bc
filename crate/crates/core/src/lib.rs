pub mod audio;
pub mod curation;
pub mod metrics;
pub mod pipeline;
pub mod script;
pub mod select;
pub mod stats;
pub mod summary;

/// Crate version, recorded in run ledgers.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
