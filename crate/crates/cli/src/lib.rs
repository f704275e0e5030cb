//! Batch driver for veering triangulations: validation, reports with
//! certificates, norms, carried surfaces and move runs, as JSON.

pub mod config;
pub mod error;
pub mod input;
pub mod moves;
pub mod pool;
pub mod report;
pub mod validate;

pub use config::{Budgets, Mode, Prepared, RunConfig};
pub use error::CliError;

/// Version tag carried by every output document.
pub const SCHEMA: &str = "taut/1";

/// Deterministic JSON text for any output document, newline-terminated.
pub fn to_json<T: serde::Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("output documents serialize");
    s.push('\n');
    s
}
