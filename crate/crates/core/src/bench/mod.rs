//! Model comparison harness: exact confusion-count metrics, learning
//! curves over chronological folds, deterministic SVG/CSV figures, and a
//! benchmark runner emitting per-model reports and summary tables.

pub mod curve;
pub mod metrics;
pub mod plot;
pub mod report;
