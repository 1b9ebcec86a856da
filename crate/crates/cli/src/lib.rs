//! File formats, baseline caching, parallel execution and report emission
//! around [`corrscope_core`].
//!
//! [`pipeline::run_analysis`] is the programmatic entry point;
//! `corrscope` (the binary) wraps it with argument parsing and exit codes.

pub mod cache;
pub mod error;
pub mod format;
pub mod ingest;
pub mod parallel;
pub mod pipeline;
pub mod report;

pub use error::{Error, Result};
pub use ingest::load_price_panel;
pub use pipeline::{run_analysis, AnalysisOutput, RunConfig};
pub use report::{emit_reports, WindowReport};
