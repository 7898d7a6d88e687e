//! Benchmark cases, configuration files, reference data and output.

pub mod config;
pub mod post;
pub mod reference;
pub mod run;

pub use config::{BoundaryCondition, CaseConfig, CaseKind, MeshKind, Outputs};
pub use reference::{compare_to_reference, extract_line_profile, load_reference, ComparisonReport, LineSpec, Quantity, ReferenceProfile};
pub use run::{build_case, compare_run, run_case, simulate, CaseOutcome, RunSummary};
