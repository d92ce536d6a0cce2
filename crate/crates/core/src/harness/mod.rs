//! Experiment configuration, batch execution, verification and figures.

pub mod check;
pub mod experiment;
pub mod plot;
pub mod scenario;

pub use check::{run_checks, CheckOutcome, CheckSettings};
pub use experiment::{Experiment, ExperimentResult, ScenarioSummary, TrialRecord};
pub use plot::{emit_coverage_comparison, emit_plots, emit_summary_plot};
pub use scenario::{Method, Scenario, ScenarioFile};
