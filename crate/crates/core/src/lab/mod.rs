//! Verification harness: run-spec documents, deterministic sampling, suites
//! and diagnostics reports.

mod report;
mod sampling;
mod spec;
mod suites;

pub use report::{
    diffable_json, emit_report, parse_report, run_suites, run_suites_on, CheckSummary, DiagnosticsReport, Diffable,
    EngineInfo, Entry, Format, Meta, Outcome, SuiteRecord, Summary, Witness,
};
pub use sampling::{sample_points, sample_with};
pub use spec::{
    fixture_expected_failures, parse_spec, RunSpec, Sampling, DEFAULT_BOX, DEFAULT_COUNT, DEFAULT_RADII, RADIUS_LIMITS,
};
pub use suites::{fd_crosscheck, frame_label, measure_point, Measurement, Suite};
