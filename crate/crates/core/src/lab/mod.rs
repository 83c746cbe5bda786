//! Experiment harness: spec files, validation suites, sweeps and reports.

pub mod report;
pub mod run;
pub mod scenario;
pub mod spec;
pub mod suites;

pub use report::{emit, load_report, render, Check, Format, Provenance, Record, Relation, Report};
pub use spec::{load_spec, parse_spec, Experiment, ExperimentSpec, SweepAxis};
pub use suites::{run_suite, run_suites, SuiteOptions, SUITES};
pub use run::{cost_report, simulate, sweep, RunOptions};
