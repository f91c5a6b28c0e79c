//! Run-record ingestion, seed pairing, report and curve serialization.

mod curves;
mod pairing;
mod report;
mod runfile;

pub use curves::{parse_curves, write_curves, CURVE_HEADER};
pub use pairing::{build_paired_dataset, PairingPolicy, PairingReport};
pub use report::{
    analyze_metric, parse_report, render_effects_table, serialize_report, AnalysisReport,
    EffectRow, EssSummary, MetricReport, TestOutcome, REPORT_VERSION,
};
pub use runfile::{parse_run_file, RunFile, RUN_HEADER};
