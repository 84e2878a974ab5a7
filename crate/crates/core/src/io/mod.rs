//! Run configuration, velocity snapshots, and report files.

mod config;
mod report;
mod snapshot;

pub use config::{
    load_config, save_config, DiagnosticsSection, InitialKind, InitialSection, RunConfig,
    SolverSection, SuitabilitySection, SweepSection,
};
pub use report::{render_csv, render_json, write_report, ReportFormat, Table, Tabular};
pub use snapshot::{
    decode_snapshot, encode_snapshot, load_snapshot, save_snapshot, LATTICE_TAG, MAGIC, VERSION,
};
