//! Experiment configuration, Monte Carlo convergence studies and reports.
//!
//! Samples are independent and drawn from counter-based streams keyed by
//! `(seed, sample index)`; results are reduced in index order, so reports
//! are byte-identical for any worker count.

mod config;
mod convergence;
mod report;

pub use config::{ExperimentConfig, DIRAC_BETA};
pub use convergence::{
    estimate_order, run_spatial_convergence, run_temporal_convergence, ErrorRow, ErrorTable, StudyKind,
};
pub use report::{
    emit_report, parse_report, read_report, render_field, render_mesh, render_report, sidecar_path,
    REPORT_HEADER,
};

pub(crate) use convergence::map_samples;
