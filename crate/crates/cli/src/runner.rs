//! Dispatch layer: validates a config, pins the worker pool, runs the
//! experiment, stamps telemetry, and writes any requested artifacts.

use std::time::Instant;

use primecurve::{Error, Result};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::experiments;
use crate::report::{peak_rss_kb, ExperimentReport, Telemetry};

fn dispatch(config: &ExperimentConfig) -> Result<ExperimentReport> {
    match config.kind {
        ExperimentKind::Curvature => experiments::curvature(config),
        ExperimentKind::SignChanges => experiments::sign_changes_experiment(config),
        ExperimentKind::DeltaSum => experiments::delta_sum_experiment(config),
        ExperimentKind::SingularSum => experiments::singular_sum(config),
        ExperimentKind::Census => experiments::census(config),
        ExperimentKind::BSet => experiments::b_set(config),
        ExperimentKind::Scattered => experiments::scattered(config),
        ExperimentKind::VerifyAll => experiments::verify_all(config),
    }
}

/// Run one experiment. All module calls are pure; the runner owns the worker
/// pool, and report assembly is single-threaded.
pub fn run(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let start = Instant::now();
    let mut report = if config.workers == 0 {
        dispatch(config)?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::Resource(e.to_string()))?
            .install(|| dispatch(config))?
    };
    report.telemetry = Telemetry {
        wall: start.elapsed(),
        peak_rss_kb: peak_rss_kb(),
    };
    report.write_outputs()?;
    Ok(report)
}

/// Process exit code for an error: 2 usage, 3 resource, 1 failed internal
/// consistency. (0 is reserved for a clean pass, 1 also covers failed
/// checks.)
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Usage(_)
        | Error::InvalidProgression { .. }
        | Error::IndexOutOfRange { .. }
        | Error::Domain(_)
        | Error::Precondition(_)
        | Error::Format(_)
        | Error::Io(_) => 2,
        Error::Resource(_) => 3,
        Error::Numerics(_) => 1,
    }
}
