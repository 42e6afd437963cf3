//! Scenario presets, replicated runs and their on-disk outputs.
//!
//! A preset run writes, under `<out>/<preset>/`:
//!
//! ```text
//! manifest.txt                       every resolved config, for replay
//! summary.csv                        means over seeds per point
//! <axis>=<value>/<mode>/seed-<s>/
//!     config.txt  metrics.csv  stimuli.csv  [snapshot-r<round>.txt]
//! ```

mod preset;
mod runner;
mod snapshot;

pub use preset::{fig2_config, preset, presets, ExperimentPreset, SweepAxis, DEFAULT_SEEDS};
pub use runner::{
    execute, plan, replay, run_preset, run_single, snapshot_from_run, summarize, summary_csv, Manifest, PlannedRun,
    PresetReport, RunOptions, RunOutcome, RunStats, SummaryRow,
};
pub use snapshot::export_snapshot;
