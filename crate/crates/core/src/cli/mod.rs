//! Config-driven experiments: the library side of the `mfcd` binary.
//!
//! Every command takes a resolved [`RunConfig`] and an output directory and
//! writes CSV/JSON artifacts plus a `<command>_run.json` record holding the
//! config, so any output can be regenerated from its own record.

mod commands;
mod config;
mod stats;
mod verify;

pub use commands::{
    cmd_bloch, cmd_export_schedule, cmd_fidelity_batch, cmd_success_curve, error_exit_code, fidelity_pair,
    ground_bitstring, linear_export, mfcd_export, rotating_frame_run, BlochSummary, ExportSummary, Outcome, RunRecord,
    Status,
};
pub use config::{
    BatchSpec, DriveMode, ExportSpec, FamilySpec, InstanceSpec, RunConfig, ScheduleSpec, SuccessSpec, VerifySpec,
};
pub use stats::{median, BatchGroup, SampleRecord, SuccessPoint, SummaryStats};
pub use verify::{cmd_verify, derivative_check, run_checks, single_spin_oracle, Check, VerifyReport};
