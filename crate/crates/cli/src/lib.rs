//! Experiment driver for `twonorm`: JSON run configs in, CSV and JSON artifacts out.
//!
//! See the repository README for the config and artifact schemas.

pub mod artifacts;
pub mod config;
pub mod registry;
pub mod run;

use twonorm::Termination;

pub use config::{ConfigError, EmitFlags, InstanceConfig, RunConfig};
pub use run::{
    run_blowup_scan, run_solve, run_sweep, RunError, ScanOutcome, ScanRow, SolveOutcome,
    SweepOutcome, SweepRow,
};

/// Process exit codes of the `twonorm` binary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    HorizonReached,
    Error,
    BlowUpDetected,
    BudgetExhausted,
}

impl ExitStatus {
    /// A contraction failure is a breakdown of the method, so it maps to [`ExitStatus::Error`].
    pub fn from_termination<S>(t: &Termination<S>) -> Self {
        match t {
            Termination::HorizonReached => ExitStatus::HorizonReached,
            Termination::BlowUpDetected { .. } => ExitStatus::BlowUpDetected,
            Termination::BudgetExhausted => ExitStatus::BudgetExhausted,
            Termination::ContractionFailure { .. } => ExitStatus::Error,
        }
    }

    pub fn code(self) -> i32 {
        match self {
            ExitStatus::HorizonReached => 0,
            ExitStatus::Error => 1,
            ExitStatus::BlowUpDetected => 2,
            ExitStatus::BudgetExhausted => 3,
        }
    }
}
