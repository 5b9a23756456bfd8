use thiserror::Error;

/// Malformed inputs to the engine's data types.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum EngineError {
    #[error("invalid window {0}")]
    InvalidWindow(String),
    #[error("invalid trajectory segment: {0}")]
    InvalidSegment(String),
    #[error("invalid solver config: {0}")]
    InvalidConfig(String),
}

/// Failures of the window-planning routines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum PlanError {
    #[error("strong-norm cap {cap} must exceed the initial strong norm {r0}")]
    InvalidCap { cap: f64, r0: f64 },
    #[error("a-priori bound decreases in time between t = {t_lo} and t = {t_hi}")]
    NonMonotone { t_lo: f64, t_hi: f64 },
    #[error("no contraction window of length >= {min_window} satisfies the stability bounds")]
    NoContractionWindow { min_window: f64 },
    #[error("invalid planning argument: {0}")]
    InvalidArgument(String),
}

/// Failures reported by a frozen-step operator.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum StepError {
    #[error("state left the finite range at t = {t}")]
    NonFinite { t: f64 },
    #[error(
        "characteristic foot moved {displacement} (> half the period) in one substep at t = {t}"
    )]
    CharacteristicBlowup { t: f64, displacement: f64 },
    #[error("frozen input does not cover the window [{start}, {end}]")]
    Uncovered { start: f64, end: f64 },
    #[error("frozen input has an incompatible shape: {0}")]
    Shape(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Failures of a single Picard window.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum PicardError {
    #[error("initial strong norm {norm} exceeds cap / kappa = {limit}")]
    CapPrecondition { norm: f64, limit: f64 },
    #[error("iterate {iter} reached strong norm {norm} above the cap {cap}")]
    CapViolation { iter: usize, norm: f64, cap: f64 },
    #[error("successive-difference ratio exceeded 1 twice in a row (iterate {iter})")]
    ContractionFailure { iter: usize },
    #[error("no convergence within {0} Picard iterations")]
    IterBudget(usize),
    #[error(transparent)]
    Step(#[from] StepError),
}

/// Hard failures of a continuation solve. Blow-up and budget exhaustion are verdicts, not errors.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum SolveError {
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("frozen-step operator misused: {0}")]
    Step(StepError),
    #[error("initial state is not in the strong space")]
    InitialNotStrong,
}
