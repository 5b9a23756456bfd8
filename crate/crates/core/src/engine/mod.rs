//! The abstract two-norm fixed-point engine.
//!
//! An instance supplies a solver for the frozen problem `x' = f(t, y, x)` with `y` given, plus
//! a weak norm in which the map `y -> x` contracts on short windows and a strong norm that the
//! frozen solution keeps bounded. The engine plans windows (from analytic bounds when the
//! instance has them, by shrink-and-retry otherwise), runs Picard iteration on each window and
//! glues windows until the horizon, a budget, or the strong norm blows up.

mod bounds;
mod config;
mod continuation;
mod element;
mod error;
mod picard;
mod planning;
mod problem;

pub use bounds::{AnalyticBounds, AprioriBound, StabilityBounds};
pub use config::SolverConfig;
pub use continuation::{
    continuation_solve, continuation_solve_from, strong_norm_floor, BlowUpReason, Solution,
    SolveReport, Termination,
};
pub use element::{NormedPairElement, TrajectorySegment, Window};
pub use error::{EngineError, PicardError, PlanError, SolveError, StepError};
pub use picard::{
    estimate_theta_empirical, picard_window, trajectory_distance, AcceptedWindow, WindowReport,
};
pub use planning::{
    plan_from_bounds, select_contraction_window, select_window, ContractionWindow, WindowPlan,
    RADIUS_SAMPLES,
};
pub use problem::{FrozenStepOperator, ProblemInstance};
