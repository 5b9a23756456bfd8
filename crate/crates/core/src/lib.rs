//! Two-norm Picard iteration for evolution equations `x' = f(x, x)`.
//!
//! The first argument of `f` is frozen, the resulting easier problem is solved on a short
//! window, and the map from frozen input to solution is iterated to a fixed point. Iterates
//! contract in a weak norm while a strong norm stays bounded; windows are glued end to end and
//! a collapse of the admissible window (or a runaway strong norm) is reported as blow-up.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`). The aliases below fix `f64`.
//!
//! ```
//! use twonorm::{continuation_solve, OdeInstance, OdeSpec, SolverConfig, Termination};
//!
//! // x' = x^2 written as f(y, x) = y * x; the exact solution 1 / (1 - t) blows up at t = 1.
//! let riccati = OdeInstance::new(OdeSpec::riccati());
//! let x0 = riccati.initial(vec![1.0]);
//! let (_segments, report) =
//!     continuation_solve(&riccati, x0, 2.0, &SolverConfig::default()).unwrap();
//! let t_c = report.termination.t_c_estimate().unwrap();
//! assert!(report.termination.is_blow_up() && t_c > 0.85 && t_c <= 1.0);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod engine;
pub mod grid;
pub mod instances;
pub mod oracles;
pub mod scalar;

pub use engine::{
    continuation_solve, continuation_solve_from, estimate_theta_empirical, picard_window,
    plan_from_bounds, select_contraction_window, select_window, AnalyticBounds, AprioriBound,
    BlowUpReason, FrozenStepOperator, NormedPairElement, ProblemInstance, SolveReport,
    SolverConfig, StabilityBounds, Termination, TrajectorySegment, Window, WindowPlan,
    WindowReport,
};
pub use grid::{interpolate, lip_norm, sup_norm, GridFunction1D, Interpolation};
pub use instances::{
    make_advection_instance, make_burgers_instance, ode_bounds, ode_step, transport_step,
    OdeInstance, OdeSpec, TransportInstance, TransportSpec,
};
pub use oracles::{blowup_time, burgers_characteristics, dense_reference, SmoothProfile};
pub use scalar::Scalar;

pub type Real = f64;
pub type Grid = GridFunction1D<f64>;
pub type OdeState = Vec<f64>;
pub type Config = SolverConfig<f64>;
pub type Report = SolveReport<f64>;
pub type Ode = OdeInstance<f64>;
pub type Transport = TransportInstance<f64>;
pub type OdeSegment = TrajectorySegment<f64, OdeState>;
pub type GridSegment = TrajectorySegment<f64, Grid>;
