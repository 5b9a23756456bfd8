use crate::scalar::Scalar;

use super::bounds::AnalyticBounds;
use super::element::{NormedPairElement, TrajectorySegment, Window};
use super::error::StepError;

/// Solver of the frozen problem `x' = f(t, y(t), x)` on one window, `y` given.
///
/// Implementations must be pure: the same inputs give bitwise-identical outputs. The returned
/// segment starts with (a clone of) `x0` itself, not a recomputed copy.
pub trait FrozenStepOperator<S: Scalar>: Send + Sync {
    type State: Send + Sync;

    fn step(
        &self,
        frozen: &TrajectorySegment<S, Self::State>,
        x0: &NormedPairElement<S, Self::State>,
        window: Window<S>,
        substeps: usize,
    ) -> Result<TrajectorySegment<S, Self::State>, StepError>;
}

/// A frozen-step operator together with its norm pair and, optionally, analytic bounds.
pub trait ProblemInstance<S: Scalar>: FrozenStepOperator<S> {
    fn weak_norm(&self, x: &Self::State) -> S;

    fn strong_norm(&self, x: &Self::State) -> S;

    /// `weak_norm(a - b)`.
    fn weak_distance(&self, a: &Self::State, b: &Self::State) -> S;

    /// `weak_norm(x) <= embed_const * strong_norm(x)`.
    fn embed_const(&self) -> S {
        S::one()
    }

    /// Bounds valid while the strong norm stays below `radius`, for a window starting at
    /// absolute time `t_start`. `None` forces empirical window adaptation.
    fn analytic_bounds(&self, _radius: S, _t_start: S) -> Option<AnalyticBounds<S>> {
        None
    }

    /// Largest strong norm the instance can represent faithfully along a solution started at
    /// `x0`. Past it the discretisation, not the equation, governs the strong norm.
    fn strong_norm_ceiling(&self, _x0: &NormedPairElement<S, Self::State>) -> Option<S> {
        None
    }

    fn element(&self, state: Self::State) -> NormedPairElement<S, Self::State> {
        let weak = self.weak_norm(&state);
        let strong = self.strong_norm(&state);
        NormedPairElement::new(state, weak, strong)
    }
}
