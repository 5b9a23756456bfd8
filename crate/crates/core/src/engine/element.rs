use std::sync::Arc;

use crate::scalar::{max_of, Scalar};

use super::error::EngineError;

/// An element of the weak space together with both of its norms.
///
/// The state lives behind an [`Arc`]: gluing two windows shares the handle instead of copying,
/// so junction states are identical by construction. `strong_norm = +inf` encodes an element
/// that is not in the strong space.
#[derive(Debug)]
pub struct NormedPairElement<S, X> {
    state: Arc<X>,
    weak_norm: S,
    strong_norm: S,
}

impl<S: Copy, X> Clone for NormedPairElement<S, X> {
    fn clone(&self) -> Self {
        Self {
            state: Arc::clone(&self.state),
            weak_norm: self.weak_norm,
            strong_norm: self.strong_norm,
        }
    }
}

impl<S: Scalar, X> NormedPairElement<S, X> {
    pub fn new(state: X, weak_norm: S, strong_norm: S) -> Self {
        Self::from_arc(Arc::new(state), weak_norm, strong_norm)
    }

    pub fn from_arc(state: Arc<X>, weak_norm: S, strong_norm: S) -> Self {
        debug_assert!(weak_norm >= S::zero(), "negative weak norm");
        debug_assert!(strong_norm >= S::zero(), "negative strong norm");
        Self {
            state,
            weak_norm,
            strong_norm,
        }
    }

    #[inline]
    pub fn state(&self) -> &X {
        &self.state
    }

    #[inline]
    pub fn handle(&self) -> &Arc<X> {
        &self.state
    }

    #[inline]
    pub fn weak_norm(&self) -> S {
        self.weak_norm
    }

    #[inline]
    pub fn strong_norm(&self) -> S {
        self.strong_norm
    }

    pub fn in_strong_space(&self) -> bool {
        self.strong_norm.is_finite()
    }

    pub fn same_handle(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.state, &other.state)
    }

    /// Checks `weak <= embed * strong` (vacuous when the strong norm is infinite).
    pub fn respects_embedding(&self, embed_const: S) -> bool {
        !self.in_strong_space()
            || self.weak_norm <= embed_const * self.strong_norm * (S::one() + S::lit(1e-12))
    }
}

/// Closed time interval `[start, end]` in absolute time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window<S> {
    pub start: S,
    pub end: S,
}

impl<S: Scalar> Window<S> {
    pub fn new(start: S, end: S) -> Result<Self, EngineError> {
        if !(start < end) || !start.is_finite() || !end.is_finite() {
            return Err(EngineError::InvalidWindow(format!("[{start}, {end}]")));
        }
        Ok(Self { start, end })
    }

    pub fn from_length(start: S, length: S) -> Result<Self, EngineError> {
        Self::new(start, start + length)
    }

    #[inline]
    pub fn length(&self) -> S {
        self.end - self.start
    }

    /// `substeps + 1` uniformly spaced times; the endpoints are exact.
    pub fn uniform_times(&self, substeps: usize) -> Vec<S> {
        let substeps = substeps.max(1);
        let h = self.length() / S::from_count(substeps);
        let mut times: Vec<S> = (0..substeps)
            .map(|k| self.start + S::from_count(k) * h)
            .collect();
        times.push(self.end);
        times
    }
}

/// A discrete path over one window.
#[derive(Debug)]
pub struct TrajectorySegment<S, X> {
    times: Vec<S>,
    states: Vec<NormedPairElement<S, X>>,
}

impl<S: Copy, X> Clone for TrajectorySegment<S, X> {
    fn clone(&self) -> Self {
        Self {
            times: self.times.clone(),
            states: self.states.clone(),
        }
    }
}

impl<S: Scalar, X> TrajectorySegment<S, X> {
    pub fn new(times: Vec<S>, states: Vec<NormedPairElement<S, X>>) -> Result<Self, EngineError> {
        if times.len() < 2 {
            return Err(EngineError::InvalidSegment(
                "a segment needs at least two samples".into(),
            ));
        }
        if times.len() != states.len() {
            return Err(EngineError::InvalidSegment(format!(
                "{} times but {} states",
                times.len(),
                states.len()
            )));
        }
        if times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(EngineError::InvalidSegment(
                "times must be strictly increasing".into(),
            ));
        }
        Ok(Self { times, states })
    }

    /// The constant path `x(t) = x0`, used as the zeroth Picard iterate.
    pub fn constant(window: Window<S>, substeps: usize, x0: &NormedPairElement<S, X>) -> Self {
        let times = window.uniform_times(substeps);
        let states = vec![x0.clone(); times.len()];
        Self { times, states }
    }

    #[inline]
    pub fn t_start(&self) -> S {
        self.times[0]
    }

    #[inline]
    pub fn t_end(&self) -> S {
        *self.times.last().expect("non-empty segment")
    }

    pub fn window(&self) -> Window<S> {
        Window {
            start: self.t_start(),
            end: self.t_end(),
        }
    }

    #[inline]
    pub fn times(&self) -> &[S] {
        &self.times
    }

    #[inline]
    pub fn states(&self) -> &[NormedPairElement<S, X>] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn initial(&self) -> &NormedPairElement<S, X> {
        &self.states[0]
    }

    pub fn last(&self) -> &NormedPairElement<S, X> {
        self.states.last().expect("non-empty segment")
    }

    /// Windowed sup of weak norms.
    pub fn sup_weak_norm(&self) -> S {
        max_of(self.states.iter().map(|s| s.weak_norm))
    }

    /// Windowed sup of strong norms.
    pub fn sup_strong_norm(&self) -> S {
        max_of(self.states.iter().map(|s| s.strong_norm))
    }

    pub fn covers(&self, window: Window<S>) -> bool {
        let slack = S::lit(1e-12) * S::one().max(window.end.abs());
        self.t_start() <= window.start + slack && self.t_end() >= window.end - slack
    }

    /// Locates `t` for linear interpolation in time: returns `(j, w)` such that the value at `t`
    /// is `(1 - w) * states[j] + w * states[j + 1]`. Times outside the segment are clamped.
    pub fn bracket(&self, t: S) -> (usize, S) {
        let last = self.times.len() - 1;
        if t <= self.times[0] {
            return (0, S::zero());
        }
        if t >= self.times[last] {
            return (last - 1, S::one());
        }
        let j = self
            .times
            .partition_point(|&s| s <= t)
            .saturating_sub(1)
            .min(last - 1);
        let (a, b) = (self.times[j], self.times[j + 1]);
        (j, (t - a) / (b - a))
    }
}
