use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

use super::error::EngineError;

/// Free parameters of the solver.
///
/// Deserializes with every field optional; missing fields take the [`Default`] values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig<S> {
    /// Cap factor: `K = kappa * R0`.
    pub kappa: S,
    pub theta_target: S,
    /// Weak-norm fixed-point tolerance, relative to `max(1, sup weak norm)`.
    pub tol: S,
    pub max_picard_iters: usize,
    pub max_windows: usize,
    pub substeps_per_window: usize,
    /// When set, windows use at least `ceil(length / substep_length)` substeps.
    pub substep_length: Option<S>,
    /// Absolute blow-up threshold on the strong norm. `None` means `1e6 * R0`.
    pub strong_norm_cap: Option<S>,
    /// An accepted window shorter than this is read as blow-up.
    pub min_window: S,
    pub window_shrink: S,
    pub empirical_mode: bool,
    pub swap_roles: bool,
    /// First window tried in empirical mode; also the upper limit for regrowth.
    pub initial_window: S,
    /// Lower clamp for the empirical contraction factor.
    pub theta_floor: S,
}

impl<S: Scalar> Default for SolverConfig<S> {
    fn default() -> Self {
        Self {
            kappa: S::two(),
            theta_target: S::half(),
            tol: S::lit(1e-10),
            max_picard_iters: 100,
            max_windows: 10_000,
            substeps_per_window: 32,
            substep_length: None,
            strong_norm_cap: None,
            min_window: S::lit(1e-3),
            window_shrink: S::half(),
            empirical_mode: false,
            swap_roles: false,
            initial_window: S::lit(0.25),
            theta_floor: S::lit(0.1),
        }
    }
}

impl<S: Scalar> SolverConfig<S> {
    pub fn validate(&self) -> Result<(), EngineError> {
        let bad = |what: &str| Err(EngineError::InvalidConfig(what.to_string()));
        let pos = |v: S| v > S::zero() && v.is_finite();
        if !(self.kappa > S::one()) || !self.kappa.is_finite() {
            return bad("kappa must be > 1");
        }
        let unit = |v: S| v > S::zero() && v < S::one();
        if !unit(self.theta_target) {
            return bad("theta_target must lie in (0, 1)");
        }
        if !unit(self.window_shrink) {
            return bad("window_shrink must lie in (0, 1)");
        }
        if !unit(self.theta_floor) {
            return bad("theta_floor must lie in (0, 1)");
        }
        if !pos(self.tol) || !pos(self.min_window) || !pos(self.initial_window) {
            return bad("tol, min_window and initial_window must be positive");
        }
        if self.max_picard_iters == 0 || self.max_windows == 0 || self.substeps_per_window == 0 {
            return bad("iteration, window and substep counts must be positive");
        }
        if matches!(self.substep_length, Some(h) if !pos(h)) {
            return bad("substep_length must be positive");
        }
        if matches!(self.strong_norm_cap, Some(c) if !pos(c)) {
            return bad("strong_norm_cap must be positive");
        }
        Ok(())
    }

    /// Substep count for a window of the given length.
    pub fn substeps_for(&self, length: S) -> usize {
        let by_length = self
            .substep_length
            .and_then(|h| (length / h).ceil().to_usize())
            .unwrap_or(0);
        self.substeps_per_window.max(by_length).max(1)
    }
}
