//! Picard iteration on a single window.

use crate::scalar::{max_of, Scalar};

use super::config::SolverConfig;
use super::element::{NormedPairElement, TrajectorySegment, Window};
use super::error::PicardError;
use super::planning::WindowPlan;
use super::problem::ProblemInstance;

/// Diagnostics of one accepted window.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowReport<S> {
    pub t_start: S,
    pub t_end: S,
    pub picard_iters: usize,
    /// `d_n`: windowed weak distance between iterates `n` and `n - 1`.
    pub distances: Vec<S>,
    /// `d_{n+1} / d_n` for every `n` with `d_n > 0`.
    pub observed_ratios: Vec<S>,
    pub end_strong_norm: S,
    /// Contraction factor used for the stopping rule on the last iterate.
    pub theta: S,
    pub cap: S,
    /// Windows tried before this one was accepted, including it.
    pub attempts: usize,
}

impl<S: Scalar> WindowReport<S> {
    pub fn max_ratio(&self) -> Option<S> {
        self.observed_ratios.iter().copied().reduce(|a, b| a.max(b))
    }
}

/// `max(floor, max of the last min(3, len) ratios)`.
pub fn estimate_theta_empirical<S: Scalar>(ratios: &[S], floor: S) -> S {
    assert!(
        !ratios.is_empty(),
        "empirical theta needs at least one ratio"
    );
    let tail = &ratios[ratios.len().saturating_sub(3)..];
    tail.iter().fold(floor, |acc, &r| acc.max(r))
}

fn f64_of<S: Scalar>(v: S) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// An accepted window: the converged segment and its diagnostics.
pub type AcceptedWindow<S, X> = (TrajectorySegment<S, X>, WindowReport<S>);

/// Weak distance between two trajectories on the same time grid.
pub fn trajectory_distance<S: Scalar, I: ProblemInstance<S>>(
    instance: &I,
    a: &TrajectorySegment<S, I::State>,
    b: &TrajectorySegment<S, I::State>,
) -> S {
    debug_assert_eq!(a.len(), b.len());
    max_of(
        a.states()
            .iter()
            .zip(b.states())
            .map(|(x, y)| instance.weak_distance(x.state(), y.state())),
    )
}

/// Stopping threshold: `tol * max(1, sup weak norm)`.
pub(crate) fn stop_threshold<S: Scalar>(tol: S, scale: S) -> S {
    tol * S::one().max(scale)
}

/// Iterates `x_{n+1} = Step(y = x_n)` from the constant path `x_0(t) = x0` on
/// `[t_start, t_start + plan.t2]` until `theta / (1 - theta) * d_n <= tol`.
pub fn picard_window<S: Scalar, I: ProblemInstance<S>>(
    instance: &I,
    x0: &NormedPairElement<S, I::State>,
    t_start: S,
    plan: &WindowPlan<S>,
    cfg: &SolverConfig<S>,
) -> Result<AcceptedWindow<S, I::State>, PicardError> {
    let limit = plan.cap / cfg.kappa;
    if x0.strong_norm() > limit * (S::one() + S::lit(1e-12)) {
        return Err(PicardError::CapPrecondition {
            norm: f64_of(x0.strong_norm()),
            limit: f64_of(limit),
        });
    }
    let window = Window::from_length(t_start, plan.t2).map_err(|e| PicardError::Step(e.into()))?;
    let substeps = cfg.substeps_for(plan.t2);

    let mut current = TrajectorySegment::constant(window, substeps, x0);
    let mut distances: Vec<S> = Vec::new();
    let mut ratios: Vec<S> = Vec::new();
    let mut above_one = 0usize;

    for iter in 1..=cfg.max_picard_iters {
        let next = instance.step(&current, x0, window, substeps)?;
        let peak = next.sup_strong_norm();
        if !(peak <= plan.cap) {
            return Err(PicardError::CapViolation {
                iter,
                norm: f64_of(peak),
                cap: f64_of(plan.cap),
            });
        }
        let d = trajectory_distance(instance, &next, &current);
        if !d.is_finite() {
            return Err(PicardError::ContractionFailure { iter });
        }
        if let Some(&prev) = distances.last() {
            if prev > S::zero() {
                let ratio = d / prev;
                ratios.push(ratio);
                if ratio > S::one() {
                    above_one += 1;
                    if above_one >= 2 {
                        return Err(PicardError::ContractionFailure { iter });
                    }
                } else {
                    above_one = 0;
                }
            }
        }
        distances.push(d);

        let theta = if plan.empirical {
            if ratios.is_empty() {
                None
            } else {
                Some(estimate_theta_empirical(&ratios, cfg.theta_floor))
            }
        } else {
            Some(plan.theta)
        };
        let threshold = stop_threshold(cfg.tol, next.sup_weak_norm());
        let converged = d == S::zero()
            || matches!(theta, Some(th) if th < S::one() && th / (S::one() - th) * d <= threshold);
        current = next;
        if converged {
            let report = WindowReport {
                t_start: window.start,
                t_end: window.end,
                picard_iters: iter,
                distances,
                observed_ratios: ratios,
                end_strong_norm: current.last().strong_norm(),
                theta: theta.unwrap_or(plan.theta),
                cap: plan.cap,
                attempts: 1,
            };
            return Ok((current, report));
        }
    }
    Err(PicardError::IterBudget(cfg.max_picard_iters))
}
