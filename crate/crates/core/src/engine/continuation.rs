//! Continuation by gluing Picard windows, with the strong-norm blow-up diagnostic.

use crate::scalar::Scalar;

use super::config::SolverConfig;
use super::element::{NormedPairElement, TrajectorySegment};
use super::error::{PicardError, PlanError, SolveError, StepError};
use super::picard::{picard_window, WindowReport};
use super::planning::{plan_from_bounds, WindowPlan};
use super::problem::ProblemInstance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlowUpReason {
    /// The strong norm passed the configured blow-up threshold.
    StrongNormCap,
    /// No window of length `>= min_window` could be accepted.
    WindowCollapse,
    /// The strong norm outgrew what the instance's discretisation resolves.
    ResolutionLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Termination<S> {
    HorizonReached,
    /// `t_c_estimate` is the time reached when the diagnostic fired: a lower estimate of the
    /// maximal existence time.
    BlowUpDetected {
        t_c_estimate: S,
        last_strong_norm: S,
        reason: BlowUpReason,
    },
    BudgetExhausted,
    /// The analytic bounds admit no contraction window at time `t`.
    ContractionFailure {
        t: S,
    },
}

impl<S: Scalar> Termination<S> {
    pub fn t_c_estimate(&self) -> Option<S> {
        match self {
            Termination::BlowUpDetected { t_c_estimate, .. } => Some(*t_c_estimate),
            _ => None,
        }
    }

    pub fn is_blow_up(&self) -> bool {
        matches!(self, Termination::BlowUpDetected { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport<S> {
    pub windows: Vec<WindowReport<S>>,
    pub termination: Termination<S>,
    /// End of the last accepted window (the start time when none was accepted).
    pub final_time: S,
}

/// Output of [`continuation_solve`]: glued segments in time order and the report.
pub type Solution<S, X> = (Vec<TrajectorySegment<S, X>>, SolveReport<S>);

/// Floor used in place of a zero initial strong norm so that the cap stays positive.
pub fn strong_norm_floor<S: Scalar>() -> S {
    S::epsilon() * S::lit(1e4)
}

/// Solves `x' = f(t, x, x)` from `x0` at `t = 0` up to `t_max`.
pub fn continuation_solve<S: Scalar, I: ProblemInstance<S>>(
    instance: &I,
    x0: NormedPairElement<S, I::State>,
    t_max: S,
    cfg: &SolverConfig<S>,
) -> Result<Solution<S, I::State>, SolveError> {
    continuation_solve_from(instance, x0, S::zero(), t_max, cfg)
}

/// As [`continuation_solve`], starting at absolute time `t0`.
pub fn continuation_solve_from<S: Scalar, I: ProblemInstance<S>>(
    instance: &I,
    x0: NormedPairElement<S, I::State>,
    t0: S,
    t_max: S,
    cfg: &SolverConfig<S>,
) -> Result<Solution<S, I::State>, SolveError> {
    cfg.validate()?;
    if !x0.in_strong_space() {
        return Err(SolveError::InitialNotStrong);
    }
    let floor = strong_norm_floor::<S>();
    let blow_cap = cfg
        .strong_norm_cap
        .unwrap_or_else(|| S::lit(1e6) * x0.strong_norm().max(floor));
    let ceiling = instance.strong_norm_ceiling(&x0);
    let time_eps = S::lit(1e-12) * S::one().max(t_max.abs());

    let mut segments: Vec<TrajectorySegment<S, I::State>> = Vec::new();
    let mut windows: Vec<WindowReport<S>> = Vec::new();
    let mut t = t0;
    let mut x = x0;
    let mut guess = cfg.initial_window;

    let finish = |windows, termination, t| SolveReport {
        windows,
        termination,
        final_time: t,
    };

    loop {
        let remaining = t_max - t;
        if remaining <= time_eps {
            return Ok((segments, finish(windows, Termination::HorizonReached, t)));
        }
        let cap_reason = if x.strong_norm() > blow_cap {
            Some(BlowUpReason::StrongNormCap)
        } else if ceiling.is_some_and(|c| x.strong_norm() > c) {
            Some(BlowUpReason::ResolutionLimit)
        } else {
            None
        };
        if let Some(reason) = cap_reason {
            let termination = Termination::BlowUpDetected {
                t_c_estimate: t,
                last_strong_norm: x.strong_norm(),
                reason,
            };
            return Ok((segments, finish(windows, termination, t)));
        }
        if windows.len() >= cfg.max_windows {
            return Ok((segments, finish(windows, Termination::BudgetExhausted, t)));
        }

        let r0 = x.strong_norm().max(floor);
        let bounds = if cfg.empirical_mode {
            None
        } else {
            instance.analytic_bounds(cfg.kappa * r0, t)
        };
        let mut plan = match bounds {
            Some(b) => match plan_from_bounds(
                &b.apriori,
                &b.stability,
                r0,
                cfg.kappa,
                remaining,
                cfg.theta_target,
                cfg.swap_roles,
                cfg.min_window.min(remaining),
            ) {
                Ok(plan) => plan,
                Err(PlanError::NoContractionWindow { .. }) => {
                    let termination = Termination::ContractionFailure { t };
                    return Ok((segments, finish(windows, termination, t)));
                }
                Err(e) => return Err(e.into()),
            },
            None => {
                let len = guess.min(remaining);
                WindowPlan {
                    cap: cfg.kappa * r0,
                    t1: len,
                    t2: len,
                    theta: cfg.theta_target,
                    empirical: true,
                }
            }
        };

        let mut attempts = 0usize;
        let (segment, mut report, horizon_limited) = loop {
            attempts += 1;
            let horizon_limited = plan.t2 >= remaining - time_eps;
            if horizon_limited {
                plan.t2 = remaining;
            } else if plan.t2 < cfg.min_window {
                let termination = Termination::BlowUpDetected {
                    t_c_estimate: t,
                    last_strong_norm: x.strong_norm(),
                    reason: BlowUpReason::WindowCollapse,
                };
                return Ok((segments, finish(windows, termination, t)));
            }
            match picard_window(instance, &x, t, &plan, cfg) {
                Ok((segment, report)) => break (segment, report, horizon_limited),
                Err(PicardError::Step(
                    e @ (StepError::Uncovered { .. } | StepError::Shape(_) | StepError::Engine(_)),
                )) => return Err(SolveError::Step(e)),
                Err(PicardError::CapPrecondition { .. }) => {
                    unreachable!("cap is built from the current strong norm")
                }
                Err(_) => plan = plan.shrunk_to(plan.t2 * cfg.window_shrink),
            }
        };
        report.attempts = attempts;
        debug_assert!(segment.initial().same_handle(&x));

        if plan.empirical && !horizon_limited {
            guess = if attempts == 1 {
                (plan.t2 / cfg.window_shrink).min(cfg.initial_window)
            } else {
                plan.t2
            };
        }
        t = if horizon_limited {
            t_max
        } else {
            segment.t_end()
        };
        x = segment.last().clone();
        windows.push(report);
        segments.push(segment);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_is_positive_and_tiny() {
        let f: f64 = strong_norm_floor();
        assert!(f > 0.0 && f < 1e-10);
    }

    #[test]
    fn termination_accessors() {
        let b = Termination::BlowUpDetected {
            t_c_estimate: 0.9,
            last_strong_norm: 10.0,
            reason: BlowUpReason::WindowCollapse,
        };
        assert_eq!(b.t_c_estimate(), Some(0.9));
        assert!(b.is_blow_up());
        assert_eq!(Termination::<f64>::HorizonReached.t_c_estimate(), None);
    }
}
