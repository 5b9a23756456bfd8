//! Window planning: the strong-norm window from the a-priori bound and the contraction window
//! from the stability bounds.

use crate::scalar::Scalar;

use super::bounds::{AprioriBound, StabilityBounds};
use super::error::PlanError;

/// Number of geometric `R` samples in `(0, 2K]`.
pub const RADIUS_SAMPLES: usize = 32;

const MONOTONE_SAMPLES: usize = 64;

/// `K`, the strong-norm window `t1`, the contraction window `t2 <= t1` and the factor `theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowPlan<S> {
    pub cap: S,
    pub t1: S,
    pub t2: S,
    pub theta: S,
    /// `theta` is a target only; the Picard loop estimates the factor from observed ratios.
    pub empirical: bool,
}

impl<S: Scalar> WindowPlan<S> {
    pub fn is_valid(&self, r0: S) -> bool {
        self.cap > r0
            && self.t2 > S::zero()
            && self.t2 <= self.t1
            && self.theta > S::zero()
            && self.theta < S::one()
    }

    /// Same plan on a shorter window.
    pub fn shrunk_to(&self, t2: S) -> Self {
        Self { t2, ..*self }
    }
}

/// Contraction window with the intermediate `theta_1` that bounds `B(t, R) / R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContractionWindow<S> {
    pub t2: S,
    pub theta: S,
    pub theta_b: S,
}

fn f64_of<S: Scalar>(v: S) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// Largest `t` in `[lo, hi]` with `ok(t)`, given `ok(lo)` and monotone `ok`.
fn bisect_last<S: Scalar>(mut lo: S, mut hi: S, tol: S, ok: impl Fn(S) -> bool) -> S {
    while hi - lo > tol {
        let mid = lo + (hi - lo) * S::half();
        if mid <= lo || mid >= hi {
            break;
        }
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Longest window `t1 <= t_max` over which the a-priori bound keeps the strong norm below `cap`:
/// `A(t1, r0, cap) <= cap` and either `t1 = t_max` or `A(t1 + tol_t, r0, cap) > cap`.
pub fn select_window<S: Scalar>(
    bound: &AprioriBound<S>,
    r0: S,
    cap: S,
    t_max: S,
    tol_t: S,
) -> Result<S, PlanError> {
    if !(cap > r0) {
        return Err(PlanError::InvalidCap {
            cap: f64_of(cap),
            r0: f64_of(r0),
        });
    }
    if !(t_max > S::zero()) || !(tol_t > S::zero()) {
        return Err(PlanError::InvalidArgument(
            "t_max and tol_t must be positive".into(),
        ));
    }
    let excess = |t: S| bound.eval(t, r0, cap) - cap;

    let mut prev_t = S::zero();
    let mut prev = excess(prev_t);
    for k in 1..=MONOTONE_SAMPLES {
        let t = t_max * S::from_count(k) / S::from_count(MONOTONE_SAMPLES);
        let v = excess(t);
        if v < prev - S::lit(1e-12) * S::one().max(cap) {
            return Err(PlanError::NonMonotone {
                t_lo: f64_of(prev_t),
                t_hi: f64_of(t),
            });
        }
        prev_t = t;
        prev = v;
    }

    if excess(t_max) <= S::zero() {
        return Ok(t_max);
    }
    Ok(bisect_last(S::zero(), t_max, tol_t, |t| {
        excess(t) <= S::zero()
    }))
}

fn radius_grid<S: Scalar>(cap: S) -> Vec<S> {
    let two_k = S::two() * cap;
    (0..RADIUS_SAMPLES)
        .map(|j| two_k / S::two().powi(j as i32))
        .collect()
}

fn sup_ratio<S: Scalar>(f: impl Fn(S) -> S, radii: &[S]) -> S {
    radii.iter().map(|&r| f(r) / r).fold(
        S::zero(),
        |a, v| if v.is_nan() { S::nan() } else { a.max(v) },
    )
}

/// Contraction window below `t1`.
///
/// First the `B` budget: for `beta = theta_target` (or `(b_min + 1) / 2` when `B/R` already
/// reaches the target at `min_window`), `t_b` is the longest `t <= t1` with
/// `sup_{R <= 2K} B(t, R) / R <= beta`, and `theta_b` is that sup at `t_b`. Then the `C`
/// condition `sup_{R <= K} C(t, R) / (R (1 - theta_b)) <= theta_target` fixes `t2 <= t_b`.
/// With `swap_roles`, `B` and `C` trade places before any of this.
pub fn select_contraction_window<S: Scalar>(
    bounds: &StabilityBounds<S>,
    cap: S,
    t1: S,
    theta_target: S,
    swap_roles: bool,
    min_window: S,
) -> Result<ContractionWindow<S>, PlanError> {
    if !(t1 > S::zero()) || !(cap > S::zero()) {
        return Err(PlanError::InvalidArgument(
            "t1 and cap must be positive".into(),
        ));
    }
    if !(theta_target > S::zero() && theta_target < S::one()) {
        return Err(PlanError::InvalidArgument(
            "theta_target must lie in (0, 1)".into(),
        ));
    }
    let bounds = if swap_roles {
        bounds.swapped()
    } else {
        bounds.clone()
    };
    let none = || PlanError::NoContractionWindow {
        min_window: f64_of(min_window),
    };
    let lo = min_window.min(t1);
    let tol = S::lit(1e-12) * t1.max(S::one());

    let all_r = radius_grid(cap);
    let small_r: Vec<S> = all_r.iter().copied().filter(|&r| r <= cap).collect();
    let b_ratio = |t: S| sup_ratio(|r| bounds.b(t, r), &all_r);

    let b_min = b_ratio(lo);
    if !(b_min < S::one()) {
        return Err(none());
    }
    let beta = if b_min < theta_target {
        theta_target
    } else {
        (b_min + S::one()) * S::half()
    };
    let t_b = if b_ratio(t1) <= beta {
        t1
    } else {
        bisect_last(lo, t1, tol, |t| b_ratio(t) <= beta)
    };
    let theta_b = b_ratio(t_b);

    let c_ok =
        |t: S| sup_ratio(|r| bounds.c(t, r), &small_r) / (S::one() - theta_b) <= theta_target;
    if !c_ok(lo) {
        return Err(none());
    }
    let t2 = if c_ok(t_b) {
        t_b
    } else {
        bisect_last(lo, t_b, tol, c_ok)
    };
    Ok(ContractionWindow {
        t2: t2.min(t1),
        theta: theta_target,
        theta_b,
    })
}

/// Full plan from analytic bounds: `K = kappa * r0`, then `t1`, then `t2 = min(t2, t1)`.
#[allow(clippy::too_many_arguments)]
pub fn plan_from_bounds<S: Scalar>(
    apriori: &AprioriBound<S>,
    stability: &StabilityBounds<S>,
    r0: S,
    kappa: S,
    t_max: S,
    theta_target: S,
    swap_roles: bool,
    min_window: S,
) -> Result<WindowPlan<S>, PlanError> {
    let cap = kappa * r0;
    let t1 = select_window(apriori, r0, cap, t_max, S::lit(1e-12) * t_max.max(S::one()))?;
    let cw = select_contraction_window(stability, cap, t1, theta_target, swap_roles, min_window)?;
    Ok(WindowPlan {
        cap,
        t1,
        t2: cw.t2.min(t1),
        theta: cw.theta,
        empirical: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn linear_growth_window() {
        let a = AprioriBound::new(|t: f64, r, m| r + t * m);
        let t1 = select_window(&a, 1.0, 2.0, 10.0, 1e-12).unwrap();
        assert!((t1 - 0.5).abs() < 1e-10);
        assert!(a.eval(t1, 1.0, 2.0) <= 2.0);
        assert!(a.eval(t1 + 1e-12, 1.0, 2.0) > 2.0);
    }

    #[test]
    fn exponential_growth_window() {
        let a = AprioriBound::new(|t: f64, r, m| r * (m * t).exp());
        let t1 = select_window(&a, 1.0, E, 10.0, 1e-12).unwrap();
        assert!((t1 - 1.0 / E).abs() < 1e-8);
    }

    #[test]
    fn non_binding_bound_returns_horizon() {
        let a = AprioriBound::new(|_t: f64, r, _m| r);
        assert_eq!(select_window(&a, 1.0, 2.0, 10.0, 1e-12).unwrap(), 10.0);
    }

    #[test]
    fn window_errors() {
        let a = AprioriBound::new(|_t: f64, r, _m| r);
        assert!(matches!(
            select_window(&a, 2.0, 2.0, 1.0, 1e-12),
            Err(PlanError::InvalidCap { .. })
        ));
        let wobbly = AprioriBound::new(|t: f64, r, _m| r + (20.0 * t).sin().abs());
        assert!(matches!(
            select_window(&wobbly, 1.0, 5.0, 1.0, 1e-12),
            Err(PlanError::NonMonotone { .. })
        ));
    }

    /// Independent check of the two conditions by direct evaluation on the R sample.
    fn conditions_hold(s: &StabilityBounds<f64>, cap: f64, cw: &ContractionWindow<f64>) -> bool {
        let rs: Vec<f64> = (0..RADIUS_SAMPLES)
            .map(|j| 2.0 * cap / 2f64.powi(j as i32))
            .collect();
        let b_ok = rs.iter().all(|&r| s.b(cw.t2, r) / r <= cw.theta_b + 1e-15);
        let c_ok = rs
            .iter()
            .filter(|&&r| r <= cap)
            .all(|&r| s.c(cw.t2, r) / (r * (1.0 - cw.theta_b)) <= cw.theta + 1e-15);
        b_ok && c_ok && cw.theta_b < 1.0
    }

    #[test]
    fn symmetric_linear_bounds() {
        let s = StabilityBounds::new(|t: f64, r| t * r, |t, r| t * r);
        let cw = select_contraction_window(&s, 1.0, 10.0, 0.5, false, 1e-6).unwrap();
        assert!((cw.t2 - 0.25).abs() < 1e-10, "{cw:?}");
        assert_eq!(cw.theta, 0.5);
        assert!((cw.theta_b - 0.5).abs() < 1e-10);
        assert!(conditions_hold(&s, 1.0, &cw));
    }

    #[test]
    fn vanishing_b() {
        let s = StabilityBounds::new(|_t: f64, _r| 0.0, |t, r| t * r);
        let cw = select_contraction_window(&s, 1.0, 10.0, 0.9, false, 1e-6).unwrap();
        assert!((cw.t2 - 0.9).abs() < 1e-10);
        assert_eq!(cw.theta, 0.9);
        assert_eq!(cw.theta_b, 0.0);
        assert!(conditions_hold(&s, 1.0, &cw));
    }

    #[test]
    fn constant_b_fraction() {
        let s = StabilityBounds::new(|_t: f64, r| 0.5 * r, |t, r| t * r);
        let cw = select_contraction_window(&s, 1.0, 10.0, 0.5, false, 1e-6).unwrap();
        assert!((cw.t2 - 0.25).abs() < 1e-10);
        assert_eq!(cw.theta_b, 0.5);
        assert!(conditions_hold(&s, 1.0, &cw));
    }

    #[test]
    fn t2_never_exceeds_t1() {
        let s = StabilityBounds::new(|_t: f64, _r| 0.0, |_t, _r| 0.0);
        let cw = select_contraction_window(&s, 1.0, 0.3, 0.5, false, 1e-6).unwrap();
        assert_eq!(cw.t2, 0.3);
    }

    #[test]
    fn hopeless_bounds_are_rejected() {
        let s = StabilityBounds::new(|_t: f64, r| 1.5 * r, |t, r| t * r);
        assert!(matches!(
            select_contraction_window(&s, 1.0, 1.0, 0.5, false, 1e-6),
            Err(PlanError::NoContractionWindow { .. })
        ));
        // C/R does not vanish, but exchanging the roles makes the pair admissible
        let s = StabilityBounds::new(|t: f64, r| t * r, |_t, r| 0.9 * r);
        assert!(select_contraction_window(&s, 1.0, 1.0, 0.5, false, 1e-6).is_err());
        assert!(select_contraction_window(&s, 1.0, 1.0, 0.5, true, 1e-6).is_ok());
    }

    #[test]
    fn swap_matches_manual_exchange() {
        let s = StabilityBounds::new(|t: f64, r| 0.1 * r + t * r, |t, r| 2.0 * t * r);
        let swapped = select_contraction_window(&s, 1.5, 4.0, 0.6, true, 1e-6).unwrap();
        let manual = select_contraction_window(&s.swapped(), 1.5, 4.0, 0.6, false, 1e-6).unwrap();
        assert_eq!(swapped, manual);
        let plain = select_contraction_window(&s, 1.5, 4.0, 0.6, false, 1e-6).unwrap();
        assert_ne!(plain, swapped);
    }

    #[test]
    fn full_plan_is_valid() {
        let a = AprioriBound::new(|t: f64, r, m| (r + t * m) * t.exp());
        let s = StabilityBounds::new(|t: f64, r| t * r, |t, r| t * r);
        let plan = plan_from_bounds(&a, &s, 1.0, 2.0, 5.0, 0.5, false, 1e-6).unwrap();
        assert!(plan.is_valid(1.0));
        assert!(a.eval(plan.t1, 1.0, plan.cap) <= plan.cap);
    }
}
