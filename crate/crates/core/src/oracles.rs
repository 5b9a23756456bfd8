//! Independent reference solutions: the method-of-characteristics solution of inviscid Burgers
//! before the shock, the shock time of smooth periodic data, and a fine-step integration of the
//! self-coupled ODE `x' = f(t, x, x)` without any freezing.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::grid::{GridError, GridFunction1D};
use crate::instances::OdeSpec;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum OracleError {
    #[error("characteristics cross at t = {t} (1 + t u0'(xi) = {jacobian} <= 0)")]
    PostShock { t: f64, jacobian: f64 },
    #[error("root finding did not converge (residual {residual})")]
    NoConvergence { residual: f64 },
    #[error("invalid oracle argument: {0}")]
    InvalidArgument(String),
    #[error("reference solution left the finite range at t = {t}")]
    NonFinite { t: f64 },
}

fn f64_of<S: Scalar>(v: S) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

type ProfileFn<S> = Arc<dyn Fn(S) -> (S, S) + Send + Sync>;

/// A smooth periodic function on `[0, L)` given with its derivative.
#[derive(Clone)]
pub struct SmoothProfile<S> {
    length: S,
    eval: ProfileFn<S>,
}

impl<S: fmt::Debug> fmt::Debug for SmoothProfile<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothProfile")
            .field("length", &self.length)
            .finish_non_exhaustive()
    }
}

impl<S: Scalar> SmoothProfile<S> {
    pub fn new(length: S, eval: impl Fn(S) -> (S, S) + Send + Sync + 'static) -> Self {
        Self {
            length,
            eval: Arc::new(eval),
        }
    }

    /// `amplitude * sin(2 pi x / L)`.
    pub fn sine(length: S, amplitude: S) -> Self {
        let k = S::two() * S::PI() / length;
        Self::new(length, move |x| {
            let (s, c) = (k * x).sin_cos();
            (amplitude * s, amplitude * k * c)
        })
    }

    /// `amplitude * cos(2 pi x / L)`.
    pub fn cosine(length: S, amplitude: S) -> Self {
        let k = S::two() * S::PI() / length;
        Self::new(length, move |x| {
            let (s, c) = (k * x).sin_cos();
            (amplitude * c, -amplitude * k * s)
        })
    }

    pub fn constant(length: S, value: S) -> Self {
        Self::new(length, move |_| (value, S::zero()))
    }

    pub fn length(&self) -> S {
        self.length
    }

    #[inline]
    pub fn value(&self, x: S) -> S {
        (self.eval)(x).0
    }

    #[inline]
    pub fn derivative(&self, x: S) -> S {
        (self.eval)(x).1
    }

    #[inline]
    pub fn eval(&self, x: S) -> (S, S) {
        (self.eval)(x)
    }

    /// `a * u0`.
    pub fn scaled(&self, a: S) -> Self {
        let inner = Arc::clone(&self.eval);
        Self::new(self.length, move |x| {
            let (v, d) = inner(x);
            (a * v, a * d)
        })
    }

    pub fn sample_grid(&self, n: usize) -> Result<GridFunction1D<S>, GridError> {
        GridFunction1D::sample(n, self.length, |x| self.value(x))
    }

    fn dense(&self, samples: usize) -> impl Iterator<Item = (S, S)> + '_ {
        let len = self.length;
        (0..samples).map(move |i| self.eval(len * S::from_count(i) / S::from_count(samples)))
    }

    pub fn sup_abs(&self, samples: usize) -> S {
        self.dense(samples)
            .fold(S::zero(), |acc, (v, _)| acc.max(v.abs()))
    }

    /// Checks that value and derivative agree at `0` and `L` and are finite on a dense sample.
    pub fn is_consistent(&self, samples: usize) -> bool {
        let (v0, d0) = self.eval(S::zero());
        let (v1, d1) = self.eval(self.length);
        let tol = S::lit(1e-9);
        (v0 - v1).abs() <= tol * S::one().max(v0.abs())
            && (d0 - d1).abs() <= tol * S::one().max(d0.abs())
            && self
                .dense(samples)
                .all(|(v, d)| v.is_finite() && d.is_finite())
    }
}

/// Foot `xi` of the characteristic through `(t, x)`: the root of `xi + t u0(xi) = x`.
pub fn characteristic_foot<S: Scalar>(
    u0: &SmoothProfile<S>,
    t: S,
    x: S,
    tol: S,
) -> Result<S, OracleError> {
    if t < S::zero() || !t.is_finite() || !x.is_finite() {
        return Err(OracleError::InvalidArgument(format!("t = {t}, x = {x}")));
    }
    if t == S::zero() {
        return Ok(x);
    }
    let reach = t * u0.sup_abs(1024) + u0.length() / S::lit(64.0);
    let mut lo = x - reach;
    let mut hi = x + reach;
    let residual = |xi: S| xi + t * u0.value(xi) - x;
    // the dense sup may underestimate slightly; widen until the root is bracketed
    for _ in 0..60 {
        if residual(lo) <= S::zero() && residual(hi) >= S::zero() {
            break;
        }
        lo = lo - reach;
        hi = hi + reach;
    }

    let mut xi = x - t * u0.value(x);
    if !(xi > lo && xi < hi) {
        xi = S::half() * (lo + hi);
    }
    for _ in 0..200 {
        let (v, d) = u0.eval(xi);
        let f = xi + t * v - x;
        let jacobian = S::one() + t * d;
        if jacobian <= S::zero() {
            return Err(OracleError::PostShock {
                t: f64_of(t),
                jacobian: f64_of(jacobian),
            });
        }
        if f.abs() <= tol {
            return Ok(xi);
        }
        if f > S::zero() {
            hi = xi;
        } else {
            lo = xi;
        }
        let newton = xi - f / jacobian;
        xi = if newton > lo && newton < hi {
            newton
        } else {
            S::half() * (lo + hi)
        };
        if hi - lo <= S::epsilon() * S::one().max(xi.abs()) {
            let f = residual(xi);
            if f.abs() <= tol {
                return Ok(xi);
            }
            return Err(OracleError::NoConvergence {
                residual: f64_of(f),
            });
        }
    }
    Err(OracleError::NoConvergence {
        residual: f64_of(residual(xi)),
    })
}

/// Exact pre-shock solution of `u_t + u u_x = 0`: `u(t, x) = u0(xi)` with `xi + t u0(xi) = x`.
pub fn burgers_characteristics<S: Scalar>(
    u0: &SmoothProfile<S>,
    t: S,
    x: S,
    tol: S,
) -> Result<S, OracleError> {
    characteristic_foot(u0, t, x, tol).map(|xi| u0.value(xi))
}

/// Shock time `T* = 1 / max(0, -u0')` over `samples` uniform points; `+inf` without compression.
pub fn blowup_time<S: Scalar>(u0: &SmoothProfile<S>, samples: usize) -> Result<S, OracleError> {
    if samples < 256 {
        return Err(OracleError::InvalidArgument(format!(
            "need at least 256 samples, got {samples}"
        )));
    }
    let compression = u0.dense(samples).fold(S::zero(), |acc, (_, d)| acc.max(-d));
    if compression > S::zero() {
        Ok(S::one() / compression)
    } else {
        Ok(S::infinity())
    }
}

/// Fine-step reference trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTrajectory<S> {
    pub times: Vec<S>,
    pub states: Vec<Vec<S>>,
}

impl<S: Scalar> DenseTrajectory<S> {
    pub fn final_state(&self) -> &[S] {
        self.states.last().expect("non-empty trajectory")
    }
}

/// Four-stage Runge-Kutta on `x' = f(t, x, x)` (no freezing) from `t = 0` to `t_end` with a
/// step of at most `h_fine <= 1e-4 * t_end`.
pub fn dense_reference<S: Scalar>(
    spec: &OdeSpec<S>,
    x0: &[S],
    t_end: S,
    h_fine: S,
) -> Result<DenseTrajectory<S>, OracleError> {
    if !(t_end > S::zero()) || !(h_fine > S::zero()) {
        return Err(OracleError::InvalidArgument(
            "t_end and h_fine must be positive".into(),
        ));
    }
    if h_fine > S::lit(1e-4) * t_end * (S::one() + S::lit(1e-12)) {
        return Err(OracleError::InvalidArgument(format!(
            "h_fine = {h_fine} must be <= 1e-4 * T"
        )));
    }
    if x0.len() != spec.dimension {
        return Err(OracleError::InvalidArgument("dimension mismatch".into()));
    }
    let steps = (t_end / h_fine).ceil().to_usize().unwrap_or(1).max(1);
    let h = t_end / S::from_count(steps);
    let f = |t: S, x: &[S]| spec.eval(t, x, x);
    let shifted =
        |x: &[S], a: S, k: &[S]| -> Vec<S> { x.iter().zip(k).map(|(p, q)| *p + a * *q).collect() };
    let half = S::half();
    let sixth = S::one() / S::lit(6.0);

    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut x = x0.to_vec();
    times.push(S::zero());
    states.push(x.clone());
    for k in 0..steps {
        let t = S::from_count(k) * h;
        let k1 = f(t, &x);
        let k2 = f(t + half * h, &shifted(&x, half * h, &k1));
        let k3 = f(t + half * h, &shifted(&x, half * h, &k2));
        let k4 = f(t + h, &shifted(&x, h, &k3));
        for i in 0..x.len() {
            x[i] = x[i] + h * sixth * (k1[i] + S::two() * (k2[i] + k3[i]) + k4[i]);
        }
        let t_next = if k + 1 == steps {
            t_end
        } else {
            S::from_count(k + 1) * h
        };
        if x.iter().any(|v| !v.is_finite()) {
            return Err(OracleError::NonFinite { t: f64_of(t_next) });
        }
        times.push(t_next);
        states.push(x.clone());
    }
    Ok(DenseTrajectory { times, states })
}
