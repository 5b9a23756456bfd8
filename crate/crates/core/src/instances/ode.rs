//! Finite-dimensional ODE instances `x' = f(t, y, x)` with sup-norm on both sides of the pair and
//! Gronwall-type analytic bounds.

use std::fmt;
use std::sync::Arc;

use crate::engine::{
    AnalyticBounds, AprioriBound, FrozenStepOperator, NormedPairElement, ProblemInstance,
    StabilityBounds, StepError, TrajectorySegment, Window,
};
use crate::scalar::{max_of, Scalar};

pub type OdeRhs<S> = Arc<dyn Fn(S, &[S], &[S]) -> Vec<S> + Send + Sync>;

/// Lipschitz data of `f` in the sup norm, valid on a ball of some radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeConstants<S> {
    /// `L1`: Lipschitz constant in the frozen argument `y`.
    pub lipschitz_y: S,
    /// `L2`: Lipschitz constant in the solved argument `x`.
    pub lipschitz_x: S,
    /// Bound on `|f(t, 0, 0)|`.
    pub f00: S,
}

impl<S: Scalar> OdeConstants<S> {
    pub fn is_valid(&self) -> bool {
        [self.lipschitz_y, self.lipschitz_x, self.f00]
            .iter()
            .all(|v| v.is_finite() && *v >= S::zero())
    }
}

/// Global constants, or constants that depend on the radius of the ball the solution stays in
/// (for nonlinearities that are only locally Lipschitz).
#[derive(Clone)]
pub enum LipschitzModel<S> {
    Global(OdeConstants<S>),
    Local(Arc<dyn Fn(S) -> OdeConstants<S> + Send + Sync>),
}

#[derive(Clone)]
pub struct OdeSpec<S> {
    pub dimension: usize,
    pub rhs: OdeRhs<S>,
    pub constants: LipschitzModel<S>,
}

impl<S> fmt::Debug for OdeSpec<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OdeSpec")
            .field("dimension", &self.dimension)
            .finish_non_exhaustive()
    }
}

impl<S: Scalar> OdeSpec<S> {
    pub fn new(
        dimension: usize,
        rhs: impl Fn(S, &[S], &[S]) -> Vec<S> + Send + Sync + 'static,
        constants: LipschitzModel<S>,
    ) -> Self {
        Self {
            dimension,
            rhs: Arc::new(rhs),
            constants,
        }
    }

    pub fn constants_at(&self, radius: S) -> OdeConstants<S> {
        match &self.constants {
            LipschitzModel::Global(c) => *c,
            LipschitzModel::Local(f) => f(radius),
        }
    }

    #[inline]
    pub fn eval(&self, t: S, y: &[S], x: &[S]) -> Vec<S> {
        (self.rhs)(t, y, x)
    }

    /// `x' = -rate * x`, independent of the frozen argument.
    pub fn decay(rate: S) -> Self {
        Self::new(
            1,
            move |_t, _y, x| vec![-rate * x[0]],
            LipschitzModel::Global(OdeConstants {
                lipschitz_y: S::zero(),
                lipschitz_x: rate.abs(),
                f00: S::zero(),
            }),
        )
    }

    /// `x' = x^2` split as `f(y, x) = y * x`.
    pub fn riccati() -> Self {
        Self::new(
            1,
            |_t, y, x| vec![y[0] * x[0]],
            LipschitzModel::Local(Arc::new(|k: S| OdeConstants {
                lipschitz_y: k,
                lipschitz_x: k,
                f00: S::zero(),
            })),
        )
    }

    /// `x' = x^2 - x` split as `f(y, x) = y * x - x`.
    pub fn damped_riccati() -> Self {
        Self::new(
            1,
            |_t, y, x| vec![y[0] * x[0] - x[0]],
            LipschitzModel::Local(Arc::new(|k: S| OdeConstants {
                lipschitz_y: k,
                lipschitz_x: k + S::one(),
                f00: S::zero(),
            })),
        )
    }

    /// `x' = A_y y + A_x x + b` with row-major `d x d` matrices; the constants are the induced
    /// sup-norm (max row sum) norms.
    pub fn linear(a_y: Vec<S>, a_x: Vec<S>, b: Vec<S>) -> Self {
        let d = b.len();
        assert_eq!(a_y.len(), d * d, "a_y must be d x d");
        assert_eq!(a_x.len(), d * d, "a_x must be d x d");
        let row_norm = |m: &[S]| {
            max_of((0..d).map(|i| {
                m[i * d..(i + 1) * d]
                    .iter()
                    .fold(S::zero(), |s, v| s + v.abs())
            }))
        };
        let constants = OdeConstants {
            lipschitz_y: row_norm(&a_y),
            lipschitz_x: row_norm(&a_x),
            f00: max_of(b.iter().map(|v| v.abs())),
        };
        Self::new(
            d,
            move |_t, y, x| {
                (0..d)
                    .map(|i| {
                        let mut acc = b[i];
                        for j in 0..d {
                            acc = acc + a_y[i * d + j] * y[j] + a_x[i * d + j] * x[j];
                        }
                        acc
                    })
                    .collect()
            },
            LipschitzModel::Global(constants),
        )
    }
}

pub fn sup_norm_vec<S: Scalar>(x: &[S]) -> S {
    max_of(x.iter().map(|v| v.abs()))
}

fn axpy<S: Scalar>(x: &[S], a: S, k: &[S]) -> Vec<S> {
    x.iter().zip(k).map(|(xi, ki)| *xi + a * *ki).collect()
}

/// Lagrange interpolation in time of a vector-valued trajectory on the (up to) four samples
/// around `t`. Four points keep the stage values of the frozen input accurate to `O(h^4)`;
/// with fewer samples this degrades to linear or quadratic interpolation.
pub(crate) fn sample_vector<S: Scalar>(traj: &TrajectorySegment<S, Vec<S>>, t: S) -> Vec<S> {
    let (j, w) = traj.bracket(t);
    let states = traj.states();
    if w == S::zero() {
        return states[j].state().clone();
    }
    if w == S::one() {
        return states[j + 1].state().clone();
    }
    let len = traj.len();
    let width = len.min(4);
    let first = j.saturating_sub(1).min(len - width);
    let times = &traj.times()[first..first + width];
    let weights: Vec<S> = (0..width)
        .map(|a| {
            (0..width).filter(|&b| b != a).fold(S::one(), |acc, b| {
                acc * (t - times[b]) / (times[a] - times[b])
            })
        })
        .collect();
    let dim = states[j].state().len();
    (0..dim)
        .map(|i| {
            weights
                .iter()
                .zip(&states[first..first + width])
                .fold(S::zero(), |acc, (wk, x)| acc + *wk * x.state()[i])
        })
        .collect()
}

fn vec_element<S: Scalar>(x: Vec<S>) -> NormedPairElement<S, Vec<S>> {
    let n = sup_norm_vec(&x);
    NormedPairElement::new(x, n, n)
}

/// Classic four-stage Runge-Kutta for `x' = f(t, y(t), x)` with `y` read from `y_traj` by
/// interpolation in time (see `sample_vector`).
pub fn ode_step<S: Scalar>(
    spec: &OdeSpec<S>,
    y_traj: &TrajectorySegment<S, Vec<S>>,
    x0: &NormedPairElement<S, Vec<S>>,
    window: Window<S>,
    substeps: usize,
) -> Result<TrajectorySegment<S, Vec<S>>, StepError> {
    if !y_traj.covers(window) {
        return Err(StepError::Uncovered {
            start: window.start.to_f64().unwrap_or(f64::NAN),
            end: window.end.to_f64().unwrap_or(f64::NAN),
        });
    }
    if x0.state().len() != spec.dimension || y_traj.initial().state().len() != spec.dimension {
        return Err(StepError::Shape(format!(
            "expected dimension {}",
            spec.dimension
        )));
    }
    let times = window.uniform_times(substeps);
    let mut states = Vec::with_capacity(times.len());
    states.push(x0.clone());
    let mut x = x0.state().clone();
    let half = S::half();
    let sixth = S::one() / S::lit(6.0);
    for k in 0..times.len() - 1 {
        let (t, t_next) = (times[k], times[k + 1]);
        let h = t_next - t;
        let t_mid = t + half * h;
        let (y0, ym, y1) = (
            sample_vector(y_traj, t),
            sample_vector(y_traj, t_mid),
            sample_vector(y_traj, t_next),
        );
        let k1 = spec.eval(t, &y0, &x);
        let k2 = spec.eval(t_mid, &ym, &axpy(&x, half * h, &k1));
        let k3 = spec.eval(t_mid, &ym, &axpy(&x, half * h, &k2));
        let k4 = spec.eval(t_next, &y1, &axpy(&x, h, &k3));
        for i in 0..x.len() {
            x[i] = x[i] + h * sixth * (k1[i] + S::two() * (k2[i] + k3[i]) + k4[i]);
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(StepError::NonFinite {
                t: t_next.to_f64().unwrap_or(f64::NAN),
            });
        }
        states.push(vec_element(x.clone()));
    }
    Ok(TrajectorySegment::new(times, states)?)
}

/// Gronwall bounds for the sup norm, with constants taken on the ball of the given radius:
/// `A(t, r, M) = (r + t (L1 M + f00)) e^{L2 t}`, `B(t, R) = t L2 R`, `C(t, R) = t L1 R`.
pub fn ode_bounds<S: Scalar>(spec: &OdeSpec<S>, radius: S) -> AnalyticBounds<S> {
    let OdeConstants {
        lipschitz_y: l1,
        lipschitz_x: l2,
        f00,
    } = spec.constants_at(radius);
    AnalyticBounds {
        apriori: AprioriBound::new(move |t, r, m| (r + t * (l1 * m + f00)) * (l2 * t).exp()),
        stability: StabilityBounds::new(move |t, r| t * l2 * r, move |t, r| t * l1 * r),
    }
}

#[derive(Debug, Clone)]
pub struct OdeInstance<S> {
    pub spec: OdeSpec<S>,
}

impl<S: Scalar> OdeInstance<S> {
    pub fn new(spec: OdeSpec<S>) -> Self {
        Self { spec }
    }

    pub fn initial(&self, x0: Vec<S>) -> NormedPairElement<S, Vec<S>> {
        self.element(x0)
    }
}

impl<S: Scalar> FrozenStepOperator<S> for OdeInstance<S> {
    type State = Vec<S>;

    fn step(
        &self,
        frozen: &TrajectorySegment<S, Vec<S>>,
        x0: &NormedPairElement<S, Vec<S>>,
        window: Window<S>,
        substeps: usize,
    ) -> Result<TrajectorySegment<S, Vec<S>>, StepError> {
        ode_step(&self.spec, frozen, x0, window, substeps)
    }
}

impl<S: Scalar> ProblemInstance<S> for OdeInstance<S> {
    fn weak_norm(&self, x: &Vec<S>) -> S {
        sup_norm_vec(x)
    }

    fn strong_norm(&self, x: &Vec<S>) -> S {
        sup_norm_vec(x)
    }

    fn weak_distance(&self, a: &Vec<S>, b: &Vec<S>) -> S {
        max_of(a.iter().zip(b).map(|(p, q)| (*p - *q).abs()))
    }

    fn analytic_bounds(&self, radius: S, _t_start: S) -> Option<AnalyticBounds<S>> {
        Some(ode_bounds(&self.spec, radius))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frozen(
        window: Window<f64>,
        n: usize,
        y: impl Fn(f64) -> f64,
    ) -> TrajectorySegment<f64, Vec<f64>> {
        let times = window.uniform_times(n);
        let states = times.iter().map(|&t| vec_element(vec![y(t)])).collect();
        TrajectorySegment::new(times, states).unwrap()
    }

    #[test]
    fn decay_matches_exponential() {
        let spec = OdeSpec::decay(1.0);
        let w = Window::new(0.0, 1.0).unwrap();
        let x0 = vec_element(vec![1.0]);
        let y = frozen(w, 1, |_| 0.0);
        let out = ode_step(&spec, &y, &x0, w, 1000).unwrap();
        assert!((out.last().state()[0] - (-1.0f64).exp()).abs() < 1e-9);
        assert!(out.initial().same_handle(&x0));
    }

    #[test]
    fn constant_forcing_is_exact() {
        let spec = OdeSpec::new(
            1,
            |_t, y: &[f64], _x: &[f64]| vec![y[0]],
            LipschitzModel::Global(OdeConstants {
                lipschitz_y: 1.0,
                lipschitz_x: 0.0,
                f00: 0.0,
            }),
        );
        let w = Window::new(0.0, 1.0).unwrap();
        let y = frozen(w, 4, |_| 2.0);
        let out = ode_step(&spec, &y, &vec_element(vec![0.0]), w, 7).unwrap();
        for (t, s) in out.times().iter().zip(out.states()) {
            assert!((s.state()[0] - 2.0 * t).abs() < 1e-14);
        }
    }

    fn bilinear_frozen_error(substeps: usize, y: fn(f64) -> f64, exact: f64) -> f64 {
        let spec = OdeSpec::riccati();
        let w = Window::new(0.0, 0.5).unwrap();
        // finely sampled y so that its time interpolation is not the bottleneck
        let y = frozen(w, 200_000, y);
        let out = ode_step(&spec, &y, &vec_element(vec![1.0]), w, substeps).unwrap();
        (out.last().state()[0] - exact).abs()
    }

    #[test]
    fn frozen_riccati_accuracy() {
        // x(t) = exp(int_0^t y) = 1 / (1 - t) for y = 1 / (1 - t)
        let e = bilinear_frozen_error(500, |t| 1.0 / (1.0 - t), 2.0);
        assert!(e / 2.0 < 1e-6, "{e}");
    }

    #[test]
    fn frozen_bilinear_is_fourth_order() {
        // y = 1 + cos 4t, x = exp(t + sin(4t) / 4); RK4 happens to be exact for y = 1/(1-t)
        let y: fn(f64) -> f64 = |t| 1.0 + (4.0 * t).cos();
        let exact = (0.5 + 2.0f64.sin() / 4.0).exp();
        let (e1, e2) = (
            bilinear_frozen_error(10, y, exact),
            bilinear_frozen_error(20, y, exact),
        );
        assert!(e1 / e2 >= 12.0, "ratio {}", e1 / e2);
    }

    #[test]
    fn blows_up_to_non_finite() {
        let spec = OdeSpec::new(
            1,
            |_t, _y: &[f64], x: &[f64]| vec![x[0].powi(8)],
            LipschitzModel::Global(OdeConstants {
                lipschitz_y: 0.0,
                lipschitz_x: 0.0,
                f00: 0.0,
            }),
        );
        let w = Window::new(0.0, 10.0).unwrap();
        let y = frozen(w, 1, |_| 0.0);
        let err = ode_step(&spec, &y, &vec_element(vec![10.0]), w, 10).unwrap_err();
        assert!(matches!(err, StepError::NonFinite { .. }));
    }

    #[test]
    fn uncovered_window_rejected() {
        let spec = OdeSpec::decay(1.0);
        let y = frozen(Window::new(0.0, 0.5).unwrap(), 2, |_| 0.0);
        let err = ode_step(
            &spec,
            &y,
            &vec_element(vec![1.0]),
            Window::new(0.0, 1.0).unwrap(),
            4,
        );
        assert!(matches!(err, Err(StepError::Uncovered { .. })));
    }

    #[test]
    fn bound_examples() {
        let zero = OdeSpec::<f64>::linear(vec![0.0], vec![0.0], vec![0.0]);
        let b = ode_bounds(&zero, 1.0);
        assert_eq!(b.apriori.eval(3.0, 1.5, 7.0), 1.5);
        assert_eq!(b.stability.b(2.0, 5.0), 0.0);
        assert_eq!(b.stability.c(2.0, 5.0), 0.0);

        let l1 = OdeSpec::<f64>::linear(vec![1.0], vec![0.0], vec![0.0]);
        let b = ode_bounds(&l1, 1.0);
        assert_eq!(b.apriori.eval(0.5, 1.0, 2.0), 2.0);

        let both = OdeSpec::<f64>::linear(vec![1.0], vec![1.0], vec![0.0]);
        let b = ode_bounds(&both, 1.0);
        assert!((b.apriori.eval(0.5, 1.0, 2.0) - 2.0 * 0.5f64.exp()).abs() < 1e-12);
        assert!((b.apriori.eval(0.5, 1.0, 2.0) - 3.2974425).abs() < 1e-6);
    }

    #[test]
    fn linear_constants_are_row_norms() {
        let s = OdeSpec::<f64>::linear(
            vec![1.0, -2.0, 0.5, 0.5],
            vec![0.0, 3.0, -1.0, 0.0],
            vec![0.1, -0.4],
        );
        let c = s.constants_at(1.0);
        assert_eq!(
            c,
            OdeConstants {
                lipschitz_y: 3.0,
                lipschitz_x: 3.0,
                f00: 0.4
            }
        );
        let f = s.eval(0.0, &[1.0, 1.0], &[0.0, 0.0]);
        assert!((f[0] + 0.9).abs() < 1e-15 && (f[1] - 0.6).abs() < 1e-15);
    }
}
