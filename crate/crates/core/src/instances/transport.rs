//! Quasilinear transport `u_t = G(x, u) u_x + g(x, u)` on a periodic interval, frozen as
//! `u_t = G(x, v) u_x + g(x, u)` and solved semi-Lagrangian.
//!
//! Characteristics of the frozen problem satisfy `dX/ds = -G(X, v(s, X))` and along them
//! `du/ds = g(X, u)`. Each substep traces every node back with a midpoint step, interpolates the
//! previous profile at the foot, then integrates the source along the path with Heun's method.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::engine::{
    FrozenStepOperator, NormedPairElement, ProblemInstance, StepError, TrajectorySegment, Window,
};
use crate::grid::{interpolate, lip_norm, sup_norm, GridError, GridFunction1D, Interpolation};
use crate::scalar::Scalar;

pub type Coefficient<S> = Arc<dyn Fn(S, S) -> S + Send + Sync>;

#[derive(Clone)]
pub struct TransportSpec<S> {
    /// `G(x, v)`.
    pub advection: Coefficient<S>,
    /// `g(x, u)`.
    pub source: Coefficient<S>,
    pub n: usize,
    pub length: S,
    pub scheme: Interpolation,
}

impl<S> fmt::Debug for TransportSpec<S>
where
    S: fmt::Debug,
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TransportSpec")
            .field("n", &self.n)
            .field("length", &self.length)
            .field("scheme", &self.scheme)
            .finish_non_exhaustive()
    }
}

impl<S: Scalar> TransportSpec<S> {
    pub fn new(
        n: usize,
        length: S,
        scheme: Interpolation,
        advection: impl Fn(S, S) -> S + Send + Sync + 'static,
        source: impl Fn(S, S) -> S + Send + Sync + 'static,
    ) -> Self {
        Self {
            advection: Arc::new(advection),
            source: Arc::new(source),
            n,
            length,
            scheme,
        }
    }

    pub fn grid(&self, values: Vec<S>) -> Result<GridFunction1D<S>, GridError> {
        if values.len() != self.n {
            return Err(GridError::Mismatch(format!(
                "expected {} values, got {}",
                self.n,
                values.len()
            )));
        }
        GridFunction1D::new(self.length, values)
    }

    pub fn sample(&self, f: impl Fn(S) -> S) -> Result<GridFunction1D<S>, GridError> {
        GridFunction1D::sample(self.n, self.length, f)
    }

    /// Checks that `G` and `g` are finite on `samples` points of `[0, L) x [-amp, amp]`.
    pub fn check_finite(&self, amp: S, samples: usize) -> bool {
        let samples = samples.max(2);
        (0..samples).all(|i| {
            let x = self.length * S::from_count(i) / S::from_count(samples);
            (0..samples).all(|j| {
                let v = amp * (S::two() * S::from_count(j) / S::from_count(samples - 1) - S::one());
                (self.advection)(x, v).is_finite() && (self.source)(x, v).is_finite()
            })
        })
    }
}

fn grid_element<S: Scalar>(u: GridFunction1D<S>) -> NormedPairElement<S, GridFunction1D<S>> {
    let weak = sup_norm(&u);
    let strong = lip_norm(&u);
    NormedPairElement::new(u, weak, strong)
}

fn f64_of<S: Scalar>(v: S) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// Frozen velocity `v(s, X)`: linear in time between stored samples, spatially interpolated.
fn frozen_value<S: Scalar>(
    v_traj: &TrajectorySegment<S, GridFunction1D<S>>,
    s: S,
    x: S,
    scheme: Interpolation,
) -> S {
    let (j, w) = v_traj.bracket(s);
    let states = v_traj.states();
    let a = interpolate(states[j].state(), x, scheme);
    if w == S::zero() {
        return a;
    }
    let b = interpolate(states[j + 1].state(), x, scheme);
    if w == S::one() {
        b
    } else {
        a + w * (b - a)
    }
}

/// One semi-Lagrangian window of the frozen problem.
pub fn transport_step<S: Scalar>(
    spec: &TransportSpec<S>,
    v_traj: &TrajectorySegment<S, GridFunction1D<S>>,
    u0: &NormedPairElement<S, GridFunction1D<S>>,
    window: Window<S>,
    substeps: usize,
) -> Result<TrajectorySegment<S, GridFunction1D<S>>, StepError> {
    if !v_traj.covers(window) {
        return Err(StepError::Uncovered {
            start: f64_of(window.start),
            end: f64_of(window.end),
        });
    }
    let grid_ok = |g: &GridFunction1D<S>| g.n() == spec.n && g.length() == spec.length;
    if !grid_ok(u0.state()) || !v_traj.states().iter().all(|s| grid_ok(s.state())) {
        return Err(StepError::Shape(format!(
            "expected {} nodes on a period of {}",
            spec.n, spec.length
        )));
    }
    let times = window.uniform_times(substeps);
    let n = spec.n;
    let length = spec.length;
    let half_period = length * S::half();
    let dx = length / S::from_count(n);
    let scheme = spec.scheme;
    let half = S::half();

    let mut states = Vec::with_capacity(times.len());
    states.push(u0.clone());
    for k in 0..times.len() - 1 {
        let (t, t_next) = (times[k], times[k + 1]);
        let h = t_next - t;
        let t_mid = t + half * h;
        let prev = states[k].state();
        let speed = |s: S, x: S| -(spec.advection)(x, frozen_value(v_traj, s, x, scheme));

        let traced: Vec<(S, S)> = (0..n)
            .into_par_iter()
            .map(|i| {
                let xi = S::from_count(i) * dx;
                let a1 = speed(t_next, xi);
                let x_half = xi - half * h * a1;
                let a2 = speed(t_mid, x_half);
                let displacement = h * a2;
                let foot = xi - displacement;
                let u_foot = interpolate(prev, foot, scheme);
                let k1 = (spec.source)(foot, u_foot);
                let k2 = (spec.source)(xi, u_foot + h * k1);
                (u_foot + half * h * (k1 + k2), displacement)
            })
            .collect();

        let mut values = Vec::with_capacity(n);
        for (value, displacement) in traced {
            if !(displacement.abs() <= half_period) {
                return Err(StepError::CharacteristicBlowup {
                    t: f64_of(t_next),
                    displacement: f64_of(displacement),
                });
            }
            if !value.is_finite() {
                return Err(StepError::NonFinite { t: f64_of(t_next) });
            }
            values.push(value);
        }
        states.push(grid_element(GridFunction1D::from_fn_unchecked(
            n, length, values,
        )));
    }
    Ok(TrajectorySegment::new(times, states)?)
}

#[derive(Debug, Clone)]
pub struct TransportInstance<S> {
    pub spec: TransportSpec<S>,
}

impl<S: Scalar> TransportInstance<S> {
    pub fn new(spec: TransportSpec<S>) -> Self {
        Self { spec }
    }

    pub fn initial(&self, u0: GridFunction1D<S>) -> NormedPairElement<S, GridFunction1D<S>> {
        self.element(u0)
    }
}

impl<S: Scalar> FrozenStepOperator<S> for TransportInstance<S> {
    type State = GridFunction1D<S>;

    fn step(
        &self,
        frozen: &TrajectorySegment<S, GridFunction1D<S>>,
        x0: &NormedPairElement<S, GridFunction1D<S>>,
        window: Window<S>,
        substeps: usize,
    ) -> Result<TrajectorySegment<S, GridFunction1D<S>>, StepError> {
        transport_step(&self.spec, frozen, x0, window, substeps)
    }
}

impl<S: Scalar> ProblemInstance<S> for TransportInstance<S> {
    fn weak_norm(&self, x: &GridFunction1D<S>) -> S {
        sup_norm(x)
    }

    fn strong_norm(&self, x: &GridFunction1D<S>) -> S {
        lip_norm(x)
    }

    fn weak_distance(&self, a: &GridFunction1D<S>, b: &GridFunction1D<S>) -> S {
        a.sup_distance(b)
    }

    /// `sup|u0| + osc(u0) / (RESOLVED_CELLS * dx)`: a front steeper than that spans fewer
    /// than `RESOLVED_CELLS` cells.
    fn strong_norm_ceiling(&self, x0: &NormedPairElement<S, GridFunction1D<S>>) -> Option<S> {
        let u = x0.state();
        let values = u.values();
        let hi = values.iter().copied().fold(S::neg_infinity(), S::max);
        let lo = values.iter().copied().fold(S::infinity(), S::min);
        let osc = hi - lo;
        (osc > S::zero()).then(|| x0.weak_norm() + osc / (S::lit(RESOLVED_CELLS) * u.dx()))
    }
}

/// Minimum number of cells a resolved front spans.
pub const RESOLVED_CELLS: f64 = 8.0;

/// Inviscid Burgers `u_t + u u_x = 0`: `G(x, v) = -v`, `g = 0`. Ships no analytic bounds.
pub fn make_burgers_instance<S: Scalar>(
    n: usize,
    length: S,
    scheme: Interpolation,
) -> TransportInstance<S> {
    assert!(n >= 16, "Burgers instance needs n >= 16");
    TransportInstance::new(TransportSpec::new(
        n,
        length,
        scheme,
        |_x, v: S| -v,
        |_x, _u| S::zero(),
    ))
}

/// Linear transport with speed `G(x) = speed + variation * sin(2 pi x / L)` and linear damping
/// `g(x, u) = -damping * u`. With `variation = damping = 0` the exact solution is the shift
/// `u(t, x) = u0(x + speed * t)`.
pub fn make_advection_instance<S: Scalar>(
    n: usize,
    length: S,
    scheme: Interpolation,
    speed: S,
    variation: S,
    damping: S,
) -> TransportInstance<S> {
    let k = S::two() * S::PI() / length;
    TransportInstance::new(TransportSpec::new(
        n,
        length,
        scheme,
        move |x: S, _v| speed + variation * (k * x).sin(),
        move |_x, u: S| -damping * u,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn constant_frozen(
        w: Window<f64>,
        u: &NormedPairElement<f64, GridFunction1D<f64>>,
    ) -> TrajectorySegment<f64, GridFunction1D<f64>> {
        TrajectorySegment::constant(w, 1, u)
    }

    #[test]
    fn unit_speed_shifts_profile() {
        let inst = make_advection_instance(256, 2.0 * PI, Interpolation::Cubic, 1.0, 0.0, 0.0);
        let u0 = inst.initial(inst.spec.sample(f64::sin).unwrap());
        let w = Window::new(0.0, 0.5).unwrap();
        let out = transport_step(&inst.spec, &constant_frozen(w, &u0), &u0, w, 16).unwrap();
        let last = out.last().state();
        let err = last
            .nodes()
            .zip(last.values())
            .map(|(x, v)| (v - (x + 0.5).sin()).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-3, "err {err}");
        assert!(out.initial().same_handle(&u0));
    }

    #[test]
    fn pure_source_adds_time() {
        let spec = TransportSpec::new(32, 1.0, Interpolation::Cubic, |_x, _v| 0.0, |_x, _u| 1.0);
        let inst = TransportInstance::new(spec);
        let u0 = inst.initial(inst.spec.sample(|x| (2.0 * PI * x).cos()).unwrap());
        let w = Window::new(0.0, 0.3).unwrap();
        let out = transport_step(&inst.spec, &constant_frozen(w, &u0), &u0, w, 5).unwrap();
        for (a, b) in out.last().state().values().iter().zip(u0.state().values()) {
            assert!((a - (b + 0.3)).abs() < 1e-14);
        }
    }

    #[test]
    fn ceiling_scales_with_oscillation_and_resolution() {
        let inst = make_burgers_instance(64, 2.0 * PI, Interpolation::Cubic);
        let u = inst.initial(inst.spec.sample(|x: f64| 3.0 * x.sin()).unwrap());
        let dx = 2.0 * PI / 64.0;
        let expected = 3.0 + 6.0 / (RESOLVED_CELLS * dx);
        assert!((inst.strong_norm_ceiling(&u).unwrap() - expected).abs() < 1e-12);
        let flat = inst.initial(inst.spec.sample(|_| 2.0).unwrap());
        assert_eq!(inst.strong_norm_ceiling(&flat), None);
    }

    #[test]
    fn burgers_zero_and_constant_data() {
        let inst = make_burgers_instance(32, 2.0 * PI, Interpolation::Cubic);
        let w = Window::new(0.0, 0.4).unwrap();
        let zero = inst.initial(GridFunction1D::zeros(32, 2.0 * PI).unwrap());
        let out = transport_step(&inst.spec, &constant_frozen(w, &zero), &zero, w, 4).unwrap();
        assert!(out.states().iter().all(|s| s.weak_norm() == 0.0));

        let c = inst.initial(GridFunction1D::new(2.0 * PI, vec![0.7; 32]).unwrap());
        let out = transport_step(&inst.spec, &constant_frozen(w, &c), &c, w, 4).unwrap();
        for s in out.states() {
            assert!(s.state().values().iter().all(|v| (v - 0.7).abs() < 1e-14));
        }
    }

    #[test]
    fn huge_substep_reports_characteristic_blowup() {
        let inst = make_advection_instance(32, 1.0, Interpolation::Linear, 10.0, 0.0, 0.0);
        let u0 = inst.initial(GridFunction1D::zeros(32, 1.0).unwrap());
        let w = Window::new(0.0, 1.0).unwrap();
        let err = transport_step(&inst.spec, &constant_frozen(w, &u0), &u0, w, 2).unwrap_err();
        assert!(matches!(err, StepError::CharacteristicBlowup { .. }));
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let inst = make_burgers_instance(32, 1.0, Interpolation::Linear);
        let u0 = inst.initial(GridFunction1D::zeros(16, 1.0).unwrap());
        let w = Window::new(0.0, 0.1).unwrap();
        let err = transport_step(&inst.spec, &constant_frozen(w, &u0), &u0, w, 2).unwrap_err();
        assert!(matches!(err, StepError::Shape(_)));
    }

    #[test]
    fn coefficient_finiteness_check() {
        let inst = make_burgers_instance::<f64>(16, 1.0, Interpolation::Cubic);
        assert!(inst.spec.check_finite(2.0, 8));
        let bad = TransportSpec::new(
            16,
            1.0,
            Interpolation::Cubic,
            |_x, v: f64| 1.0 / v,
            |_x, _u| 0.0,
        );
        assert!(!bad.check_finite(1.0, 9));
    }
}
