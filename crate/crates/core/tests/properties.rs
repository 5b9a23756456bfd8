use std::f64::consts::TAU;

use proptest::prelude::*;
use twonorm::instances::OdeSpec;
use twonorm::oracles::characteristic_foot;
use twonorm::{
    blowup_time, dense_reference, interpolate, lip_norm, ode_bounds, sup_norm, Grid, Interpolation,
    SmoothProfile,
};

fn grid_values() -> impl Strategy<Value = (f64, Vec<f64>)> {
    (0.1f64..50.0, prop::collection::vec(-10.0f64..10.0, 2..160))
}

fn grid(length: f64, values: Vec<f64>) -> Grid {
    Grid::new(length, values).unwrap()
}

/// Sum of a few random Fourier modes on `[0, 2 pi)`, returned with its derivative.
fn fourier_profile(modes: Vec<(f64, f64)>) -> SmoothProfile<f64> {
    SmoothProfile::new(TAU, move |x| {
        modes
            .iter()
            .enumerate()
            .fold((0.0, 0.0), |(v, d), (k, (a, b))| {
                let k = (k + 1) as f64;
                let (s, c) = (k * x).sin_cos();
                (v + a * s + b * c, d + k * (a * c - b * s))
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn sup_norm_is_exhaustive_scan((length, values) in grid_values()) {
        let expected = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        prop_assert_eq!(sup_norm(&grid(length, values)), expected);
    }

    #[test]
    fn weak_norm_embeds_in_strong((length, values) in grid_values()) {
        let u = grid(length, values);
        prop_assert!(sup_norm(&u) <= lip_norm(&u));
    }

    #[test]
    fn norms_are_homogeneous((length, values) in grid_values(), a in -8.0f64..8.0) {
        let u = grid(length, values);
        let au = u.scale(a);
        let tol = 1e-12 * (1.0 + lip_norm(&u) * a.abs());
        prop_assert!((sup_norm(&au) - a.abs() * sup_norm(&u)).abs() <= tol);
        prop_assert!((lip_norm(&au) - a.abs() * lip_norm(&u)).abs() <= tol);
    }

    #[test]
    fn norms_obey_triangle_inequality(
        (length, values, other) in (0.1f64..50.0, 2usize..160).prop_flat_map(|(l, n)| (
            Just(l),
            prop::collection::vec(-10.0f64..10.0, n),
            prop::collection::vec(-10.0f64..10.0, n),
        ))
    ) {
        let u = grid(length, values);
        let v = grid(length, other);
        let sum = u.sub(&v.scale(-1.0)).unwrap();
        let slack = 1e-12 * (1.0 + lip_norm(&u) + lip_norm(&v));
        prop_assert!(sup_norm(&sum) <= sup_norm(&u) + sup_norm(&v) + slack);
        prop_assert!(lip_norm(&sum) <= lip_norm(&u) + lip_norm(&v) + slack);
    }

    #[test]
    fn interpolation_hits_nodes((length, values) in grid_values(), pick in any::<prop::sample::Index>()) {
        let u = grid(length, values);
        let i = pick.index(u.n());
        for scheme in [Interpolation::Linear, Interpolation::Cubic] {
            prop_assert_eq!(interpolate(&u, u.node(i), scheme), u.values()[i]);
        }
    }

    #[test]
    fn linear_interpolation_stays_in_range((length, values) in grid_values(), x in -100.0f64..100.0) {
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let v = interpolate(&grid(length, values), x, Interpolation::Linear);
        prop_assert!(v >= lo && v <= hi, "{} outside [{}, {}]", v, lo, hi);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn characteristics_solve_the_implicit_equation(
        amplitude in 0.1f64..2.0,
        fraction in 0.0f64..0.95,
        x in -10.0f64..10.0,
    ) {
        let u0 = SmoothProfile::sine(TAU, amplitude);
        let t = fraction * blowup_time(&u0, 4096).unwrap();
        let xi = characteristic_foot(&u0, t, x, 1e-12).unwrap();
        prop_assert!((xi + t * u0.value(xi) - x).abs() <= 1e-12);
        let value = twonorm::burgers_characteristics(&u0, t, x, 1e-12).unwrap();
        prop_assert_eq!(value, u0.value(xi));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn blowup_time_scales_inversely(modes in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..4)) {
        let u0 = fourier_profile(modes);
        let base = blowup_time(&u0, 8192).unwrap();
        prop_assume!(base.is_finite());
        for a in [0.5, 2.0] {
            let scaled = blowup_time(&u0.scaled(a), 8192).unwrap();
            prop_assert!((scaled - base / a).abs() <= 1e-12 * base / a);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    /// Along the coupled solution `y = x`, `|x(t)| <= A(t, |x0|, max_{s <= t} |x(s)|)`.
    #[test]
    fn apriori_bound_dominates_linear_systems(
        (a_y, a_x, b, x0) in (1usize..4).prop_flat_map(|d| (
            prop::collection::vec(-1.5f64..1.5, d * d),
            prop::collection::vec(-1.5f64..1.5, d * d),
            prop::collection::vec(-1.0f64..1.0, d),
            prop::collection::vec(-2.0f64..2.0, d),
        )),
    ) {
        let spec = OdeSpec::linear(a_y, a_x, b);
        let bound = ode_bounds(&spec, 1.0).apriori;
        let dense = dense_reference(&spec, &x0, 1.0, 1e-4).unwrap();
        let norm = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let r0 = norm(&x0);
        let mut running = r0;
        for (t, x) in dense.times.iter().zip(&dense.states) {
            let size = norm(x);
            running = running.max(size);
            let predicted = bound.eval(*t, r0, running);
            prop_assert!(size <= predicted * (1.0 + 1e-12) + 1e-12, "t = {}: {} > {}", t, size, predicted);
        }
    }
}

#[test]
fn dense_reference_self_consistency() {
    let spec = OdeSpec::<f64>::damped_riccati();
    let at = |h: f64| {
        dense_reference(&spec, &[2.0], 0.5, h)
            .unwrap()
            .final_state()[0]
    };
    assert!((at(5e-5) - at(2.5e-5)).abs() <= 1e-8);
}

/// Close to the singularity of x' = x^2 the truncation error is well above roundoff.
#[test]
fn dense_reference_step_halving() {
    let spec = OdeSpec::<f64>::riccati();
    let t = 0.99;
    let err =
        |h: f64| (dense_reference(&spec, &[1.0], t, h).unwrap().final_state()[0] - 100.0).abs();
    let (coarse, fine) = (err(1e-4 * t), err(0.5e-4 * t));
    assert!(coarse / fine >= 12.0, "{coarse:e} / {fine:e}");
}
