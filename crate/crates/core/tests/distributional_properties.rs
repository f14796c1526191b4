use std::f64::consts::PI;

use proptest::prelude::*;
use radial_origin::distributional::{
    delta_residual, laplacian_ball_flux, library, modified_identity_check, operator_identity_check, TestFunction,
};
use radial_origin::{make_grid, GridScheme};

const TIGHT: [f64; 4] = [0.02, 0.01, 0.005, 0.0025];

fn mixture(c0: f64, c1: f64, c2: f64, k: f64) -> TestFunction {
    TestFunction::new(
        "mixture",
        c0 + c2,
        10.0,
        move |r| c0 + c1 * r.sin() + c2 * (-k * r).exp(),
        move |r| c1 * r.cos() - c2 * k * (-k * r).exp(),
    )
    .unwrap()
}

proptest! {
    #[test]
    fn residual_tracks_value_at_origin(c0 in -3.0..3.0f64, c1 in -3.0..3.0f64, c2 in -3.0..3.0f64, k in 0.1..2.0f64) {
        let f = mixture(c0, c1, c2, k);
        let rep = delta_residual(&f, &TIGHT).unwrap();
        prop_assert!((rep.extrapolated_limit + 4.0 * PI * (c0 + c2)).abs() < 1e-6);
    }

    #[test]
    fn flux_is_linear(alpha in -2.0..2.0f64, beta in -2.0..2.0f64, a in 0.001..5.0f64) {
        let suite = library::suite();
        let (f, g) = (&suite[1], &suite[13]);
        let h = TestFunction::linear_combination(alpha, f, beta, g).unwrap();
        let lhs = laplacian_ball_flux(&h, a).unwrap();
        let rhs = alpha * laplacian_ball_flux(f, a).unwrap() + beta * laplacian_ball_flux(g, a).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn identity_gap_is_bounded_by_closed_form(w in 0.2..3.0f64, n in 200usize..2000) {
        let grid = make_grid(GridScheme::LogSpaced, 0.1, 10.0, n).unwrap();
        let c = operator_identity_check(|r: f64| (-w * r).exp() * r, &grid).unwrap();
        prop_assert!(c.max_abs_difference.is_finite());
        prop_assert!(c.max_abs_difference < 1.0);
    }
}

#[test]
fn bundled_suite_delta_law() {
    for f in library::nonvanishing() {
        let rep = delta_residual(&f, &TIGHT).unwrap();
        assert!(rep.abs_error < 1e-6, "{}: {}", f.label(), rep.abs_error);
    }
    for f in library::vanishing() {
        let rep = delta_residual(&f, &TIGHT).unwrap();
        assert!(rep.extrapolated_limit.abs() < 1e-8, "{}: {}", f.label(), rep.extrapolated_limit);
    }
}

#[test]
fn corrected_identity_on_suite() {
    for f in library::suite() {
        let rep = modified_identity_check(&f, &[0.1, 0.05, 0.025, 0.0125]).unwrap();
        assert!(rep.abs_error < 1e-4, "{}: {}", f.label(), rep.abs_error);
    }
}
