use powerfrac_core::operators::{pfd_quadrature, pfd_series, pfi, rl_integral};
use powerfrac_core::specfun::power_ml;
use powerfrac_core::{PowerParams, QuadratureConfig, ScalarFunction, WeightFunction};
use proptest::prelude::*;

fn sin() -> ScalarFunction {
    ScalarFunction::with_derivative(f64::sin, f64::cos)
}

fn square() -> ScalarFunction {
    ScalarFunction::with_derivative(|t| t * t, |t| 2.0 * t)
}

fn quick() -> QuadratureConfig {
    QuadratureConfig {
        panels: 64,
        ..Default::default()
    }
}

fn close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * x.abs().max(y.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn operators_are_linear(
        a in -2.0f64..2.0,
        b in -2.0f64..2.0,
        alpha in 0.05f64..0.9,
        beta in 0.5f64..1.8,
        p in 0.3f64..4.0,
        t in 0.1f64..1.0,
    ) {
        let pp = PowerParams::new(alpha, beta, p).unwrap();
        let w = WeightFunction::quadratic(0.5);
        let (f, g) = (sin(), square());
        let h = ScalarFunction::linear_combination(a, &f, b, &g);
        let q = quick();
        let d = |x: &ScalarFunction| pfd_quadrature(x, &pp, &w, 0.0, t, &q, 1e-15).unwrap();
        prop_assert!(close(d(&h), a * d(&f) + b * d(&g), 1e-10));
        let s = |x: &ScalarFunction| pfd_series(x, &pp, &w, 0.0, t, &q, 1e-15, 10_000).unwrap().value;
        prop_assert!(close(s(&h), a * s(&f) + b * s(&g), 1e-10));
        let i = |x: &ScalarFunction| pfi(x, &pp, &w, 0.0, t, &q).unwrap();
        prop_assert!(close(i(&h), a * i(&f) + b * i(&g), 1e-10));
        let r = |x: &ScalarFunction| rl_integral(x, &w, beta, 0.0, t, &q).unwrap();
        prop_assert!(close(r(&h), a * r(&f) + b * r(&g), 1e-10));
    }

    #[test]
    fn derivative_vanishes_at_base(alpha in 0.0f64..0.95, beta in 0.2f64..2.0, p in 0.2f64..5.0, a in -3.0f64..3.0) {
        let pp = PowerParams::new(alpha, beta, p).unwrap();
        let v = pfd_quadrature(&sin(), &pp, &WeightFunction::unit(), a, a, &quick(), 1e-15).unwrap();
        prop_assert_eq!(v, 0.0);
    }
}

proptest! {
    #[test]
    fn power_ml_identity_reduction(
        k in 0.5f64..2.0,
        l in 0.5f64..3.0,
        p in 0.1f64..10.0,
        tau in -4.0f64..4.0,
    ) {
        let direct = power_ml(k, l, p, tau, 1e-17).unwrap().value;
        let via_e = power_ml(k, l, std::f64::consts::E, tau * p.ln(), 1e-17).unwrap().value;
        prop_assert!(close(direct, via_e, 1e-12));
    }

    #[test]
    fn looser_tolerance_never_uses_more_terms(
        k in 0.5f64..2.0,
        p in 0.1f64..10.0,
        tau in -5.0f64..5.0,
        e1 in 2.0f64..15.0,
        de in 0.0f64..6.0,
    ) {
        let tight = power_ml(k, 1.0, p, tau, 10f64.powf(-e1 - de)).unwrap();
        let loose = power_ml(k, 1.0, p, tau, 10f64.powf(-e1)).unwrap();
        prop_assert!(loose.terms_used <= tight.terms_used);
    }

    #[test]
    fn p_one_is_reciprocal_gamma(k in 0.1f64..3.0, l in 0.2f64..5.0, tau in -50.0f64..50.0) {
        let r = power_ml(k, l, 1.0, tau, 1e-12).unwrap();
        let expected = 1.0 / powerfrac_core::specfun::gamma(l).unwrap();
        prop_assert!((r.value - expected).abs() <= 2.0 * f64::EPSILON * expected);
        prop_assert_eq!(r.terms_used, 1);
    }
}
