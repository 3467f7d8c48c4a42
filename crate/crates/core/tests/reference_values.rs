//! Values frozen from 50-digit evaluations.

use powerfrac_core::closedforms::{example_approximant, FunctionKind, RegisteredFunction};
use powerfrac_core::operators::rl_integral;
use powerfrac_core::specfun::{gamma, power_ml, DEFAULT_MAX_TERMS};
use powerfrac_core::taylor::weight_polynomial;
use powerfrac_core::{PowerParams, QuadratureConfig, ScalarFunction, WeightFunction};

const GAMMA: [(f64, f64); 13] = [
    (0.001, 999.42377248459546611),
    (0.01, 99.432585119150603714),
    (0.1, 9.5135076986687318363),
    (0.37, 2.4035500200786532485),
    (1.5, 0.88622692545275801365),
    (2.5, 1.3293403881791370205),
    (7.3, 1271.4236336639092731),
    (13.7, 2861595499.0660198538),
    (25.5, 3.0867705405286967828e24),
    (50.25, 1.6144764712412441176e63),
    (99.9, 5.8917321516443616568e155),
    (133.3, 4.8456365897164238022e224),
    (170.0, 4.2690680090047052749e304),
];

#[test]
fn gamma_relative_error() {
    for &(x, expected) in &GAMMA {
        let g = gamma(x).unwrap();
        let rel = ((g - expected) / expected).abs();
        assert!(rel <= 1e-13, "gamma({x}) = {g}, rel err {rel:e}");
    }
}

#[test]
fn power_ml_half_order_at_minus_one() {
    // E_{1/2}(-1) = e erfc(1)
    let r = power_ml(0.5, 1.0, std::f64::consts::E, -1.0, 1e-12).unwrap();
    assert!((r.value - 0.42758357615580700441).abs() < 1e-10);
    assert!(r.tail_estimate < 1e-12);
}

#[test]
fn weight_polynomial_second_order() {
    let pp = PowerParams::new(0.1, 1.5, 2.0).unwrap();
    let w = weight_polynomial(2, &pp, 1.0).unwrap();
    assert!((w - 0.90465669561617707675).abs() < 1e-15);
}

#[test]
fn sine_approximant_second_order() {
    let pp = PowerParams::new(0.1, 1.5, 2.0).unwrap();
    let g = RegisteredFunction::new(FunctionKind::Sin, 1.0).unwrap();
    let a = example_approximant(&g, 2, &pp, 0.5, 1e-16, DEFAULT_MAX_TERMS).unwrap();
    assert!((a - 0.19520513788429917456).abs() < 1e-14, "{a}");
}

#[test]
fn weighted_rl_spot_value() {
    let f = ScalarFunction::with_derivative(|t| t, |_| 1.0);
    let w = WeightFunction::exp_decay(1.0);
    let v = rl_integral(&f, &w, 0.5, 0.0, 1.0, &QuadratureConfig::default()).unwrap();
    assert!((v - 0.94201234543257208889).abs() < 1e-13, "{v}");
}
