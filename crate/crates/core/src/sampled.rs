//! Functions known only through samples on `[a, a + len]`, used to pass one
//! level of an iterated operator to the next.
//!
//! Samples sit at `x_i = a + len (i/m)^2`, uniform in `v = sqrt((x - a)/len)`.
//! The quadratic spacing resolves the `(x - a)^beta` behaviour that fractional
//! operators produce at the base point. Values and derivatives come from the
//! local cubic Lagrange interpolant in `v`.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::params::ScalarFunction;

#[derive(Debug, Clone)]
pub struct SampledFunction {
    a: f64,
    len: f64,
    values: Vec<f64>,
}

/// Sample abscissae for `m` intervals.
pub fn sample_points(a: f64, len: f64, m: usize) -> impl Iterator<Item = f64> {
    (0..=m).map(move |i| {
        let v = i as f64 / m as f64;
        if i == m {
            a + len
        } else {
            a + len * v * v
        }
    })
}

impl SampledFunction {
    /// `values[i]` is the function at the i-th point of [`sample_points`].
    pub fn new(a: f64, len: f64, values: Vec<f64>) -> Self {
        assert!(values.len() >= 4, "need at least 4 samples for cubic interpolation");
        assert!(len > 0.0);
        SampledFunction { a, len, values }
    }

    pub fn intervals(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn local(&self, x: f64) -> (usize, f64, f64) {
        let m = self.intervals();
        let u = ((x - self.a) / self.len).clamp(0.0, 1.0);
        let v = libm::sqrt(u);
        let i = ((v * m as f64) as usize).min(m - 1);
        let j0 = i.saturating_sub(1).min(m - 3);
        (j0, v * m as f64 - j0 as f64, v)
    }

    fn stencil(&self, j0: usize) -> [f64; 4] {
        [
            self.values[j0],
            self.values[j0 + 1],
            self.values[j0 + 2],
            self.values[j0 + 3],
        ]
    }

    pub fn value(&self, x: f64) -> f64 {
        let (j0, s, _) = self.local(x);
        let y = self.stencil(j0);
        let l0 = -(s - 1.0) * (s - 2.0) * (s - 3.0) / 6.0;
        let l1 = s * (s - 2.0) * (s - 3.0) / 2.0;
        let l2 = -s * (s - 1.0) * (s - 3.0) / 2.0;
        let l3 = s * (s - 1.0) * (s - 2.0) / 6.0;
        l0 * y[0] + l1 * y[1] + l2 * y[2] + l3 * y[3]
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let m = self.intervals() as f64;
        let (j0, s, v) = self.local(x);
        let y = self.stencil(j0);
        // dx/dv = 2 len v; at the base point use the second v-derivative instead.
        if v * m < 1e-2 {
            let d2 = second_derivative_s(&y, s) * m * m;
            return d2 / (2.0 * self.len);
        }
        let d0 = -(3.0 * s * s - 12.0 * s + 11.0) / 6.0;
        let d1 = (3.0 * s * s - 10.0 * s + 6.0) / 2.0;
        let d2 = -(3.0 * s * s - 8.0 * s + 3.0) / 2.0;
        let d3 = (3.0 * s * s - 6.0 * s + 2.0) / 6.0;
        let dy_dv = (d0 * y[0] + d1 * y[1] + d2 * y[2] + d3 * y[3]) * m;
        dy_dv / (2.0 * self.len * v)
    }

    pub fn into_function(self) -> ScalarFunction {
        let shared = Arc::new(self);
        let for_value = Arc::clone(&shared);
        ScalarFunction::with_derivative(move |x| for_value.value(x), move |x| shared.derivative(x))
    }
}

fn second_derivative_s(y: &[f64; 4], s: f64) -> f64 {
    let c0 = -(6.0 * s - 12.0) / 6.0;
    let c1 = (6.0 * s - 10.0) / 2.0;
    let c2 = -(6.0 * s - 8.0) / 2.0;
    let c3 = (6.0 * s - 6.0) / 6.0;
    c0 * y[0] + c1 * y[1] + c2 * y[2] + c3 * y[3]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(f: impl Fn(f64) -> f64, a: f64, len: f64, m: usize) -> SampledFunction {
        SampledFunction::new(a, len, sample_points(a, len, m).map(f).collect())
    }

    #[test]
    fn reproduces_low_degree_polynomials_in_v() {
        // x - a = len v^2, so a quadratic in x is a quartic in v; use a linear function instead
        let s = sample(|x| 3.0 * x - 1.0, 0.5, 2.0, 64);
        for i in 0..=50 {
            let x = 0.5 + 2.0 * i as f64 / 50.0;
            assert!((s.value(x) - (3.0 * x - 1.0)).abs() < 1e-12);
            assert!((s.derivative(x) - 3.0).abs() < 1e-9, "x={x} d={}", s.derivative(x));
        }
    }

    #[test]
    fn smooth_function_accuracy() {
        let s = sample(libm::sin, 0.0, 1.0, 2048);
        let mut worst = 0.0f64;
        let mut worst_d = 0.0f64;
        for i in 0..=997 {
            let x = i as f64 / 997.0;
            worst = worst.max((s.value(x) - libm::sin(x)).abs());
            worst_d = worst_d.max((s.derivative(x) - libm::cos(x)).abs());
        }
        assert!(worst < 1e-13, "{worst}");
        assert!(worst_d < 1e-8, "{worst_d}");
    }

    #[test]
    fn resolves_fractional_power_at_base() {
        // iterated derivatives start like (x - a)^(1 + beta)
        let s = sample(|x| libm::pow(x, 1.8), 0.0, 1.0, 1024);
        for &x in &[1e-7, 1e-4, 0.01, 0.3, 1.0] {
            let exact = libm::pow(x, 1.8);
            assert!((s.value(x) - exact).abs() < 1e-9, "x={x}");
        }
    }
}
