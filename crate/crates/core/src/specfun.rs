//! Real Gamma function and the power Mittag-Leffler function
//!
//! ```text
//! pE_{k,l}(tau) = sum_{n>=0} (tau ln p)^n / Gamma(k n + l)
//! ```
//!
//! Everything is evaluated through a double-double log-gamma so that the
//! series can be summed without losing the digits that cancel when
//! `tau ln p` is large and negative.

use alloc::vec::Vec;

use crate::ddouble::{Dd, HALF_LN_2PI};
use crate::error::{Error, Result};

/// Largest argument for which `Gamma(x)` is finite in `f64`.
pub const GAMMA_MAX_ARG: f64 = 171.624_376_956_302_7;

/// Default hard cap on the number of series terms.
pub const DEFAULT_MAX_TERMS: usize = 10_000;

/// `B_{2j} / (2j (2j - 1))` as double-doubles, j = 1..=15.
const STIRLING: [(f64, f64); 15] = [
    (0.08333333333333333, 4.625929269271485e-18),
    (-0.002777777777777778, 1.0601087908747154e-19),
    (0.0007936507936507937, 6.883823317368282e-22),
    (-0.0005952380952380953, 5.36938218754726e-20),
    (0.0008417508417508417, 3.6870174889237694e-20),
    (-0.0019175269175269176, 1.0675702776872475e-19),
    (0.00641025641025641, 2.2240044563805217e-19),
    (-0.029550653594771242, 4.861760957508855e-19),
    (0.17964437236883057, -6.401600482710946e-19),
    (-1.3924322169059011, 1.5837056989230303e-17),
    (13.402864044168393, -6.154114101993966e-16),
    (-156.84828462600203, 9.391823141715389e-15),
    (2193.1033333333335, -1.3339255626002948e-13),
    (-36108.77125372499, 5.897583353514365e-13),
    (691472.268851313, 2.5585296305158e-11),
];

/// Below this the argument is shifted upward before the Stirling series.
const STIRLING_FLOOR: f64 = 24.0;

/// Outcome of a truncated infinite series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesResult {
    pub value: f64,
    /// Number of terms included in `value` (always at least one).
    pub terms_used: usize,
    /// Magnitude of the first omitted term.
    pub tail_estimate: f64,
    /// Sum of the magnitudes of the included terms.
    pub abs_sum: f64,
}

impl SeriesResult {
    /// Rounding error the double-double summation can have accumulated.
    /// When this is comparable to `value` the terms cancelled beyond the
    /// working precision and the value is not meaningful.
    pub fn rounding_estimate(&self) -> f64 {
        self.abs_sum * libm::ldexp(1.0, -100)
    }
}

/// `ln Gamma(z)` for `z > 0` to about 30 significant digits.
pub(crate) fn ln_gamma_dd(z: f64) -> Dd {
    debug_assert!(z > 0.0);
    let mut w = Dd::from(z);
    let mut shift = Dd::ONE;
    while w.hi < STIRLING_FLOOR {
        shift = shift * w;
        w = w.add_f64(1.0);
    }
    let ln_w = w.ln();
    let mut s = w.add_f64(-0.5) * ln_w - w + HALF_LN_2PI;
    let inv = Dd::ONE / w;
    let inv2 = inv * inv;
    let mut pw = inv;
    for &(hi, lo) in STIRLING.iter() {
        s = s + Dd::new(hi, lo) * pw;
        pw = pw * inv2;
    }
    if shift.hi != 1.0 || shift.lo != 0.0 {
        s = s - shift.ln();
    }
    s
}

/// `1 / Gamma(z)` as a double-double; underflows to zero for very large `z`.
pub(crate) fn recip_gamma_dd(z: f64) -> Dd {
    (-ln_gamma_dd(z)).exp()
}

/// Gamma function for real `x > 0`.
pub fn gamma(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::Domain("gamma requires x > 0"));
    }
    if x > GAMMA_MAX_ARG {
        return Err(Error::Overflow("gamma(x) exceeds f64 range for x > 171.62"));
    }
    let g = ln_gamma_dd(x).exp().to_f64();
    if g.is_finite() {
        Ok(g)
    } else {
        Err(Error::Overflow("gamma(x) exceeds f64 range for x > 171.62"))
    }
}

/// Natural logarithm of the Gamma function for real `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 || x.is_infinite() {
        return Err(Error::Domain("ln_gamma requires finite x > 0"));
    }
    Ok(ln_gamma_dd(x).to_f64())
}

fn check_ml_args(k: f64, l: f64, p: f64, tol: f64) -> Result<()> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::Domain("power Mittag-Leffler requires k > 0"));
    }
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::Domain("power Mittag-Leffler requires l > 0"));
    }
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::Domain("power Mittag-Leffler requires p > 0"));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain("series tolerance must be > 0"));
    }
    Ok(())
}

/// Power Mittag-Leffler function `pE_{k,l}(tau)` with the default term cap.
pub fn power_ml(k: f64, l: f64, p: f64, tau: f64, tol: f64) -> Result<SeriesResult> {
    power_ml_capped(k, l, p, tau, tol, DEFAULT_MAX_TERMS)
}

/// Power Mittag-Leffler function with an explicit hard cap on the number of terms.
///
/// Terms follow `t_{n+1} = t_n * (tau ln p) * Gamma(kn+l) / Gamma(kn+k+l)` in
/// double-double. Summation stops before the first index `n >= 1` with
/// `|t_n| < tol` and `|t_{n+1}| <= |t_n|`.
pub fn power_ml_capped(
    k: f64,
    l: f64,
    p: f64,
    tau: f64,
    tol: f64,
    max_terms: usize,
) -> Result<SeriesResult> {
    check_ml_args(k, l, p, tol)?;
    if !tau.is_finite() {
        return Err(Error::Domain("power Mittag-Leffler requires finite tau"));
    }
    ml_series(k, l, tau * libm::log(p), tol, max_terms)
}

/// Sum of `x^n / Gamma(k n + l)` with the truncation rule of [`power_ml_capped`].
pub(crate) fn ml_series(k: f64, l: f64, x: f64, tol: f64, max_terms: usize) -> Result<SeriesResult> {
    let mut lg = ln_gamma_dd(l);
    let mut term = (-lg).exp();
    let mut sum = Dd::ZERO;
    let mut abs_sum = 0.0;
    let mut n = 0usize;
    loop {
        let arg = k * (n + 1) as f64 + l;
        let lg_next = ln_gamma_dd(arg);
        let next = if x == 0.0 {
            Dd::ZERO
        } else {
            term.mul_f64(x) * (lg - lg_next).exp()
        };
        if n >= 1 && term.hi.abs() < tol && next.hi.abs() <= term.hi.abs() {
            let value = sum.to_f64();
            if !value.is_finite() {
                return Err(Error::Overflow("power Mittag-Leffler value exceeds f64 range"));
            }
            return Ok(SeriesResult {
                value,
                terms_used: n,
                tail_estimate: term.hi.abs(),
                abs_sum,
            });
        }
        if n >= max_terms {
            return Err(Error::Convergence {
                what: "power Mittag-Leffler series",
                terms: n,
                last_term: term.hi.abs(),
            });
        }
        sum = sum + term;
        abs_sum += term.hi.abs();
        if !sum.is_finite() {
            return Err(Error::Overflow("power Mittag-Leffler value exceeds f64 range"));
        }
        term = next;
        lg = lg_next;
        n += 1;
    }
}

/// Precomputed `1/Gamma(k n + l)` coefficients for repeated evaluation of
/// `E_{k,l}(x) = sum x^n / Gamma(kn + l)` over `|x| <= x_max`.
///
/// Evaluation sums in `f64` and repeats the sum in double-double when the
/// absolute series exceeds the result enough to matter.
#[derive(Debug, Clone)]
pub struct MlTable {
    k: f64,
    l: f64,
    tol: f64,
    max_terms: usize,
    coeffs: Vec<Dd>,
    coeffs_f64: Vec<f64>,
}

/// Cancellation factor above which the f64 sum is recomputed in double-double.
const CANCELLATION_LIMIT: f64 = 4.0;

impl MlTable {
    pub fn new(k: f64, l: f64, x_max: f64, tol: f64, max_terms: usize) -> Result<Self> {
        check_ml_args(k, l, 1.0, tol)?;
        let x_max = x_max.abs();
        let mut coeffs = Vec::new();
        let mut prev = f64::INFINITY;
        for n in 0..max_terms {
            let c = recip_gamma_dd(k * n as f64 + l);
            let mag = c.hi.abs() * libm::pow(x_max, n as f64);
            coeffs.push(c);
            if c.hi == 0.0 && n > 0 {
                break;
            }
            // a couple of spare terms beyond the truncation point at x_max
            if n >= 2 && mag < tol * 1e-3 && mag <= prev {
                break;
            }
            prev = mag;
        }
        let coeffs_f64 = coeffs.iter().map(|c| c.hi).collect();
        Ok(MlTable {
            k,
            l,
            tol,
            max_terms,
            coeffs,
            coeffs_f64,
        })
    }

    /// `E_{k,l}(x)`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if x == 0.0 {
            return Ok(self.coeffs[0].to_f64());
        }
        let c = &self.coeffs_f64;
        let mut sum = 0.0;
        let mut abs_sum = 0.0;
        let mut xp = 1.0;
        let mut term = c[0];
        let mut n = 0;
        let used = loop {
            if n + 1 >= c.len() {
                // table exhausted; take the slow path
                return ml_series(self.k, self.l, x, self.tol, self.max_terms).map(|r| r.value);
            }
            let next_xp = xp * x;
            let next = c[n + 1] * next_xp;
            if n >= 1 && term.abs() < self.tol && next.abs() <= term.abs() {
                break n;
            }
            sum += term;
            abs_sum += term.abs();
            term = next;
            xp = next_xp;
            n += 1;
        };
        if x > 0.0 || abs_sum <= CANCELLATION_LIMIT * sum.abs() {
            return Ok(sum);
        }
        let xd = Dd::from(x);
        let mut acc = self.coeffs[used - 1];
        for i in (0..used - 1).rev() {
            acc = acc * xd + self.coeffs[i];
        }
        Ok(acc.to_f64())
    }
}

impl MlTable {
    /// `E_{k,l}(x)` summed entirely in double-double.
    pub fn eval_dd(&self, x: f64) -> Result<Dd> {
        let xd = Dd::from(x);
        let mut sum = Dd::ZERO;
        let mut xp = Dd::ONE;
        for n in 0..self.coeffs.len() - 1 {
            let term = self.coeffs[n] * xp;
            let next_xp = xp * xd;
            let next = self.coeffs[n + 1] * next_xp;
            if n >= 1 && term.hi.abs() < self.tol && next.hi.abs() <= term.hi.abs() {
                return Ok(sum);
            }
            sum = sum + term;
            xp = next_xp;
        }
        ml_series(self.k, self.l, x, self.tol, self.max_terms).map(|r| Dd::from(r.value))
    }
}

/// `u -> E_{k,l}(scale u)` on `[0, u_max]` as a Chebyshev expansion in `u`.
///
/// The map is entire in `u`, so a modest degree reaches rounding level. Node
/// values come from the double-double series, which keeps the expansion
/// accurate where the plain series cancels.
#[derive(Debug, Clone)]
pub struct MlKernel {
    u_max: f64,
    coeffs: Vec<f64>,
    /// Expansion of `ln E` rather than `E`; used for positive arguments, where
    /// `E` is positive and grows quickly.
    log_form: bool,
}

const KERNEL_MAX_NODES: usize = 2048;

impl MlKernel {
    pub fn new(k: f64, l: f64, scale: f64, u_max: f64, tol: f64, max_terms: usize) -> Result<Self> {
        check_ml_args(k, l, 1.0, tol)?;
        if !(u_max >= 0.0 && u_max.is_finite() && scale.is_finite()) {
            return Err(Error::Domain("kernel range must be finite"));
        }
        if scale == 0.0 || u_max == 0.0 {
            return Ok(MlKernel {
                u_max,
                coeffs: alloc::vec![recip_gamma_dd(l).to_f64()],
                log_form: false,
            });
        }
        let table = MlTable::new(k, l, scale.abs() * u_max, tol, max_terms)?;
        let log_form = scale > 0.0;
        let mut n = 32;
        loop {
            let theta = |j: usize| core::f64::consts::PI * (j as f64 + 0.5) / n as f64;
            let mut values = Vec::with_capacity(n);
            for j in 0..n {
                let u = 0.5 * u_max * (1.0 + libm::cos(theta(j)));
                let e = table.eval_dd(scale * u)?;
                values.push(if log_form { e.ln().to_f64() } else { e.to_f64() });
            }
            let fmax = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            // cos(i theta_j) = cos(pi i (2j + 1) / (2n)), looked up modulo 4n
            let cosines: Vec<f64> = (0..4 * n)
                .map(|m| libm::cos(core::f64::consts::PI * m as f64 / (2 * n) as f64))
                .collect();
            let mut coeffs = Vec::with_capacity(n);
            for i in 0..n {
                let mut acc = crate::ddouble::DdSum::default();
                for (j, v) in values.iter().enumerate() {
                    acc.add(v * cosines[(i * (2 * j + 1)) % (4 * n)]);
                }
                let scale_i = if i == 0 { 1.0 } else { 2.0 };
                coeffs.push(scale_i * acc.value() / n as f64);
            }
            let floor = 4.0 * f64::EPSILON * fmax;
            let keep = coeffs.iter().rposition(|c| c.abs() > floor).map_or(1, |i| i + 1);
            if keep + 8 <= n || n >= KERNEL_MAX_NODES {
                coeffs.truncate(keep);
                return Ok(MlKernel {
                    u_max,
                    coeffs,
                    log_form,
                });
            }
            n *= 2;
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Kernel value at `u` in `[0, u_max]`.
    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        if self.coeffs.len() == 1 && !self.log_form {
            return self.coeffs[0];
        }
        let x = 2.0 * u / self.u_max - 1.0;
        let x2 = 2.0 * x;
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for &c in self.coeffs[1..].iter().rev() {
            let b0 = c + x2 * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        let v = self.coeffs[0] + x * b1 - b2;
        if self.log_form {
            libm::exp(v)
        } else {
            v
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_at_small_integers_and_half() {
        assert_eq!(gamma(1.0).unwrap(), 1.0);
        assert_eq!(gamma(5.0).unwrap(), 24.0);
        assert_eq!(gamma(2.0).unwrap(), 1.0);
        let sqrt_pi = 1.772_453_850_905_516;
        assert!((gamma(0.5).unwrap() - sqrt_pi).abs() <= 2.0 * f64::EPSILON * sqrt_pi);
    }

    #[test]
    fn gamma_rejects_nonpositive_and_overflows() {
        assert!(matches!(gamma(0.0), Err(Error::Domain(_))));
        assert!(matches!(gamma(-1.5), Err(Error::Domain(_))));
        assert!(matches!(gamma(f64::NAN), Err(Error::Domain(_))));
        assert!(matches!(gamma(171.7), Err(Error::Overflow(_))));
        assert!(gamma(171.6).unwrap().is_finite());
    }

    #[test]
    fn power_ml_zero_argument_keeps_only_first_term() {
        for &k in &[0.3, 1.0, 2.5] {
            let r = power_ml(k, 1.0, 3.0, 0.0, 1e-12).unwrap();
            assert_eq!(r.value, 1.0);
            assert_eq!(r.terms_used, 1);
        }
    }

    #[test]
    fn power_ml_reduces_to_power() {
        let r = power_ml(1.0, 1.0, 2.0, 3.0, 1e-15).unwrap();
        assert!((r.value - 8.0).abs() < 1e-14);
        let r = power_ml(1.0, 1.0, 10.0, -1.5, 1e-16).unwrap();
        assert!((r.value - libm::pow(10.0, -1.5)).abs() < 1e-16);
    }

    #[test]
    fn power_ml_hits_hard_cap() {
        let err = power_ml_capped(1.0, 1.0, 10.0, 20.0, 1e-12, 5).unwrap_err();
        assert!(matches!(err, Error::Convergence { terms: 5, .. }));
    }

    #[test]
    fn power_ml_validates_parameters() {
        assert!(matches!(power_ml(0.0, 1.0, 2.0, 1.0, 1e-12), Err(Error::Domain(_))));
        assert!(matches!(power_ml(1.0, -1.0, 2.0, 1.0, 1e-12), Err(Error::Domain(_))));
        assert!(matches!(power_ml(1.0, 1.0, 0.0, 1.0, 1e-12), Err(Error::Domain(_))));
        assert!(matches!(power_ml(1.0, 1.0, 2.0, 1.0, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn table_matches_direct_series() {
        let table = MlTable::new(0.8, 1.0, 10.0, 1e-16, DEFAULT_MAX_TERMS).unwrap();
        for i in 0..=40 {
            let x = -10.0 + 0.5 * i as f64;
            let direct = ml_series(0.8, 1.0, x, 1e-16, DEFAULT_MAX_TERMS).unwrap().value;
            let tab = table.eval(x).unwrap();
            assert!((direct - tab).abs() <= 1e-15 * direct.abs().max(1.0), "x={x}: {direct} vs {tab}");
        }
    }

    #[test]
    fn table_beyond_range_falls_back() {
        let table = MlTable::new(1.0, 1.0, 1.0, 1e-16, DEFAULT_MAX_TERMS).unwrap();
        let v = table.eval(-20.0).unwrap();
        // truncation tolerance is absolute
        assert!((v - libm::exp(-20.0)).abs() < 1e-16);
    }

    #[test]
    fn chebyshev_kernel_matches_series() {
        for &(k, scale) in &[(0.8, -9.9), (1.5, -9.9), (0.8, 6.2), (1.0, -1.0)] {
            let kern = MlKernel::new(k, 1.0, scale, 1.0, 1e-16, DEFAULT_MAX_TERMS).unwrap();
            for i in 0..=64 {
                let u = i as f64 / 64.0;
                let direct = ml_series(k, 1.0, scale * u, 1e-17, DEFAULT_MAX_TERMS).unwrap().value;
                let err = (kern.eval(u) - direct).abs();
                assert!(err <= 2e-14 * direct.abs().max(1.0), "k={k} s={scale} u={u}: {err:e}");
            }
        }
    }

    #[test]
    fn chebyshev_kernel_constant_when_scale_vanishes() {
        let kern = MlKernel::new(0.7, 1.0, 0.0, 3.0, 1e-15, DEFAULT_MAX_TERMS).unwrap();
        assert_eq!(kern.degree(), 0);
        assert_eq!(kern.eval(2.0), 1.0);
    }
}
