use alloc::sync::Arc;
use core::fmt;

use crate::closedforms::RegisteredFunction;
use crate::error::{Error, Result};

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Operator parameters `(alpha, beta, p, N)` with the derived quantities
/// `chi = (1 - alpha) / N(alpha)`, `phi = alpha / N(alpha)` and
/// `mu = alpha / (1 - alpha)`.
#[derive(Clone)]
pub struct PowerParams {
    alpha: f64,
    beta: f64,
    p: f64,
    normalization: Option<RealFn>,
    n_alpha: f64,
    ln_p: f64,
}

impl fmt::Debug for PowerParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PowerParams")
            .field("alpha", &self.alpha)
            .field("beta", &self.beta)
            .field("p", &self.p)
            .field("n_alpha", &self.n_alpha)
            .finish()
    }
}

impl PowerParams {
    /// Parameters with the constant normalization `N = 1`.
    pub fn new(alpha: f64, beta: f64, p: f64) -> Result<Self> {
        Self::build(alpha, beta, p, None)
    }

    /// Parameters with a user normalization function; `N(0)` must be 1 and `N(alpha) > 0`.
    pub fn with_normalization(alpha: f64, beta: f64, p: f64, n: RealFn) -> Result<Self> {
        Self::build(alpha, beta, p, Some(n))
    }

    fn build(alpha: f64, beta: f64, p: f64, normalization: Option<RealFn>) -> Result<Self> {
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::Domain("alpha must lie in [0, 1)"));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Domain("beta must be > 0"));
        }
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::Domain("p must be > 0"));
        }
        let n_alpha = match &normalization {
            None => 1.0,
            Some(n) => {
                if (n(0.0) - 1.0).abs() > 1e-12 {
                    return Err(Error::Domain("normalization must satisfy N(0) = 1"));
                }
                n(alpha)
            }
        };
        if !(n_alpha > 0.0 && n_alpha.is_finite()) {
            return Err(Error::Domain("normalization must satisfy N(alpha) > 0"));
        }
        Ok(PowerParams {
            alpha,
            beta,
            p,
            normalization,
            n_alpha,
            ln_p: libm::log(p),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn ln_p(&self) -> f64 {
        self.ln_p
    }

    pub fn normalization_at_alpha(&self) -> f64 {
        self.n_alpha
    }

    pub fn has_custom_normalization(&self) -> bool {
        self.normalization.is_some()
    }

    pub fn chi(&self) -> f64 {
        (1.0 - self.alpha) / self.n_alpha
    }

    pub fn phi(&self) -> f64 {
        self.alpha / self.n_alpha
    }

    pub fn mu(&self) -> f64 {
        self.alpha / (1.0 - self.alpha)
    }

    /// `ln p * phi`, the coefficient of the Riemann-Liouville part of the integral.
    pub fn integral_coupling(&self) -> f64 {
        self.ln_p * self.phi()
    }

    /// `-mu ln p`, the argument scale of the derivative kernel.
    pub fn kernel_scale(&self) -> f64 {
        -self.mu() * self.ln_p
    }
}

/// Central-difference step used when no analytic derivative is supplied.
pub fn fd_step(t: f64) -> f64 {
    (1e-6 * t.abs()).max(1e-6)
}

fn central_difference(f: &RealFn, t: f64) -> f64 {
    let h = fd_step(t);
    (f(t + h) - f(t - h)) / (2.0 * h)
}

/// Real function of one variable with an optional analytic derivative.
#[derive(Clone)]
pub struct ScalarFunction {
    f: RealFn,
    df: Option<RealFn>,
    registered: Option<RegisteredFunction>,
}

impl fmt::Debug for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarFunction")
            .field("analytic_derivative", &self.df.is_some())
            .field("registered", &self.registered)
            .finish()
    }
}

impl ScalarFunction {
    /// Function without a derivative; `derivative` falls back to central differences.
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        ScalarFunction {
            f: Arc::new(f),
            df: None,
            registered: None,
        }
    }

    pub fn with_derivative(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        ScalarFunction {
            f: Arc::new(f),
            df: Some(Arc::new(df)),
            registered: None,
        }
    }

    pub fn from_handles(f: RealFn, df: Option<RealFn>) -> Self {
        ScalarFunction {
            f,
            df,
            registered: None,
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::with_derivative(move |_| c, |_| 0.0)
    }

    pub fn registered(g: RegisteredFunction) -> Self {
        ScalarFunction {
            f: Arc::new(move |t| g.value(t)),
            df: Some(Arc::new(move |t| g.classical_derivative(t))),
            registered: Some(g),
        }
    }

    #[inline]
    pub fn value(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    #[inline]
    pub fn derivative(&self, t: f64) -> f64 {
        match &self.df {
            Some(df) => df(t),
            None => central_difference(&self.f, t),
        }
    }

    /// True when derivatives come from the central-difference fallback.
    pub fn uses_fd_fallback(&self) -> bool {
        self.df.is_none()
    }

    pub fn registered_kind(&self) -> Option<RegisteredFunction> {
        self.registered
    }

    /// `a f + b g`; the derivative is analytic only if both are.
    pub fn linear_combination(a: f64, f: &ScalarFunction, b: f64, g: &ScalarFunction) -> Self {
        let (f1, g1) = (f.clone(), g.clone());
        let value = move |t| a * f1.value(t) + b * g1.value(t);
        if f.df.is_some() && g.df.is_some() {
            let (f2, g2) = (f.clone(), g.clone());
            Self::with_derivative(value, move |t| a * f2.derivative(t) + b * g2.derivative(t))
        } else {
            Self::new(value)
        }
    }
}

/// Positive weight `omega` with its derivative.
#[derive(Clone)]
pub struct WeightFunction {
    omega: RealFn,
    omega_prime: Option<RealFn>,
    unit: bool,
}

impl fmt::Debug for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightFunction")
            .field("unit", &self.unit)
            .field("analytic_derivative", &self.omega_prime.is_some())
            .finish()
    }
}

impl WeightFunction {
    /// `omega = 1`.
    pub fn unit() -> Self {
        WeightFunction {
            omega: Arc::new(|_| 1.0),
            omega_prime: Some(Arc::new(|_| 0.0)),
            unit: true,
        }
    }

    pub fn new(
        omega: impl Fn(f64) -> f64 + Send + Sync + 'static,
        omega_prime: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        WeightFunction {
            omega: Arc::new(omega),
            omega_prime: Some(Arc::new(omega_prime)),
            unit: false,
        }
    }

    pub fn without_derivative(omega: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        WeightFunction {
            omega: Arc::new(omega),
            omega_prime: None,
            unit: false,
        }
    }

    /// `exp(-c t)`.
    pub fn exp_decay(c: f64) -> Self {
        Self::new(move |t| libm::exp(-c * t), move |t| -c * libm::exp(-c * t))
    }

    /// `1 + c t^2`.
    pub fn quadratic(c: f64) -> Self {
        Self::new(move |t| 1.0 + c * t * t, move |t| 2.0 * c * t)
    }

    #[inline]
    pub fn value(&self, t: f64) -> f64 {
        if self.unit {
            1.0
        } else {
            (self.omega)(t)
        }
    }

    #[inline]
    pub fn derivative(&self, t: f64) -> f64 {
        if self.unit {
            return 0.0;
        }
        match &self.omega_prime {
            Some(d) => d(t),
            None => central_difference(&self.omega, t),
        }
    }

    pub fn is_unit(&self) -> bool {
        self.unit
    }

    pub fn uses_fd_fallback(&self) -> bool {
        self.omega_prime.is_none()
    }

    pub(crate) fn positive_at(&self, t: f64) -> Result<f64> {
        let v = self.value(t);
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Domain("weight omega must be positive on [a, t]"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_quantities() {
        let pp = PowerParams::new(0.5, 1.0, core::f64::consts::E).unwrap();
        assert_eq!(pp.chi(), 0.5);
        assert_eq!(pp.phi(), 0.5);
        assert_eq!(pp.mu(), 1.0);
        assert_eq!(pp.ln_p(), 1.0);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(PowerParams::new(1.0, 1.0, 2.0).is_err());
        assert!(PowerParams::new(-0.1, 1.0, 2.0).is_err());
        assert!(PowerParams::new(0.5, 0.0, 2.0).is_err());
        assert!(PowerParams::new(0.5, 1.0, 0.0).is_err());
        assert!(PowerParams::with_normalization(0.5, 1.0, 2.0, Arc::new(|a| 2.0 - a)).is_err());
        assert!(PowerParams::with_normalization(0.5, 1.0, 2.0, Arc::new(|a| 1.0 - 2.0 * a)).is_err());
    }

    #[test]
    fn custom_normalization_scales_chi_and_phi() {
        let n: RealFn = Arc::new(|a| 1.0 + a * (1.0 - a));
        let pp = PowerParams::with_normalization(0.5, 1.0, 2.0, n).unwrap();
        assert_eq!(pp.normalization_at_alpha(), 1.25);
        assert_eq!(pp.chi(), 0.4);
        assert_eq!(pp.phi(), 0.4);
    }

    #[test]
    fn finite_difference_fallback_is_flagged() {
        let f = ScalarFunction::new(|t| t * t * t);
        assert!(f.uses_fd_fallback());
        assert!((f.derivative(2.0) - 12.0).abs() < 1e-8);
        let g = ScalarFunction::with_derivative(|t| t, |_| 1.0);
        assert!(!g.uses_fd_fallback());
        let w = WeightFunction::without_derivative(|t| 1.0 + t);
        assert!(w.uses_fd_fallback());
        assert!((w.derivative(0.3) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn weight_positivity_check() {
        let w = WeightFunction::new(|t| 1.0 - t, |_| -1.0);
        assert!(w.positive_at(0.5).is_ok());
        assert!(w.positive_at(1.0).is_err());
    }
}
