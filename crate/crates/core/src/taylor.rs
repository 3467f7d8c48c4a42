//! Generalized Taylor approximant, its remainder, the mean value form and the
//! telescoping identity between consecutive orders.
//!
//! ```text
//! A_n(t) = w(a)/w(t) sum_{l<=n} D^l f(a) W_l(t - a)
//! W_l(d) = sum_{m<=l} C(l,m) chi^(l-m) (ln p phi)^m d^(m beta) / Gamma(m beta + 1)
//! ```

use alloc::vec::Vec;

use crate::closedforms::lth_derivative_series;
use crate::ddouble::{Dd, DdSum};
use crate::error::{ensure, Error, Result};
use crate::operators::{
    compose_identity_residual, iterated_pfd, iterated_pfi_with, pfd_quadrature, tabulate_derivatives,
    IterationConfig, PfdEngine,
};
use crate::params::{PowerParams, ScalarFunction, WeightFunction};
use crate::quadrature::QuadratureConfig;
use crate::specfun::{ln_gamma_dd, DEFAULT_MAX_TERMS};

/// Numerical settings shared by the Taylor routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub quadrature: QuadratureConfig,
    pub iteration: IterationConfig,
    /// Truncation tolerance for kernel and closed-form series.
    pub series_tol: f64,
    /// Largest accepted grid-halving difference for iterated derivatives.
    pub resolution_tol: f64,
    pub max_terms: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            quadrature: QuadratureConfig::default(),
            iteration: IterationConfig::default(),
            series_tol: 1e-15,
            resolution_tol: 1e-6,
            max_terms: DEFAULT_MAX_TERMS,
        }
    }
}

/// `W_l(dt)`; `W_l(0) = chi^l`.
pub fn weight_polynomial(l: usize, pp: &PowerParams, dt: f64) -> Result<f64> {
    ensure(dt >= 0.0 && dt.is_finite(), "dt must be finite and >= 0")?;
    let chi = Dd::from(pp.chi());
    if dt == 0.0 || l == 0 {
        return Ok(chi.powi(l as u32).to_f64());
    }
    let c = Dd::from(pp.integral_coupling());
    let ln_dt = Dd::from(dt).ln();
    let beta = pp.beta();
    let mut acc = DdSum::default();
    let mut binom = Dd::ONE;
    for m in 0..=l {
        let mb = m as f64 * beta;
        let shape = (ln_dt.mul_f64(mb) - ln_gamma_dd(mb + 1.0)).exp();
        acc.add_dd(binom * chi.powi((l - m) as u32) * c.powi(m as u32) * shape);
        binom = binom.mul_f64((l - m) as f64) / Dd::from(m as f64 + 1.0);
    }
    let v = acc.value();
    if !v.is_finite() {
        return Err(Error::Overflow("weight polynomial exceeds f64 range"));
    }
    Ok(v)
}

/// Where the derivative values at the base point come from.
#[derive(Debug, Clone, PartialEq)]
pub enum DerivSource {
    /// Closed-form series; only for registered exp/cos/sin functions with unit weight.
    ClosedForm,
    /// The iterated operator itself, which vanishes at the base point for `l >= 1`.
    Numeric,
    /// `D^l f(a)` for `l = 0..=n`.
    UserSupplied(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivOrigin {
    ClosedForm,
    Numeric,
    UserSupplied,
}

impl DerivSource {
    pub fn origin(&self) -> DerivOrigin {
        match self {
            DerivSource::ClosedForm => DerivOrigin::ClosedForm,
            DerivSource::Numeric => DerivOrigin::Numeric,
            DerivSource::UserSupplied(_) => DerivOrigin::UserSupplied,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TaylorApproximant {
    a: f64,
    order: usize,
    params: PowerParams,
    weight: WeightFunction,
    derivs_at_base: Vec<f64>,
    origin: DerivOrigin,
}

/// `D^l f(x)` from closed forms or the iterated operator.
#[allow(clippy::too_many_arguments)]
fn derivative_at(
    f: &ScalarFunction,
    l: usize,
    pp: &PowerParams,
    w: &WeightFunction,
    a: f64,
    x: f64,
    closed_form: bool,
    opts: &EvalOptions,
) -> Result<f64> {
    if closed_form {
        let g = f
            .registered_kind()
            .ok_or(Error::DerivativeUnavailable("no closed form for this function"))?;
        if !w.is_unit() {
            return Err(Error::DerivativeUnavailable("closed forms require omega = 1"));
        }
        return Ok(lth_derivative_series(&g, l, pp, x, opts.series_tol, opts.max_terms)?.value);
    }
    iterated_pfd(
        f,
        l,
        pp,
        w,
        a,
        x,
        &opts.quadrature,
        &opts.iteration,
        opts.resolution_tol,
    )
}

impl TaylorApproximant {
    pub fn build(
        f: &ScalarFunction,
        order: usize,
        pp: &PowerParams,
        w: &WeightFunction,
        a: f64,
        source: &DerivSource,
        opts: &EvalOptions,
    ) -> Result<Self> {
        ensure(a.is_finite(), "base point must be finite")?;
        w.positive_at(a)?;
        let derivs_at_base = match source {
            DerivSource::UserSupplied(v) => {
                ensure(v.len() == order + 1, "need exactly n + 1 derivative values")?;
                let fa = f.value(a);
                ensure(
                    (v[0] - fa).abs() <= 1e-12 * fa.abs().max(1.0),
                    "first derivative value must equal f(a)",
                )?;
                v.clone()
            }
            DerivSource::ClosedForm | DerivSource::Numeric => {
                let closed = matches!(source, DerivSource::ClosedForm);
                (0..=order)
                    .map(|l| derivative_at(f, l, pp, w, a, a, closed, opts))
                    .collect::<Result<Vec<f64>>>()?
            }
        };
        Ok(TaylorApproximant {
            a,
            order,
            params: pp.clone(),
            weight: w.clone(),
            derivs_at_base,
            origin: source.origin(),
        })
    }

    pub fn base_point(&self) -> f64 {
        self.a
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn params(&self) -> &PowerParams {
        &self.params
    }

    pub fn derivs_at_base(&self) -> &[f64] {
        &self.derivs_at_base
    }

    pub fn origin(&self) -> DerivOrigin {
        self.origin
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        ensure(t >= self.a && t.is_finite(), "t must be >= a")?;
        let ratio = self.weight.positive_at(self.a)? / self.weight.positive_at(t)?;
        let mut acc = DdSum::default();
        for (l, d) in self.derivs_at_base.iter().enumerate() {
            acc.add(d * weight_polynomial(l, &self.params, t - self.a)?);
        }
        Ok(ratio * acc.value())
    }
}

/// `A_n(t)` built from the given derivative source.
#[allow(clippy::too_many_arguments)]
pub fn approximant(
    f: &ScalarFunction,
    n: usize,
    pp: &PowerParams,
    w: &WeightFunction,
    a: f64,
    source: &DerivSource,
    t: f64,
    opts: &EvalOptions,
) -> Result<f64> {
    TaylorApproximant::build(f, n, pp, w, a, source, opts)?.eval(t)
}

/// `R_N = w(lambda) D^(N+1) f(lambda) W_(N+1)(t - a) / w(t)`.
#[allow(clippy::too_many_arguments)]
pub fn remainder(
    f: &ScalarFunction,
    order: usize,
    pp: &PowerParams,
    w: &WeightFunction,
    a: f64,
    t: f64,
    lambda: f64,
    source: &DerivSource,
    opts: &EvalOptions,
) -> Result<f64> {
    ensure(a <= lambda && lambda <= t, "lambda must lie in [a, t]")?;
    let closed = match source {
        DerivSource::ClosedForm => true,
        DerivSource::Numeric => false,
        DerivSource::UserSupplied(_) => {
            return Err(Error::DerivativeUnavailable(
                "the remainder needs D^(N+1) f away from the base point",
            ))
        }
    };
    let d = derivative_at(f, order + 1, pp, w, a, lambda, closed, opts)?;
    let wl = w.positive_at(lambda)?;
    let wt = w.positive_at(t)?;
    Ok(wl * d * weight_polynomial(order + 1, pp, t - a)? / wt)
}

/// `f(t) - [w(a) f(a) + w(lambda) D f(lambda) W_1(t - a)] / w(t)`.
pub fn mvt_residual(
    f: &ScalarFunction,
    pp: &PowerParams,
    w: &WeightFunction,
    a: f64,
    t: f64,
    lambda: f64,
    opts: &EvalOptions,
) -> Result<f64> {
    ensure(a <= lambda && lambda <= t, "lambda must lie in [a, t]")?;
    let d = pfd_quadrature(f, pp, w, a, lambda, &opts.quadrature, opts.series_tol)?;
    let wt = w.positive_at(t)?;
    let inner = w.positive_at(a)? * f.value(a) + w.positive_at(lambda)? * d * weight_polynomial(1, pp, t - a)?;
    Ok(f.value(t) - inner / wt)
}

/// How [`find_lambda`] settled on its point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambdaSearch {
    /// A sign change was bracketed and bisected.
    Bracketed,
    /// No sign change, but the residual is negligible on the whole scan.
    Flat,
    /// No sign change; the point is where the scanned residual was smallest.
    NoSignChange,
}

/// Result of a search for an intermediate point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaRoot {
    pub lambda: f64,
    pub residual: f64,
    pub search: LambdaSearch,
}

impl LambdaRoot {
    /// True for a bracketed root or a negligible residual.
    pub fn found(&self) -> bool {
        self.search != LambdaSearch::NoSignChange
    }
}

const SCAN_POINTS: usize = 129;
const LAMBDA_TOL: f64 = 1e-10;
const FLAT_TOL: f64 = 1e-10;

/// First root of `r` on `[a, t]`: uniform scan for a sign change, then bisection.
pub fn find_lambda(a: f64, t: f64, mut r: impl FnMut(f64) -> Result<f64>) -> Result<LambdaRoot> {
    ensure(t >= a, "t must be >= a")?;
    let point = |i: usize| {
        if i == SCAN_POINTS - 1 {
            t
        } else {
            a + (t - a) * i as f64 / (SCAN_POINTS - 1) as f64
        }
    };
    let mut prev = (a, r(a)?);
    let mut best = prev;
    let mut worst = prev.1.abs();
    if prev.1 == 0.0 {
        return Ok(LambdaRoot {
            lambda: a,
            residual: 0.0,
            search: LambdaSearch::Bracketed,
        });
    }
    for i in 1..SCAN_POINTS {
        let x = point(i);
        let v = r(x)?;
        worst = worst.max(v.abs());
        if v.abs() < best.1.abs() {
            best = (x, v);
        }
        if v == 0.0 || v.signum() != prev.1.signum() {
            let (mut lo, mut hi) = (prev, (x, v));
            while hi.0 - lo.0 > LAMBDA_TOL && hi.1 != 0.0 {
                let mid = 0.5 * (lo.0 + hi.0);
                let vm = r(mid)?;
                if vm == 0.0 || vm.signum() == hi.1.signum() {
                    hi = (mid, vm);
                } else {
                    lo = (mid, vm);
                }
            }
            let pick = if lo.1.abs() < hi.1.abs() { lo } else { hi };
            return Ok(LambdaRoot {
                lambda: pick.0,
                residual: pick.1,
                search: LambdaSearch::Bracketed,
            });
        }
        prev = (x, v);
    }
    Ok(LambdaRoot {
        lambda: best.0,
        residual: best.1,
        search: if worst < FLAT_TOL {
            LambdaSearch::Flat
        } else {
            LambdaSearch::NoSignChange
        },
    })
}

/// `[I^n D^n f - I^(n+1) D^(n+1) f](t) - w(a)/w(t) D^n f(a) W_n(t - a)`, with
/// `D^n f(a)` from the operator itself.
///
/// For `n >= 1` the derivative levels are sampled; the result is repeated on a
/// half-density grid and rejected when the two differ by more than the
/// resolution tolerance.
pub fn telescoping_check(
    f: &ScalarFunction,
    n: usize,
    pp: &PowerParams,
    w: &WeightFunction,
    a: f64,
    t: f64,
    opts: &EvalOptions,
) -> Result<f64> {
    if n == 0 {
        let r = compose_identity_residual(f, pp, w, a, t, &opts.quadrature, opts.series_tol)?;
        return Ok(-r);
    }
    ensure(a.is_finite() && t.is_finite() && t >= a, "t must be >= a")?;
    let wa = w.positive_at(a)?;
    let wt = w.positive_at(t)?;
    let d_base = derivative_at(f, n, pp, w, a, a, false, opts)?;
    let rhs = wa / wt * d_base * weight_polynomial(n, pp, t - a)?;
    if t == a {
        return Ok(-rhs);
    }
    let engine = PfdEngine::new(pp, w, a, t, &opts.quadrature, opts.iteration.kernel_tol)?;
    let lhs = |m: usize| -> Result<f64> {
        let levels = tabulate_derivatives(&engine, f, n + 1, a, t, m)?;
        let quad = engine.integrator();
        let upper = iterated_pfi_with(quad, n, pp, w, a, t, |x| levels[n - 1].value(x))?;
        let lower = iterated_pfi_with(quad, n + 1, pp, w, a, t, |x| levels[n].value(x))?;
        Ok(upper - lower)
    };
    let m = opts.iteration.intervals(t - a);
    let fine = lhs(m)?;
    let coarse = lhs(m / 2)?;
    let estimate = (fine - coarse).abs();
    if estimate > opts.resolution_tol {
        return Err(Error::Resolution {
            estimate,
            tol: opts.resolution_tol,
        });
    }
    Ok(fine - rhs)
}
