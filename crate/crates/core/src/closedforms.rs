//! Closed-form iterated derivatives of `exp(delta t)`, `cos(delta t)` and
//! `sin(delta t)` with `omega = 1`, and the Taylor approximants built from them.
//!
//! ```text
//! D^l g(t) = chi^-l sum_q C(q+l-1, l-1) (-mu ln p)^q delta^(-beta q) Phi_q(t)
//! ```
//!
//! with `Phi_q(t)` equal to `exp(delta t)`, `cos(delta t - beta q pi/2)` or
//! `sin(delta t - beta q pi/2)`. These hold for the lower limit `-inf`; with a
//! finite lower limit they are an approximation.

use core::f64::consts::PI;

use crate::ddouble::{Dd, DdSum};
use crate::error::{Error, Result};
use crate::params::PowerParams;
use crate::specfun::SeriesResult;
use crate::taylor::weight_polynomial;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunctionKind {
    Exp,
    Cos,
    Sin,
}

impl FunctionKind {
    pub fn name(self) -> &'static str {
        match self {
            FunctionKind::Exp => "exp",
            FunctionKind::Cos => "cos",
            FunctionKind::Sin => "sin",
        }
    }
}

/// `exp(delta t)`, `cos(delta t)` or `sin(delta t)` with `delta > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegisteredFunction {
    kind: FunctionKind,
    delta: f64,
}

impl RegisteredFunction {
    pub fn new(kind: FunctionKind, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::Domain("delta must be > 0"));
        }
        Ok(RegisteredFunction { kind, delta })
    }

    pub fn kind(&self) -> FunctionKind {
        self.kind
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn value(&self, t: f64) -> f64 {
        let x = self.delta * t;
        match self.kind {
            FunctionKind::Exp => libm::exp(x),
            FunctionKind::Cos => libm::cos(x),
            FunctionKind::Sin => libm::sin(x),
        }
    }

    pub fn classical_derivative(&self, t: f64) -> f64 {
        let d = self.delta;
        let x = d * t;
        match self.kind {
            FunctionKind::Exp => d * libm::exp(x),
            FunctionKind::Cos => -d * libm::sin(x),
            FunctionKind::Sin => d * libm::cos(x),
        }
    }

    /// `Phi_q(t)`: the function with its trigonometric argument shifted by `beta q pi / 2`.
    pub fn phase(&self, t: f64, beta: f64, q: usize) -> f64 {
        let x = self.delta * t;
        if q == 0 {
            return self.value(t);
        }
        // reduce beta q / 4 modulo 1 before scaling by 2 pi
        let turns = beta * q as f64 / 4.0;
        let shift = 2.0 * PI * (turns - libm::floor(turns));
        match self.kind {
            FunctionKind::Exp => libm::exp(x),
            FunctionKind::Cos => libm::cos(x - shift),
            FunctionKind::Sin => libm::sin(x - shift),
        }
    }

    /// Bound on `|Phi_q(t)|` over all `q`.
    fn phase_bound(&self, t: f64) -> f64 {
        match self.kind {
            FunctionKind::Exp => libm::exp(self.delta * t),
            FunctionKind::Cos | FunctionKind::Sin => 1.0,
        }
    }
}

/// Limit of the ratio of successive q-terms, `|mu ln p| delta^-beta`.
pub fn convergence_ratio(g: &RegisteredFunction, pp: &PowerParams) -> f64 {
    (pp.mu() * pp.ln_p()).abs() * libm::pow(g.delta, -pp.beta())
}

/// `D^l g(t)` from the closed-form q-series.
///
/// Truncation uses the envelope `C(q+l-1, l-1) r^q max|Phi_q|` rather than the
/// terms themselves, so zeros of the trigonometric factor cannot stop the sum
/// early.
pub fn lth_derivative_series(
    g: &RegisteredFunction,
    l: usize,
    pp: &PowerParams,
    t: f64,
    tol: f64,
    max_terms: usize,
) -> Result<SeriesResult> {
    if !(tol > 0.0) {
        return Err(Error::Domain("series tolerance must be > 0"));
    }
    if !t.is_finite() {
        return Err(Error::Domain("t must be finite"));
    }
    if l == 0 {
        return Ok(SeriesResult {
            value: g.value(t),
            terms_used: 1,
            tail_estimate: 0.0,
            abs_sum: g.value(t).abs(),
        });
    }
    let beta = pp.beta();
    let ratio = convergence_ratio(g, pp);
    if ratio >= 1.0 {
        return Err(Error::Divergent {
            what: "closed-form derivative series",
            ratio,
        });
    }
    let chi_l = Dd::from(pp.chi()).powi(l as u32);
    let step = Dd::from(pp.kernel_scale()) * Dd::from(libm::pow(g.delta, -beta));
    let bound = g.phase_bound(t);
    let lf = l as f64;
    let mut binom = Dd::ONE;
    let mut power = Dd::ONE;
    let mut sum = DdSum::default();
    let mut abs_sum = 0.0;
    let mut q = 0usize;
    loop {
        let coeff = binom * power;
        let envelope = coeff.hi.abs() * bound / chi_l.hi;
        // next envelope relative to this one
        let growth = ratio * (q as f64 + lf) / (q as f64 + 1.0);
        if q >= 1 && envelope < tol && growth <= 1.0 {
            let value = (sum.0 / chi_l).to_f64();
            if !value.is_finite() {
                return Err(Error::Overflow("closed-form derivative exceeds f64 range"));
            }
            return Ok(SeriesResult {
                value,
                terms_used: q,
                tail_estimate: envelope,
                abs_sum: abs_sum / chi_l.hi,
            });
        }
        if q >= max_terms {
            return Err(Error::Convergence {
                what: "closed-form derivative series",
                terms: q,
                last_term: envelope,
            });
        }
        let term = coeff.mul_f64(g.phase(t, beta, q));
        sum.add_dd(term);
        abs_sum += term.hi.abs();
        binom = binom.mul_f64(q as f64 + lf) / Dd::from(q as f64 + 1.0);
        power = power * step;
        q += 1;
    }
}

/// `sum_{l=0}^{n} D^l g(0) W_l(t)` about the base point 0 with `omega = 1`.
pub fn example_approximant(
    g: &RegisteredFunction,
    n: usize,
    pp: &PowerParams,
    t: f64,
    tol: f64,
    max_terms: usize,
) -> Result<f64> {
    let mut acc = DdSum::default();
    for l in 0..=n {
        let d = lth_derivative_series(g, l, pp, 0.0, tol, max_terms)?.value;
        acc.add(d * weight_polynomial(l, pp, t)?);
    }
    Ok(acc.value())
}

/// Remainder `D^(N+1) g(lambda) W_(N+1)(t)` of the order-`N` approximant.
pub fn example_remainder(
    g: &RegisteredFunction,
    order: usize,
    pp: &PowerParams,
    t: f64,
    lambda: f64,
    tol: f64,
    max_terms: usize,
) -> Result<f64> {
    if !(0.0..=t).contains(&lambda) {
        return Err(Error::Domain("lambda must lie in [0, t]"));
    }
    let d = lth_derivative_series(g, order + 1, pp, lambda, tol, max_terms)?.value;
    Ok(d * weight_polynomial(order + 1, pp, t)?)
}
