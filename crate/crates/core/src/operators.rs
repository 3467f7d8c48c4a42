//! Weighted Riemann-Liouville integral, power fractional derivative (kernel
//! quadrature and series forms), power fractional integral, and their
//! iterated versions.
//!
//! ```text
//! RL^b f(t)  = 1/(Gamma(b) w(t)) int_a^t (t-s)^(b-1) w(s) f(s) ds
//! D f(t)     = 1/(chi w(t)) int_a^t E_{beta,1}(-mu ln p (t-s)^beta) (w f)'(s) ds
//! I f(t)     = chi f(t) + ln p phi RL^beta f(t)
//! ```

use alloc::vec::Vec;

use crate::ddouble::{Dd, DdSum};
use crate::error::{ensure, Error, Result};
use crate::params::{PowerParams, ScalarFunction, WeightFunction};
use crate::quadrature::{grading_for, Ends, Integrator, QuadratureConfig, LOWER_GRADING};
use crate::sampled::{sample_points, SampledFunction};
use crate::specfun::{recip_gamma_dd, MlKernel, SeriesResult, DEFAULT_MAX_TERMS};

/// A real function with a derivative, as consumed by the operators.
pub trait Differentiable {
    fn value(&self, x: f64) -> f64;
    fn derivative(&self, x: f64) -> f64;
}

impl Differentiable for ScalarFunction {
    #[inline]
    fn value(&self, x: f64) -> f64 {
        ScalarFunction::value(self, x)
    }
    #[inline]
    fn derivative(&self, x: f64) -> f64 {
        ScalarFunction::derivative(self, x)
    }
}

impl Differentiable for SampledFunction {
    #[inline]
    fn value(&self, x: f64) -> f64 {
        SampledFunction::value(self, x)
    }
    #[inline]
    fn derivative(&self, x: f64) -> f64 {
        SampledFunction::derivative(self, x)
    }
}

fn check_interval(a: f64, t: f64) -> Result<()> {
    ensure(a.is_finite() && t.is_finite(), "a and t must be finite")?;
    ensure(t >= a, "t must be >= a")
}

fn check_tol(tol: f64) -> Result<()> {
    ensure(tol > 0.0 && tol.is_finite(), "tolerance must be > 0")
}

const NONPOSITIVE_WEIGHT: Error = Error::Domain("weight omega must be positive on [a, t]");

/// Weighted RL integral of order `order` of the function with values `value`.
pub(crate) fn rl_with(
    quad: &Integrator,
    w: &WeightFunction,
    order: f64,
    a: f64,
    t: f64,
    mut value: impl FnMut(f64) -> f64,
) -> Result<f64> {
    if t == a {
        return Ok(0.0);
    }
    let wt = w.positive_at(t)?;
    let e = order - 1.0;
    let mut bad = false;
    let s = quad.integrate_dd(a, t, Ends::new(LOWER_GRADING, grading_for(e)), |n| {
        let om = w.value(n.x);
        if !(om > 0.0) {
            bad = true;
        }
        let k = if e == 0.0 { 1.0 } else { libm::pow(n.to_upper, e) };
        k * om * value(n.x)
    });
    if bad {
        return Err(NONPOSITIVE_WEIGHT);
    }
    let v = (s * recip_gamma_dd(order)).to_f64() / wt;
    if !v.is_finite() {
        return Err(Error::Overflow("Riemann-Liouville integral exceeds f64 range"));
    }
    Ok(v)
}

/// `RL^beta f(t)` with weight `w` and lower limit `a`; 0 at `t = a`.
pub fn rl_integral<F: Differentiable + ?Sized>(
    f: &F,
    w: &WeightFunction,
    beta: f64,
    a: f64,
    t: f64,
    q: &QuadratureConfig,
) -> Result<f64> {
    ensure(beta > 0.0 && beta.is_finite(), "beta must be > 0")?;
    check_interval(a, t)?;
    let quad = Integrator::new(*q)?;
    rl_with(&quad, w, beta, a, t, |x| f.value(x))
}

/// One node of the graded rule on the reference interval `[0, 2]`.
struct UnitNode {
    from_lower: f64,
    to_upper: f64,
    weight: f64,
    /// `to_upper^beta`, so that the kernel argument on `[a, t]` is `h^beta` times this.
    to_upper_beta: f64,
    lower_side: bool,
}

/// Kernel quadrature for the derivative, reusable across evaluation points in `[a, t_max]`.
///
/// The graded rule on `[a, t]` is the reference rule on `[0, 2]` scaled by
/// `h = (t - a)/2`, so the powers it needs are computed once here.
pub(crate) struct PfdEngine<'a> {
    w: &'a WeightFunction,
    a: f64,
    beta: f64,
    chi: f64,
    quad: Integrator,
    kernel: MlKernel,
    nodes: Vec<UnitNode>,
}

impl<'a> PfdEngine<'a> {
    pub(crate) fn new(
        pp: &PowerParams,
        w: &'a WeightFunction,
        a: f64,
        t_max: f64,
        q: &QuadratureConfig,
        tol: f64,
    ) -> Result<Self> {
        let beta = pp.beta();
        let u_max = libm::pow(t_max - a, beta);
        let quad = Integrator::new(*q)?;
        let nodes = quad
            .nodes(0.0, 2.0, Ends::new(LOWER_GRADING, grading_for(beta)))
            .into_iter()
            .map(|(n, wq)| UnitNode {
                from_lower: n.from_lower,
                to_upper: n.to_upper,
                weight: wq,
                to_upper_beta: libm::pow(n.to_upper, beta),
                lower_side: n.from_lower <= n.to_upper,
            })
            .collect();
        Ok(PfdEngine {
            w,
            a,
            beta,
            chi: pp.chi(),
            quad,
            kernel: MlKernel::new(beta, 1.0, pp.kernel_scale(), u_max, tol, DEFAULT_MAX_TERMS)?,
            nodes,
        })
    }

    pub(crate) fn integrator(&self) -> &Integrator {
        &self.quad
    }

    pub(crate) fn eval<F: Differentiable + ?Sized>(&self, f: &F, t: f64) -> Result<f64> {
        if t == self.a {
            return Ok(0.0);
        }
        let wt = self.w.positive_at(t)?;
        let unit = self.w.is_unit();
        let constant_kernel = self.kernel.degree() == 0;
        let k0 = self.kernel.eval(0.0);
        let h = 0.5 * (t - self.a);
        let h_beta = libm::pow(h, self.beta);
        let mut bad = false;
        let mut acc = DdSum::default();
        for n in &self.nodes {
            let x = if n.lower_side {
                self.a + h * n.from_lower
            } else {
                t - h * n.to_upper
            };
            let dh = if unit {
                f.derivative(x)
            } else {
                let om = self.w.value(x);
                if !(om > 0.0) {
                    bad = true;
                }
                self.w.derivative(x) * f.value(x) + om * f.derivative(x)
            };
            let k = if constant_kernel {
                k0
            } else {
                self.kernel.eval(h_beta * n.to_upper_beta)
            };
            acc.add(n.weight * k * dh);
        }
        if bad {
            return Err(NONPOSITIVE_WEIGHT);
        }
        Ok(h * acc.value() / (self.chi * wt))
    }
}

/// Power fractional derivative by direct quadrature of the kernel integral.
pub fn pfd_quadrature<F: Differentiable + ?Sized>(
    f: &F,
    pp: &PowerParams,
    w: &WeightFunction,
    a: f64,
    t: f64,
    q: &QuadratureConfig,
    tol: f64,
) -> Result<f64> {
    check_interval(a, t)?;
    check_tol(tol)?;
    if t == a {
        return Ok(0.0);
    }
    PfdEngine::new(pp, w, a, t, q, tol)?.eval(f, t)
}

/// Nodes of one graded rule with running powers `d^(beta n)` for the series form.
struct SeriesNodes {
    grading: u32,
    d_beta: Vec<Dd>,
    weighted: Vec<f64>,
    power: Vec<Dd>,
}

/// Power fractional derivative as `(1/chi) sum_n (-mu ln p)^n RL^(beta n + 1)((w f)'/w)`.
#[allow(clippy::too_many_arguments)]
pub fn pfd_series<F: Differentiable + ?Sized>(
    f: &F,
    pp: &PowerParams,
    w: &WeightFunction,
    a: f64,
    t: f64,
    q: &QuadratureConfig,
    tol: f64,
    max_terms: usize,
) -> Result<SeriesResult> {
    check_interval(a, t)?;
    check_tol(tol)?;
    if t == a {
        return Ok(SeriesResult {
            value: 0.0,
            terms_used: 1,
            tail_estimate: 0.0,
            abs_sum: 0.0,
        });
    }
    let wt = w.positive_at(t)?;
    let quad = Integrator::new(*q)?;
    let beta = pp.beta();
    let scale = pp.kernel_scale();
    let norm = pp.chi() * wt;
    let mut bad = false;
    let mut build = |grading: u32, n: usize| -> SeriesNodes {
        let nodes = quad.nodes(a, t, Ends::new(LOWER_GRADING, grading));
        let mut out = SeriesNodes {
            grading,
            d_beta: Vec::with_capacity(nodes.len()),
            weighted: Vec::with_capacity(nodes.len()),
            power: Vec::with_capacity(nodes.len()),
        };
        for (node, wq) in nodes {
            let om = w.value(node.x);
            if !(om > 0.0) {
                bad = true;
            }
            let h = w.derivative(node.x) * f.value(node.x) + om * f.derivative(node.x);
            let ln_d = Dd::from(node.to_upper).ln();
            out.d_beta.push(ln_d.mul_f64(beta).exp());
            out.power.push(ln_d.mul_f64(beta * n as f64).exp());
            out.weighted.push(wq * h);
        }
        out
    };
    let mut set = build(1, 0);
    let mut coeff = Dd::ONE;
    // term n of the series, already divided by chi w(t)
    let mut term_at = |n: usize, set: &mut SeriesNodes, coeff: &Dd| -> Dd {
        let grading = grading_for(beta * n as f64);
        if grading != set.grading {
            *set = build(grading, n);
        }
        let mut acc = DdSum::default();
        for ((p, &wh), db) in set.power.iter_mut().zip(&set.weighted).zip(&set.d_beta) {
            acc.add_dd(p.mul_f64(wh));
            *p = *p * *db;
        }
        (acc.0 * *coeff * recip_gamma_dd(beta * n as f64 + 1.0)).mul_f64(1.0 / norm)
    };
    let mut term = term_at(0, &mut set, &coeff);
    let mut sum = DdSum::default();
    let mut abs_sum = 0.0;
    let mut n = 0usize;
    loop {
        let next = if scale == 0.0 {
            Dd::ZERO
        } else {
            coeff = coeff.mul_f64(scale);
            term_at(n + 1, &mut set, &coeff)
        };
        if n >= 1 && term.hi.abs() < tol && next.hi.abs() <= term.hi.abs() {
            break;
        }
        if n >= max_terms {
            return Err(Error::Convergence {
                what: "power fractional derivative series",
                terms: n,
                last_term: term.hi.abs(),
            });
        }
        sum.add_dd(term);
        abs_sum += term.hi.abs();
        term = next;
        n += 1;
    }
    if bad {
        return Err(NONPOSITIVE_WEIGHT);
    }
    let value = sum.value();
    if !value.is_finite() {
        return Err(Error::Overflow("power fractional derivative exceeds f64 range"));
    }
    Ok(SeriesResult {
        value,
        terms_used: n,
        tail_estimate: term.hi.abs(),
        abs_sum,
    })
}

/// Power fractional integral `chi f(t) + ln p phi RL^beta f(t)`.
pub fn pfi<F: Differentiable + ?Sized>(
    f: &F,
    pp: &PowerParams,
    w: &WeightFunction,
    a: f64,
    t: f64,
    q: &QuadratureConfig,
) -> Result<f64> {
    check_interval(a, t)?;
    let c = pp.integral_coupling();
    let local = pp.chi() * f.value(t);
    if c == 0.0 {
        return Ok(local);
    }
    let rl = rl_integral(f, w, pp.beta(), a, t, q)?;
    Ok(local + c * rl)
}

/// `n`-fold power fractional integral by the binomial formula
/// `sum_m C(n,m) chi^(n-m) (ln p phi)^m RL^(m beta) f(t)`.
pub fn iterated_pfi<F: Differentiable + ?Sized>(
    f: &F,
    n: usize,
    pp: &PowerParams,
    w: &WeightFunction,
    a: f64,
    t: f64,
    q: &QuadratureConfig,
) -> Result<f64> {
    check_interval(a, t)?;
    let quad = Integrator::new(*q)?;
    iterated_pfi_with(&quad, n, pp, w, a, t, |x| f.value(x))
}

pub(crate) fn iterated_pfi_with(
    quad: &Integrator,
    n: usize,
    pp: &PowerParams,
    w: &WeightFunction,
    a: f64,
    t: f64,
    mut value: impl FnMut(f64) -> f64,
) -> Result<f64> {
    let chi = pp.chi();
    let c = pp.integral_coupling();
    let mut acc = DdSum::default();
    acc.add_dd(Dd::from(chi).powi(n as u32).mul_f64(value(t)));
    if c != 0.0 {
        let mut binom = 1.0;
        for m in 1..=n {
            binom = binom * (n + 1 - m) as f64 / m as f64;
            let rl = rl_with(quad, w, m as f64 * pp.beta(), a, t, &mut value)?;
            let coeff = Dd::from(chi).powi((n - m) as u32) * Dd::from(c).powi(m as u32);
            acc.add_dd(coeff.mul_f64(binom * rl));
        }
    }
    let v = acc.value();
    if !v.is_finite() {
        return Err(Error::Overflow("power fractional integral exceeds f64 range"));
    }
    Ok(v)
}

/// Sampling density between levels of an iterated derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationConfig {
    /// Samples per unit length of `[a, t]`; the grid has at least 16 intervals.
    pub points_per_unit: usize,
    /// Truncation tolerance of the derivative kernel.
    pub kernel_tol: f64,
}

impl Default for IterationConfig {
    fn default() -> Self {
        IterationConfig {
            points_per_unit: 2049,
            kernel_tol: 1e-15,
        }
    }
}

impl IterationConfig {
    /// Number of sampling intervals on an interval of length `len` (even, so it can be halved).
    pub fn intervals(&self, len: f64) -> usize {
        let m = libm::ceil(self.points_per_unit.saturating_sub(1) as f64 * len) as usize;
        let m = m.max(16);
        m + (m & 1)
    }
}

/// Samples of `D f, D^2 f, ..., D^levels f` on `m` graded intervals of `[a, t]`.
pub(crate) fn tabulate_derivatives<F: Differentiable + ?Sized>(
    engine: &PfdEngine<'_>,
    f: &F,
    levels: usize,
    a: f64,
    t: f64,
    m: usize,
) -> Result<Vec<SampledFunction>> {
    let len = t - a;
    let mut out: Vec<SampledFunction> = Vec::with_capacity(levels);
    for _ in 0..levels {
        let values = sample_points(a, len, m)
            .map(|x| match out.last() {
                None => engine.eval(f, x),
                Some(prev) => engine.eval(prev, x),
            })
            .collect::<Result<Vec<f64>>>()?;
        out.push(SampledFunction::new(a, len, values));
    }
    Ok(out)
}

/// `n`-fold power fractional derivative.
///
/// Intermediate levels are sampled and interpolated; the result is compared
/// with the same computation on a grid of half the density and rejected when
/// the two differ by more than `tol`.
#[allow(clippy::too_many_arguments)]
pub fn iterated_pfd<F: Differentiable + ?Sized>(
    f: &F,
    n: usize,
    pp: &PowerParams,
    w: &WeightFunction,
    a: f64,
    t: f64,
    q: &QuadratureConfig,
    iter: &IterationConfig,
    tol: f64,
) -> Result<f64> {
    check_interval(a, t)?;
    check_tol(tol)?;
    check_tol(iter.kernel_tol)?;
    if n == 0 {
        return Ok(f.value(t));
    }
    if t == a {
        return Ok(0.0);
    }
    let engine = PfdEngine::new(pp, w, a, t, q, iter.kernel_tol)?;
    if n == 1 {
        return engine.eval(f, t);
    }
    let m = iter.intervals(t - a);
    let top = |m: usize| -> Result<f64> {
        let levels = tabulate_derivatives(&engine, f, n - 1, a, t, m)?;
        engine.eval(levels.last().expect("n >= 2"), t)
    };
    let fine = top(m)?;
    let coarse = top(m / 2)?;
    let estimate = (fine - coarse).abs();
    if estimate > tol {
        return Err(Error::Resolution { estimate, tol });
    }
    Ok(fine)
}

/// `I(D f)(t) - [f(t) - w(a) f(a) / w(t)]`, with the inner derivative
/// evaluated afresh at every outer quadrature node.
pub fn compose_identity_residual<F: Differentiable + ?Sized>(
    f: &F,
    pp: &PowerParams,
    w: &WeightFunction,
    a: f64,
    t: f64,
    q: &QuadratureConfig,
    tol: f64,
) -> Result<f64> {
    check_interval(a, t)?;
    check_tol(tol)?;
    let wa = w.positive_at(a)?;
    if t == a {
        return Ok(0.0);
    }
    let wt = w.positive_at(t)?;
    let engine = PfdEngine::new(pp, w, a, t, q, tol)?;
    let mut inner_err = None;
    let composed = iterated_pfi_with(engine.integrator(), 1, pp, w, a, t, |x| {
        engine.eval(f, x).unwrap_or_else(|e| {
            inner_err.get_or_insert(e);
            0.0
        })
    })?;
    if let Some(e) = inner_err {
        return Err(e);
    }
    Ok(composed - (f.value(t) - wa * f.value(a) / wt))
}
