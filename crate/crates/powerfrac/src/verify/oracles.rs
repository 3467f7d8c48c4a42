//! Reference implementations computed by methods unrelated to the operator code.

use powerfrac_core::{Error, PowerParams, Result, ScalarFunction, WeightFunction};

use super::tanh_sinh::TanhSinh;

/// Trapezoid panels used by [`oracle_rl_integral`].
pub const RL_ORACLE_PANELS: usize = 1_000_000;

fn check_interval(a: f64, t: f64) -> Result<()> {
    if !(a.is_finite() && t.is_finite()) {
        return Err(Error::Domain("a and t must be finite"));
    }
    if t < a {
        return Err(Error::Domain("t must be >= a"));
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::Domain("alpha must lie in [0, 1)"));
    }
    Ok(())
}

fn positive(w: &WeightFunction, x: f64) -> Result<f64> {
    let v = w.value(x);
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::Domain("weight must be positive and finite"));
    }
    Ok(v)
}

/// Weighted Riemann-Liouville integral by the substitution `u = (t - tau)^beta`
/// and a composite trapezoid rule.
///
/// After the substitution the integrand is `w f(t - u^(1/beta))`, bounded at
/// both ends, and the kernel reduces to the constant `1 / Gamma(beta + 1)`.
pub fn oracle_rl_integral(f: &ScalarFunction, w: &WeightFunction, beta: f64, a: f64, t: f64) -> Result<f64> {
    check_interval(a, t)?;
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Domain("beta must be > 0"));
    }
    let wt = positive(w, t)?;
    if t == a {
        return Ok(0.0);
    }
    let upper = (t - a).powf(beta);
    let h = upper / RL_ORACLE_PANELS as f64;
    let g = |u: f64| {
        let tau = t - u.powf(1.0 / beta);
        w.value(tau) * f.value(tau)
    };
    let mut sum = 0.5 * (g(0.0) + w.value(a) * f.value(a));
    let mut comp = 0.0;
    for i in 1..RL_ORACLE_PANELS {
        let y = g(i as f64 * h) - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
    Ok(h * sum / (libm::tgamma(beta + 1.0) * wt))
}

/// Caputo-Fabrizio derivative `(1/chi) int_a^t exp(-mu (t - tau)) f'(tau) dtau`
/// with `chi = 1 - alpha` and `mu = alpha / (1 - alpha)`.
pub fn reference_caputo_fabrizio(f: &ScalarFunction, alpha: f64, a: f64, t: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_interval(a, t)?;
    let chi = 1.0 - alpha;
    let mu = alpha / chi;
    let ts = TanhSinh::fine();
    let v = ts.integrate(a, t, |pt| (-mu * pt.to_b).exp() * f.derivative(pt.x));
    Ok(v / chi)
}

/// Atangana-Baleanu derivative `(1/chi) int_a^t E_alpha(-mu (t - tau)^alpha) f'(tau) dtau`.
pub fn reference_atangana_baleanu(f: &ScalarFunction, alpha: f64, a: f64, t: f64) -> Result<f64> {
    reference_weighted_atangana_baleanu(f, &WeightFunction::unit(), alpha, a, t)
}

/// Weighted form `(1/(chi w(t))) int_a^t E_alpha(-mu (t - tau)^alpha) (w f)'(tau) dtau`.
pub fn reference_weighted_atangana_baleanu(
    f: &ScalarFunction,
    w: &WeightFunction,
    alpha: f64,
    a: f64,
    t: f64,
) -> Result<f64> {
    check_alpha(alpha)?;
    check_interval(a, t)?;
    let wt = positive(w, t)?;
    let chi = 1.0 - alpha;
    let mu = alpha / chi;
    let ts = TanhSinh::fine();
    let lap = TanhSinh::wide();
    let v = ts.integrate(a, t, |pt| {
        let z = -mu * pt.to_b.powf(alpha);
        let dwf = w.derivative(pt.x) * f.value(pt.x) + w.value(pt.x) * f.derivative(pt.x);
        mittag_leffler_with(&lap, alpha, z) * dwf
    });
    Ok(v / (chi * wt))
}

/// One-parameter Mittag-Leffler function `E_alpha(z)` for real `z` and `0 < alpha <= 1`.
pub fn mittag_leffler(alpha: f64, z: f64) -> f64 {
    mittag_leffler_with(&TanhSinh::wide(), alpha, z)
}

fn mittag_leffler_with(rule: &TanhSinh, alpha: f64, z: f64) -> f64 {
    if z == 0.0 {
        return 1.0;
    }
    if alpha == 1.0 {
        return z.exp();
    }
    if z >= -1.0 {
        let mut sum = 0.0;
        let mut power = 1.0;
        for n in 0..500 {
            let term = power / libm::tgamma(alpha * n as f64 + 1.0);
            sum += term;
            if n > 2 && term.abs() < 1e-18 * sum.abs().max(1.0) {
                break;
            }
            power *= z;
        }
        return sum;
    }
    // Laplace-type integral of r^(alpha-1) exp(-r x) / (r^(2 alpha) + 2 r^alpha cos(alpha pi) + 1)
    // over (0, 1] and, with r = 1/u, over [1, inf)
    let x = (-z).powf(1.0 / alpha);
    let (s, c) = (alpha * std::f64::consts::PI).sin_cos();
    let g = |r: f64| {
        let ra = r.powf(alpha);
        r.powf(alpha - 1.0) * (-r * x).exp() / (ra * ra + 2.0 * ra * c + 1.0)
    };
    let near = rule.integrate(0.0, 1.0, |pt| g(pt.from_a));
    let far = rule.integrate(0.0, 1.0, |pt| {
        let u = pt.from_a;
        let e = (-x / u).exp();
        if e == 0.0 {
            return 0.0;
        }
        g(1.0 / u) / (u * u)
    });
    s / std::f64::consts::PI * (near + far)
}

/// `n`-fold power fractional integral by literally nesting single integrals.
///
/// Each level is `chi g(x) + ln p phi / (Gamma(beta) w(x)) int_a^x (x - tau)^(beta - 1) w g dtau`
/// with `g` the previous level evaluated directly at every node. The cost is
/// `(nodes + 1)^n`, so the rule is kept coarse.
pub fn naive_iterated_pfi(
    f: &ScalarFunction,
    n: usize,
    pp: &PowerParams,
    w: &WeightFunction,
    a: f64,
    t: f64,
) -> Result<f64> {
    check_interval(a, t)?;
    positive(w, t)?;
    let rule = TanhSinh::new(1.0 / 6.0, 3.6);
    Ok(nested_level(&rule, f, n, pp, w, a, t))
}

fn nested_level(
    rule: &TanhSinh,
    f: &ScalarFunction,
    k: usize,
    pp: &PowerParams,
    w: &WeightFunction,
    a: f64,
    x: f64,
) -> f64 {
    if k == 0 {
        return f.value(x);
    }
    let local = pp.chi() * nested_level(rule, f, k - 1, pp, w, a, x);
    let c = pp.integral_coupling();
    if c == 0.0 || x == a {
        return local;
    }
    let beta = pp.beta();
    let integral = rule.integrate(a, x, |pt| {
        pt.to_b.powf(beta - 1.0) * w.value(pt.x) * nested_level(rule, f, k - 1, pp, w, a, pt.x)
    });
    local + c * integral / (libm::tgamma(beta) * w.value(x))
}
