//! Deterministic conformance sweeps and their line-oriented report.

use std::f64::consts::E;
use std::fmt;
use std::str::FromStr;

use powerfrac_core::closedforms::{convergence_ratio, example_approximant, example_remainder};
use powerfrac_core::operators::{compose_identity_residual, iterated_pfi, pfd_quadrature, pfd_series, rl_integral};
use powerfrac_core::specfun::DEFAULT_MAX_TERMS;
use powerfrac_core::taylor::{find_lambda, mvt_residual};
use powerfrac_core::{
    EvalOptions, FunctionKind, PowerParams, QuadratureConfig, RegisteredFunction, Result, ScalarFunction,
    WeightFunction,
};

use super::oracles::{naive_iterated_pfi, oracle_rl_integral, reference_atangana_baleanu, reference_caputo_fabrizio};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Composition,
    Forms,
    Iteration,
    Reductions,
    Taylor,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Composition,
        Suite::Forms,
        Suite::Iteration,
        Suite::Reductions,
        Suite::Taylor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Composition => "composition",
            Suite::Forms => "forms",
            Suite::Iteration => "iteration",
            Suite::Reductions => "reductions",
            Suite::Taylor => "taylor",
        }
    }

    /// Tolerance the suite is expected to meet.
    pub fn default_tolerance(self) -> f64 {
        match self {
            Suite::Composition | Suite::Iteration => 1e-6,
            Suite::Forms | Suite::Taylor => 1e-8,
            Suite::Reductions => 1e-10,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| format!("unknown suite '{s}'"))
    }
}

/// One comparison. `params` describes the case; a failed evaluation leaves
/// `lhs` as NaN and appends the error to `params`.
#[derive(Debug, Clone, PartialEq)]
pub struct Case {
    pub params: String,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_err: f64,
    pub rel_err: f64,
}

impl Case {
    pub fn new(params: String, lhs: f64, rhs: f64) -> Self {
        let abs_err = (lhs - rhs).abs();
        let rel_err = if rhs == 0.0 { abs_err } else { abs_err / rhs.abs() };
        Case {
            params,
            lhs,
            rhs,
            abs_err,
            rel_err,
        }
    }

    fn from_result(params: String, lhs: Result<f64>, rhs: Result<f64>) -> Self {
        match (lhs, rhs) {
            (Ok(l), Ok(r)) => Case::new(params, l, r),
            (l, r) => {
                let msg = [l.as_ref().err(), r.as_ref().err()]
                    .into_iter()
                    .flatten()
                    .map(|e| e.to_string())
                    .collect::<Vec<_>>()
                    .join("; ");
                Case::new(
                    format!("{params} error=\"{msg}\""),
                    l.unwrap_or(f64::NAN),
                    r.unwrap_or(f64::NAN),
                )
            }
        }
    }

    pub fn within(&self, tol: f64) -> bool {
        self.abs_err <= tol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub cases: Vec<Case>,
    pub max_abs_err: f64,
    pub max_rel_err: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn nan_max(acc: f64, x: f64) -> f64 {
    if x.is_nan() || acc.is_nan() {
        f64::NAN
    } else {
        acc.max(x)
    }
}

impl SweepReport {
    pub fn new(cases: Vec<Case>, tolerance: f64) -> Self {
        let max_abs_err = cases.iter().map(|c| c.abs_err).fold(0.0, nan_max);
        let max_rel_err = cases.iter().map(|c| c.rel_err).fold(0.0, nan_max);
        let pass = cases.iter().all(|c| c.within(tolerance));
        SweepReport {
            cases,
            max_abs_err,
            max_rel_err,
            tolerance,
            pass,
        }
    }

    /// Report restricted to cases whose parameter tuple starts with `prefix`.
    pub fn subset(&self, prefix: &str, tolerance: f64) -> SweepReport {
        let cases = self
            .cases
            .iter()
            .filter(|c| c.params.starts_with(prefix))
            .cloned()
            .collect();
        SweepReport::new(cases, tolerance)
    }
}

impl fmt::Display for SweepReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.cases {
            writeln!(
                f,
                "{}\t{:?}\t{:?}\t{:?}\t{:?}",
                c.params, c.lhs, c.rhs, c.abs_err, c.rel_err
            )?;
        }
        writeln!(
            f,
            "MAX {:?} {:?} {}",
            self.max_abs_err,
            self.max_rel_err,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

#[derive(Clone)]
pub struct NamedFunction {
    pub name: String,
    pub f: ScalarFunction,
}

#[derive(Clone)]
pub struct NamedWeight {
    pub name: String,
    pub w: WeightFunction,
}

fn named(name: &str, f: ScalarFunction) -> NamedFunction {
    NamedFunction {
        name: name.to_string(),
        f,
    }
}

/// The battery `{t, t^2, sin, exp}`.
pub fn function_battery() -> Vec<NamedFunction> {
    let reg = |kind| ScalarFunction::registered(RegisteredFunction::new(kind, 1.0).expect("delta = 1"));
    vec![
        named("t", ScalarFunction::with_derivative(|t| t, |_| 1.0)),
        named("t^2", ScalarFunction::with_derivative(|t| t * t, |t| 2.0 * t)),
        named("sin", reg(FunctionKind::Sin)),
        named("exp", reg(FunctionKind::Exp)),
    ]
}

/// The weights `{1, exp(-t), 1 + t^2}`.
pub fn weight_battery() -> Vec<NamedWeight> {
    vec![
        NamedWeight {
            name: "one".into(),
            w: WeightFunction::unit(),
        },
        NamedWeight {
            name: "exp(-t)".into(),
            w: WeightFunction::exp_decay(1.0),
        },
        NamedWeight {
            name: "1+t^2".into(),
            w: WeightFunction::quadratic(1.0),
        },
    ]
}

/// Parameter lists a sweep iterates over. Each suite reads the lists it needs;
/// an empty list yields no cases.
#[derive(Clone)]
pub struct SweepGrid {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub ps: Vec<f64>,
    pub functions: Vec<NamedFunction>,
    pub weights: Vec<NamedWeight>,
    pub times: Vec<f64>,
    /// Iteration counts (iteration suite) or approximant orders (taylor suite).
    pub orders: Vec<usize>,
    /// Registered functions for the closed-form remainder checks.
    pub registered: Vec<RegisteredFunction>,
    pub quadrature: QuadratureConfig,
    /// Kernel truncation tolerance for the operators under test.
    pub series_tol: f64,
}

impl SweepGrid {
    pub fn empty() -> Self {
        SweepGrid {
            alphas: Vec::new(),
            betas: Vec::new(),
            ps: Vec::new(),
            functions: Vec::new(),
            weights: Vec::new(),
            times: Vec::new(),
            orders: Vec::new(),
            registered: Vec::new(),
            quadrature: QuadratureConfig::default(),
            series_tol: 1e-15,
        }
    }

    /// The declared grid of a suite.
    pub fn standard(suite: Suite) -> Self {
        let base = SweepGrid {
            alphas: vec![0.1, 0.5, 0.9],
            betas: vec![0.8, 1.0, 1.5],
            ps: vec![0.5, E, 3.0],
            functions: function_battery(),
            weights: weight_battery(),
            times: vec![1.0],
            ..SweepGrid::empty()
        };
        match suite {
            Suite::Composition | Suite::Forms => base,
            Suite::Iteration => SweepGrid {
                functions: vec![named("t^2", ScalarFunction::with_derivative(|t| t * t, |t| 2.0 * t))],
                weights: vec![base.weights[1].clone()],
                orders: vec![2, 3, 4],
                ..base
            },
            Suite::Reductions => SweepGrid {
                betas: Vec::new(),
                ps: vec![E],
                weights: Vec::new(),
                times: vec![0.25, 0.5, 0.75, 1.0],
                ..base
            },
            Suite::Taylor => SweepGrid {
                weights: vec![base.weights[0].clone()],
                times: vec![0.5, 1.0],
                orders: vec![0, 1, 2],
                registered: [FunctionKind::Exp, FunctionKind::Cos, FunctionKind::Sin]
                    .into_iter()
                    .flat_map(|k| [1.0, 2.0].map(|d| RegisteredFunction::new(k, d).expect("delta > 0")))
                    .collect(),
                ..base
            },
        }
    }

    fn params(&self) -> impl Iterator<Item = PowerParams> + '_ {
        self.alphas.iter().flat_map(move |&alpha| {
            self.betas.iter().flat_map(move |&beta| {
                self.ps
                    .iter()
                    .map(move |&p| PowerParams::new(alpha, beta, p).expect("grid parameters are valid"))
            })
        })
    }
}

fn tuple(pp: &PowerParams) -> String {
    format!("alpha={:?} beta={:?} p={:?}", pp.alpha(), pp.beta(), pp.p())
}

/// Runs a suite on its declared grid.
pub fn run_sweep(suite: Suite, tolerance: f64) -> SweepReport {
    run_sweep_with(suite, &SweepGrid::standard(suite), tolerance)
}

/// Runs a suite on a custom grid.
pub fn run_sweep_with(suite: Suite, grid: &SweepGrid, tolerance: f64) -> SweepReport {
    let cases = match suite {
        Suite::Composition => composition(grid),
        Suite::Forms => forms(grid),
        Suite::Iteration => iteration(grid),
        Suite::Reductions => reductions(grid),
        Suite::Taylor => taylor(grid),
    };
    SweepReport::new(cases, tolerance)
}

/// Every `(params, f, w, t)` combination of the grid, base point 0.
fn each_operator_case(grid: &SweepGrid, mut visit: impl FnMut(String, &PowerParams, &NamedFunction, &NamedWeight, f64)) {
    for pp in grid.params() {
        for f in &grid.functions {
            for w in &grid.weights {
                for &t in &grid.times {
                    let label = format!("{} f={} w={} t={:?}", tuple(&pp), f.name, w.name, t);
                    visit(label, &pp, f, w, t);
                }
            }
        }
    }
}

fn composition(grid: &SweepGrid) -> Vec<Case> {
    let mut out = Vec::new();
    each_operator_case(grid, |label, pp, f, w, t| {
        // lhs = I(D f)(t), rhs = f(t) - w(0) f(0) / w(t)
        let rhs = f.f.value(t) - w.w.value(0.0) * f.f.value(0.0) / w.w.value(t);
        let lhs = compose_identity_residual(&f.f, pp, &w.w, 0.0, t, &grid.quadrature, grid.series_tol).map(|r| r + rhs);
        out.push(Case::from_result(format!("compose {label}"), lhs, Ok(rhs)));
    });
    out
}

fn forms(grid: &SweepGrid) -> Vec<Case> {
    let mut out = Vec::new();
    each_operator_case(grid, |label, pp, f, w, t| {
        let q = &grid.quadrature;
        let series = pfd_series(&f.f, pp, &w.w, 0.0, t, q, grid.series_tol, DEFAULT_MAX_TERMS).map(|s| s.value);
        let quad = pfd_quadrature(&f.f, pp, &w.w, 0.0, t, q, grid.series_tol);
        out.push(Case::from_result(format!("forms {label}"), series, quad));
    });
    out
}

fn iteration(grid: &SweepGrid) -> Vec<Case> {
    let mut out = Vec::new();
    for pp in grid.params() {
        for f in &grid.functions {
            for w in &grid.weights {
                for &t in &grid.times {
                    for &n in &grid.orders {
                        let label = format!("pfi n={n} {} f={} w={} t={:?}", tuple(&pp), f.name, w.name, t);
                        let lhs = iterated_pfi(&f.f, n, &pp, &w.w, 0.0, t, &grid.quadrature);
                        let rhs = naive_iterated_pfi(&f.f, n, &pp, &w.w, 0.0, t);
                        out.push(Case::from_result(label, lhs, rhs));
                    }
                }
            }
        }
    }
    // the fractional integrals the binomial formula is built from
    let max_n = grid.orders.iter().copied().max().unwrap_or(0);
    let mut rl_orders: Vec<f64> = grid
        .betas
        .iter()
        .flat_map(|&beta| (1..=max_n).map(move |m| m as f64 * beta))
        .collect();
    rl_orders.sort_by(f64::total_cmp);
    rl_orders.dedup();
    for order in rl_orders {
        for f in &grid.functions {
            for w in &grid.weights {
                for &t in &grid.times {
                    let label = format!("rl order={order:?} f={} w={} t={t:?}", f.name, w.name);
                    let lhs = rl_integral(&f.f, &w.w, order, 0.0, t, &grid.quadrature);
                    let rhs = oracle_rl_integral(&f.f, &w.w, order, 0.0, t);
                    out.push(Case::from_result(label, lhs, rhs));
                }
            }
        }
    }
    out
}

fn reductions(grid: &SweepGrid) -> Vec<Case> {
    let unit = WeightFunction::unit();
    let mut out = Vec::new();
    for &alpha in &grid.alphas {
        for f in &grid.functions {
            for &t in &grid.times {
                let label = format!("alpha={alpha:?} f={} t={t:?}", f.name);
                let params = |beta| PowerParams::new(alpha, beta, E);
                let q = &grid.quadrature;
                let cf = params(1.0).and_then(|pp| pfd_quadrature(&f.f, &pp, &unit, 0.0, t, q, grid.series_tol));
                out.push(Case::from_result(
                    format!("cf {label}"),
                    cf,
                    reference_caputo_fabrizio(&f.f, alpha, 0.0, t),
                ));
                let ab = params(alpha).and_then(|pp| pfd_quadrature(&f.f, &pp, &unit, 0.0, t, q, grid.series_tol));
                out.push(Case::from_result(
                    format!("ab {label}"),
                    ab,
                    reference_atangana_baleanu(&f.f, alpha, 0.0, t),
                ));
            }
        }
    }
    out
}

fn taylor(grid: &SweepGrid) -> Vec<Case> {
    let opts = EvalOptions {
        quadrature: grid.quadrature,
        series_tol: grid.series_tol,
        ..EvalOptions::default()
    };
    let mut out = Vec::new();
    // intermediate point of the mean value form
    for pp in grid.params() {
        for f in &grid.functions {
            for w in &grid.weights {
                for &t in &grid.times {
                    let label = format!("mvt {} f={} w={} t={:?}", tuple(&pp), f.name, w.name, t);
                    let root = find_lambda(0.0, t, |l| mvt_residual(&f.f, &pp, &w.w, 0.0, t, l, &opts));
                    out.push(lambda_case(label, root));
                }
            }
        }
    }
    // closed-form remainder of the order-N approximant
    for g in &grid.registered {
        for pp in grid.params() {
            if convergence_ratio(g, &pp) >= 0.9 {
                continue;
            }
            for &t in &grid.times {
                for &n in &grid.orders {
                    let label = format!(
                        "remainder {} g={}:{:?} N={n} t={t:?}",
                        tuple(&pp),
                        g.kind().name(),
                        g.delta()
                    );
                    let (tol, cap) = (opts.series_tol, opts.max_terms);
                    let root = example_approximant(g, n, &pp, t, tol, cap).and_then(|approx| {
                        let gap = g.value(t) - approx;
                        find_lambda(0.0, t, |l| Ok(gap - example_remainder(g, n, &pp, t, l, tol, cap)?))
                    });
                    out.push(lambda_case(label, root));
                }
            }
        }
    }
    out
}

fn lambda_case(label: String, root: Result<powerfrac_core::taylor::LambdaRoot>) -> Case {
    match root {
        Ok(r) if r.found() => Case::new(format!("{label} lambda={:?}", r.lambda), r.residual, 0.0),
        Ok(r) => Case::new(
            format!("{label} no-sign-change min|r|={:?} at={:?}", r.residual.abs(), r.lambda),
            f64::NAN,
            0.0,
        ),
        Err(e) => Case::from_result(label, Err(e), Ok(0.0)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_grid_passes_vacuously() {
        for suite in Suite::ALL {
            let r = run_sweep_with(suite, &SweepGrid::empty(), 1e-12);
            assert!(r.cases.is_empty());
            assert!(r.pass);
            assert_eq!(r.to_string(), "MAX 0.0 0.0 PASS\n");
        }
    }

    #[test]
    fn nan_fails_the_report() {
        let r = SweepReport::new(vec![Case::new("x".into(), f64::NAN, 0.0), Case::new("y".into(), 1.0, 1.0)], 1.0);
        assert!(!r.pass);
        assert!(r.max_abs_err.is_nan());
    }

    #[test]
    fn suite_names_round_trip() {
        for suite in Suite::ALL {
            assert_eq!(suite.name().parse::<Suite>().unwrap(), suite);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn text_format() {
        let r = SweepReport::new(vec![Case::new("a=1".into(), 2.0, 1.0)], 0.5);
        assert_eq!(r.to_string(), "a=1\t2.0\t1.0\t1.0\t1.0\nMAX 1.0 1.0 FAIL\n");
    }
}
