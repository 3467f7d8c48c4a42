//! Composite Gauss-Legendre quadrature with endpoint grading.
//!
//! With `singularity_substitution` on, `[a, b]` is split at its midpoint and
//! each half is mapped from `v in [0, 1]` by a power law that clusters nodes
//! at the outer endpoint:
//!
//! ```text
//! left:  x = a + h v^K_lo        right: x = b - h v^K_hi
//! ```
//!
//! An integrand behaving like `(b - x)^g` near `b` becomes
//! `v^(K (g + 1) - 1)` after the map, which composite Gauss-Legendre handles
//! to full precision once `K (g + 1)` is large enough.

use alloc::vec::Vec;

use crate::ddouble::{Dd, DdSum};
use crate::error::{Error, Result};

/// Exponent `K (g + 1)` aimed for at a graded endpoint.
const GRADING_TARGET: f64 = 10.0;
const MAX_GRADING: u32 = 40;

/// Lower-end grading used when the integrand may carry `(x - a)^g` behaviour
/// inherited from an inner fractional operator.
pub const LOWER_GRADING: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub panels: usize,
    pub nodes_per_panel: usize,
    pub singularity_substitution: bool,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            panels: 256,
            nodes_per_panel: 8,
            singularity_substitution: true,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.panels < 1 {
            return Err(Error::Domain("quadrature needs at least one panel"));
        }
        if self.nodes_per_panel < 2 {
            return Err(Error::Domain("quadrature needs at least two nodes per panel"));
        }
        Ok(())
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        if n == 1 {
            nodes.push(0.0);
            weights.push(2.0);
            return GaussLegendre { nodes, weights };
        }
        let nf = n as f64;
        for i in 0..n {
            let mut x = -libm::cos(core::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5));
            for _ in 0..100 {
                let (p, dp) = legendre(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre(n, x);
            nodes.push(x);
            weights.push(2.0 / ((1.0 - x * x) * dp * dp));
        }
        GaussLegendre { nodes, weights }
    }
}

/// Grading exponent for an endpoint where the integrand behaves like `d^g`.
pub fn grading_for(g: f64) -> u32 {
    debug_assert!(g > -1.0);
    if g >= 0.0 && (g - libm::round(g)).abs() < 1e-12 {
        return 1;
    }
    let k = libm::ceil(GRADING_TARGET / (g + 1.0));
    (k as u32).clamp(1, MAX_GRADING)
}

/// A quadrature node with exact distances to both interval ends.
#[derive(Debug, Clone, Copy)]
pub struct Node {
    pub x: f64,
    pub from_lower: f64,
    pub to_upper: f64,
}

/// Grading exponents at the two ends of an interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ends {
    pub lower: u32,
    pub upper: u32,
}

impl Ends {
    pub fn new(lower: u32, upper: u32) -> Self {
        Ends { lower, upper }
    }
}

#[derive(Debug, Clone)]
pub struct Integrator {
    cfg: QuadratureConfig,
    rule: GaussLegendre,
}

impl Integrator {
    pub fn new(cfg: QuadratureConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Integrator {
            rule: GaussLegendre::new(cfg.nodes_per_panel),
            cfg,
        })
    }

    pub fn config(&self) -> &QuadratureConfig {
        &self.cfg
    }

    /// Visits every node with its full weight (Jacobian included).
    fn for_each_node<F: FnMut(Node, f64)>(&self, a: f64, b: f64, ends: Ends, mut f: F) {
        let len = b - a;
        if len <= 0.0 {
            return;
        }
        if !self.cfg.singularity_substitution {
            let h = len / self.cfg.panels as f64;
            for panel in 0..self.cfg.panels {
                let lo = panel as f64 * h;
                for (&xi, &wi) in self.rule.nodes.iter().zip(&self.rule.weights) {
                    let d = lo + 0.5 * h * (xi + 1.0);
                    let node = Node {
                        x: a + d,
                        from_lower: d,
                        to_upper: len - d,
                    };
                    f(node, 0.5 * h * wi);
                }
            }
            return;
        }
        let half = 0.5 * len;
        let panels = self.cfg.panels.div_ceil(2);
        let hv = 1.0 / panels as f64;
        for (grading, from_lower_end) in [(ends.lower, true), (ends.upper, false)] {
            let kf = grading as f64;
            for panel in 0..panels {
                let v0 = panel as f64 * hv;
                for (&xi, &wi) in self.rule.nodes.iter().zip(&self.rule.weights) {
                    let v = v0 + 0.5 * hv * (xi + 1.0);
                    let (d, jac) = if grading == 1 {
                        (half * v, half)
                    } else {
                        let vk1 = libm::pow(v, kf - 1.0);
                        (half * vk1 * v, half * kf * vk1)
                    };
                    let node = if from_lower_end {
                        Node {
                            x: a + d,
                            from_lower: d,
                            to_upper: len - d,
                        }
                    } else {
                        Node {
                            x: b - d,
                            from_lower: len - d,
                            to_upper: d,
                        }
                    };
                    f(node, 0.5 * hv * wi * jac);
                }
            }
        }
    }

    /// Nodes and weights of the rule on `[a, b]`.
    pub fn nodes(&self, a: f64, b: f64, ends: Ends) -> Vec<(Node, f64)> {
        let mut out = Vec::new();
        self.for_each_node(a, b, ends, |n, w| out.push((n, w)));
        out
    }

    /// `int_a^b f`, accumulated in double-double.
    pub fn integrate_dd<F: FnMut(Node) -> f64>(&self, a: f64, b: f64, ends: Ends, mut f: F) -> Dd {
        let mut acc = DdSum::default();
        self.for_each_node(a, b, ends, |n, w| acc.add(w * f(n)));
        acc.0
    }

    pub fn integrate<F: FnMut(Node) -> f64>(&self, a: f64, b: f64, ends: Ends, f: F) -> f64 {
        self.integrate_dd(a, b, ends, f).to_f64()
    }
}
