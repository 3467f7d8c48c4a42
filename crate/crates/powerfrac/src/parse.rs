//! Command-line value syntax: grids, power parameters, function and weight specs.

use std::f64::consts::E;
use std::fmt;
use std::str::FromStr;

use powerfrac_core::{FunctionKind, RegisteredFunction, ScalarFunction, WeightFunction};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError(pub String);

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ParseError {}

fn number(s: &str, what: &str) -> Result<f64, ParseError> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| ParseError(format!("{what}: '{s}' is not a number")))?;
    if !v.is_finite() {
        return Err(ParseError(format!("{what}: '{s}' is not finite")));
    }
    Ok(v)
}

/// Uniform grid `min:max:points` with both endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn new(t_min: f64, t_max: f64, points: usize) -> Result<Self, ParseError> {
        if points < 2 {
            return Err(ParseError("grid needs at least 2 points".into()));
        }
        if !(t_max > t_min) {
            return Err(ParseError("grid needs max > min".into()));
        }
        Ok(GridSpec { t_min, t_max, points })
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        let last = self.points - 1;
        (0..self.points).map(move |i| {
            if i == last {
                self.t_max
            } else {
                self.t_min + (self.t_max - self.t_min) * i as f64 / last as f64
            }
        })
    }
}

impl FromStr for GridSpec {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, n] = parts[..] else {
            return Err(ParseError(format!("grid '{s}' must look like min:max:points")));
        };
        let points = n
            .trim()
            .parse()
            .map_err(|_| ParseError(format!("grid points '{n}' is not a non-negative integer")))?;
        GridSpec::new(number(lo, "grid min")?, number(hi, "grid max")?, points)
    }
}

/// Power parameter; `e` is accepted for Euler's number.
pub fn parse_p(s: &str) -> Result<f64, ParseError> {
    if s.trim() == "e" {
        Ok(E)
    } else {
        number(s, "p")
    }
}

fn kind(name: &str) -> Option<FunctionKind> {
    match name {
        "exp" => Some(FunctionKind::Exp),
        "cos" => Some(FunctionKind::Cos),
        "sin" => Some(FunctionKind::Sin),
        _ => None,
    }
}

/// Function spec: `t`, `t^2`, `sin`, `cos`, `exp`, `const:c`, or `sin:delta`,
/// `cos:delta`, `exp:delta` for the registered `g(delta t)`.
pub fn parse_function(s: &str) -> Result<ScalarFunction, ParseError> {
    let s = s.trim();
    match s {
        "t" => return Ok(ScalarFunction::with_derivative(|t| t, |_| 1.0)),
        "t^2" => return Ok(ScalarFunction::with_derivative(|t| t * t, |t| 2.0 * t)),
        _ => {}
    }
    let (head, arg) = match s.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (s, None),
    };
    if head == "const" {
        let c = number(arg.unwrap_or(""), "constant")?;
        return Ok(ScalarFunction::constant(c));
    }
    let k = kind(head).ok_or_else(|| {
        ParseError(format!(
            "unknown function '{s}' (expected t, t^2, sin, cos, exp, const:c or kind:delta)"
        ))
    })?;
    let delta = match arg {
        Some(a) => number(a, "delta")?,
        None => 1.0,
    };
    let g = RegisteredFunction::new(k, delta).map_err(|e| ParseError(e.to_string()))?;
    Ok(ScalarFunction::registered(g))
}

/// Weight spec: `one`, `exp(-c*t)` or `1+c*t^2`.
pub fn parse_weight(s: &str) -> Result<WeightFunction, ParseError> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact == "one" || compact == "1" {
        return Ok(WeightFunction::unit());
    }
    if let Some(c) = compact.strip_prefix("exp(-").and_then(|r| r.strip_suffix("*t)")) {
        return Ok(WeightFunction::exp_decay(number(c, "weight coefficient")?));
    }
    if let Some(c) = compact.strip_prefix("1+").and_then(|r| r.strip_suffix("*t^2")) {
        return Ok(WeightFunction::quadratic(number(c, "weight coefficient")?));
    }
    Err(ParseError(format!(
        "unknown weight '{s}' (expected one, exp(-c*t) or 1+c*t^2)"
    )))
}
