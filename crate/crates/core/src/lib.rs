//! Power fractional calculus.
//!
//! The power Mittag-Leffler function, the weighted power fractional
//! derivative and integral with their iterated forms, and the generalized
//! Taylor expansion built on them. Everything works on real arguments and
//! plain function handles, and needs only `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod closedforms;
mod ddouble;
pub mod error;
pub mod operators;
pub mod params;
pub mod quadrature;
pub mod sampled;
pub mod specfun;
pub mod taylor;

pub use closedforms::{FunctionKind, RegisteredFunction};
pub use error::{Error, Result};
pub use operators::{Differentiable, IterationConfig};
pub use params::{PowerParams, RealFn, ScalarFunction, WeightFunction};
pub use quadrature::QuadratureConfig;
pub use specfun::SeriesResult;
pub use taylor::{DerivOrigin, DerivSource, EvalOptions, TaylorApproximant};
