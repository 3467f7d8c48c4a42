//! Independent reference oracles and the conformance sweeps built on them.

pub mod oracles;
pub mod sweep;
pub mod tanh_sinh;

pub use oracles::{
    mittag_leffler, naive_iterated_pfi, oracle_rl_integral, reference_atangana_baleanu, reference_caputo_fabrizio,
    reference_weighted_atangana_baleanu,
};
pub use sweep::{run_sweep, run_sweep_with, Case, Suite, SweepGrid, SweepReport};
