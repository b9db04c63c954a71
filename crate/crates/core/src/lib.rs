// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod bench;
pub mod checks;
mod clock;
pub mod engine;
pub mod error;
pub mod harness;
pub mod iterate;
pub mod oracles;
pub mod schedule;
pub mod trace;
