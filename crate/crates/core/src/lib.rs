#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod auxfn;
pub mod certify;
pub mod classify;
pub mod cli;
pub mod counterexample;
pub mod error;
pub mod metric;
pub mod picard;
pub mod real;
pub mod report;
pub mod sampling;
pub mod verdict;
pub mod volterra;
