//! Exact-arithmetic engine for systems of linear partial difference
//! equations on the integer lattice: kernel representations, Laurent
//! Groebner machinery, discrete Noether normalization, first-order state
//! realizations, and finite-window trajectory evaluation.

// index-style loops are the clearer idiom in the matrix kernels
#![allow(clippy::needless_range_loop)]

pub mod behavior;
pub mod dnnl;
pub mod error;
pub mod exec;
pub mod flow;
pub mod formats;
pub mod groebner;
pub mod laurent;
pub mod linalg;
pub mod realization;
pub mod state;
