//! Matrix-free solvers for linear inverse problems whose solutions are the sum
//! of a piecewise-constant and a smooth component.
//!
//! The central piece is [`admm::run`], an ADMM scheme for the discrepancy-
//! constrained Tikhonov-TV problem
//!
//! ```text
//! min  ||D1 m1||_1 + beta/2 ||D2 m2||_2^2   s.t.  ||G (m1 + m2) - d||_2^2 = eps
//! ```
//!
//! solved directly for `m = m1 + m2`, with the balancing parameter `beta`
//! tuned on the fly by a robust z-score test on the model gradient
//! (see [`robust_stats`]).
//!
//! Operator applications and batched kernels run on rayon when the
//! `parallel` feature is enabled (the default). Every parallel path computes
//! each output element with the same sequential arithmetic as the fallback,
//! so results are bit-identical with and without the feature.

// Negated comparisons are how NaN inputs get rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod admm;
pub mod error;
pub mod kernels;
pub mod operators;
pub mod problems;
pub mod rng;
pub mod robust_stats;
pub mod vecops;

mod par;

pub use error::{Error, Result};
pub use operators::{GridDims, LinearOperator, Operator};
