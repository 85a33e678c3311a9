//! Bounded and Cayley transforms, graph projections, gap and Riesz distances,
//! contraction homotopies, and integer spectral flow, applied to a
//! finite-difference Robin family on `[0, 1]`.
//!
//! The numerical core is generic over the working precision through
//! [`scalar::Real`] (implemented for `f32` and `f64`); the aliases below fix
//! double precision.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classify;
pub mod cli;
pub mod error;
pub mod homotopy;
pub mod identities;
pub mod linalg;
pub mod metrics;
pub mod random;
pub mod scalar;
pub mod specflow;
pub mod sturm;
pub mod transforms;

pub use error::{Error, Result};

pub type CMat64 = linalg::CMat<f64>;
pub type CMat32 = linalg::CMat<f32>;
pub type HermOp64 = linalg::HermOp<f64>;
pub type HermOp32 = linalg::HermOp<f32>;
pub type GraphProjection64 = transforms::GraphProjection<f64>;
pub type OperatorPath64 = specflow::OperatorPath<f64>;
