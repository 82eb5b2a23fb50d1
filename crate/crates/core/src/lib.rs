//! Difference-of-convex algorithm and proximal gradient descent on
//! curvature-bounded oracles, with worst-case rate tooling.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bounds;
pub mod certificates;
pub mod error;
pub mod exact;
pub mod engine;
pub mod io;
pub mod oracles;
pub mod rates;
pub mod worstcase;

pub use bounds::{CurvatureBounds, Curvatures};
pub use error::{Error, Result};
pub use oracles::{FunctionOracle, Point, SubgradientPolicy};
