//! Independent checks of computed roots: high-precision residuals and
//! zero counts by the argument principle.

mod count;
pub mod hp;
pub(crate) mod recheck;

pub use count::{count_zeros, count_zeros_with, AnalyticFunction, CountOptions, FnAnalytic, Rect, UnivariatePoly, ZeroCount};
pub use recheck::{recheck_residual, ResidualCheck};
