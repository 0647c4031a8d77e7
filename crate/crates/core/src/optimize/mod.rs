//! Generic numerical optimizers used by the estimator.

pub mod minimax;
pub mod nelder_mead;
pub mod pick;
pub mod schur;

pub use minimax::{BlockMinimax, CircleGrid, MinimaxSolution};
pub use nelder_mead::{nelder_mead, NelderMeadOptions, NelderMeadResult};
pub use pick::{pick_pivot, pick_radius};
pub use schur::SchurInterpolant;
