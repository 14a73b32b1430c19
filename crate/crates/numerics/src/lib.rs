//! Scalar layer shared by every other crate in the workspace.
//!
//! All reals are MPFR floats at a caller-chosen mantissa width. Complex
//! numbers are a thin pair of those (MPC is not assumed to be present).

mod cx;
mod fit;
mod newton;
mod real;

pub use cx::Cx;
pub use fit::{linear_fit, lower_envelope_fit, upper_envelope_fit, FitResult};
pub use newton::{newton_root, newton_root_guarded, NewtonOptions};
pub use real::*;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("newton iteration did not converge within {max_iter} steps")]
    NoConvergence { max_iter: usize },
    #[error("derivative vanished at iterate {iter}")]
    DerivativeVanished { iter: usize },
    #[error("newton iterate left the guard region at step {iter}")]
    Escaped { iter: usize },
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),
    #[error("cannot parse decimal {0:?}")]
    Parse(String),
}
