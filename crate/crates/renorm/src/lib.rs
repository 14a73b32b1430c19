//! Commuting pairs built from a circle map at its marked critical point,
//! their pre-renormalization and normalization, and distances between the
//! renormalization orbits of two maps.
//!
//! Pair maps are iterate programs over the base lift, never samples, so
//! they can be evaluated anywhere on ℝ or ℂ with closed-form derivatives.

mod distance;
mod pair;
mod program;

pub use distance::{convergence_experiment, pair_distance, ConvergenceReport, PairDistance};
pub use pair::{base_pair, height, pair_at_level, renorm_orbit, CommutingPair, Height, NormalizedPair, RenormOrbit};
pub use program::{Block, Program};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RenormError {
    #[error("precision exhausted at level {level}")]
    PrecisionExhausted { level: usize },
    #[error("rotation number is rational (exact return at level {level})")]
    NotIrrational { level: usize },
    #[error("height is infinite")]
    InfiniteHeight,
    #[error("height exceeds cap {cap}")]
    HeightExceedsCap { cap: u64 },
    #[error("(ξ∘η)(0) = {value} lies outside I_η")]
    PreconditionFailed { value: f64 },
    #[error("interval I_ξ is degenerate")]
    DegenerateInterval,
    #[error("pairs have no common domain")]
    IncompatiblePairs,
    #[error("csv: {0}")]
    Csv(String),
    #[error(transparent)]
    CircleMap(#[from] circlemap::CircleMapError),
}
