//! Multicritical circle maps built as compositions of closed-form factors.
//!
//! A spec is a list of factors applied innermost first, with one rigid
//! rotation inserted right after the first critical factor (or at the end
//! when there is none). Each critical factor `h_{β,d}` fixes β and has a
//! single critical point there, of odd order d; diffeomorphic factors keep
//! the origin fixed. The bi-cubic family is
//! `h_{β,3} ∘ R_ω ∘ h_{0,3}`.

mod factor;
mod file;
mod jet;
mod orbit;
mod rotation;
mod signature;
mod spec;

pub use factor::{CriticalFactor, Factor};
pub use file::{read_map_spec, FactorEntry, MapSpecFile, PRECISION_ENV};
pub use orbit::{heights, HeightRun, HeightStop, Orbit, HEIGHT_CAP, ORBIT_BUDGET};
pub use rotation::{birkhoff_rotation, rotation_number, tune, TuneReport};
pub use signature::{delta0_by_partition, match_signature, signature, MatchConfig, MatchReport, MatchedMap, Signature};
pub use spec::{make_bicubic, make_rigid, make_single, CircleMapSpec};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CircleMapError {
    #[error("criticality {0} is not an odd integer ≥ 3")]
    BadCriticality(u32),
    #[error("diffeomorphic factor amplitude must lie in (-1,1)")]
    BadAmplitude,
    #[error("critical points {0} and {1} collide")]
    Degenerate(usize, usize),
    #[error("precision exhausted at level {level}")]
    PrecisionExhausted { level: usize },
    #[error("rotation number is rational")]
    RationalRotationNumber,
    #[error("target unattainable: {0}")]
    TargetUnattainable(String),
    #[error("map spec: {0}")]
    SpecFile(String),
    #[error(transparent)]
    Numerics(#[from] numerics::NumericsError),
}
