//! Complex a priori bounds at desk scale: Poincaré neighborhoods, inverse
//! branches pulled back along the J-orbit of a level, the envelope of their
//! distortion, and the root-like growth of deep renormalizations.
//!
//! Univalence of a branch is monitored rather than proven: a Newton iterate
//! leaving the guard disk around its interval aborts the orbit.

mod geometry;
mod growth;
mod probe;

pub use geometry::{angle_to_interval, hyperbolic_radius, poincare_contains, poincare_diameter, Interval, PoincareDisk};
pub use growth::{growth_check, GrowthReport, LevelGrowth};
pub use probe::{
    default_anchor, h_interval, main_lemma_probe, main_lemma_probe_seeded, pull_back, EnvelopeReport, InverseOrbit,
    JOrbit, ProbeDomain, ProbeSample, SampleStatus,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CxError {
    #[error("angle {0} outside (0, π)")]
    BadAngle(f64),
    #[error("empty interval")]
    EmptyInterval,
    #[error("point coincides with an interval endpoint")]
    DegeneratePoint,
    #[error("inverse branch lost at pull-back step {step}")]
    BranchLost { step: usize },
    #[error("{lost} of {total} samples lost their branch")]
    TooManyBranchFailures { lost: usize, total: usize },
    #[error("need at least 8 samples, got {0}")]
    TooFewSamples(usize),
    #[error("only {found} valid samples (level {level:?})")]
    TooFewValidSamples { level: Option<i64>, found: usize },
    #[error("anchor M = {anchor} is not usable at level {n}")]
    AnchorTooDeep { n: usize, anchor: usize },
    #[error("radius {0} below 1")]
    RadiusTooSmall(f64),
    #[error("pair has no critical point of a common criticality at 0")]
    NotCritical,
    #[error("return distance underflows at level {level}")]
    PrecisionExhausted { level: usize },
    #[error("rotation number is rational")]
    RationalRotationNumber,
    #[error("partition: {0}")]
    Partition(String),
    #[error(transparent)]
    Numerics(#[from] numerics::NumericsError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}
