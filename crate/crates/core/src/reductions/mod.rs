//! Executable versions of the constructions that turn one kind of object into
//! another while preserving the relevant equivalence: trees to ultrametric
//! spaces, graphs and group orbits to metric spaces, metric spaces to
//! relational structures and Gromov invariants, tuples of spaces to sums.

mod action;
mod encodings;
mod gromov;
mod tree_space;

use thiserror::Error;

use crate::metric::MetricError;
use crate::rational::Rational;

pub use action::{adjust_group_metric, orbit, orbit_encode, ActionCandidate, GroupAction};
pub use encodings::{
    default_thresholds, discrete_to_structure, graph_to_space, sum_space, threshold_relation_name,
};
pub use gromov::{gromov_full, gromov_invariant, GromovMatrix};
pub use tree_space::{repair_isometry_to_tree_iso, switching_pairs, tree_to_space, RadiusSequence};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("InvalidRadii: {0}")]
    InvalidRadii(String),
    #[error("SequenceTooShort: need {needed} radii, got {got}")]
    SequenceTooShort { needed: usize, got: usize },
    #[error("NotAnIsometry")]
    NotAnIsometry,
    #[error("RepairFailed")]
    RepairFailed,
    /// No threshold in `(below, above]`; `above = None` means no threshold
    /// exceeds `below`.
    #[error("InsufficientThresholds({below}, {})", .above.map(|a| a.to_string()).unwrap_or_else(|| "none".into()))]
    InsufficientThresholds {
        below: Rational,
        above: Option<Rational>,
    },
    #[error("RadiusTooSmall(part {part})")]
    RadiusTooSmall { part: usize },
    #[error("NoParts")]
    NoParts,
    #[error("NotLeftInvariant({0},{1},{2})")]
    NotLeftInvariant(usize, usize, usize),
    #[error("NotAnAction: {0}")]
    NotAnAction(String),
    #[error("PreconditionViolated: {0}")]
    PreconditionViolated(String),
    #[error("PointOutOfRange({0})")]
    PointOutOfRange(usize),
    #[error("invalid metric: {0}")]
    Metric(#[from] MetricError),
}

impl ReductionError {
    pub fn name(&self) -> &'static str {
        match self {
            ReductionError::InvalidRadii(_) => "InvalidRadii",
            ReductionError::SequenceTooShort { .. } => "SequenceTooShort",
            ReductionError::NotAnIsometry => "NotAnIsometry",
            ReductionError::RepairFailed => "RepairFailed",
            ReductionError::InsufficientThresholds { .. } => "InsufficientThresholds",
            ReductionError::RadiusTooSmall { .. } => "RadiusTooSmall",
            ReductionError::NoParts => "NoParts",
            ReductionError::NotLeftInvariant(..) => "NotLeftInvariant",
            ReductionError::NotAnAction(_) => "NotAnAction",
            ReductionError::PreconditionViolated(_) => "PreconditionViolated",
            ReductionError::PointOutOfRange(_) => "PointOutOfRange",
            ReductionError::Metric(e) => e.name(),
        }
    }
}
