//! Flattening and compression between worlds over time-stamped atoms and
//! threads over timeless atoms, and evolution PT-programs built from a
//! time-indexed family of p-programs.

mod evolution;
mod skeleton;
mod thread;

pub use evolution::{
    build_evolution_program, derive_profile, evolution_distribution, skeleton_base, slice_program, slice_times,
    tagged_masses, verify_evolution, EvolutionModel, EvolutionProfile, EvolutionReport, SliceCheck, Slices,
    TaggedWorld, VerifyMode, EVOLUTION_VAR,
};
pub use skeleton::{LabeledFormula, Skeleton, SkeletonClause};
pub use thread::{compress, compress_distribution, flatten, thread_prob, CompressedAtom, CompressedBase, Thread, ThreadDistribution};

use crate::model::TimePoint;
use crate::psat::PsatError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CompressionError {
    #[error("time point {0} lies outside the calendar")]
    TimePointOutsideCalendar(TimePoint),
    #[error("atom `{0}` is not in the Herbrand base")]
    AtomNotInBase(String),
    #[error("label `{label}` has no interval at time {time}")]
    MissingTimeSlice { label: String, time: TimePoint },
    #[error("label `{0}` does not occur in the skeleton")]
    UnknownLabel(String),
    #[error("slice times {0:?} are not contiguous")]
    NonContiguous(Vec<TimePoint>),
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error(transparent)]
    Psat(#[from] PsatError),
}
