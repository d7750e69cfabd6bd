//! Exact enumeration of rectangulations of planar point sets.
//!
//! The crate enumerates every rectangulation of a small point set in general
//! position, implements the local moves between rectangulations (flip,
//! rotation, trimming, insertion and removal of degree-2 segments), and runs
//! the cross-graph charging schemes that bound the expected number of
//! degree-2 segments. All verification arithmetic is exact.

pub mod cache;
pub mod charging;
pub mod enumerate;
pub mod faces;
pub mod fixtures;
pub mod io;
pub mod model;
pub mod par;
pub mod render;
pub mod stats;
pub mod symmetry;
pub mod transforms;

pub use cache::RcCache;
pub use enumerate::{
    count_all_perms, enumerate_backtracking, enumerate_oracle, generate_by_insertion, EnumerateError, Enumerator,
    InsertionBase, PartialInsertionSet, PermCount, RectangulationSet,
};
pub use model::{
    realize, CanonicalKey, ConfigError, DegreeHistogram, End, Orientation, PointConfig, RealizeError, Rectangulation,
    Segment, SegmentSpec, Side, Stopper, StructuralError, Violation,
};
pub use par::Execution;
pub use transforms::{
    flip, insert_point, remove_point, rotate, trim, IntersectionRef, RotationOutcome, TransformError,
};
