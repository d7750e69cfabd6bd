//! Small hand-built rectangulations used in tests, docs and benches.

use std::sync::Arc;

use crate::model::{realize, Orientation, PointConfig, Rectangulation, SegmentSpec, Side, Stopper};

/// The windmill rectangulation of `[2, 4, 1, 3]`: four segments stopping
/// each other cyclically around a central rectangle, all of degree 3.
pub fn pinwheel() -> Rectangulation {
    use Orientation::{Horizontal as H, Vertical as V};
    let config = Arc::new(PointConfig::from_perm(&[2, 4, 1, 3]).expect("permutation"));
    let specs = [
        SegmentSpec::new(V, Stopper::Wall(Side::Bottom), Stopper::Segment(1)),
        SegmentSpec::new(H, Stopper::Wall(Side::Left), Stopper::Segment(3)),
        SegmentSpec::new(H, Stopper::Segment(0), Stopper::Wall(Side::Right)),
        SegmentSpec::new(V, Stopper::Segment(2), Stopper::Wall(Side::Top)),
    ];
    realize(&config, &specs).expect("pinwheel is a rectangulation")
}

/// The identity permutation of length `n`.
pub fn diagonal(n: usize) -> PointConfig {
    PointConfig::from_perm(&(1..=n).collect::<Vec<_>>()).expect("permutation")
}

/// Diagonal `n = 2` with `p1` spanning horizontally and `p2` standing on it.
pub fn diagonal_t() -> Rectangulation {
    let config = Arc::new(diagonal(2));
    let specs = [
        SegmentSpec::spanning(Orientation::Horizontal),
        SegmentSpec::new(Orientation::Vertical, Stopper::Segment(0), Stopper::Wall(Side::Top)),
    ];
    realize(&config, &specs).expect("valid")
}
