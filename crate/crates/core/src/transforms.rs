//! Local moves between rectangulations of a point set: flipping a segment,
//! rotating an intersection, trimming a segment down to degree 2, and
//! inserting or removing a degree-2 segment.
//!
//! Every operation rebuilds its result through [`realize`], so outputs are
//! always checked by the full validator. Vertical segments use the same
//! vocabulary as horizontal ones with left/right read as bottom/top.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::model::{
    place, realize, ConfigError, End, Orientation, RealizeError, Rectangulation, Segment, SegmentSpec, Stopper,
};

/// An endpoint of `guest` lying in the interior of `host`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntersectionRef {
    pub host: usize,
    pub guest: usize,
    pub end: End,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RotationOutcome {
    Valid(Rectangulation),
    /// Foreign endpoints that sat on the removed part of the host.
    NonValid(Vec<IntersectionRef>),
}

impl RotationOutcome {
    pub fn valid(self) -> Option<Rectangulation> {
        match self {
            RotationOutcome::Valid(r) => Some(r),
            RotationOutcome::NonValid(_) => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransformError {
    #[error("point {0} is out of range")]
    PointOutOfRange(usize),
    #[error("{0:?} is not an intersection of the rectangulation")]
    NotAnIntersection(IntersectionRef),
    #[error("segment {point} has degree {degree}; only degree-2 segments can be removed")]
    NotRemovable { point: usize, degree: usize },
    #[error("trim selected a non-valid rotation of {0:?}")]
    TrimStepNonValid(IntersectionRef),
    #[error("trim step changed degree of {point} from {before} to {after}")]
    TrimStepDegree { point: usize, before: usize, after: usize },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("transform produced an invalid rectangulation: {0}")]
    Invalid(#[from] RealizeError),
}

/// Every intersection of `rect` that lies in a segment interior.
pub fn intersections(rect: &Rectangulation) -> Vec<IntersectionRef> {
    let mut out = Vec::new();
    for s in rect.segments() {
        for end in [End::Low, End::High] {
            if let Stopper::Segment(host) = s.stopper(end) {
                out.push(IntersectionRef { host, guest: s.owner, end });
            }
        }
    }
    out
}

/// Where a segment of `owner` with orientation `o` hits first when extended
/// from its point towards `end`, among the perpendicular segments in
/// `segments` not listed in `exclude`.
fn shoot(
    rect_config: &crate::model::PointConfig,
    segments: &[Segment],
    owner: usize,
    o: Orientation,
    end: End,
    exclude: &[usize],
) -> Stopper {
    let line = rect_config.cross(owner, o);
    let start = rect_config.along(owner, o);
    let candidates =
        segments.iter().filter(|s| s.orientation != o && !exclude.contains(&s.owner) && s.interior_contains(line));
    let hit = match end {
        End::Low => candidates.filter(|s| s.at < start).max_by_key(|s| s.at),
        End::High => candidates.filter(|s| s.at > start).min_by_key(|s| s.at),
    };
    hit.map_or(Stopper::Wall(o.wall(end)), |s| Stopper::Segment(s.owner))
}

fn check_point(rect: &Rectangulation, a: usize) -> Result<(), TransformError> {
    if a >= rect.len() {
        return Err(TransformError::PointOutOfRange(a));
    }
    Ok(())
}

/// Switches the orientation of `a`'s segment. Segments that rested on it are
/// extended in their own direction, then the new segment through `a` is
/// extended both ways. All moving segments are parallel, so the result does
/// not depend on processing order.
pub fn flip(rect: &Rectangulation, a: usize) -> Result<Rectangulation, TransformError> {
    check_point(rect, a)?;
    let config = rect.config();
    let segments = rect.segments();
    let new_o = segments[a].orientation.flipped();
    let mut specs = rect.specs();
    for (g, e) in rect.resting_on(a) {
        debug_assert_eq!(segments[g].orientation, new_o);
        specs[g].set_stopper(e, shoot(config, segments, g, new_o, e, &[a]));
    }
    specs[a] = SegmentSpec::new(
        new_o,
        shoot(config, segments, a, new_o, End::Low, &[a]),
        shoot(config, segments, a, new_o, End::High, &[a]),
    );
    Ok(realize(rect.shared_config(), &specs)?)
}

/// Shortens the host so that `t` becomes its endpoint, cutting the side of
/// `t` away from the host's own point, then extends the guest through `t`.
pub fn rotate(rect: &Rectangulation, t: IntersectionRef) -> Result<RotationOutcome, TransformError> {
    if t.host >= rect.len() || t.guest >= rect.len() || rect.segment(t.guest).stopper(t.end) != Stopper::Segment(t.host)
    {
        return Err(TransformError::NotAnIntersection(t));
    }
    let config = rect.config();
    let segments = rect.segments();
    let host = &segments[t.host];
    let guest = &segments[t.guest];
    let cut = guest.at;
    let cut_end = if cut > config.along(t.host, host.orientation) { End::High } else { End::Low };
    let (removed_lo, removed_hi) = match cut_end {
        End::High => (cut, host.hi),
        End::Low => (host.lo, cut),
    };

    let orphans: Vec<IntersectionRef> = rect
        .resting_on(t.host)
        .filter(|&(g, e)| (g, e) != (t.guest, t.end))
        .filter(|&(g, _)| removed_lo < segments[g].at && segments[g].at < removed_hi)
        .map(|(g, e)| IntersectionRef { host: t.host, guest: g, end: e })
        .collect();
    if !orphans.is_empty() {
        return Ok(RotationOutcome::NonValid(orphans));
    }

    let mut specs = rect.specs();
    specs[t.host].set_stopper(cut_end, Stopper::Segment(t.guest));
    specs[t.guest].set_stopper(t.end, shoot(config, segments, t.guest, guest.orientation, t.end, &[t.host]));
    Ok(RotationOutcome::Valid(realize(rect.shared_config(), &specs)?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trim {
    pub result: Rectangulation,
    pub trace: Vec<IntersectionRef>,
}

/// Rotation that trimming `a` performs next, if its degree exceeds 2: the
/// highest foreign intersection when it lies above `a`'s point, otherwise
/// the lowest one.
pub fn trim_step(rect: &Rectangulation, a: usize) -> Option<IntersectionRef> {
    let segments = rect.segments();
    let p = rect.config().along(a, segments[a].orientation);
    let foreign: Vec<(usize, End)> = rect.resting_on(a).collect();
    let (g, e) = *foreign.iter().max_by_key(|(g, _)| segments[*g].at)?;
    let (g, e) = if segments[g].at > p { (g, e) } else { *foreign.iter().min_by_key(|(g, _)| segments[*g].at)? };
    Some(IntersectionRef { host: a, guest: g, end: e })
}

/// Repeatedly applies valid rotations until `a`'s segment has degree 2.
pub fn trim(rect: &Rectangulation, a: usize) -> Result<Trim, TransformError> {
    check_point(rect, a)?;
    let mut current = rect.clone();
    let mut trace = Vec::new();
    let mut degree = current.degree(a);
    while let Some(t) = trim_step(&current, a) {
        let next = rotate(&current, t)?.valid().ok_or(TransformError::TrimStepNonValid(t))?;
        let after = next.degree(a);
        if after + 1 != degree {
            return Err(TransformError::TrimStepDegree { point: a, before: degree, after });
        }
        degree = after;
        trace.push(t);
        current = next;
    }
    Ok(Trim { result: current, trace })
}

/// Number of successive valid rotations of `a`'s endpoint at `end`, each one
/// shortening the segment that endpoint rests on and lengthening `a`.
pub fn extendability(rect: &Rectangulation, a: usize, end: End) -> Result<usize, TransformError> {
    check_point(rect, a)?;
    let mut current = rect.clone();
    let mut count = 0;
    while let Stopper::Segment(host) = current.segment(a).stopper(end) {
        match rotate(&current, IntersectionRef { host, guest: a, end })? {
            RotationOutcome::Valid(next) => {
                current = next;
                count += 1;
            }
            RotationOutcome::NonValid(_) => break,
        }
    }
    Ok(count)
}

/// `ℓ(s)`: extendability of the left (bottom) endpoint.
pub fn left_extendability(rect: &Rectangulation, a: usize) -> Result<usize, TransformError> {
    extendability(rect, a, End::Low)
}

/// `r(s)`: extendability of the right (top) endpoint.
pub fn right_extendability(rect: &Rectangulation, a: usize) -> Result<usize, TransformError> {
    extendability(rect, a, End::High)
}

/// Inserts a new point at x position `index` (0-based) with y rank `rank`
/// (1-based) and gives it the maximal segment of orientation `o` inside the
/// rectangle containing it.
pub fn insert_point(
    rect: &Rectangulation,
    index: usize,
    rank: usize,
    o: Orientation,
) -> Result<Rectangulation, TransformError> {
    let config = Arc::new(rect.config().with_inserted(index, rank)?);
    let shift = |s: Stopper| match s {
        Stopper::Segment(i) if i >= index => Stopper::Segment(i + 1),
        other => other,
    };
    let others: Vec<Segment> = rect
        .segments()
        .iter()
        .map(|s| {
            let owner = if s.owner >= index { s.owner + 1 } else { s.owner };
            place(&config, owner, SegmentSpec::new(s.orientation, shift(s.low), shift(s.high)))
        })
        .collect();
    let new = SegmentSpec::new(
        o,
        shoot(&config, &others, index, o, End::Low, &[]),
        shoot(&config, &others, index, o, End::High, &[]),
    );
    let mut specs: Vec<SegmentSpec> = others.iter().map(Segment::spec).collect();
    specs.insert(index, new);
    Ok(realize(&config, &specs)?)
}

/// Deletes a degree-2 segment and its point; the inverse of [`insert_point`].
pub fn remove_point(rect: &Rectangulation, q: usize) -> Result<Rectangulation, TransformError> {
    check_point(rect, q)?;
    let degree = rect.degree(q);
    if degree != 2 {
        return Err(TransformError::NotRemovable { point: q, degree });
    }
    let config = Arc::new(rect.config().without(q)?);
    let unshift = |s: Stopper| match s {
        Stopper::Segment(i) if i > q => Stopper::Segment(i - 1),
        other => other,
    };
    let specs: Vec<SegmentSpec> = rect
        .segments()
        .iter()
        .filter(|s| s.owner != q)
        .map(|s| SegmentSpec::new(s.orientation, unshift(s.low), unshift(s.high)))
        .collect();
    Ok(realize(&config, &specs)?)
}

#[derive(Serialize)]
struct IntersectionRecord {
    host: usize,
    guest: usize,
    end: End,
}

/// JSON form of a rotation trace, one-based.
pub fn trace_to_json(trace: &[IntersectionRef]) -> String {
    let records: Vec<IntersectionRecord> =
        trace.iter().map(|t| IntersectionRecord { host: t.host + 1, guest: t.guest + 1, end: t.end }).collect();
    serde_json::to_string(&records).expect("records serialize")
}
