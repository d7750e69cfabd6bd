//! Point configurations, segments and rectangulations.
//!
//! A rectangulation is stored combinatorially: every point owns one
//! axis-parallel segment, described by its orientation and by the two
//! *stoppers* its endpoints rest on (a wall of the bounding box or another
//! point's segment). Extents are derived from the stoppers in one pass,
//! because a stopper's coordinate is always a fixed point or wall coordinate.
//!
//! Points are indexed from 0 in the API, in x order. All text and JSON
//! formats are one-indexed.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::faces;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("malformed permutation: {0}")]
    MalformedPermutation(String),
    #[error("points are not in general position: {0}")]
    NotGeneralPosition(String),
    #[error("point index {index} out of range for {n} points")]
    IndexOutOfRange { index: usize, n: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Orientation {
    #[serde(rename = "H")]
    Horizontal,
    #[serde(rename = "V")]
    Vertical,
}

impl Orientation {
    pub fn flipped(self) -> Self {
        match self {
            Orientation::Horizontal => Orientation::Vertical,
            Orientation::Vertical => Orientation::Horizontal,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Orientation::Horizontal => "H",
            Orientation::Vertical => "V",
        }
    }

    /// The wall a segment of this orientation may rest on at the given end.
    pub fn wall(self, end: End) -> Side {
        match (self, end) {
            (Orientation::Horizontal, End::Low) => Side::Left,
            (Orientation::Horizontal, End::High) => Side::Right,
            (Orientation::Vertical, End::Low) => Side::Bottom,
            (Orientation::Vertical, End::High) => Side::Top,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::Bottom => "bottom",
            Side::Top => "top",
        }
    }

    /// Orientation of segments that can end on this wall.
    pub fn stops(self) -> Orientation {
        match self {
            Side::Left | Side::Right => Orientation::Horizontal,
            Side::Bottom | Side::Top => Orientation::Vertical,
        }
    }

    pub fn end(self) -> End {
        match self {
            Side::Left | Side::Bottom => End::Low,
            Side::Right | Side::Top => End::High,
        }
    }
}

/// Which end of a segment: left/bottom is `Low`, right/top is `High`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum End {
    Low,
    High,
}

impl End {
    pub fn opposite(self) -> Self {
        match self {
            End::Low => End::High,
            End::High => End::Low,
        }
    }
}

/// What a segment endpoint rests on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stopper {
    Wall(Side),
    Segment(usize),
}

impl Stopper {
    pub fn segment(self) -> Option<usize> {
        match self {
            Stopper::Segment(q) => Some(q),
            Stopper::Wall(_) => None,
        }
    }

    pub fn is_wall(self) -> bool {
        matches!(self, Stopper::Wall(_))
    }
}

impl fmt::Display for Stopper {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stopper::Wall(side) => write!(f, "wall:{}", side.as_str()),
            Stopper::Segment(q) => write!(f, "seg:{}", q + 1),
        }
    }
}

impl std::str::FromStr for Stopper {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(side) = s.strip_prefix("wall:") {
            let side = match side {
                "left" => Side::Left,
                "right" => Side::Right,
                "bottom" => Side::Bottom,
                "top" => Side::Top,
                other => return Err(format!("unknown wall `{other}`")),
            };
            return Ok(Stopper::Wall(side));
        }
        if let Some(idx) = s.strip_prefix("seg:") {
            let idx: usize = idx.parse().map_err(|_| format!("bad segment index in `{s}`"))?;
            if idx == 0 {
                return Err(format!("segment indices are one-based, got `{s}`"));
            }
            return Ok(Stopper::Segment(idx - 1));
        }
        Err(format!("unrecognized stopper `{s}`"))
    }
}

/// A point set in general position inside the box `[0, width] x [0, height]`.
///
/// Points are stored in increasing x order. The canonical realization of a
/// permutation puts point `i` (0-based) at `(i + 1, perm[i])` inside
/// `[0, n + 1]^2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PointConfig {
    perm: Vec<usize>,
    xs: Vec<i64>,
    ys: Vec<i64>,
    width: i64,
    height: i64,
}

impl PointConfig {
    /// Canonical configuration for a permutation of `1..=n` (one-based ranks).
    pub fn from_perm(perm: &[usize]) -> Result<Self, ConfigError> {
        if perm.is_empty() {
            return Err(ConfigError::MalformedPermutation("empty permutation".into()));
        }
        check_permutation(perm)?;
        Ok(Self::canonical_unchecked(perm.to_vec()))
    }

    /// The configuration with no points; it has exactly one rectangulation.
    pub fn empty() -> Self {
        Self::canonical_unchecked(Vec::new())
    }

    fn canonical_unchecked(perm: Vec<usize>) -> Self {
        let n = perm.len() as i64;
        let xs = (1..=n).collect();
        let ys = perm.iter().map(|&r| r as i64).collect();
        PointConfig { perm, xs, ys, width: n + 1, height: n + 1 }
    }

    /// An order-preserving realization with arbitrary integer coordinates.
    /// `xs` must be strictly increasing; all coordinates strictly inside the box.
    pub fn with_coordinates(xs: Vec<i64>, ys: Vec<i64>, width: i64, height: i64) -> Result<Self, ConfigError> {
        if xs.len() != ys.len() {
            return Err(ConfigError::MalformedPermutation("coordinate lists differ in length".into()));
        }
        if xs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ConfigError::NotGeneralPosition("x coordinates must be strictly increasing".into()));
        }
        if xs.iter().any(|&x| x <= 0 || x >= width) || ys.iter().any(|&y| y <= 0 || y >= height) {
            return Err(ConfigError::NotGeneralPosition("points must lie strictly inside the box".into()));
        }
        let perm =
            ranks(&ys).ok_or_else(|| ConfigError::NotGeneralPosition("two points share a y coordinate".into()))?;
        Ok(PointConfig { perm, xs, ys, width, height })
    }

    /// Rank-normalizes arbitrary (possibly unsorted) points into a permutation config.
    pub fn from_points(points: &[(f64, f64)]) -> Result<Self, ConfigError> {
        if points.is_empty() {
            return Err(ConfigError::MalformedPermutation("empty point set".into()));
        }
        let mut by_x: Vec<usize> = (0..points.len()).collect();
        by_x.sort_by(|&a, &b| points[a].0.total_cmp(&points[b].0));
        if by_x.windows(2).any(|w| points[w[0]].0 == points[w[1]].0) {
            return Err(ConfigError::NotGeneralPosition("two points share an x coordinate".into()));
        }
        let ys: Vec<f64> = by_x.iter().map(|&i| points[i].1).collect();
        let mut by_y: Vec<usize> = (0..ys.len()).collect();
        by_y.sort_by(|&a, &b| ys[a].total_cmp(&ys[b]));
        if by_y.windows(2).any(|w| ys[w[0]] == ys[w[1]]) {
            return Err(ConfigError::NotGeneralPosition("two points share a y coordinate".into()));
        }
        let mut perm = vec![0; ys.len()];
        for (rank, &i) in by_y.iter().enumerate() {
            perm[i] = rank + 1;
        }
        Self::from_perm(&perm)
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    /// One-based y ranks, indexed by x order.
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn x(&self, i: usize) -> i64 {
        self.xs[i]
    }

    pub fn y(&self, i: usize) -> i64 {
        self.ys[i]
    }

    pub fn point(&self, i: usize) -> (i64, i64) {
        (self.xs[i], self.ys[i])
    }

    pub fn width(&self) -> i64 {
        self.width
    }

    pub fn height(&self) -> i64 {
        self.height
    }

    /// Coordinate of point `i` along a segment of orientation `o`.
    pub fn along(&self, i: usize, o: Orientation) -> i64 {
        match o {
            Orientation::Horizontal => self.xs[i],
            Orientation::Vertical => self.ys[i],
        }
    }

    /// Fixed coordinate of a segment of orientation `o` through point `i`.
    pub fn cross(&self, i: usize, o: Orientation) -> i64 {
        self.along(i, o.flipped())
    }

    pub fn wall_coordinate(&self, side: Side) -> i64 {
        match side {
            Side::Left | Side::Bottom => 0,
            Side::Right => self.width,
            Side::Top => self.height,
        }
    }

    /// Canonical configuration of the remaining points after deleting `q`.
    pub fn without(&self, q: usize) -> Result<PointConfig, ConfigError> {
        if q >= self.len() {
            return Err(ConfigError::IndexOutOfRange { index: q, n: self.len() });
        }
        let removed = self.perm[q];
        let perm = self
            .perm
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != q)
            .map(|(_, &r)| if r > removed { r - 1 } else { r })
            .collect();
        Ok(Self::canonical_unchecked(perm))
    }

    /// Canonical configuration with a new point at x position `index`
    /// (0-based, `0..=n`) and one-based y rank `rank` (`1..=n+1`).
    pub fn with_inserted(&self, index: usize, rank: usize) -> Result<PointConfig, ConfigError> {
        let n = self.len();
        if index > n {
            return Err(ConfigError::IndexOutOfRange { index, n: n + 1 });
        }
        if rank == 0 || rank > n + 1 {
            return Err(ConfigError::MalformedPermutation(format!("rank {rank} outside 1..={}", n + 1)));
        }
        let mut perm: Vec<usize> = self.perm.iter().map(|&r| if r >= rank { r + 1 } else { r }).collect();
        perm.insert(index, rank);
        Ok(Self::canonical_unchecked(perm))
    }
}

impl fmt::Display for PointConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.perm.iter().map(|r| r.to_string()).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

fn check_permutation(perm: &[usize]) -> Result<(), ConfigError> {
    let n = perm.len();
    let mut seen = vec![false; n + 1];
    for &r in perm {
        if r == 0 || r > n {
            return Err(ConfigError::MalformedPermutation(format!("rank {r} outside 1..={n}")));
        }
        if seen[r] {
            return Err(ConfigError::MalformedPermutation(format!("duplicate rank {r}")));
        }
        seen[r] = true;
    }
    Ok(())
}

/// One-based ranks of distinct values, or `None` on a tie.
fn ranks(values: &[i64]) -> Option<Vec<usize>> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by_key(|&i| values[i]);
    if order.windows(2).any(|w| values[w[0]] == values[w[1]]) {
        return None;
    }
    let mut out = vec![0; values.len()];
    for (rank, &i) in order.iter().enumerate() {
        out[i] = rank + 1;
    }
    Some(out)
}

/// The combinatorial description of one segment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SegmentSpec {
    pub orientation: Orientation,
    pub low: Stopper,
    pub high: Stopper,
}

impl SegmentSpec {
    pub fn new(orientation: Orientation, low: Stopper, high: Stopper) -> Self {
        SegmentSpec { orientation, low, high }
    }

    /// A segment running wall to wall.
    pub fn spanning(orientation: Orientation) -> Self {
        SegmentSpec {
            orientation,
            low: Stopper::Wall(orientation.wall(End::Low)),
            high: Stopper::Wall(orientation.wall(End::High)),
        }
    }

    pub fn stopper(&self, end: End) -> Stopper {
        match end {
            End::Low => self.low,
            End::High => self.high,
        }
    }

    pub fn set_stopper(&mut self, end: End, stopper: Stopper) {
        match end {
            End::Low => self.low = stopper,
            End::High => self.high = stopper,
        }
    }
}

/// A realized segment: its spec plus exact derived extent.
///
/// `lo..hi` is the extent along the segment's axis and `at` the fixed cross
/// coordinate (the owner's y for horizontal segments, x for vertical ones).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Segment {
    pub owner: usize,
    pub orientation: Orientation,
    pub low: Stopper,
    pub high: Stopper,
    pub lo: i64,
    pub hi: i64,
    pub at: i64,
}

impl Segment {
    pub fn spec(&self) -> SegmentSpec {
        SegmentSpec { orientation: self.orientation, low: self.low, high: self.high }
    }

    pub fn stopper(&self, end: End) -> Stopper {
        match end {
            End::Low => self.low,
            End::High => self.high,
        }
    }

    /// Along-axis coordinate of the given end.
    pub fn end_coordinate(&self, end: End) -> i64 {
        match end {
            End::Low => self.lo,
            End::High => self.hi,
        }
    }

    /// Open-interval containment along the segment's axis.
    pub fn interior_contains(&self, along: i64) -> bool {
        self.lo < along && along < self.hi
    }

    /// Plane coordinates of an endpoint.
    pub fn endpoint(&self, end: End) -> (i64, i64) {
        let c = self.end_coordinate(end);
        match self.orientation {
            Orientation::Horizontal => (c, self.at),
            Orientation::Vertical => (self.at, c),
        }
    }
}

/// Coordinate of a stopper as seen from a segment of orientation `o`.
pub(crate) fn stopper_coordinate(config: &PointConfig, o: Orientation, stopper: Stopper) -> i64 {
    match stopper {
        Stopper::Wall(side) => config.wall_coordinate(side),
        Stopper::Segment(q) => config.cross(q, o.flipped()),
    }
}

pub(crate) fn place(config: &PointConfig, owner: usize, spec: SegmentSpec) -> Segment {
    let o = spec.orientation;
    Segment {
        owner,
        orientation: o,
        low: spec.low,
        high: spec.high,
        lo: stopper_coordinate(config, o, spec.low),
        hi: stopper_coordinate(config, o, spec.high),
        at: config.cross(owner, o),
    }
}

/// Malformed assignments that are not geometric statements at all.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StructuralError {
    WrongSegmentCount {
        expected: usize,
        got: usize,
    },
    StopperOutOfRange {
        owner: usize,
        end: End,
        index: usize,
    },
    SelfStopper {
        owner: usize,
        end: End,
    },
    ParallelStopper {
        owner: usize,
        end: End,
        stopper: usize,
    },
    WallOnWrongAxis {
        owner: usize,
        end: End,
        side: Side,
    },
    /// The stopper coordinate is not on the named side of the owner's point.
    WrongSide {
        owner: usize,
        end: End,
    },
}

/// Geometric inconsistencies of a structurally sound assignment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Crossing { horizontal: usize, vertical: usize, at: (i64, i64) },
    EndpointNotInterior { owner: usize, end: End, stopper: usize },
    CoincidentEndpoints { first: usize, second: usize, at: (i64, i64) },
    DegreeSumExceeded { sum: usize, limit: usize },
    FaceCount { bounded: usize, rectangular: usize, expected: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RealizeError {
    #[error("structurally malformed assignment: {0:?}")]
    Structural(Vec<StructuralError>),
    #[error("inconsistent assignment: {0:?}")]
    Inconsistent(Vec<Violation>),
}

/// A rectangulation of a point configuration.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rectangulation {
    config: Arc<PointConfig>,
    segments: Vec<Segment>,
}

impl Rectangulation {
    pub fn config(&self) -> &PointConfig {
        &self.config
    }

    pub fn shared_config(&self) -> &Arc<PointConfig> {
        &self.config
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn segment(&self, a: usize) -> &Segment {
        &self.segments[a]
    }

    pub fn specs(&self) -> Vec<SegmentSpec> {
        self.segments.iter().map(Segment::spec).collect()
    }

    /// Number of intersections on the segment of `a`: its two endpoints plus
    /// every foreign endpoint resting in its interior.
    pub fn degree(&self, a: usize) -> usize {
        2 + self.resting_on(a).count()
    }

    /// Foreign endpoints resting on the segment of `a`, as `(guest, end)`.
    pub fn resting_on(&self, a: usize) -> impl Iterator<Item = (usize, End)> + '_ {
        self.segments.iter().flat_map(move |s| {
            [End::Low, End::High]
                .into_iter()
                .filter(move |&e| s.stopper(e) == Stopper::Segment(a))
                .map(move |e| (s.owner, e))
        })
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![2; self.len()];
        for s in &self.segments {
            for stopper in [s.low, s.high] {
                if let Stopper::Segment(q) = stopper {
                    deg[q] += 1;
                }
            }
        }
        deg
    }

    pub fn degree_histogram(&self) -> DegreeHistogram {
        let mut counts = BTreeMap::new();
        for d in self.degrees() {
            *counts.entry(d).or_insert(0) += 1;
        }
        DegreeHistogram(counts)
    }

    /// Number of segment endpoints resting on the bounding box.
    pub fn endpoints_on_box(&self) -> usize {
        self.segments.iter().map(|s| s.low.is_wall() as usize + s.high.is_wall() as usize).sum()
    }

    /// Injective key over the rectangulations of a fixed configuration.
    pub fn canonical_key(&self) -> CanonicalKey {
        CanonicalKey(crate::io::serialize_rectangulation(self))
    }
}

impl fmt::Display for Rectangulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::io::serialize_rectangulation(self))
    }
}

/// Serialized form of a rectangulation; ordering is byte order of the string.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CanonicalKey(pub String);

impl CanonicalKey {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Map degree `j` to the number of segments of degree `j`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DegreeHistogram(pub BTreeMap<usize, usize>);

impl DegreeHistogram {
    pub fn count(&self, degree: usize) -> usize {
        self.0.get(&degree).copied().unwrap_or(0)
    }

    pub fn d2(&self) -> usize {
        self.count(2)
    }

    pub fn total(&self) -> usize {
        self.0.values().sum()
    }

    /// `sum_j j * d_j`.
    pub fn degree_sum(&self) -> usize {
        self.0.iter().map(|(j, c)| j * c).sum()
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.0.keys().next_back().copied()
    }
}

/// Builds a rectangulation from an orientation and stopper assignment, or
/// reports every reason it is not one.
pub fn realize(config: &Arc<PointConfig>, specs: &[SegmentSpec]) -> Result<Rectangulation, RealizeError> {
    let structural = structural_errors(config, specs);
    if !structural.is_empty() {
        return Err(RealizeError::Structural(structural));
    }
    let segments: Vec<Segment> = specs.iter().enumerate().map(|(i, &s)| place(config, i, s)).collect();
    let mut violations = geometric_violations(&segments);
    if violations.is_empty() {
        let rect = Rectangulation { config: Arc::clone(config), segments };
        let n = rect.len();
        let sum: usize = rect.degrees().iter().sum();
        if sum > 4 * n {
            violations.push(Violation::DegreeSumExceeded { sum, limit: 4 * n });
        }
        let faces = faces::trace_faces(&rect);
        if faces.bounded != n + 1 || faces.rectangular != n + 1 || faces.outer != 1 {
            violations.push(Violation::FaceCount {
                bounded: faces.bounded,
                rectangular: faces.rectangular,
                expected: n + 1,
            });
        }
        if violations.is_empty() {
            return Ok(rect);
        }
    }
    Err(RealizeError::Inconsistent(violations))
}

/// Same as [`realize`] for a canonical permutation configuration.
pub fn realize_perm(perm: &[usize], specs: &[SegmentSpec]) -> Result<Rectangulation, RealizeError> {
    let config = Arc::new(PointConfig::from_perm(perm).expect("valid permutation"));
    realize(&config, specs)
}

fn structural_errors(config: &PointConfig, specs: &[SegmentSpec]) -> Vec<StructuralError> {
    let n = config.len();
    let mut errors = Vec::new();
    if specs.len() != n {
        errors.push(StructuralError::WrongSegmentCount { expected: n, got: specs.len() });
        return errors;
    }
    for (owner, spec) in specs.iter().enumerate() {
        let o = spec.orientation;
        for end in [End::Low, End::High] {
            match spec.stopper(end) {
                Stopper::Wall(side) => {
                    if side.stops() != o {
                        errors.push(StructuralError::WallOnWrongAxis { owner, end, side });
                        continue;
                    }
                    if side.end() != end {
                        errors.push(StructuralError::WrongSide { owner, end });
                        continue;
                    }
                }
                Stopper::Segment(q) => {
                    if q >= n {
                        errors.push(StructuralError::StopperOutOfRange { owner, end, index: q });
                        continue;
                    }
                    if q == owner {
                        errors.push(StructuralError::SelfStopper { owner, end });
                        continue;
                    }
                    if specs[q].orientation == o {
                        errors.push(StructuralError::ParallelStopper { owner, end, stopper: q });
                        continue;
                    }
                    let c = stopper_coordinate(config, o, Stopper::Segment(q));
                    let p = config.along(owner, o);
                    let ok = match end {
                        End::Low => c < p,
                        End::High => c > p,
                    };
                    if !ok {
                        errors.push(StructuralError::WrongSide { owner, end });
                    }
                }
            }
        }
    }
    errors
}

fn geometric_violations(segments: &[Segment]) -> Vec<Violation> {
    let mut out = Vec::new();
    for s in segments {
        for end in [End::Low, End::High] {
            let Stopper::Segment(q) = s.stopper(end) else { continue };
            let host = &segments[q];
            let mutual = [End::Low, End::High]
                .into_iter()
                .any(|e| host.stopper(e) == Stopper::Segment(s.owner) && host.end_coordinate(e) == s.at);
            if mutual {
                if s.owner < q {
                    out.push(Violation::CoincidentEndpoints { first: s.owner, second: q, at: s.endpoint(end) });
                }
            } else if !host.interior_contains(s.at) {
                out.push(Violation::EndpointNotInterior { owner: s.owner, end, stopper: q });
            }
        }
    }
    for h in segments.iter().filter(|s| s.orientation == Orientation::Horizontal) {
        for v in segments.iter().filter(|s| s.orientation == Orientation::Vertical) {
            if h.interior_contains(v.at) && v.interior_contains(h.at) {
                out.push(Violation::Crossing { horizontal: h.owner, vertical: v.owner, at: (v.at, h.at) });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use Orientation::{Horizontal as H, Vertical as V};

    fn wall(side: Side) -> Stopper {
        Stopper::Wall(side)
    }

    #[test]
    fn canonical_coordinates() {
        let c = PointConfig::from_perm(&[1]).unwrap();
        assert_eq!(c.point(0), (1, 1));
        assert_eq!((c.width(), c.height()), (2, 2));

        let c = PointConfig::from_perm(&[2, 4, 1, 3]).unwrap();
        let pts: Vec<_> = (0..4).map(|i| c.point(i)).collect();
        assert_eq!(pts, vec![(1, 2), (2, 4), (3, 1), (4, 3)]);
        assert_eq!(c.width(), 5);
    }

    #[test]
    fn malformed_permutations() {
        assert!(matches!(PointConfig::from_perm(&[]), Err(ConfigError::MalformedPermutation(_))));
        assert!(matches!(PointConfig::from_perm(&[1, 1]), Err(ConfigError::MalformedPermutation(_))));
        assert!(matches!(PointConfig::from_perm(&[0, 1]), Err(ConfigError::MalformedPermutation(_))));
        assert!(matches!(PointConfig::from_perm(&[1, 3]), Err(ConfigError::MalformedPermutation(_))));
    }

    #[test]
    fn points_are_rank_normalized() {
        let c = PointConfig::from_points(&[(3.5, 0.1), (-1.0, 7.0), (2.0, 2.0)]).unwrap();
        assert_eq!(c.perm(), &[3, 2, 1]);
        assert!(PointConfig::from_points(&[(1.0, 1.0), (2.0, 1.0)]).is_err());
        assert!(PointConfig::from_points(&[(1.0, 1.0), (1.0, 2.0)]).is_err());
    }

    #[test]
    fn remove_and_insert_normalize() {
        let c = PointConfig::from_perm(&[2, 4, 1, 3]).unwrap();
        assert_eq!(c.without(1).unwrap().perm(), &[2, 1, 3]);
        assert_eq!(c.without(1).unwrap().with_inserted(1, 4).unwrap(), c);
    }

    #[test]
    fn single_horizontal_segment() {
        let r = realize_perm(&[1], &[SegmentSpec::spanning(H)]).unwrap();
        let s = r.segment(0);
        assert_eq!((s.lo, s.hi, s.at), (0, 2, 1));
        assert_eq!(r.degree(0), 2);
        assert_eq!(r.degree_histogram().0, BTreeMap::from([(2, 1)]));
    }

    #[test]
    fn diagonal_t_junction() {
        let specs = [SegmentSpec::spanning(H), SegmentSpec::new(V, Stopper::Segment(0), wall(Side::Top))];
        let r = realize_perm(&[1, 2], &specs).unwrap();
        assert_eq!((r.segment(1).lo, r.segment(1).hi), (1, 3));
        assert_eq!(r.degree(0), 3);
        assert_eq!(r.degree(1), 2);
    }

    #[test]
    fn diagonal_crossing_is_reported() {
        let specs = [SegmentSpec::spanning(H), SegmentSpec::spanning(V)];
        let err = realize_perm(&[1, 2], &specs).unwrap_err();
        assert_eq!(
            err,
            RealizeError::Inconsistent(vec![Violation::Crossing { horizontal: 0, vertical: 1, at: (2, 1) }])
        );
    }

    #[test]
    fn structural_errors_are_distinct() {
        let specs = [SegmentSpec::new(H, wall(Side::Bottom), wall(Side::Right))];
        assert!(matches!(
            realize_perm(&[1], &specs),
            Err(RealizeError::Structural(e)) if e == vec![StructuralError::WallOnWrongAxis { owner: 0, end: End::Low, side: Side::Bottom }]
        ));
        let specs = [SegmentSpec::new(H, wall(Side::Right), wall(Side::Right))];
        assert!(matches!(realize_perm(&[1], &specs), Err(RealizeError::Structural(_))));
        let specs = [SegmentSpec::spanning(H), SegmentSpec::new(H, Stopper::Segment(0), wall(Side::Right))];
        assert!(matches!(
            realize_perm(&[1, 2], &specs),
            Err(RealizeError::Structural(e)) if e.contains(&StructuralError::ParallelStopper { owner: 1, end: End::Low, stopper: 0 })
        ));
        // stopper on the wrong side of the owner point
        let specs = [SegmentSpec::new(H, Stopper::Segment(1), wall(Side::Right)), SegmentSpec::spanning(V)];
        assert!(matches!(
            realize_perm(&[2, 1], &specs),
            Err(RealizeError::Structural(e)) if e == vec![StructuralError::WrongSide { owner: 0, end: End::Low }]
        ));
    }

    #[test]
    fn mutual_stoppers_are_coincident_endpoints() {
        // p1 (1,1) H resting right on p2; p2 (2,2) V resting low on p1
        let specs = [
            SegmentSpec::new(H, wall(Side::Left), Stopper::Segment(1)),
            SegmentSpec::new(V, Stopper::Segment(0), wall(Side::Top)),
        ];
        let err = realize_perm(&[1, 2], &specs).unwrap_err();
        let RealizeError::Inconsistent(v) = err else { panic!() };
        assert!(v.iter().any(|x| matches!(x, Violation::CoincidentEndpoints { .. })));
    }

    #[test]
    fn endpoint_must_be_interior() {
        // p2 (2,1) H resting left on p1 (1,2) V which only spans y in [2,3]
        let specs = [
            SegmentSpec::new(V, Stopper::Segment(1), wall(Side::Top)),
            SegmentSpec::new(H, Stopper::Segment(0), wall(Side::Right)),
        ];
        let err = realize_perm(&[2, 1], &specs).unwrap_err();
        let RealizeError::Inconsistent(v) = err else { panic!() };
        assert!(!v.is_empty());
    }

    #[test]
    fn pinwheel_degrees() {
        let r = crate::fixtures::pinwheel();
        assert_eq!(r.degrees(), vec![3, 3, 3, 3]);
        assert_eq!(r.degree_histogram().0, BTreeMap::from([(3, 4)]));
        assert_eq!(r.degree_histogram().d2(), 0);
        assert_eq!(r.endpoints_on_box(), 4);
    }

    #[test]
    fn stopper_strings_round_trip() {
        for s in [wall(Side::Left), wall(Side::Top), Stopper::Segment(0), Stopper::Segment(11)] {
            assert_eq!(s.to_string().parse::<Stopper>().unwrap(), s);
        }
        assert!("seg:0".parse::<Stopper>().is_err());
        assert!("wall:up".parse::<Stopper>().is_err());
    }

    #[test]
    fn keys_distinguish_orientation() {
        let h = realize_perm(&[1], &[SegmentSpec::spanning(H)]).unwrap();
        let v = realize_perm(&[1], &[SegmentSpec::spanning(V)]).unwrap();
        assert_ne!(h.canonical_key(), v.canonical_key());
        assert_eq!(h.canonical_key(), h.clone().canonical_key());
    }
}
