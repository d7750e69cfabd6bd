//! Enumeration of all rectangulations of a point configuration.
//!
//! A rectangulation is determined by its orientation and stopper assignment,
//! so enumerating rectangulations means enumerating the finite space of
//! assignments and keeping the consistent ones. Three routes are provided:
//!
//! * [`Enumerator::backtracking`]: the primary search. Orientations are fixed
//!   first (each of the `2^n` choices is an independent work unit), then
//!   stoppers are chosen point by point in x order. Every validity condition
//!   is pairwise, so a partial assignment is dropped as soon as a newly
//!   placed segment conflicts with an earlier one.
//! * [`enumerate_oracle`]: no pruning at all; every assignment goes through
//!   the full validator. Only meant for tiny `n`.
//! * [`generate_by_insertion`]: the insertion construction, which cannot
//!   produce rectangulations without a degree-2 segment.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use thiserror::Error;

use crate::cache::RcCache;
use crate::model::{
    place, realize, CanonicalKey, End, Orientation, PointConfig, Rectangulation, Segment, SegmentSpec, Stopper,
};
use crate::par::{self, Execution};
use crate::symmetry;
use crate::transforms::{insert_point, TransformError};

pub const DEFAULT_MAX_N: usize = 8;
pub const DEFAULT_ORACLE_MAX_N: usize = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumerateError {
    #[error("{n} points exceeds the configured ceiling of {max}")]
    CeilingExceeded { n: usize, max: usize },
    #[error(transparent)]
    Transform(#[from] TransformError),
}

/// All rectangulations of one configuration, ordered by canonical key.
#[derive(Clone, Debug)]
pub struct RectangulationSet {
    config: Arc<PointConfig>,
    members: Vec<Rectangulation>,
    keys: Vec<CanonicalKey>,
    index: HashMap<CanonicalKey, usize>,
}

impl RectangulationSet {
    /// Sorts by canonical key and drops duplicates.
    pub fn from_members(config: Arc<PointConfig>, members: Vec<Rectangulation>) -> Self {
        let mut keyed: Vec<(CanonicalKey, Rectangulation)> =
            members.into_iter().map(|r| (r.canonical_key(), r)).collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        keyed.dedup_by(|a, b| a.0 == b.0);
        let (keys, members): (Vec<_>, Vec<_>) = keyed.into_iter().unzip();
        let index = keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        RectangulationSet { config, members, keys, index }
    }

    pub fn config(&self) -> &PointConfig {
        &self.config
    }

    pub fn shared_config(&self) -> &Arc<PointConfig> {
        &self.config
    }

    /// `rc(P)`.
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Rectangulation] {
        &self.members
    }

    pub fn get(&self, i: usize) -> &Rectangulation {
        &self.members[i]
    }

    pub fn keys(&self) -> &[CanonicalKey] {
        &self.keys
    }

    pub fn position(&self, key: &CanonicalKey) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn contains(&self, key: &CanonicalKey) -> bool {
        self.index.contains_key(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Rectangulation> {
        self.members.iter()
    }
}

/// Backtracking enumerator with a size ceiling and an execution mode.
#[derive(Clone, Copy, Debug)]
pub struct Enumerator {
    pub max_n: usize,
    pub execution: Execution,
}

impl Default for Enumerator {
    fn default() -> Self {
        Enumerator { max_n: DEFAULT_MAX_N, execution: Execution::Parallel }
    }
}

impl Enumerator {
    pub fn new(max_n: usize, execution: Execution) -> Self {
        Enumerator { max_n, execution }
    }

    pub fn sequential() -> Self {
        Enumerator { execution: Execution::Sequential, ..Self::default() }
    }

    fn guard(&self, config: &PointConfig) -> Result<(), EnumerateError> {
        if config.len() > self.max_n {
            return Err(EnumerateError::CeilingExceeded { n: config.len(), max: self.max_n });
        }
        Ok(())
    }

    /// Every rectangulation of `config`.
    pub fn backtracking(&self, config: &PointConfig) -> Result<RectangulationSet, EnumerateError> {
        self.guard(config)?;
        let config = Arc::new(config.clone());
        let masks: Vec<u32> = (0..1u32 << config.len()).collect();
        let chunks = par::map(self.execution, &masks, |&mask| {
            let mut found = Vec::new();
            search_orientation(&config, mask, &mut |specs| {
                let rect = realize(&config, specs).expect("search only emits consistent assignments");
                found.push(rect);
            });
            found
        });
        Ok(RectangulationSet::from_members(Arc::clone(&config), chunks.into_iter().flatten().collect()))
    }

    /// `rc(P)` without materializing the rectangulations.
    pub fn count(&self, config: &PointConfig) -> Result<u64, EnumerateError> {
        self.guard(config)?;
        let masks: Vec<u32> = (0..1u32 << config.len()).collect();
        let counts = par::map(self.execution, &masks, |&mask| {
            let mut c = 0u64;
            search_orientation(config, mask, &mut |_| c += 1);
            c
        });
        Ok(counts.into_iter().sum())
    }
}

pub fn enumerate_backtracking(config: &PointConfig) -> Result<RectangulationSet, EnumerateError> {
    Enumerator::default().backtracking(config)
}

fn orientations(n: usize, mask: u32) -> Vec<Orientation> {
    (0..n).map(|i| if mask >> i & 1 == 1 { Orientation::Vertical } else { Orientation::Horizontal }).collect()
}

/// Stopper candidates for point `a` at `end`, nearest first.
fn candidates(config: &PointConfig, orient: &[Orientation], a: usize, end: End) -> Vec<Stopper> {
    let o = orient[a];
    let p = config.along(a, o);
    let mut qs: Vec<usize> = (0..config.len())
        .filter(|&q| orient[q] != o)
        .filter(|&q| match end {
            End::Low => config.along(q, o) < p,
            End::High => config.along(q, o) > p,
        })
        .collect();
    qs.sort_by_key(|&q| (config.along(q, o) - p).abs());
    let mut out: Vec<Stopper> = qs.into_iter().map(Stopper::Segment).collect();
    out.push(Stopper::Wall(o.wall(end)));
    out
}

fn compatible(s: &Segment, t: &Segment) -> bool {
    if s.orientation != t.orientation && s.interior_contains(t.at) && t.interior_contains(s.at) {
        return false;
    }
    let rests = |x: &Segment, y: &Segment| x.low == Stopper::Segment(y.owner) || x.high == Stopper::Segment(y.owner);
    if rests(s, t) && !t.interior_contains(s.at) {
        return false;
    }
    if rests(t, s) && !s.interior_contains(t.at) {
        return false;
    }
    true
}

fn search_orientation(config: &PointConfig, mask: u32, emit: &mut dyn FnMut(&[SegmentSpec])) {
    let n = config.len();
    let orient = orientations(n, mask);
    let options: Vec<(Vec<Stopper>, Vec<Stopper>)> =
        (0..n).map(|a| (candidates(config, &orient, a, End::Low), candidates(config, &orient, a, End::High))).collect();
    let mut placed: Vec<Segment> = Vec::with_capacity(n);
    let mut specs: Vec<SegmentSpec> = Vec::with_capacity(n);
    descend(config, &orient, &options, &mut placed, &mut specs, emit);
}

fn descend(
    config: &PointConfig,
    orient: &[Orientation],
    options: &[(Vec<Stopper>, Vec<Stopper>)],
    placed: &mut Vec<Segment>,
    specs: &mut Vec<SegmentSpec>,
    emit: &mut dyn FnMut(&[SegmentSpec]),
) {
    let a = placed.len();
    if a == orient.len() {
        emit(specs);
        return;
    }
    let (lows, highs) = &options[a];
    for &low in lows {
        for &high in highs {
            let spec = SegmentSpec::new(orient[a], low, high);
            let seg = place(config, a, spec);
            if placed.iter().all(|t| compatible(&seg, t)) {
                placed.push(seg);
                specs.push(spec);
                descend(config, orient, options, placed, specs, emit);
                placed.pop();
                specs.pop();
            }
        }
    }
}

/// Exhaustive reference enumeration: every orientation and every stopper
/// choice on the correct side of each point, each checked by [`realize`].
pub fn enumerate_oracle(config: &PointConfig, max_n: usize) -> Result<RectangulationSet, EnumerateError> {
    let n = config.len();
    if n > max_n {
        return Err(EnumerateError::CeilingExceeded { n, max: max_n });
    }
    let config = Arc::new(config.clone());
    let choices: Vec<Vec<SegmentSpec>> = (0..n)
        .map(|a| {
            let mut out = Vec::new();
            for o in [Orientation::Horizontal, Orientation::Vertical] {
                let p = config.along(a, o);
                let side = |end: End| {
                    let mut v = vec![Stopper::Wall(o.wall(end))];
                    v.extend(
                        (0..n)
                            .filter(|&q| q != a)
                            .filter(|&q| match end {
                                End::Low => config.along(q, o) < p,
                                End::High => config.along(q, o) > p,
                            })
                            .map(Stopper::Segment),
                    );
                    v
                };
                for low in side(End::Low) {
                    for high in side(End::High) {
                        out.push(SegmentSpec::new(o, low, high));
                    }
                }
            }
            out
        })
        .collect();

    let mut members = Vec::new();
    let mut digits = vec![0usize; n];
    let mut specs: Vec<SegmentSpec> = choices.iter().map(|c| c[0]).collect();
    loop {
        if let Ok(rect) = realize(&config, &specs) {
            members.push(rect);
        }
        // odometer increment
        let mut i = 0;
        loop {
            if i == n {
                return Ok(RectangulationSet::from_members(config, members));
            }
            digits[i] += 1;
            if digits[i] < choices[i].len() {
                specs[i] = choices[i][digits[i]];
                break;
            }
            digits[i] = 0;
            specs[i] = choices[i][0];
            i += 1;
        }
    }
}

/// Which rectangulations of `P \ {q}` the insertion construction starts from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InsertionBase {
    /// The complete set of rectangulations of `P \ {q}`.
    Complete,
    /// Only what insertion itself produces for `P \ {q}`, recursively.
    Recursive,
}

/// Output of the insertion construction. The member set is in general a
/// strict subset of all rectangulations.
#[derive(Clone, Debug)]
pub struct PartialInsertionSet {
    pub set: RectangulationSet,
    /// Number of distinct `(q, G', orientation)` triples producing each member,
    /// aligned with `set.members()`.
    pub productions: Vec<usize>,
    pub total_productions: usize,
}

/// Builds rectangulations of `config` by choosing a point `q`, a
/// rectangulation of the remaining points, and a degree-2 segment through `q`.
pub fn generate_by_insertion(
    config: &PointConfig,
    base: InsertionBase,
    enumerator: &Enumerator,
) -> Result<PartialInsertionSet, EnumerateError> {
    let mut memo = HashMap::new();
    insertion_rec(config, base, enumerator, &mut memo)
}

fn insertion_rec(
    config: &PointConfig,
    base: InsertionBase,
    enumerator: &Enumerator,
    memo: &mut HashMap<Vec<usize>, RectangulationSet>,
) -> Result<PartialInsertionSet, EnumerateError> {
    enumerator.guard(config)?;
    let shared = Arc::new(config.clone());
    if config.is_empty() {
        let set = enumerator.backtracking(config)?;
        return Ok(PartialInsertionSet { set, productions: vec![1], total_productions: 1 });
    }
    let mut jobs: Vec<(usize, Rectangulation)> = Vec::new();
    for q in 0..config.len() {
        let sub = config.without(q).expect("index in range");
        let sub_set = match memo.get(sub.perm()) {
            Some(s) => s.clone(),
            None => {
                let s = match base {
                    InsertionBase::Complete => enumerator.backtracking(&sub)?,
                    InsertionBase::Recursive => insertion_rec(&sub, base, enumerator, memo)?.set,
                };
                memo.insert(sub.perm().to_vec(), s.clone());
                s
            }
        };
        jobs.extend(sub_set.members().iter().cloned().map(|g| (q, g)));
    }
    let produced = par::map(enumerator.execution, &jobs, |(q, g)| {
        [Orientation::Horizontal, Orientation::Vertical]
            .into_iter()
            .map(|o| insert_point(g, *q, config.perm()[*q], o))
            .collect::<Result<Vec<_>, _>>()
    });
    let mut counts: HashMap<CanonicalKey, usize> = HashMap::new();
    let mut all = Vec::new();
    for batch in produced {
        for rect in batch? {
            *counts.entry(rect.canonical_key()).or_insert(0) += 1;
            all.push(rect);
        }
    }
    let total_productions = all.len();
    let set = RectangulationSet::from_members(shared, all);
    let productions = set.keys().iter().map(|k| counts[k]).collect();
    Ok(PartialInsertionSet { set, productions, total_productions })
}

/// `rc` of one permutation class, with its symmetry orbit when reduced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermCount {
    pub perm: Vec<usize>,
    pub rc: u64,
    /// The orbit under the 8 symmetries of the square (only with reduction).
    pub orbit: Vec<Vec<usize>>,
}

/// `rc` for every permutation of length `n` (lexicographic order), or one
/// representative per symmetry orbit.
pub fn count_all_perms(
    n: usize,
    symmetry_reduction: bool,
    enumerator: &Enumerator,
    cache: &RcCache,
) -> Result<Vec<PermCount>, EnumerateError> {
    if n > enumerator.max_n {
        return Err(EnumerateError::CeilingExceeded { n, max: enumerator.max_n });
    }
    let perms: Vec<Vec<usize>> = symmetry::all_permutations(n)
        .into_iter()
        .filter(|p| !symmetry_reduction || symmetry::is_representative(p))
        .collect();
    let inner = Enumerator { execution: Execution::Sequential, ..*enumerator };
    let results = par::map(enumerator.execution, &perms, |p| cache.rc(p, &inner));
    perms
        .into_iter()
        .zip(results)
        .map(|(perm, rc)| {
            let orbit = if symmetry_reduction { symmetry::orbit(&perm).into_iter().collect() } else { Vec::new() };
            Ok(PermCount { perm, rc: rc?, orbit })
        })
        .collect()
}

/// Maximum `rc` over all permutations of each length `1..=n`.
pub fn max_rc_by_n(n: usize, enumerator: &Enumerator, cache: &RcCache) -> Result<BTreeMap<usize, u64>, EnumerateError> {
    (1..=n)
        .map(|m| {
            let counts = count_all_perms(m, true, enumerator, cache)?;
            Ok((m, counts.iter().map(|c| c.rc).max().unwrap_or(0)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn rc(perm: &[usize]) -> usize {
        enumerate_backtracking(&PointConfig::from_perm(perm).unwrap()).unwrap().len()
    }

    #[test]
    fn small_counts() {
        assert_eq!(rc(&[1]), 2);
        assert_eq!(rc(&[1, 2]), 6);
        assert_eq!(rc(&[2, 1]), 6);
    }

    #[test]
    fn empty_config_has_one_rectangulation() {
        let set = enumerate_backtracking(&PointConfig::empty()).unwrap();
        assert_eq!(set.len(), 1);
        assert!(set.get(0).is_empty());
    }

    #[test]
    fn diagonal_two_keys_are_distinct() {
        let set = enumerate_backtracking(&fixtures::diagonal(2)).unwrap();
        let mut keys = set.keys().to_vec();
        keys.dedup();
        assert_eq!(keys.len(), 6);
        assert!(set.contains(&fixtures::diagonal_t().canonical_key()));
    }

    #[test]
    fn pinwheel_is_enumerated() {
        let set = enumerate_backtracking(&PointConfig::from_perm(&[2, 4, 1, 3]).unwrap()).unwrap();
        assert!(set.contains(&fixtures::pinwheel().canonical_key()));
    }

    #[test]
    fn ceiling_is_enforced() {
        let e = Enumerator::new(3, Execution::Sequential);
        assert_eq!(e.count(&fixtures::diagonal(4)), Err(EnumerateError::CeilingExceeded { n: 4, max: 3 }));
        assert!(matches!(enumerate_oracle(&fixtures::diagonal(5), 4), Err(EnumerateError::CeilingExceeded { .. })));
    }

    #[test]
    fn oracle_small() {
        assert_eq!(enumerate_oracle(&fixtures::diagonal(1), 4).unwrap().len(), 2);
        let a = enumerate_oracle(&fixtures::diagonal(3), 4).unwrap();
        let b = enumerate_backtracking(&fixtures::diagonal(3)).unwrap();
        assert_eq!(a.keys(), b.keys());
    }

    #[test]
    fn count_matches_materialized() {
        let c = fixtures::diagonal(4);
        assert_eq!(Enumerator::default().count(&c).unwrap() as usize, enumerate_backtracking(&c).unwrap().len());
    }

    #[test]
    fn insertion_on_diagonal_two_is_complete() {
        let g = generate_by_insertion(&fixtures::diagonal(2), InsertionBase::Complete, &Enumerator::default()).unwrap();
        assert_eq!(g.set.len(), 6);
        assert_eq!(g.total_productions, 2 * (2 + 2));
    }

    #[test]
    fn count_all_small() {
        let cache = RcCache::new();
        let e = Enumerator::default();
        let one = count_all_perms(1, false, &e, &cache).unwrap();
        assert_eq!(one, vec![PermCount { perm: vec![1], rc: 2, orbit: vec![] }]);
        let two = count_all_perms(2, false, &e, &cache).unwrap();
        assert!(two.iter().all(|c| c.rc == 6));
        let reduced = count_all_perms(2, true, &e, &cache).unwrap();
        assert_eq!(reduced.len(), 1);
        assert_eq!(reduced[0].orbit.len(), 2);
    }
}
