//! Cross-graph charging over all rectangulations of one point set.
//!
//! Every segment `(a, G)` starts with `5 - deg` units. The first move sends
//! the charge of every segment of degree above 2 to the degree-2 segment its
//! trimming produces. The optional second move lets every degree-2 segment
//! holding exactly 9 units give 1/4 to each of the two degree-2 segments
//! obtained by flipping the segments its endpoints rest on.
//!
//! Charges are exact rationals and every transfer is recorded with its
//! source, so preimage profiles and witnesses can be reconstructed.

use std::collections::BTreeMap;

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::enumerate::RectangulationSet;
use crate::model::{End, Stopper};
use crate::par::{self, Execution};
use crate::transforms::{extendability, flip, trim, TransformError};

pub type Charge = Ratio<i64>;

pub(crate) fn serialize_ratio<S: Serializer>(r: &Charge, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub(crate) fn serialize_opt_ratio<S: Serializer>(r: &Option<Charge>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&r.to_string()),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Initial,
    AfterTrimMove,
    AfterQuarterMove,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Initial => "initial",
            Stage::AfterTrimMove => "after_trim_move",
            Stage::AfterQuarterMove => "after_quarter_move",
        }
    }
}

/// Addresses a segment `(a, G)` as (member index in the set, point index).
pub type SegmentRef = (usize, usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transfer {
    pub stage: Stage,
    pub from: SegmentRef,
    pub to: SegmentRef,
    pub amount: Charge,
    /// Degree of the source segment in its own rectangulation.
    pub source_degree: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChargingError {
    #[error("ledger is at stage {found:?}, expected {expected:?}")]
    WrongStage { expected: Stage, found: Stage },
    #[error("transport target {key} is missing from the rectangulation set")]
    IncompleteSet { key: String },
    #[error(transparent)]
    Transform(#[from] TransformError),
}

#[derive(Clone, Debug)]
pub struct ChargeLedger {
    pub stage: Stage,
    degrees: Vec<Vec<usize>>,
    charges: Vec<Vec<Charge>>,
    transfers: Vec<Transfer>,
}

impl ChargeLedger {
    pub fn charge(&self, seg: SegmentRef) -> Charge {
        self.charges[seg.0][seg.1]
    }

    pub fn degree(&self, seg: SegmentRef) -> usize {
        self.degrees[seg.0][seg.1]
    }

    pub fn transfers(&self) -> &[Transfer] {
        &self.transfers
    }

    /// `C`: total charge over all segments of all rectangulations.
    pub fn total(&self) -> Charge {
        self.charges.iter().flatten().copied().sum()
    }

    pub fn rect_sum(&self, g: usize) -> Charge {
        self.charges[g].iter().copied().sum()
    }

    pub fn segments(&self) -> impl Iterator<Item = SegmentRef> + '_ {
        self.charges.iter().enumerate().flat_map(|(g, row)| (0..row.len()).map(move |a| (g, a)))
    }

    /// Largest charge on a degree-2 segment, with the first segment attaining it.
    pub fn max_degree2_charge(&self) -> Option<(Charge, SegmentRef)> {
        let mut best: Option<(Charge, SegmentRef)> = None;
        for seg in self.segments().filter(|&s| self.degree(s) == 2) {
            let c = self.charge(seg);
            if best.is_none_or(|(b, _)| c > b) {
                best = Some((c, seg));
            }
        }
        best
    }

    /// Segments of degree above 2 still holding nonzero charge.
    pub fn stranded(&self) -> Vec<SegmentRef> {
        self.segments().filter(|&s| self.degree(s) > 2 && !self.charge(s).is_zero()).collect()
    }

    /// Dump rows `(rectKey, point, stage, charge)`, one-based points.
    pub fn rows(&self, rset: &RectangulationSet) -> Vec<[String; 4]> {
        self.segments()
            .map(|(g, a)| {
                [
                    rset.keys()[g].to_string(),
                    (a + 1).to_string(),
                    self.stage.as_str().to_string(),
                    self.charge((g, a)).to_string(),
                ]
            })
            .collect()
    }
}

/// Charge `5 - deg` on every segment of every rectangulation.
pub fn initial_charges(rset: &RectangulationSet) -> ChargeLedger {
    let degrees: Vec<Vec<usize>> = rset.iter().map(|r| r.degrees()).collect();
    let charges = degrees.iter().map(|row| row.iter().map(|&d| Charge::from_integer(5 - d as i64)).collect()).collect();
    ChargeLedger { stage: Stage::Initial, degrees, charges, transfers: Vec::new() }
}

fn expect_stage(ledger: &ChargeLedger, expected: Stage) -> Result<(), ChargingError> {
    if ledger.stage != expected {
        return Err(ChargingError::WrongStage { expected, found: ledger.stage });
    }
    Ok(())
}

/// Moves the whole charge of each segment of degree above 2 onto the
/// degree-2 segment obtained by trimming it.
pub fn move_to_trimmed(
    ledger: &ChargeLedger,
    rset: &RectangulationSet,
    exec: Execution,
) -> Result<ChargeLedger, ChargingError> {
    expect_stage(ledger, Stage::Initial)?;
    let sources: Vec<SegmentRef> = ledger.segments().filter(|&s| ledger.degree(s) > 2).collect();
    let targets = par::map(exec, &sources, |&(g, a)| -> Result<usize, ChargingError> {
        let trimmed = trim(rset.get(g), a)?;
        let key = trimmed.result.canonical_key();
        rset.position(&key).ok_or(ChargingError::IncompleteSet { key: key.0 })
    });
    let mut next = ledger.clone();
    next.stage = Stage::AfterTrimMove;
    for (&from, target) in sources.iter().zip(targets) {
        let to = (target?, from.1);
        let amount = ledger.charge(from);
        next.charges[from.0][from.1] = Charge::zero();
        next.charges[to.0][to.1] += amount;
        next.transfers.push(Transfer {
            stage: Stage::AfterTrimMove,
            from,
            to,
            amount,
            source_degree: ledger.degree(from),
        });
    }
    Ok(next)
}

/// Trim preimages of `seg` bucketed by their degree.
pub fn trim_preimage_profile(ledger: &ChargeLedger, seg: SegmentRef) -> BTreeMap<usize, usize> {
    let mut profile = BTreeMap::new();
    for t in ledger.transfers.iter().filter(|t| t.stage == Stage::AfterTrimMove && t.to == seg) {
        *profile.entry(t.source_degree).or_insert(0) += 1;
    }
    profile
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PreimageViolation {
    TooManyDegree3 {
        rect: usize,
        point: usize,
        count: usize,
    },
    TooManyDegree4 {
        rect: usize,
        point: usize,
        count: usize,
    },
    /// Positive inflow (own 3 units plus positive transfers) reached 10 with
    /// no preimage of degree 6 or more.
    TenWithoutDegree6 {
        rect: usize,
        point: usize,
    },
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct PreimageAudit {
    pub max_degree3: usize,
    pub max_degree4: usize,
    #[serde(serialize_with = "serialize_ratio")]
    pub max_positive_inflow: Charge,
    pub segments_reaching_ten: usize,
    pub violations: Vec<PreimageViolation>,
}

/// Checks the preimage structure of every degree-2 segment after the trim move.
pub fn audit_preimages(ledger: &ChargeLedger) -> Result<PreimageAudit, ChargingError> {
    expect_stage(ledger, Stage::AfterTrimMove)?;
    let mut incoming: BTreeMap<SegmentRef, Vec<&Transfer>> = BTreeMap::new();
    for t in ledger.transfers.iter().filter(|t| t.stage == Stage::AfterTrimMove) {
        incoming.entry(t.to).or_default().push(t);
    }
    let mut audit = PreimageAudit::default();
    for seg in ledger.segments().filter(|&s| ledger.degree(s) == 2) {
        let transfers = incoming.get(&seg).map(Vec::as_slice).unwrap_or(&[]);
        let count = |d: usize| transfers.iter().filter(|t| t.source_degree == d).count();
        let (c3, c4) = (count(3), count(4));
        audit.max_degree3 = audit.max_degree3.max(c3);
        audit.max_degree4 = audit.max_degree4.max(c4);
        if c3 > 2 {
            audit.violations.push(PreimageViolation::TooManyDegree3 { rect: seg.0, point: seg.1, count: c3 });
        }
        if c4 > 3 {
            audit.violations.push(PreimageViolation::TooManyDegree4 { rect: seg.0, point: seg.1, count: c4 });
        }
        let inflow: Charge =
            Charge::from_integer(3) + transfers.iter().map(|t| t.amount).filter(|a| a.is_positive()).sum::<Charge>();
        audit.max_positive_inflow = audit.max_positive_inflow.max(inflow);
        if inflow >= Charge::from_integer(10) {
            audit.segments_reaching_ten += 1;
            if !transfers.iter().any(|t| t.source_degree >= 6) {
                audit.violations.push(PreimageViolation::TenWithoutDegree6 { rect: seg.0, point: seg.1 });
            }
        }
    }
    Ok(audit)
}

#[derive(Clone, Debug, Serialize)]
pub struct ReceiverRecord {
    /// Endpoint of the donor whose host was flipped.
    pub end: End,
    pub host: usize,
    pub rect: usize,
    pub degree: usize,
    #[serde(serialize_with = "serialize_ratio")]
    pub charge_before: Charge,
    pub left_ext: usize,
    pub right_ext: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct DonorRecord {
    pub rect: usize,
    pub point: usize,
    pub left_ext: usize,
    pub right_ext: usize,
    pub receivers: Vec<ReceiverRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QuarterViolation {
    DonorExtendability { rect: usize, point: usize, left_ext: usize, right_ext: usize },
    HostOnWall { rect: usize, point: usize, end: End },
    ReceiverDegree { rect: usize, point: usize, end: End, degree: usize },
    ReceiverAboveEight { rect: usize, point: usize, end: End },
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct QuarterAudit {
    pub donors: Vec<DonorRecord>,
    pub violations: Vec<QuarterViolation>,
}

/// Second move: every degree-2 segment holding exactly 9 gives 1/4 to the
/// segment of the same point in each of the two rectangulations obtained by
/// flipping the segments its endpoints rest on.
pub fn quarter_move(
    ledger: &ChargeLedger,
    rset: &RectangulationSet,
    exec: Execution,
) -> Result<(ChargeLedger, QuarterAudit), ChargingError> {
    expect_stage(ledger, Stage::AfterTrimMove)?;
    let nine = Charge::from_integer(9);
    let eight = Charge::from_integer(8);
    let quarter = Charge::new(1, 4);
    let donors: Vec<SegmentRef> =
        ledger.segments().filter(|&s| ledger.degree(s) == 2 && ledger.charge(s) == nine).collect();

    type Inspected = (DonorRecord, Vec<QuarterViolation>, Vec<(End, SegmentRef)>);
    let inspected = par::map(exec, &donors, |&(g, a)| -> Result<Inspected, ChargingError> {
        let rect = rset.get(g);
        let left_ext = extendability(rect, a, End::Low)?;
        let right_ext = extendability(rect, a, End::High)?;
        let mut violations = Vec::new();
        if left_ext != 2 || right_ext != 2 {
            violations.push(QuarterViolation::DonorExtendability { rect: g, point: a, left_ext, right_ext });
        }
        let mut receivers = Vec::new();
        let mut targets = Vec::new();
        for end in [End::High, End::Low] {
            let Stopper::Segment(host) = rect.segment(a).stopper(end) else {
                violations.push(QuarterViolation::HostOnWall { rect: g, point: a, end });
                continue;
            };
            let flipped = flip(rect, host)?;
            let key = flipped.canonical_key();
            let target = rset.position(&key).ok_or(ChargingError::IncompleteSet { key: key.0 })?;
            let degree = flipped.degree(a);
            let charge_before = ledger.charge((target, a));
            receivers.push(ReceiverRecord {
                end,
                host,
                rect: target,
                degree,
                charge_before,
                left_ext: extendability(&flipped, a, End::Low)?,
                right_ext: extendability(&flipped, a, End::High)?,
            });
            if degree != 2 {
                violations.push(QuarterViolation::ReceiverDegree { rect: g, point: a, end, degree });
                continue;
            }
            if charge_before > eight {
                violations.push(QuarterViolation::ReceiverAboveEight { rect: g, point: a, end });
            }
            targets.push((end, (target, a)));
        }
        Ok((DonorRecord { rect: g, point: a, left_ext, right_ext, receivers }, violations, targets))
    });

    let mut next = ledger.clone();
    next.stage = Stage::AfterQuarterMove;
    let mut audit = QuarterAudit::default();
    for (&from, result) in donors.iter().zip(inspected) {
        let (record, violations, targets) = result?;
        for (_, to) in targets {
            next.charges[from.0][from.1] -= quarter;
            next.charges[to.0][to.1] += quarter;
            next.transfers.push(Transfer {
                stage: Stage::AfterQuarterMove,
                from,
                to,
                amount: quarter,
                source_degree: 2,
            });
        }
        audit.donors.push(record);
        audit.violations.extend(violations);
    }
    Ok((next, audit))
}

/// Summary of one ledger stage against the exact expected number of degree-2 segments.
#[derive(Clone, Debug, Serialize)]
pub struct ChargeReport {
    pub n: usize,
    pub rc: usize,
    pub stage: Stage,
    #[serde(serialize_with = "serialize_ratio")]
    pub total: Charge,
    #[serde(serialize_with = "serialize_ratio")]
    pub min_initial_rect_sum: Charge,
    #[serde(serialize_with = "serialize_opt_ratio")]
    pub max_degree2_charge: Option<Charge>,
    /// Charge value (as text) -> number of degree-2 segments holding it.
    pub degree2_histogram: BTreeMap<String, usize>,
    pub d2_sum: usize,
    /// `n / max`, the lower bound on the expected d2 implied by this stage.
    #[serde(serialize_with = "serialize_opt_ratio")]
    pub implied_dhat2_bound: Option<Charge>,
    #[serde(serialize_with = "serialize_ratio")]
    pub exact_dhat2: Charge,
    /// `n * rc <= C <= max * sum d2`.
    pub chain_holds: bool,
    pub bound_below_exact: bool,
    pub stranded_segments: usize,
    pub witness: Option<serde_json::Value>,
    pub witness_point: Option<usize>,
}

pub fn charge_report(ledger: &ChargeLedger, rset: &RectangulationSet) -> ChargeReport {
    let n = rset.config().len();
    let rc = rset.len();
    let total = ledger.total();
    let min_initial_rect_sum = ledger
        .degrees
        .iter()
        .map(|row| row.iter().map(|&d| Charge::from_integer(5 - d as i64)).sum::<Charge>())
        .min()
        .unwrap_or_else(Charge::zero);
    let mut degree2_histogram: BTreeMap<String, usize> = BTreeMap::new();
    let mut d2_sum = 0;
    for seg in ledger.segments().filter(|&s| ledger.degree(s) == 2) {
        d2_sum += 1;
        *degree2_histogram.entry(ledger.charge(seg).to_string()).or_insert(0) += 1;
    }
    let max = ledger.max_degree2_charge();
    let exact_dhat2 = Charge::new(d2_sum as i64, rc as i64);
    let n_rc = Charge::from_integer((n * rc) as i64);
    let implied = max.and_then(|(m, _)| m.is_positive().then(|| Charge::from_integer(n as i64) / m));
    let chain_holds = match max {
        Some((m, _)) => n_rc <= total && total <= m * Charge::from_integer(d2_sum as i64),
        None => n == 0,
    };
    ChargeReport {
        n,
        rc,
        stage: ledger.stage,
        total,
        min_initial_rect_sum,
        max_degree2_charge: max.map(|(m, _)| m),
        degree2_histogram,
        d2_sum,
        implied_dhat2_bound: implied,
        exact_dhat2,
        chain_holds,
        bound_below_exact: implied.is_none_or(|b| b <= exact_dhat2),
        stranded_segments: if ledger.stage == Stage::Initial { 0 } else { ledger.stranded().len() },
        witness: max.map(|(_, (g, _))| serde_json::from_str(rset.keys()[g].as_str()).expect("keys are JSON")),
        witness_point: max.map(|(_, (_, a))| a + 1),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Scheme {
    /// Initial charges plus the trim move; bound 9.
    A,
    /// Scheme A followed by the quarter move; bound 17/2.
    B,
}

/// Every stage of a scheme run with its audits.
#[derive(Clone, Debug)]
pub struct SchemeRun {
    pub initial: ChargeLedger,
    pub after_trim: ChargeLedger,
    pub after_quarter: Option<ChargeLedger>,
    pub preimages: PreimageAudit,
    pub quarter: Option<QuarterAudit>,
}

impl SchemeRun {
    pub fn final_ledger(&self) -> &ChargeLedger {
        self.after_quarter.as_ref().unwrap_or(&self.after_trim)
    }

    pub fn conserved(&self) -> bool {
        let c = self.initial.total();
        self.after_trim.total() == c && self.after_quarter.as_ref().is_none_or(|l| l.total() == c)
    }
}

pub fn run_scheme(rset: &RectangulationSet, scheme: Scheme, exec: Execution) -> Result<SchemeRun, ChargingError> {
    let initial = initial_charges(rset);
    let after_trim = move_to_trimmed(&initial, rset, exec)?;
    let preimages = audit_preimages(&after_trim)?;
    let (after_quarter, quarter) = match scheme {
        Scheme::A => (None, None),
        Scheme::B => {
            let (l, a) = quarter_move(&after_trim, rset, exec)?;
            (Some(l), Some(a))
        }
    };
    Ok(SchemeRun { initial, after_trim, after_quarter, preimages, quarter })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::enumerate_backtracking;
    use crate::fixtures;
    use crate::model::PointConfig;

    fn set(perm: &[usize]) -> RectangulationSet {
        enumerate_backtracking(&PointConfig::from_perm(perm).unwrap()).unwrap()
    }

    #[test]
    fn single_point() {
        let rset = set(&[1]);
        let ledger = initial_charges(&rset);
        assert_eq!(ledger.total(), Charge::from_integer(6));
        let report = charge_report(&ledger, &rset);
        assert_eq!(report.max_degree2_charge, Some(Charge::from_integer(3)));
        assert_eq!(report.implied_dhat2_bound, Some(Charge::new(1, 3)));
        assert_eq!(report.exact_dhat2, Charge::from_integer(1));
        assert!(report.chain_holds);
    }

    #[test]
    fn diagonal_two_trim_move() {
        let rset = set(&[1, 2]);
        let initial = initial_charges(&rset);
        let g = rset.position(&fixtures::diagonal_t().canonical_key()).unwrap();
        assert_eq!(initial.charge((g, 0)), Charge::from_integer(2));
        assert_eq!(initial.charge((g, 1)), Charge::from_integer(3));
        assert_eq!(initial.rect_sum(g), Charge::from_integer(5));

        let moved = move_to_trimmed(&initial, &rset, Execution::Sequential).unwrap();
        let target = trim(rset.get(g), 0).unwrap().result.canonical_key();
        let t = rset.position(&target).unwrap();
        assert_eq!(moved.charge((t, 0)), Charge::from_integer(5));
        assert_eq!(moved.charge((g, 0)), Charge::zero());
        assert_eq!(trim_preimage_profile(&moved, (t, 0)), BTreeMap::from([(3, 1)]));
        assert_eq!(moved.total(), initial.total());
        assert!(moved.stranded().is_empty());
    }

    #[test]
    fn pinwheel_initial_charges() {
        let rset = set(&[2, 4, 1, 3]);
        let g = rset.position(&fixtures::pinwheel().canonical_key()).unwrap();
        let ledger = initial_charges(&rset);
        assert!((0..4).all(|a| ledger.charge((g, a)) == Charge::from_integer(2)));
        assert_eq!(ledger.rect_sum(g), Charge::from_integer(8));
    }

    #[test]
    fn stage_order_is_enforced() {
        let rset = set(&[1, 2]);
        let initial = initial_charges(&rset);
        assert!(matches!(quarter_move(&initial, &rset, Execution::Sequential), Err(ChargingError::WrongStage { .. })));
        let moved = move_to_trimmed(&initial, &rset, Execution::Sequential).unwrap();
        assert!(matches!(move_to_trimmed(&moved, &rset, Execution::Sequential), Err(ChargingError::WrongStage { .. })));
    }

    #[test]
    fn incomplete_set_is_an_error() {
        let full = set(&[1, 2]);
        let partial = RectangulationSet::from_members(full.shared_config().clone(), vec![fixtures::diagonal_t()]);
        let initial = initial_charges(&partial);
        assert!(matches!(
            move_to_trimmed(&initial, &partial, Execution::Sequential),
            Err(ChargingError::IncompleteSet { .. })
        ));
    }
}
