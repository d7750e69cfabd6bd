//! Degree statistics and exact checks of the counting identities and bounds.

use std::collections::BTreeMap;

use num_rational::Ratio;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::cache::RcCache;
use crate::charging::{
    charge_report, run_scheme, serialize_opt_ratio, serialize_ratio, Charge, ChargeReport, ChargingError,
    PreimageAudit, QuarterAudit, Scheme,
};
use crate::enumerate::{EnumerateError, Enumerator, RectangulationSet};
use crate::io::format_perm;
use crate::model::PointConfig;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("empty rectangulation set")]
    Empty,
    #[error("no sweep data for n = {0}")]
    MissingSweep(usize),
    #[error(transparent)]
    Enumerate(#[from] EnumerateError),
    #[error(transparent)]
    Charging(#[from] ChargingError),
}

/// `d̂_j(P)`: average number of degree-`j` segments over all rectangulations.
pub fn expected_degrees(rset: &RectangulationSet) -> Result<BTreeMap<usize, Charge>, StatsError> {
    if rset.is_empty() {
        return Err(StatsError::Empty);
    }
    let mut sums: BTreeMap<usize, i64> = BTreeMap::new();
    for r in rset.iter() {
        for (j, c) in r.degree_histogram().0 {
            *sums.entry(j).or_insert(0) += c as i64;
        }
    }
    let rc = rset.len() as i64;
    Ok(sums.into_iter().map(|(j, s)| (j, Ratio::new(s, rc))).collect())
}

pub fn d2_sum(rset: &RectangulationSet) -> u64 {
    rset.iter().map(|r| r.degree_histogram().d2() as u64).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Eq2Check {
    /// Sum of d2 over all rectangulations of P.
    pub lhs: u64,
    /// Twice the sum of rc(P minus q) over q.
    pub rhs: u64,
    pub equal: bool,
}

/// Compares `Σ_G d2(G)` with `2 Σ_q rc(P \ {q})`, reusing an enumerated set.
pub fn eq2_from_set(
    rset: &RectangulationSet,
    enumerator: &Enumerator,
    cache: &RcCache,
) -> Result<Eq2Check, StatsError> {
    let config = rset.config();
    let lhs = d2_sum(rset);
    let mut rhs = 0;
    for q in 0..config.len() {
        let sub = config.without(q).expect("index in range");
        rhs += cache.rc(sub.perm(), enumerator)?;
    }
    let rhs = 2 * rhs;
    Ok(Eq2Check { lhs, rhs, equal: lhs == rhs })
}

pub fn verify_eq2(config: &PointConfig, enumerator: &Enumerator, cache: &RcCache) -> Result<Eq2Check, StatsError> {
    let rset = enumerator.backtracking(config)?;
    eq2_from_set(&rset, enumerator, cache)
}

#[derive(Clone, Debug, Serialize)]
pub struct RecurrenceReport {
    pub n: usize,
    pub max_rc: u64,
    pub max_rc_prev: u64,
    #[serde(serialize_with = "serialize_ratio")]
    pub ratio: Charge,
    /// `max rc(n) <= 17 max rc(n-1)`.
    pub within_factor_17: bool,
    /// `max rc(n) <= 17^n`.
    pub within_17_pow_n: bool,
    /// `2 / δ` with `δ = min_P d̂2(P) / n`, when the minimum was supplied.
    #[serde(serialize_with = "serialize_opt_ratio")]
    pub implied_factor: Option<Charge>,
}

/// Checks the recurrence between per-length maxima of `rc`.
/// `maxima` must contain `n` and, for `n >= 2`, `n - 1`; `rc` of the empty set is 1.
pub fn verify_recurrence(
    maxima: &BTreeMap<usize, u64>,
    n: usize,
    min_dhat2: Option<Charge>,
) -> Result<RecurrenceReport, StatsError> {
    let max_rc = *maxima.get(&n).ok_or(StatsError::MissingSweep(n))?;
    let max_rc_prev = if n <= 1 { 1 } else { *maxima.get(&(n - 1)).ok_or(StatsError::MissingSweep(n - 1))? };
    let pow = 17u128.checked_pow(n as u32);
    Ok(RecurrenceReport {
        n,
        max_rc,
        max_rc_prev,
        ratio: Ratio::new(max_rc as i64, max_rc_prev as i64),
        within_factor_17: max_rc as u128 <= 17 * max_rc_prev as u128,
        within_17_pow_n: pow.is_none_or(|p| max_rc as u128 <= p),
        implied_factor: min_dhat2
            .filter(|d| !d.is_zero())
            .map(|d| Charge::from_integer(2) / (d / Charge::from_integer(n as i64))),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeSumEntry {
    pub degree_sum: usize,
    pub endpoints_on_box: usize,
    pub within_4n: bool,
    /// `4n - degree_sum == endpoints_on_box`.
    pub deficit_matches: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeSumAudit {
    pub n: usize,
    pub entries: Vec<DegreeSumEntry>,
}

impl DegreeSumAudit {
    pub fn passes(&self) -> bool {
        self.entries.iter().all(|e| e.within_4n && e.deficit_matches)
    }
}

pub fn degree_sum_audit(rset: &RectangulationSet) -> DegreeSumAudit {
    let n = rset.config().len();
    let entries = rset
        .iter()
        .map(|r| {
            let degree_sum = r.degree_histogram().degree_sum();
            let endpoints_on_box = r.endpoints_on_box();
            DegreeSumEntry {
                degree_sum,
                endpoints_on_box,
                within_4n: degree_sum <= 4 * n,
                deficit_matches: 4 * n == degree_sum + endpoints_on_box,
            }
        })
        .collect();
    DegreeSumAudit { n, entries }
}

/// One claimed inequality with the observed value; `observed REL claimed`.
#[derive(Clone, Debug, Serialize)]
pub struct BoundCheck {
    pub name: String,
    pub relation: Relation,
    #[serde(serialize_with = "serialize_ratio")]
    pub claimed: Charge,
    #[serde(serialize_with = "serialize_ratio")]
    pub observed: Charge,
    pub pass: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "==")]
    Equal,
}

impl BoundCheck {
    pub fn new(name: impl Into<String>, relation: Relation, claimed: Charge, observed: Charge) -> Self {
        let pass = match relation {
            Relation::AtMost => observed <= claimed,
            Relation::AtLeast => observed >= claimed,
            Relation::Equal => observed == claimed,
        };
        BoundCheck { name: name.into(), relation, claimed, observed, pass }
    }

    /// Recomputes the verdict from the stored values.
    pub fn recheck(&self) -> bool {
        BoundCheck::new(self.name.clone(), self.relation, self.claimed, self.observed).pass
    }
}

/// Every exact check for one point set.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub perm: Vec<usize>,
    pub rc: usize,
    pub d2_sum: u64,
    pub dhat: BTreeMap<usize, String>,
    #[serde(skip)]
    pub dhat_exact: BTreeMap<usize, Charge>,
    pub eq2: Eq2Check,
    pub scheme_a: ChargeReport,
    pub scheme_b: ChargeReport,
    pub conserved: bool,
    pub preimages: PreimageAudit,
    pub quarter: QuarterAudit,
    pub degree_sums_ok: bool,
    pub bounds: Vec<BoundCheck>,
}

impl BoundReport {
    pub fn dhat2(&self) -> Charge {
        self.dhat_exact.get(&2).copied().unwrap_or_else(Charge::zero)
    }

    pub fn passes(&self) -> bool {
        self.bounds.iter().all(|b| b.pass)
            && self.eq2.equal
            && self.conserved
            && self.degree_sums_ok
            && self.preimages.violations.is_empty()
            && self.quarter.violations.is_empty()
            && self.scheme_a.chain_holds
            && self.scheme_b.chain_holds
            && self.scheme_a.bound_below_exact
            && self.scheme_b.bound_below_exact
            && self.scheme_a.stranded_segments == 0
            && self.scheme_b.stranded_segments == 0
    }

    /// Verdict for one charging scheme: its bounds, its audit, the charge
    /// chain and conservation.
    pub fn scheme_pass(&self, scheme: Scheme) -> bool {
        let (prefix, report, audit_clean) = match scheme {
            Scheme::A => ("A:", &self.scheme_a, self.preimages.violations.is_empty()),
            Scheme::B => ("B:", &self.scheme_b, self.quarter.violations.is_empty()),
        };
        self.bounds.iter().filter(|b| b.name.starts_with(prefix)).all(|b| b.pass)
            && audit_clean
            && report.chain_holds
            && report.bound_below_exact
            && report.stranded_segments == 0
            && self.conserved
            && self.degree_sums_ok
    }

    /// Names of the bounds that failed.
    pub fn failed_bounds(&self) -> Vec<&str> {
        self.bounds.iter().filter(|b| !b.pass).map(|b| b.name.as_str()).collect()
    }

    pub fn csv_header() -> [&'static str; 14] {
        [
            "perm",
            "rc",
            "d2sum",
            "dhat2_num",
            "dhat2_den",
            "eq2_lhs",
            "eq2_rhs",
            "maxChargeA_num",
            "maxChargeA_den",
            "maxChargeB_num",
            "maxChargeB_den",
            "eq2_pass",
            "schemeA_pass",
            "schemeB_pass",
        ]
    }

    pub fn csv_record(&self) -> Vec<String> {
        let ratio_parts = |r: Option<Charge>| match r {
            Some(r) => (r.numer().to_string(), r.denom().to_string()),
            None => (String::new(), String::new()),
        };
        let (a_num, a_den) = ratio_parts(self.scheme_a.max_degree2_charge);
        let (b_num, b_den) = ratio_parts(self.scheme_b.max_degree2_charge);
        let dhat2 = self.dhat2();
        vec![
            format_perm(&self.perm),
            self.rc.to_string(),
            self.d2_sum.to_string(),
            dhat2.numer().to_string(),
            dhat2.denom().to_string(),
            self.eq2.lhs.to_string(),
            self.eq2.rhs.to_string(),
            a_num,
            a_den,
            b_num,
            b_den,
            self.eq2.equal.to_string(),
            self.scheme_pass(Scheme::A).to_string(),
            self.scheme_pass(Scheme::B).to_string(),
        ]
    }
}

/// Runs enumeration, both charging schemes and every bound for one point set.
pub fn analyze(config: &PointConfig, enumerator: &Enumerator, cache: &RcCache) -> Result<BoundReport, StatsError> {
    let rset = enumerator.backtracking(config)?;
    analyze_set(&rset, enumerator, cache)
}

pub fn analyze_set(
    rset: &RectangulationSet,
    enumerator: &Enumerator,
    cache: &RcCache,
) -> Result<BoundReport, StatsError> {
    let n = rset.config().len();
    let n_r = Charge::from_integer(n as i64);
    let dhat_exact = expected_degrees(rset)?;
    let eq2 = eq2_from_set(rset, enumerator, cache)?;
    let run = run_scheme(rset, Scheme::B, enumerator.execution)?;
    let scheme_a = charge_report(&run.after_trim, rset);
    let scheme_b = charge_report(run.final_ledger(), rset);
    let initial = charge_report(&run.initial, rset);
    let audit = degree_sum_audit(rset);
    let dhat2 = dhat_exact.get(&2).copied().unwrap_or_else(Charge::zero);
    let zero = Charge::zero();

    let bounds = vec![
        BoundCheck::new(
            "A: min initial charge per rectangulation >= n",
            Relation::AtLeast,
            n_r,
            initial.min_initial_rect_sum,
        ),
        BoundCheck::new(
            "A: total charge >= n rc",
            Relation::AtLeast,
            n_r * Charge::from_integer(rset.len() as i64),
            run.initial.total(),
        ),
        BoundCheck::new(
            "A: max degree-2 charge after trim move <= 9",
            Relation::AtMost,
            Charge::from_integer(9),
            scheme_a.max_degree2_charge.unwrap_or(zero),
        ),
        BoundCheck::new("A: dhat2 >= n/9", Relation::AtLeast, n_r / Charge::from_integer(9), dhat2),
        BoundCheck::new(
            "B: max degree-2 charge after quarter move <= 17/2",
            Relation::AtMost,
            Charge::new(17, 2),
            scheme_b.max_degree2_charge.unwrap_or(zero),
        ),
        BoundCheck::new(
            "B: dhat2 >= 2n/17",
            Relation::AtLeast,
            Charge::from_integer(2) * n_r / Charge::from_integer(17),
            dhat2,
        ),
        BoundCheck::new("sum of dhat_j == n", Relation::Equal, n_r, dhat_exact.values().copied().sum()),
    ];

    Ok(BoundReport {
        perm: rset.config().perm().to_vec(),
        rc: rset.len(),
        d2_sum: d2_sum(rset),
        dhat: dhat_exact.iter().map(|(j, v)| (*j, v.to_string())).collect(),
        dhat_exact,
        eq2,
        scheme_a,
        scheme_b,
        conserved: run.conserved(),
        preimages: run.preimages,
        quarter: run.quarter.unwrap_or_default(),
        degree_sums_ok: audit.passes(),
        bounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::enumerate_backtracking;
    use crate::fixtures;

    #[test]
    fn expected_degrees_small() {
        let one = enumerate_backtracking(&fixtures::diagonal(1)).unwrap();
        assert_eq!(expected_degrees(&one).unwrap(), BTreeMap::from([(2, Charge::from_integer(1))]));
        let two = enumerate_backtracking(&fixtures::diagonal(2)).unwrap();
        let d = expected_degrees(&two).unwrap();
        assert_eq!(d[&2], Charge::new(4, 3));
        assert_eq!(d2_sum(&two), 8);
        assert_eq!(d.values().copied().sum::<Charge>(), Charge::from_integer(2));
    }

    #[test]
    fn empty_set_is_guarded() {
        let config = std::sync::Arc::new(fixtures::diagonal(1));
        let empty = RectangulationSet::from_members(config, vec![]);
        assert!(matches!(expected_degrees(&empty), Err(StatsError::Empty)));
    }

    #[test]
    fn eq2_small() {
        let e = Enumerator::default();
        let cache = RcCache::new();
        assert_eq!(verify_eq2(&fixtures::diagonal(1), &e, &cache).unwrap(), Eq2Check { lhs: 2, rhs: 2, equal: true });
        assert_eq!(verify_eq2(&fixtures::diagonal(2), &e, &cache).unwrap(), Eq2Check { lhs: 8, rhs: 8, equal: true });
    }

    #[test]
    fn recurrence_small() {
        let maxima = BTreeMap::from([(1, 2), (2, 6)]);
        let r1 = verify_recurrence(&maxima, 1, None).unwrap();
        assert!(r1.within_factor_17 && r1.within_17_pow_n);
        let r2 = verify_recurrence(&maxima, 2, Some(Charge::new(4, 3))).unwrap();
        assert_eq!(r2.ratio, Charge::from_integer(3));
        assert_eq!(r2.implied_factor, Some(Charge::from_integer(3)));
        assert!(matches!(verify_recurrence(&maxima, 4, None), Err(StatsError::MissingSweep(4))));
    }

    #[test]
    fn degree_sum_examples() {
        let one = enumerate_backtracking(&fixtures::diagonal(1)).unwrap();
        let audit = degree_sum_audit(&one);
        assert!(audit.entries.iter().all(|e| e.degree_sum == 2 && e.endpoints_on_box == 2));

        let pin = fixtures::pinwheel();
        assert_eq!(pin.degree_histogram().degree_sum(), 12);
        assert_eq!(pin.endpoints_on_box(), 4);

        let two = enumerate_backtracking(&fixtures::diagonal(2)).unwrap();
        let hh =
            two.iter().find(|r| r.segments().iter().all(|s| s.orientation == crate::Orientation::Horizontal)).unwrap();
        assert_eq!(hh.degree_histogram().degree_sum(), 4);
        assert_eq!(hh.endpoints_on_box(), 4);
    }

    #[test]
    fn analyze_single_point() {
        let r = analyze(&fixtures::diagonal(1), &Enumerator::default(), &RcCache::new()).unwrap();
        assert!(r.passes(), "{r:#?}");
        assert_eq!(r.rc, 2);
        assert_eq!(r.csv_record()[..7], ["1", "2", "2", "1", "1", "2", "2"].map(String::from));
        assert!(r.bounds.iter().all(|b| b.recheck() == b.pass));
    }
}
