//! Partition of an up-zig-zag transcript into the final phase, rank-zero
//! defectives, zig-zag tuples and the pure ladder, plus tuple typing.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::phases::Phase;
use crate::error::{Error, Result};
use crate::instance::{Label, Outcome};
use crate::splitseq::{a_seq, four_way_sizes};
use crate::transcript::{TestKind, TestRecord, Transcript};

/// `|I(T)|`, `n(T)` and the defectives among the identified items.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestStats {
    pub incurred: usize,
    pub identified: usize,
    pub defectives: usize,
}

impl std::ops::Add for TestStats {
    type Output = TestStats;
    fn add(self, o: TestStats) -> TestStats {
        TestStats {
            incurred: self.incurred + o.incurred,
            identified: self.identified + o.identified,
            defectives: self.defectives + o.defectives,
        }
    }
}

/// Per-test accounting of a transcript, keyed by seq of every driver and
/// additional test.
#[derive(Debug, Clone, Default)]
pub struct Accounting {
    stats: BTreeMap<usize, TestStats>,
}

impl Accounting {
    pub fn new(transcript: &Transcript) -> Self {
        let mut stats: BTreeMap<usize, TestStats> = transcript
            .records
            .iter()
            .filter(|r| r.kind != TestKind::Incurred)
            .map(|r| {
                let s = TestStats {
                    incurred: 1,
                    ..TestStats::default()
                };
                (r.seq, s)
            })
            .collect();
        for r in &transcript.records {
            if let (TestKind::Incurred, Some(p)) = (r.kind, r.parent) {
                if let Some(s) = stats.get_mut(&p) {
                    s.incurred += 1;
                }
            }
        }
        for id in &transcript.identifications {
            if let Some(s) = id.attributed_to.and_then(|a| stats.get_mut(&a)) {
                s.identified += 1;
                if id.label == Label::Defective {
                    s.defectives += 1;
                }
            }
        }
        Accounting { stats }
    }

    pub fn get(&self, seq: usize) -> TestStats {
        self.stats.get(&seq).copied().unwrap_or_default()
    }

    pub fn sum<'a>(&self, seqs: impl IntoIterator<Item = &'a usize>) -> TestStats {
        seqs.into_iter()
            .fold(TestStats::default(), |acc, &s| acc + self.get(s))
    }

    /// `Σ |I(T)|` over every driver and additional test.
    pub fn total_incurred(&self) -> usize {
        self.stats.values().map(|s| s.incurred).sum()
    }
}

/// Which of the four consecutive parts held the defective a 4-Split found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitPart {
    First,
    Second,
    Third,
    Fourth,
}

impl SplitPart {
    /// Lower bound on `n(P)` in units of `2^(v−3)`, minus the `+1`.
    fn size_units(self) -> usize {
        match self {
            SplitPart::First => 3,
            SplitPart::Second => 5,
            SplitPart::Third => 7,
            SplitPart::Fourth => 8,
        }
    }

    /// Extra tests beyond the rank in the incurred-count bound.
    fn count_slack(self) -> usize {
        match self {
            SplitPart::First => 1,
            _ => 2,
        }
    }
}

/// Shape of a zig-zag tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum TupleType {
    /// Pure single item, then a pair with both items defective.
    DefectivePair,
    /// Pure pair, then a triple resolved by 4-Split.
    TripleAfterPurePair,
    /// Pair with one defective, then a triple with every item tested.
    TripleAfterMixedPair { triple_defectives: usize },
    /// Pair with one defective, then, in a later phase, a triple resolved
    /// by 4-Split.
    SplitAfterMixedPair,
    /// Rank three or more; the contaminated pool went through 4-Split.
    Split { part: SplitPart },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZigZagTuple {
    /// Pure-status test of rank `rank − 1` on exactly `a_(rank−1)` items.
    pub pure_test: usize,
    /// Contaminated-status test of rank `rank`.
    pub cont_test: usize,
    /// Additional test in the same phase as `cont_test`.
    pub extra: Option<usize>,
    pub rank: u32,
    pub incurred: usize,
    pub identified: usize,
    pub defectives: usize,
    pub tuple_type: TupleType,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    /// Tests of the trailing all-pure phase.
    pub final_phase: Vec<usize>,
    /// Contaminated-status tests at rank 0.
    pub rank_zero: Vec<usize>,
    /// Tuple members and additional tests outside the final phase.
    pub paired: Vec<usize>,
    /// Everything else: pure tests left unmatched.
    pub ladder: Vec<usize>,
    pub tuples: Vec<ZigZagTuple>,
    /// Additional tests outside the final phase.
    pub additional: Vec<usize>,
    /// The four classes partition the driver and additional tests and every
    /// tuple has the required ranks, statuses and pool sizes.
    pub valid: bool,
}

fn is_mixed_pair(r: &TestRecord) -> bool {
    r.rank == Some(1) && r.raw_outcome == Outcome::Contaminated && r.status == Outcome::Pure
}

/// Assigns a shape to the pair `(pure, cont)`. Fails on combinations that
/// the up-zig-zag procedure cannot produce as a tuple.
pub fn type_tuple(transcript: &Transcript, pure: usize, cont: usize) -> Result<TupleType> {
    let get = |s: usize| {
        transcript
            .record(s)
            .ok_or_else(|| Error::Structural(format!("missing record {s}")))
    };
    let (p, c) = (get(pure)?, get(cont)?);
    let shape_err = || {
        Error::Structural(format!(
            "tests {pure} and {cont} do not form a recognised tuple"
        ))
    };
    let rank = c.rank.ok_or_else(shape_err)?;
    if p.rank != Some(rank.wrapping_sub(1))
        || p.status != Outcome::Pure
        || c.status != Outcome::Contaminated
    {
        return Err(shape_err());
    }
    match rank {
        0 => Err(shape_err()),
        1 => Ok(TupleType::DefectivePair),
        2 => {
            let sub_tests = transcript.incurred_count(cont) - 1;
            let every_item_tested = c.pool.len() == 1 || sub_tests == c.pool.len();
            let split_like = c.pool.len() == 1 || sub_tests < c.pool.len();
            if is_mixed_pair(p) && every_item_tested {
                let triple_defectives = transcript
                    .identified_by(cont)
                    .filter(|id| id.label == Label::Defective)
                    .count();
                Ok(TupleType::TripleAfterMixedPair { triple_defectives })
            } else if p.raw_outcome == Outcome::Pure && split_like {
                Ok(TupleType::TripleAfterPurePair)
            } else if is_mixed_pair(p) && split_like {
                Ok(TupleType::SplitAfterMixedPair)
            } else {
                Err(shape_err())
            }
        }
        v => {
            let found = transcript
                .identified_by(cont)
                .find(|id| id.label == Label::Defective)
                .ok_or_else(shape_err)?;
            let pos = c
                .pool
                .iter()
                .position(|&i| i == found.item)
                .ok_or_else(shape_err)?;
            let sizes = four_way_sizes(c.pool.len(), v);
            let mut end = 0;
            let parts = [
                SplitPart::First,
                SplitPart::Second,
                SplitPart::Third,
                SplitPart::Fourth,
            ];
            for (size, part) in sizes.into_iter().zip(parts) {
                end += size;
                if pos < end {
                    return Ok(TupleType::Split { part });
                }
            }
            Err(shape_err())
        }
    }
}

/// Partitions the tests of a segmented up-zig-zag transcript.
///
/// Each contaminated-status test of positive rank is matched with a pure
/// test one rank lower on a full-size pool: first inside its own phase,
/// then, in sequence order, with the earliest unmatched pure test anywhere
/// that yields a recognised tuple shape.
pub fn classify(transcript: &Transcript, phases: &[Phase]) -> Result<Classification> {
    let acc = Accounting::new(transcript);
    let rec = |s: usize| {
        transcript
            .record(s)
            .ok_or_else(|| Error::Structural(format!("missing record {s}")))
    };

    let final_phase: Vec<usize> = phases
        .last()
        .filter(|p| !p.closed)
        .map(|p| p.tests.clone())
        .unwrap_or_default();
    let in_final: BTreeSet<usize> = final_phase.iter().copied().collect();

    let mut phase_of = BTreeMap::new();
    for p in phases {
        for &s in &p.tests {
            phase_of.insert(s, p.index);
        }
    }

    let mut rank_zero = Vec::new();
    let mut additional = Vec::new();
    let mut to_match = Vec::new();
    let mut pure_pool = Vec::new();
    for p in phases {
        for &s in &p.tests {
            if in_final.contains(&s) {
                continue;
            }
            let r = rec(s)?;
            match (r.kind, r.status, r.rank) {
                (TestKind::Additional, _, _) => additional.push(s),
                (_, Outcome::Contaminated, Some(0)) => rank_zero.push(s),
                (_, Outcome::Contaminated, Some(_)) => to_match.push(s),
                (_, Outcome::Pure, Some(_)) => pure_pool.push(s),
                _ => return Err(Error::Structural(format!("test {s} has no rank"))),
            }
        }
    }

    let fits = |pure: usize, cont: usize| -> Result<bool> {
        let (p, c) = (rec(pure)?, rec(cont)?);
        let v = c.rank.unwrap_or(0);
        Ok(v >= 1 && p.rank == Some(v - 1) && p.pool.len() == a_seq(v - 1))
    };

    let mut partner: BTreeMap<usize, usize> = BTreeMap::new();
    let mut used: BTreeSet<usize> = BTreeSet::new();
    // same phase first
    for &c in &to_match {
        for &p in &pure_pool {
            if phase_of.get(&p) == phase_of.get(&c) && !used.contains(&p) && fits(p, c)? {
                partner.insert(c, p);
                used.insert(p);
                break;
            }
        }
    }
    // then anywhere, earliest first, preferring recognised shapes
    for &c in &to_match {
        if partner.contains_key(&c) {
            continue;
        }
        let mut fallback = None;
        let mut chosen = None;
        for &p in &pure_pool {
            if used.contains(&p) || !fits(p, c)? {
                continue;
            }
            if type_tuple(transcript, p, c).is_ok() {
                chosen = Some(p);
                break;
            }
            fallback.get_or_insert(p);
        }
        match chosen.or(fallback) {
            Some(p) => {
                partner.insert(c, p);
                used.insert(p);
            }
            None => {
                return Err(Error::Structural(format!(
                    "no pure partner for contaminated test {c}"
                )))
            }
        }
    }

    let mut tuples = Vec::new();
    let mut valid = true;
    for &c in &to_match {
        let p = partner[&c];
        let extra = additional
            .iter()
            .copied()
            .find(|a| phase_of.get(a) == phase_of.get(&c));
        let tuple_type = type_tuple(transcript, p, c)?;
        let stats = acc.get(p) + acc.get(c);
        let cr = rec(c)?;
        valid &= fits(p, c)? && rec(p)?.status == Outcome::Pure;
        tuples.push(ZigZagTuple {
            pure_test: p,
            cont_test: c,
            extra,
            rank: cr.rank.unwrap_or(0),
            incurred: stats.incurred + usize::from(extra.is_some()),
            identified: stats.identified,
            defectives: stats.defectives,
            tuple_type,
        });
    }

    let mut paired: Vec<usize> = additional
        .iter()
        .copied()
        .chain(to_match.iter().copied())
        .chain(used.iter().copied())
        .collect();
    paired.sort_unstable();
    let ladder: Vec<usize> = pure_pool
        .iter()
        .copied()
        .filter(|p| !used.contains(p))
        .collect();

    let mut seen = BTreeSet::new();
    let all = final_phase
        .iter()
        .chain(&rank_zero)
        .chain(&paired)
        .chain(&ladder);
    for &s in all {
        valid &= seen.insert(s);
    }
    let expected: BTreeSet<usize> = phases
        .iter()
        .flat_map(|p| p.tests.iter().copied())
        .collect();
    valid &= seen == expected;

    Ok(Classification {
        final_phase,
        rank_zero,
        paired,
        ladder,
        tuples,
        additional,
        valid,
    })
}

/// Lower bound on `n(P)` for a full-size tuple of rank `v ≥ 3` whose
/// defective sat in `part`.
pub fn split_size_floor(part: SplitPart, v: u32) -> usize {
    part.size_units() * (1usize << (v - 3)) + 1
}

/// Upper bound on `|I(P)|` for a tuple of rank `v ≥ 3`.
pub fn split_count_ceiling(part: SplitPart, v: u32, extra: bool) -> usize {
    usize::from(extra) + v as usize + part.count_slack()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::phases::segment_phases;
    use crate::instance::Instance;
    use crate::upzigzag;

    fn classify_run(n: usize, defectives: &[usize]) -> (Transcript, Classification) {
        let inst = Instance::new(n, defectives.iter().copied()).unwrap();
        let run = upzigzag::run(&inst).unwrap();
        let phases = segment_phases(&run.transcript).unwrap();
        let c = classify(&run.transcript, &phases).unwrap();
        (run.transcript, c)
    }

    #[test]
    fn no_defectives_leaves_only_final_phase() {
        let (_, c) = classify_run(30, &[]);
        assert!(c.rank_zero.is_empty() && c.paired.is_empty() && c.ladder.is_empty());
        assert!(c.final_phase.len() <= 7);
        assert!(c.valid);
    }

    #[test]
    fn pair_of_defectives_after_pure_single() {
        // x0 pure at rank 0, {x1, x2} contaminated at rank 1 with both defective
        let (_, c) = classify_run(3, &[1, 2]);
        assert_eq!(c.tuples.len(), 1);
        let t = &c.tuples[0];
        assert_eq!(t.tuple_type, TupleType::DefectivePair);
        assert_eq!((t.incurred, t.identified, t.defectives), (4, 3, 2));
    }

    #[test]
    fn mixed_pair_then_triple() {
        // x0 pure, {x1, x2} with x2 defective, then {x3, x4, x5} contaminated
        let (_, c) = classify_run(6, &[2, 4]);
        let t = c.tuples.iter().find(|t| t.rank == 2).expect("rank-2 tuple");
        assert_eq!(
            t.tuple_type,
            TupleType::TripleAfterMixedPair {
                triple_defectives: 1
            }
        );
        assert_eq!((t.incurred, t.identified, t.defectives), (7, 5, 2));
    }

    #[test]
    fn pure_pair_then_split_triple() {
        let (_, c) = classify_run(6, &[5]);
        let t = c.tuples.iter().find(|t| t.rank == 2).unwrap();
        assert_eq!(t.tuple_type, TupleType::TripleAfterPurePair);
        assert_eq!(t.defectives, 1);
        assert!((3..=4).contains(&t.incurred));
    }

    #[test]
    fn split_part_is_read_from_the_defective_position() {
        // pools 1, 2, 3, 6, 12: the rank-4 pool holds items 12..24
        let (_, c) = classify_run(24, &[23]);
        let t = c.tuples.iter().find(|t| t.rank == 4).unwrap();
        assert_eq!(
            t.tuple_type,
            TupleType::Split {
                part: SplitPart::Fourth
            }
        );
        assert!(t.identified >= split_size_floor(SplitPart::Fourth, 4));
        assert!(t.incurred <= split_count_ceiling(SplitPart::Fourth, 4, false));
    }

    #[test]
    fn rank_zero_defectives() {
        let (_, c) = classify_run(2, &[0, 1]);
        assert_eq!(c.rank_zero, vec![0, 1]);
        assert!(c.valid);
    }
}
