//! Structural observations and per-class test budgets of a classified
//! up-zig-zag transcript.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::classes::{
    split_count_ceiling, split_size_floor, Accounting, Classification, TupleType,
};
use super::phases::Phase;
use crate::bounds::{competitive_form, SLACK};
use crate::instance::Outcome;
use crate::splitseq::a_seq;
use crate::transcript::Transcript;

/// Budget of the trailing all-pure phase.
pub const FINAL_PHASE_BUDGET: usize = 7;
/// Additive constant of the budget over every class but the final phase.
pub const LADDER_CONSTANT: f64 = 16.0;

/// A failed check together with the numbers that failed it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub check: String,
    pub detail: String,
    pub values: BTreeMap<String, f64>,
}

impl Violation {
    fn new(check: &str, detail: impl Into<String>, values: &[(&str, f64)]) -> Self {
        Violation {
            check: check.to_string(),
            detail: detail.into(),
            values: values.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }
}

/// `1.431·d·(log₂(n/d) + 1.1242)`.
fn budget(n: usize, d: usize) -> f64 {
    competitive_form(n as u64, d as u64, 0.0)
}

/// Phase count, tuple count and the shape of the unmatched pure tests.
///
/// `defectives` is the number of defectives the up-zig-zag run identified.
pub fn verify_observations(
    transcript: &Transcript,
    phases: &[Phase],
    c: &Classification,
    defectives: usize,
) -> Vec<Violation> {
    let mut out = Vec::new();

    if phases.len() > defectives + 1 {
        out.push(Violation::new(
            "phase_count",
            format!("{} phases for {defectives} defectives", phases.len()),
            &[
                ("phases", phases.len() as f64),
                ("defectives", defectives as f64),
            ],
        ));
    }

    if !c.valid {
        out.push(Violation::new(
            "partition",
            "classes do not partition the tests",
            &[],
        ));
    }

    // tuple count and membership
    let additional: BTreeSet<usize> = c.additional.iter().copied().collect();
    let non_additional = c.paired.iter().filter(|s| !additional.contains(s)).count();
    if non_additional != 2 * c.tuples.len() {
        out.push(Violation::new(
            "tuple_count",
            "paired tests do not split into tuples",
            &[
                ("paired", c.paired.len() as f64),
                ("additional", additional.len() as f64),
                ("tuples", c.tuples.len() as f64),
            ],
        ));
    }
    let mut members: BTreeMap<usize, usize> = BTreeMap::new();
    for t in &c.tuples {
        for s in [Some(t.pure_test), Some(t.cont_test), t.extra]
            .into_iter()
            .flatten()
        {
            *members.entry(s).or_default() += 1;
        }
    }
    let paired: BTreeSet<usize> = c.paired.iter().copied().collect();
    let keys: BTreeSet<usize> = members.keys().copied().collect();
    if keys != paired || members.values().any(|&m| m != 1) {
        out.push(Violation::new(
            "tuple_membership",
            "some paired test is not in exactly one tuple",
            &[],
        ));
    }

    // rank-zero tests: one item, found defective, no sub-tests
    let acc = Accounting::new(transcript);
    for &s in &c.rank_zero {
        let st = acc.get(s);
        let ok = transcript
            .record(s)
            .is_some_and(|r| r.rank == Some(0) && r.status == Outcome::Contaminated)
            && (st.incurred, st.identified, st.defectives) == (1, 1, 1);
        if !ok {
            out.push(Violation::new(
                "rank_zero_shape",
                format!("test {s}"),
                &[("seq", s as f64)],
            ));
        }
    }

    // tuple shapes at small ranks, on full-size pools
    for t in &c.tuples {
        let full = transcript
            .record(t.cont_test)
            .is_some_and(|r| r.pool.len() == a_seq(t.rank));
        let (i, n, d) = (t.incurred, t.identified, t.defectives);
        let ok = match t.tuple_type {
            _ if !full => true,
            TupleType::DefectivePair => (i, n, d) == (4, 3, 2),
            TupleType::TripleAfterPurePair => {
                (3..=4).contains(&i) && (3..=5).contains(&n) && d == 1
            }
            TupleType::TripleAfterMixedPair { triple_defectives } => {
                (i, n) == (7, 5)
                    && d == triple_defectives + 1
                    && (1..=3).contains(&triple_defectives)
            }
            TupleType::SplitAfterMixedPair => {
                (5..=6).contains(&i) && (3..=5).contains(&n) && d == 2
            }
            TupleType::Split { part } => {
                i <= split_count_ceiling(part, t.rank, t.extra.is_some())
                    && n >= split_size_floor(part, t.rank)
            }
        };
        // the count ceiling holds for truncated pools as well
        let count_ok = match t.tuple_type {
            TupleType::Split { part } => i <= split_count_ceiling(part, t.rank, t.extra.is_some()),
            _ => true,
        };
        if !ok || !count_ok {
            out.push(Violation::new(
                "tuple_shape",
                format!(
                    "tuple ({}, {}) of type {:?}",
                    t.pure_test, t.cont_test, t.tuple_type
                ),
                &[
                    ("rank", t.rank as f64),
                    ("incurred", i as f64),
                    ("identified", n as f64),
                    ("defectives", d as f64),
                ],
            ));
        }
    }

    // the ladder: pure tests of distinct consecutive ranks 0..=top
    let mut ranks = Vec::new();
    for &s in &c.ladder {
        match transcript.record(s) {
            Some(r) if r.status == Outcome::Pure && r.rank.is_some() => {
                ranks.push(r.rank.unwrap_or(0))
            }
            _ => out.push(Violation::new(
                "ladder_shape",
                format!("test {s} is not pure"),
                &[],
            )),
        }
    }
    ranks.sort_unstable();
    if ranks.iter().enumerate().any(|(i, &r)| r as usize != i) {
        out.push(Violation::new(
            "ladder_ranks",
            format!("ranks {ranks:?} are not 0, 1, 2, ..."),
            &[],
        ));
    }
    let top_cont = c.tuples.iter().map(|t| t.rank).max();
    if let (Some(&top_ladder), Some(top_cont)) = (ranks.last(), top_cont) {
        if top_ladder + 2 > top_cont {
            out.push(Violation::new(
                "ladder_gap",
                "highest ladder rank is not two below the highest contaminated rank",
                &[
                    ("ladder_top", top_ladder as f64),
                    ("contaminated_top", top_cont as f64),
                ],
            ));
        }
    }
    out
}

/// Test budgets per class and the recomposition of the total.
pub fn check_class_bounds(
    transcript: &Transcript,
    c: &Classification,
    defectives: usize,
) -> Vec<Violation> {
    let acc = Accounting::new(transcript);
    let mut out = Vec::new();

    let final_cost = acc.sum(&c.final_phase).incurred;
    if final_cost > FINAL_PHASE_BUDGET {
        out.push(Violation::new(
            "final_phase_budget",
            "trailing pure phase is too long",
            &[
                ("incurred", final_cost as f64),
                ("limit", FINAL_PHASE_BUDGET as f64),
            ],
        ));
    }

    for &s in &c.rank_zero {
        let st = acc.get(s);
        let limit = if st.identified == 0 {
            f64::NEG_INFINITY
        } else {
            crate::bounds::RATIO * ((st.identified as f64).log2() + crate::bounds::LOG_OFFSET)
        };
        if st.incurred as f64 >= limit {
            out.push(Violation::new(
                "rank_zero_budget",
                format!("test {s}"),
                &[
                    ("incurred", st.incurred as f64),
                    ("identified", st.identified as f64),
                    ("limit", limit),
                ],
            ));
        }
    }

    for t in &c.tuples {
        let limit = budget(t.identified, t.defectives);
        if t.defectives == 0 || t.incurred as f64 > limit + SLACK {
            out.push(Violation::new(
                "tuple_budget",
                format!(
                    "tuple ({}, {}) of type {:?}",
                    t.pure_test, t.cont_test, t.tuple_type
                ),
                &[
                    ("rank", t.rank as f64),
                    ("incurred", t.incurred as f64),
                    ("identified", t.identified as f64),
                    ("defectives", t.defectives as f64),
                    ("limit", limit),
                ],
            ));
        }
    }

    let zero_and_paired: Vec<usize> = c.rank_zero.iter().chain(&c.paired).copied().collect();
    let s = acc.sum(&zero_and_paired);
    let limit = budget(s.identified, s.defectives);
    if (s.defectives == 0 && s.incurred > 0)
        || (s.defectives > 0 && s.incurred as f64 > limit + SLACK)
    {
        out.push(Violation::new(
            "contaminated_budget",
            "rank-zero and paired tests exceed their joint budget",
            &[
                ("incurred", s.incurred as f64),
                ("identified", s.identified as f64),
                ("defectives", s.defectives as f64),
                ("limit", limit),
            ],
        ));
    }

    if defectives >= 3 {
        let all: Vec<usize> = zero_and_paired.iter().chain(&c.ladder).copied().collect();
        let s = acc.sum(&all);
        let limit = budget(s.identified, defectives) + LADDER_CONSTANT;
        if s.incurred as f64 > limit + SLACK {
            out.push(Violation::new(
                "non_final_budget",
                "all tests outside the final phase exceed their budget",
                &[
                    ("incurred", s.incurred as f64),
                    ("identified", s.identified as f64),
                    ("defectives", defectives as f64),
                    ("limit", limit),
                ],
            ));
        }
    }

    let recomposed = acc.sum(&c.final_phase).incurred
        + acc.sum(&c.rank_zero).incurred
        + acc.sum(&c.paired).incurred
        + acc.sum(&c.ladder).incurred;
    if recomposed != transcript.len() || acc.total_incurred() != transcript.len() {
        out.push(Violation::new(
            "recomposition",
            "class totals do not add up to the number of tests",
            &[
                ("classes", recomposed as f64),
                ("tests", transcript.len() as f64),
            ],
        ));
    }
    out
}
