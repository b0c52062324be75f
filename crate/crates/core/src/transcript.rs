//! Test transcripts, the per-run recording session and the final verdict.

use std::collections::BTreeMap;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Instance, Item, Label, Outcome, PoolOracle};
use crate::symmetric::ZcPlan;

/// Role a test plays in the run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    /// A schedule-driven test (zig-zag pool, round group test, individual test).
    Driver,
    /// Whole-remaining-set test fired after six consecutive pure-status tests.
    Additional,
    /// A sub-test issued while resolving a contaminated driver test.
    Incurred,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestRecord {
    pub seq: usize,
    pub pool: Vec<Item>,
    pub raw_outcome: Outcome,
    pub kind: TestKind,
    /// Pool-size index in effect when a zig-zag driver test was issued.
    pub rank: Option<u32>,
    /// Driver test this record was incurred by.
    pub parent: Option<usize>,
    /// Status after resolution; a size-2 pool holding exactly one defective
    /// counts as pure here.
    pub status: Outcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Identification {
    pub item: Item,
    pub label: Label,
    pub attributed_to: Option<usize>,
    /// False when the label was inferred without spending a query.
    pub via_test: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub records: Vec<TestRecord>,
    pub identifications: Vec<Identification>,
}

impl Transcript {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Looks a record up by seq; works on segments too.
    pub fn record(&self, seq: usize) -> Option<&TestRecord> {
        self.records
            .binary_search_by_key(&seq, |r| r.seq)
            .ok()
            .map(|i| &self.records[i])
    }

    /// Records belonging to `range` together with the identifications
    /// attributed to them. Sequence numbers are kept as-is.
    pub fn segment(&self, range: Range<usize>) -> Transcript {
        Transcript {
            records: self
                .records
                .iter()
                .filter(|r| range.contains(&r.seq))
                .cloned()
                .collect(),
            identifications: self
                .identifications
                .iter()
                .filter(|id| id.attributed_to.is_some_and(|s| range.contains(&s)))
                .cloned()
                .collect(),
        }
    }

    /// `|I(T)|`: the driver itself plus every record incurred by it.
    pub fn incurred_count(&self, seq: usize) -> usize {
        1 + self
            .records
            .iter()
            .filter(|r| r.kind == TestKind::Incurred && r.parent == Some(seq))
            .count()
    }

    /// Identifications attributed to the given test.
    pub fn identified_by(&self, seq: usize) -> impl Iterator<Item = &Identification> {
        self.identifications
            .iter()
            .filter(move |id| id.attributed_to == Some(seq))
    }
}

/// Mutable state of a single run: the oracle, the transcript under
/// construction and the labels assigned so far.
#[derive(Debug)]
pub struct Session<'a> {
    oracle: PoolOracle<'a>,
    transcript: Transcript,
    labels: Vec<Option<Label>>,
}

impl<'a> Session<'a> {
    pub fn new(instance: &'a Instance) -> Self {
        Session {
            oracle: PoolOracle::new(instance),
            transcript: Transcript::default(),
            labels: vec![None; instance.n()],
        }
    }

    pub fn instance(&self) -> &'a Instance {
        self.oracle.instance()
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn next_seq(&self) -> usize {
        self.transcript.records.len()
    }

    pub fn query_count(&self) -> usize {
        self.oracle.query_count()
    }

    /// Queries the oracle and appends the record. Status starts equal to
    /// the raw outcome.
    pub fn test(
        &mut self,
        pool: &[Item],
        kind: TestKind,
        rank: Option<u32>,
        parent: Option<usize>,
    ) -> Result<(usize, Outcome)> {
        if let Some(p) = parent {
            match self.transcript.records.get(p) {
                Some(r) if r.kind != TestKind::Incurred => {}
                _ => {
                    return Err(Error::Internal(format!(
                        "parent {p} is not an earlier driver test"
                    )))
                }
            }
        }
        let outcome = self.oracle.contaminated(pool)?;
        let seq = self.transcript.records.len();
        self.transcript.records.push(TestRecord {
            seq,
            pool: pool.to_vec(),
            raw_outcome: outcome,
            kind,
            rank,
            parent,
            status: outcome,
        });
        Ok((seq, outcome))
    }

    pub fn set_status(&mut self, seq: usize, status: Outcome) {
        if let Some(r) = self.transcript.records.get_mut(seq) {
            r.status = status;
        }
    }

    pub fn is_identified(&self, item: Item) -> bool {
        self.labels.get(item).is_some_and(Option::is_some)
    }

    pub fn identify(
        &mut self,
        item: Item,
        label: Label,
        attributed_to: Option<usize>,
        via_test: bool,
    ) -> Result<()> {
        match self.labels.get_mut(item) {
            None => Err(Error::Internal(format!("item {item} out of range"))),
            Some(Some(_)) => Err(Error::Internal(format!("item {item} identified twice"))),
            Some(slot) => {
                *slot = Some(label);
                self.transcript.identifications.push(Identification {
                    item,
                    label,
                    attributed_to,
                    via_test,
                });
                Ok(())
            }
        }
    }

    pub fn identify_all(
        &mut self,
        items: &[Item],
        label: Label,
        attributed_to: Option<usize>,
        via_test: bool,
    ) -> Result<()> {
        items
            .iter()
            .try_for_each(|&i| self.identify(i, label, attributed_to, via_test))
    }

    pub fn finish(self, algorithm: &str) -> RunResult {
        let classified = self
            .labels
            .iter()
            .enumerate()
            .filter_map(|(i, l)| l.map(|l| (i, l)))
            .collect();
        RunResult {
            algorithm: algorithm.to_string(),
            n: self.labels.len(),
            tests_used: self.oracle.query_count(),
            oracle_queries: self.oracle.query_count(),
            transcript: self.transcript,
            classified,
            zu_records: None,
            plan: None,
        }
    }
}

/// Outcome of one algorithm on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub algorithm: String,
    pub n: usize,
    pub tests_used: usize,
    pub oracle_queries: usize,
    pub transcript: Transcript,
    pub classified: BTreeMap<Item, Label>,
    /// Half-open range of record seqs issued by an up-zig-zag sub-run.
    pub zu_records: Option<Range<usize>>,
    /// Round bookkeeping of the combined algorithm.
    pub plan: Option<ZcPlan>,
}

impl RunResult {
    /// The up-zig-zag part of the transcript, if any.
    pub fn zu_transcript(&self) -> Option<Transcript> {
        self.zu_records
            .as_ref()
            .map(|r| self.transcript.segment(r.clone()))
    }
}

/// Checks a finished run against the ground truth: labels, test accounting
/// and the structural record invariants.
pub fn finalize(run: &RunResult, instance: &Instance) -> Result<()> {
    let records = &run.transcript.records;
    if run.tests_used != records.len() {
        return Err(Error::Accounting(format!(
            "tests_used = {} but transcript holds {} records",
            run.tests_used,
            records.len()
        )));
    }
    if run.oracle_queries != records.len() {
        return Err(Error::Accounting(format!(
            "oracle answered {} queries but transcript holds {} records",
            run.oracle_queries,
            records.len()
        )));
    }
    for (i, r) in records.iter().enumerate() {
        if r.seq != i {
            return Err(Error::Accounting(format!(
                "record {i} carries seq {}",
                r.seq
            )));
        }
        let truth = if r.pool.iter().any(|&x| instance.is_defective(x)) {
            Outcome::Contaminated
        } else {
            Outcome::Pure
        };
        if truth != r.raw_outcome {
            return Err(Error::Accounting(format!(
                "record {i} outcome {:?} disagrees with ground truth",
                r.raw_outcome
            )));
        }
        match r.kind {
            TestKind::Incurred => {
                let ok = r
                    .parent
                    .and_then(|p| records.get(p))
                    .is_some_and(|p| p.seq < r.seq && p.kind != TestKind::Incurred);
                if !ok {
                    return Err(Error::Accounting(format!(
                        "incurred record {i} has no earlier driver parent"
                    )));
                }
            }
            TestKind::Additional if r.rank.is_some() => {
                return Err(Error::Accounting(format!(
                    "additional record {i} has a rank"
                )));
            }
            _ => {}
        }
    }

    let mut seen = vec![false; instance.n()];
    for id in &run.transcript.identifications {
        match seen.get_mut(id.item) {
            None => {
                return Err(Error::Accounting(format!(
                    "identification of out-of-range item {}",
                    id.item
                )))
            }
            Some(true) => {
                return Err(Error::Accounting(format!(
                    "item {} identified more than once",
                    id.item
                )))
            }
            Some(s) => *s = true,
        }
        if run.classified.get(&id.item) != Some(&id.label) {
            return Err(Error::Accounting(format!(
                "identification of item {} disagrees with the classification",
                id.item
            )));
        }
    }

    for item in 0..instance.n() {
        let expected = instance.label(item);
        match run.classified.get(&item) {
            None => {
                return Err(Error::Accounting(format!("item {item} never classified")));
            }
            Some(&got) if got != expected => {
                return Err(Error::CorrectnessViolation {
                    item,
                    expected,
                    got,
                });
            }
            Some(_) => {}
        }
    }
    if run.classified.len() != instance.n() {
        return Err(Error::Accounting(format!(
            "{} labels for {} items",
            run.classified.len(),
            instance.n()
        )));
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Accounting(
            "an item has no identification record".into(),
        ));
    }
    Ok(())
}
