//! Phase segmentation of an up-zig-zag transcript.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Outcome;
use crate::transcript::{TestKind, TestRecord, Transcript};
use crate::upzigzag::STREAK_FOR_ADDITIONAL;

/// A maximal run of driver and additional tests ending at a
/// contaminated-status driver test, or at the end of the transcript.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Phase {
    pub index: usize,
    /// Driver and additional test seqs in order.
    pub tests: Vec<usize>,
    /// False for a trailing phase in which every test is pure.
    pub closed: bool,
}

fn is_top_level(r: &TestRecord) -> bool {
    r.kind != TestKind::Incurred
}

fn closes_phase(r: &TestRecord) -> bool {
    r.kind == TestKind::Driver && r.status == Outcome::Contaminated
}

fn structural(phase: usize, msg: impl std::fmt::Display) -> Error {
    Error::Structural(format!("phase {phase}: {msg}"))
}

/// Splits the driver and additional tests into phases and checks the phase
/// grammar: pure-status tests except a contaminated additional test at the
/// seventh position and the closing test, and ranks that grow by one per
/// driver test inside a phase.
pub fn segment_phases(transcript: &Transcript) -> Result<Vec<Phase>> {
    let mut phases = Vec::new();
    let mut current = Vec::new();
    for r in transcript.records.iter().filter(|r| is_top_level(r)) {
        current.push(r.seq);
        if closes_phase(r) {
            phases.push(Phase {
                index: phases.len(),
                tests: std::mem::take(&mut current),
                closed: true,
            });
        }
    }
    if !current.is_empty() {
        phases.push(Phase {
            index: phases.len(),
            tests: current,
            closed: false,
        });
    }

    let last_seq = transcript.records.last().map(|r| r.seq);
    let mut first_driver = true;
    for phase in &phases {
        let mut prev_rank: Option<u32> = None;
        let mut additional_seen = false;
        for (pos, &seq) in phase.tests.iter().enumerate() {
            let r = transcript
                .record(seq)
                .ok_or_else(|| structural(phase.index, format!("missing record {seq}")))?;
            let is_last = pos + 1 == phase.tests.len();
            match r.kind {
                TestKind::Additional => {
                    if additional_seen || pos != STREAK_FOR_ADDITIONAL as usize {
                        return Err(structural(
                            phase.index,
                            format!("additional test {seq} at position {}", pos + 1),
                        ));
                    }
                    additional_seen = true;
                    if r.rank.is_some() {
                        return Err(structural(
                            phase.index,
                            format!("additional test {seq} has a rank"),
                        ));
                    }
                    if r.raw_outcome == Outcome::Pure && Some(seq) != last_seq {
                        return Err(structural(
                            phase.index,
                            format!("pure additional test {seq} is not the last test"),
                        ));
                    }
                }
                TestKind::Driver => {
                    let rank = r.rank.ok_or_else(|| {
                        structural(phase.index, format!("driver test {seq} has no rank"))
                    })?;
                    if first_driver && rank != 0 {
                        return Err(structural(
                            phase.index,
                            "first driver test is not at rank 0",
                        ));
                    }
                    first_driver = false;
                    if let Some(p) = prev_rank {
                        if rank != p + 1 {
                            return Err(structural(
                                phase.index,
                                format!("rank jumps from {p} to {rank} at test {seq}"),
                            ));
                        }
                    }
                    prev_rank = Some(rank);
                    if r.status == Outcome::Contaminated && !is_last {
                        return Err(structural(
                            phase.index,
                            format!("contaminated test {seq} inside the phase"),
                        ));
                    }
                }
                TestKind::Incurred => unreachable!("filtered above"),
            }
        }
    }
    Ok(phases)
}
