//! Runtime bookkeeping for up-zig-zag transcripts: phases, the four-way
//! partition of the tests, zig-zag tuples and the budget checks on them.
//!
//! When the up-zig-zag procedure runs inside the combined strategy only its
//! own records are analyzed.

pub mod checks;
pub mod classes;
pub mod phases;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use checks::{check_class_bounds, verify_observations, Violation};
pub use classes::{classify, type_tuple, Classification, SplitPart, TupleType, ZigZagTuple};
pub use phases::{segment_phases, Phase};

use crate::instance::{Instance, Label};
use crate::transcript::{RunResult, Transcript};

/// Everything the analyzer derived from one transcript.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub phases: Vec<Phase>,
    pub classification: Option<Classification>,
    pub defectives: usize,
    pub violations: Vec<Violation>,
}

impl Analysis {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Dump written for every failed check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub instance: Instance,
    pub transcript: Transcript,
    pub failed_check: String,
    pub values: BTreeMap<String, serde_json::Value>,
}

impl Counterexample {
    pub fn new(instance: &Instance, transcript: &Transcript, v: &Violation) -> Self {
        let mut values: BTreeMap<String, serde_json::Value> = v
            .values
            .iter()
            .map(|(k, x)| (k.clone(), serde_json::json!(x)))
            .collect();
        values.insert("detail".into(), serde_json::json!(v.detail));
        Counterexample {
            instance: instance.clone(),
            transcript: transcript.clone(),
            failed_check: v.check.clone(),
            values,
        }
    }
}

/// Runs every analysis step on an up-zig-zag transcript. Structural
/// failures are reported as violations rather than errors.
pub fn analyze_transcript(transcript: &Transcript) -> Analysis {
    let defectives = transcript
        .identifications
        .iter()
        .filter(|id| id.label == Label::Defective)
        .count();
    let mut analysis = Analysis {
        phases: Vec::new(),
        classification: None,
        defectives,
        violations: Vec::new(),
    };
    let structural = |check: &str, e: crate::Error| Violation {
        check: check.to_string(),
        detail: e.to_string(),
        values: BTreeMap::new(),
    };
    match segment_phases(transcript) {
        Ok(p) => analysis.phases = p,
        Err(e) => {
            analysis.violations.push(structural("phase_grammar", e));
            return analysis;
        }
    }
    match classify(transcript, &analysis.phases) {
        Ok(c) => {
            analysis.violations.extend(verify_observations(
                transcript,
                &analysis.phases,
                &c,
                defectives,
            ));
            analysis
                .violations
                .extend(check_class_bounds(transcript, &c, defectives));
            analysis.classification = Some(c);
        }
        Err(e) => analysis.violations.push(structural("classification", e)),
    }
    analysis
}

/// Analyzes the up-zig-zag part of a run, if it has one.
pub fn analyze_run(run: &RunResult) -> Option<Analysis> {
    run.zu_transcript().map(|t| analyze_transcript(&t))
}
