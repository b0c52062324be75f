//! Algorithm selection by name and the common strategy interface.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Instance, Label, Outcome};
use crate::transcript::{RunResult, Session, TestKind};
use crate::upzigzag::UpZigZag;
use crate::{symmetric, upzigzag, zigzag};

/// Anything that classifies every item of an instance through the oracle.
pub trait Strategy: Sync {
    fn name(&self) -> &str;
    fn run(&self, instance: &Instance) -> Result<RunResult>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    /// One test per item; the baseline.
    Individual,
    Zd,
    Zu,
    Zc,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Individual,
        Algorithm::Zd,
        Algorithm::Zu,
        Algorithm::Zc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Individual => "individual",
            Algorithm::Zd => "zd",
            Algorithm::Zu => "zu",
            Algorithm::Zc => "zc",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                Error::Usage(format!(
                    "unknown algorithm `{s}` (expected individual, zd, zu or zc)"
                ))
            })
    }
}

impl Strategy for Algorithm {
    fn name(&self) -> &str {
        Algorithm::name(*self)
    }

    fn run(&self, instance: &Instance) -> Result<RunResult> {
        match self {
            Algorithm::Individual => run_individual(instance),
            Algorithm::Zd => zigzag::run(instance),
            Algorithm::Zu => upzigzag::run(instance),
            Algorithm::Zc => symmetric::run(instance),
        }
    }
}

impl Strategy for UpZigZag {
    fn name(&self) -> &str {
        "zu"
    }

    fn run(&self, instance: &Instance) -> Result<RunResult> {
        UpZigZag::run(self, instance)
    }
}

/// Tests every item on its own.
pub fn run_individual(instance: &Instance) -> Result<RunResult> {
    let mut session = Session::new(instance);
    for item in 0..instance.n() {
        let (seq, outcome) = session.test(&[item], TestKind::Driver, None, None)?;
        let label = match outcome {
            Outcome::Pure => Label::Good,
            Outcome::Contaminated => Label::Defective,
        };
        session.identify(item, label, Some(seq), true)?;
    }
    Ok(session.finish("individual"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transcript::finalize;

    #[test]
    fn names_round_trip() {
        for alg in Algorithm::ALL {
            assert_eq!(alg.name().parse::<Algorithm>().unwrap(), alg);
        }
        assert!(matches!("zz".parse::<Algorithm>(), Err(Error::Usage(_))));
    }

    #[test]
    fn individual_costs_n() {
        let inst = Instance::new(6, [1, 4]).unwrap();
        let run = Algorithm::Individual.run(&inst).unwrap();
        assert_eq!(run.tests_used, 6);
        finalize(&run, &inst).unwrap();
    }

    #[test]
    fn every_algorithm_reports_its_name() {
        let inst = Instance::new(5, [2]).unwrap();
        for alg in Algorithm::ALL {
            let run = Strategy::run(&alg, &inst).unwrap();
            assert_eq!(run.algorithm, alg.name());
            finalize(&run, &inst).unwrap();
        }
    }
}
