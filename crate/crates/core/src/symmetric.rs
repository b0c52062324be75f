//! The combined strategy: one or two rounds of four equal group tests, then
//! the zig-zag procedure when few parts are contaminated and the up-zig-zag
//! procedure when many are.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Instance, Item, Label, Outcome};
use crate::transcript::{RunResult, Session, TestKind};
use crate::{upzigzag, zigzag};

/// Which procedure finished the run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Finisher {
    /// Every item was identified by the round tests.
    Rounds,
    DownZigZag,
    UpZigZag,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecondRound {
    pub part_size: usize,
    pub leftover: usize,
    /// Absent when the parts are empty (`part_size = 0`).
    pub contaminated_parts: Option<usize>,
}

/// Round bookkeeping of a combined run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZcPlan {
    pub part_size: usize,
    pub leftover: usize,
    /// Absent when the parts are empty (`n < 4`).
    pub contaminated_parts: Option<usize>,
    pub second: Option<SecondRound>,
    pub finisher: Finisher,
    /// Items handed to the finishing procedure.
    pub handed_over: usize,
    /// Good items identified by the round group tests (individual tests excluded).
    pub round_goods: usize,
    /// Items covered by the round group tests.
    pub round_items: usize,
}

impl ZcPlan {
    /// The zig-zag finisher only runs after the group tests cleared at
    /// least three quarters of the items they covered.
    pub fn zd_precondition_holds(&self) -> bool {
        self.finisher != Finisher::DownZigZag || 4 * self.round_goods >= 3 * self.round_items
    }
}

fn test_individually(session: &mut Session<'_>, items: &[Item]) -> Result<()> {
    for &item in items {
        let (seq, outcome) = session.test(&[item], TestKind::Driver, None, None)?;
        let label = match outcome {
            Outcome::Pure => Label::Good,
            Outcome::Contaminated => Label::Defective,
        };
        session.identify(item, label, Some(seq), true)?;
    }
    Ok(())
}

/// Group-tests each of the four parts; returns the contaminated ones
/// concatenated in part order together with their count.
fn test_parts(session: &mut Session<'_>, parts: &[&[Item]]) -> Result<(Vec<Item>, usize)> {
    let mut merged = Vec::new();
    let mut count = 0;
    for part in parts {
        let (seq, outcome) = session.test(part, TestKind::Driver, None, None)?;
        match outcome {
            Outcome::Pure => session.identify_all(part, Label::Good, Some(seq), true)?,
            Outcome::Contaminated => {
                merged.extend_from_slice(part);
                count += 1;
            }
        }
    }
    Ok((merged, count))
}

fn quarters(items: &[Item], size: usize) -> [&[Item]; 4] {
    [0, 1, 2, 3].map(|v| &items[v * size..(v + 1) * size])
}

fn finish_with(
    session: &mut Session<'_>,
    finisher: Finisher,
    items: &[Item],
) -> Result<Option<Range<usize>>> {
    match finisher {
        Finisher::Rounds => Ok(None),
        Finisher::DownZigZag => zigzag::run_zd(session, items).map(|_| None),
        Finisher::UpZigZag => {
            let start = session.next_seq();
            upzigzag::run_zu(session, items)?;
            Ok(Some(start..session.next_seq()))
        }
    }
}

/// Runs the combined strategy on `items`. Returns the round plan and the
/// record range of the up-zig-zag sub-run, if one happened.
pub fn run_zc(session: &mut Session<'_>, items: &[Item]) -> Result<(ZcPlan, Option<Range<usize>>)> {
    let n = items.len();
    let part_size = n / 4;
    let leftover = n - 4 * part_size;
    let mut plan = ZcPlan {
        part_size,
        leftover,
        contaminated_parts: None,
        second: None,
        finisher: Finisher::Rounds,
        handed_over: 0,
        round_goods: 0,
        round_items: 0,
    };

    test_individually(session, &items[4 * part_size..])?;
    if part_size == 0 {
        return Ok((plan, None));
    }

    let (merged, alpha1) = test_parts(session, &quarters(items, part_size))?;
    plan.contaminated_parts = Some(alpha1);
    plan.round_items = 4 * part_size;
    plan.round_goods = (4 - alpha1) * part_size;

    let (finisher, rest): (Finisher, Vec<Item>) = match alpha1 {
        0 => (Finisher::Rounds, Vec::new()),
        1 => (Finisher::DownZigZag, merged),
        2 => {
            let size2 = part_size / 2;
            let leftover2 = 2 * part_size - 4 * size2;
            test_individually(session, &merged[4 * size2..])?;
            plan.round_items -= leftover2;
            if size2 == 0 {
                plan.second = Some(SecondRound {
                    part_size: 0,
                    leftover: leftover2,
                    contaminated_parts: None,
                });
                (Finisher::Rounds, Vec::new())
            } else {
                let (merged2, alpha2) = test_parts(session, &quarters(&merged, size2))?;
                plan.second = Some(SecondRound {
                    part_size: size2,
                    leftover: leftover2,
                    contaminated_parts: Some(alpha2),
                });
                plan.round_goods += (4 - alpha2) * size2;
                match alpha2 {
                    0 => {
                        return Err(Error::Internal(
                            "second round found no contaminated part".into(),
                        ))
                    }
                    1 | 2 => (Finisher::DownZigZag, merged2),
                    _ => (Finisher::UpZigZag, merged2),
                }
            }
        }
        _ => (Finisher::UpZigZag, merged),
    };

    plan.finisher = finisher;
    plan.handed_over = rest.len();
    if !plan.zd_precondition_holds() {
        return Err(Error::Internal(format!(
            "zig-zag finisher started with only {} of {} round items cleared",
            plan.round_goods, plan.round_items
        )));
    }
    let zu = finish_with(session, finisher, &rest)?;
    Ok((plan, zu))
}

/// Standalone run on all items of `instance` in index order.
pub fn run(instance: &Instance) -> Result<RunResult> {
    let mut session = Session::new(instance);
    let items: Vec<Item> = (0..instance.n()).collect();
    let (plan, zu) = run_zc(&mut session, &items)?;
    let mut result = session.finish("zc");
    result.plan = Some(plan);
    result.zu_records = zu;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transcript::finalize;

    #[test]
    fn eight_good_items_four_tests() {
        let inst = Instance::new(8, []).unwrap();
        let r = run(&inst).unwrap();
        assert_eq!(r.tests_used, 4);
        assert_eq!(r.plan.unwrap().contaminated_parts, Some(0));
    }

    #[test]
    fn four_defectives_of_four() {
        let inst = Instance::new(4, [0, 1, 2, 3]).unwrap();
        let r = run(&inst).unwrap();
        finalize(&r, &inst).unwrap();
        assert_eq!(r.tests_used, 8);
        let plan = r.plan.unwrap();
        assert_eq!(plan.finisher, Finisher::UpZigZag);
        assert_eq!(r.zu_records, Some(4..8));
        assert!(r.transcript.records[4..]
            .iter()
            .all(|t| t.rank == Some(0) && t.pool.len() == 1));
    }

    #[test]
    fn three_items_tested_individually() {
        let inst = Instance::new(3, [1]).unwrap();
        let r = run(&inst).unwrap();
        assert_eq!(r.tests_used, 3);
        assert_eq!(r.plan.as_ref().unwrap().contaminated_parts, None);
        finalize(&r, &inst).unwrap();
    }

    #[test]
    fn single_defective_of_eight() {
        let inst = Instance::new(8, [3]).unwrap();
        let r = run(&inst).unwrap();
        finalize(&r, &inst).unwrap();
        let plan = r.plan.unwrap();
        assert_eq!(plan.finisher, Finisher::DownZigZag);
        assert_eq!(plan.handed_over, 2);
    }

    #[test]
    fn no_defectives_at_most_seven_tests() {
        for n in 0..=64 {
            let inst = Instance::new(n, []).unwrap();
            let r = run(&inst).unwrap();
            assert!(r.tests_used <= 7, "n = {n}: {}", r.tests_used);
        }
    }

    #[test]
    fn every_mask_up_to_ten_is_classified() {
        for n in 0..=10usize {
            for mask in 0..1u64 << n {
                let inst = Instance::from_mask(n, mask).unwrap();
                let r = run(&inst).unwrap();
                finalize(&r, &inst).unwrap();
                assert!(r.plan.as_ref().unwrap().zd_precondition_holds());
            }
        }
    }
}
