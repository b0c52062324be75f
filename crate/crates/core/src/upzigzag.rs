//! The up-zig-zag strategy: pools start at a single item and grow after
//! every pure answer, with dedicated handling of contaminated pairs and
//! triples and a whole-set check after a long pure streak.

use crate::error::{Error, Result};
use crate::instance::{Instance, Item, Label, Outcome};
use crate::splitseq::{a_seq, four_split};
use crate::transcript::{RunResult, Session, TestKind};

/// Length of the pure-status streak that triggers the whole-set test.
pub const STREAK_FOR_ADDITIONAL: u32 = 6;

/// Registers of the up-zig-zag machine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpZigZagState {
    pub remaining: Vec<Item>,
    /// Current pool-size index (the rank of the next driver test).
    pub k: u32,
    /// Consecutive pure-status driver tests since the last phase end.
    pub pure_streak: u32,
    /// Set after a contaminated pair resolved with exactly one defective;
    /// cleared at every phase end.
    pub mixed_pair: bool,
}

impl UpZigZagState {
    pub fn new(items: &[Item]) -> Self {
        UpZigZagState {
            remaining: items.to_vec(),
            k: 0,
            pure_streak: 0,
            mixed_pair: false,
        }
    }

    fn end_phase(&mut self) {
        self.pure_streak = 0;
        self.mixed_pair = false;
    }
}

fn expect_contaminated(items: &[Item], outcomes: &[Outcome]) -> Result<()> {
    if outcomes.iter().all(|o| !o.is_contaminated()) {
        return Err(Error::Internal(format!(
            "contaminated pool {items:?} tested pure item by item"
        )));
    }
    Ok(())
}

/// Resolves a contaminated pool of at most two items at index 1.
///
/// Both items are tested individually. One defective out of two counts as a
/// pure-status test: the index jumps to 2, the streak continues and the
/// mixed-pair flag is raised. Two defectives end the phase with index 0.
/// A lone leftover item is defective by the group answer alone.
pub fn two_test(
    session: &mut Session<'_>,
    pool: &[Item],
    state: &mut UpZigZagState,
    driver: usize,
) -> Result<Vec<(Item, Label)>> {
    match pool.len() {
        1 => {
            session.identify(pool[0], Label::Defective, Some(driver), true)?;
            state.k = 0;
            state.end_phase();
            Ok(vec![(pool[0], Label::Defective)])
        }
        2 => {
            let mut outcomes = Vec::with_capacity(2);
            for &item in pool {
                let (_, o) = session.test(&[item], TestKind::Incurred, None, Some(driver))?;
                outcomes.push(o);
            }
            expect_contaminated(pool, &outcomes)?;
            let labels: Vec<(Item, Label)> = pool
                .iter()
                .zip(&outcomes)
                .map(|(&i, o)| {
                    (
                        i,
                        if o.is_contaminated() {
                            Label::Defective
                        } else {
                            Label::Good
                        },
                    )
                })
                .collect();
            for &(item, label) in &labels {
                session.identify(item, label, Some(driver), true)?;
            }
            if outcomes.iter().all(|o| o.is_contaminated()) {
                state.k = 0;
                state.end_phase();
            } else {
                state.k = 2;
                state.pure_streak += 1;
                state.mixed_pair = true;
                session.set_status(driver, Outcome::Pure);
            }
            Ok(labels)
        }
        len => Err(Error::Precondition(format!(
            "2-Test expects one or two items, got {len}"
        ))),
    }
}

/// Resolves a contaminated pool of at most three items at index 2 right
/// after a mixed pair: every item is tested individually. Ends the phase
/// with index 1.
pub fn three_test(
    session: &mut Session<'_>,
    pool: &[Item],
    state: &mut UpZigZagState,
    driver: usize,
) -> Result<Vec<(Item, Label)>> {
    if pool.is_empty() || pool.len() > 3 {
        return Err(Error::Precondition(format!(
            "3-Test expects one to three items, got {}",
            pool.len()
        )));
    }
    let labels = if pool.len() == 1 {
        session.identify(pool[0], Label::Defective, Some(driver), true)?;
        vec![(pool[0], Label::Defective)]
    } else {
        let mut outcomes = Vec::with_capacity(pool.len());
        for &item in pool {
            let (_, o) = session.test(&[item], TestKind::Incurred, None, Some(driver))?;
            outcomes.push(o);
        }
        expect_contaminated(pool, &outcomes)?;
        let labels: Vec<(Item, Label)> = pool
            .iter()
            .zip(&outcomes)
            .map(|(&i, o)| {
                (
                    i,
                    if o.is_contaminated() {
                        Label::Defective
                    } else {
                        Label::Good
                    },
                )
            })
            .collect();
        for &(item, label) in &labels {
            session.identify(item, label, Some(driver), true)?;
        }
        labels
    };
    state.k = 1;
    state.end_phase();
    Ok(labels)
}

/// The up-zig-zag procedure with a pluggable pool-size schedule.
///
/// [`UpZigZag::default`] uses [`a_seq`]; other schedules exist for mutation
/// testing of the verification harness.
#[derive(Debug, Clone, Copy)]
pub struct UpZigZag {
    schedule: fn(u32) -> usize,
}

impl Default for UpZigZag {
    fn default() -> Self {
        UpZigZag { schedule: a_seq }
    }
}

impl UpZigZag {
    /// A schedule must return 1 at index 0 and at most `a_seq(k)` elsewhere.
    pub fn with_schedule(schedule: fn(u32) -> usize) -> Self {
        UpZigZag { schedule }
    }

    pub fn run_on(&self, session: &mut Session<'_>, items: &[Item]) -> Result<()> {
        let mut state = UpZigZagState::new(items);
        while !state.remaining.is_empty() {
            if state.pure_streak == STREAK_FOR_ADDITIONAL
                && state.remaining.len() > (self.schedule)(state.k)
            {
                let all = state.remaining.clone();
                let (seq, outcome) = session.test(&all, TestKind::Additional, None, None)?;
                if outcome == Outcome::Pure {
                    session.identify_all(&all, Label::Good, Some(seq), true)?;
                    state.remaining.clear();
                    break;
                }
            }

            let k = state.k;
            let size = (self.schedule)(k).min(state.remaining.len());
            let pool: Vec<Item> = state.remaining[..size].to_vec();
            let (seq, outcome) = session.test(&pool, TestKind::Driver, Some(k), None)?;
            if outcome == Outcome::Pure {
                session.identify_all(&pool, Label::Good, Some(seq), true)?;
                state.k += 1;
                state.pure_streak += 1;
            } else if k == 1 {
                two_test(session, &pool, &mut state, seq)?;
            } else if k == 2 && state.mixed_pair {
                three_test(session, &pool, &mut state, seq)?;
            } else {
                state.end_phase();
                if k == 0 {
                    if pool.len() != 1 {
                        return Err(Error::Internal(format!(
                            "index-0 pool holds {} items",
                            pool.len()
                        )));
                    }
                    session.identify(pool[0], Label::Defective, Some(seq), true)?;
                } else {
                    four_split(session, &pool, k, Some(seq))?;
                    state.k -= 1;
                }
            }
            state.remaining.retain(|&i| !session.is_identified(i));
        }
        Ok(())
    }

    pub fn run(&self, instance: &Instance) -> Result<RunResult> {
        let mut session = Session::new(instance);
        let items: Vec<Item> = (0..instance.n()).collect();
        self.run_on(&mut session, &items)?;
        let mut result = session.finish("zu");
        result.zu_records = Some(0..result.transcript.len());
        Ok(result)
    }
}

/// Runs the up-zig-zag procedure on `items`, recording into `session`.
pub fn run_zu(session: &mut Session<'_>, items: &[Item]) -> Result<()> {
    UpZigZag::default().run_on(session, items)
}

/// Standalone run on all items of `instance` in index order.
pub fn run(instance: &Instance) -> Result<RunResult> {
    UpZigZag::default().run(instance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transcript::finalize;

    fn state_at(k: u32, streak: u32, mixed: bool) -> UpZigZagState {
        UpZigZagState {
            remaining: vec![],
            k,
            pure_streak: streak,
            mixed_pair: mixed,
        }
    }

    fn driver(session: &mut Session<'_>, pool: &[Item], k: u32) -> usize {
        let (seq, o) = session.test(pool, TestKind::Driver, Some(k), None).unwrap();
        assert_eq!(o, Outcome::Contaminated);
        seq
    }

    #[test]
    fn mixed_pair_raises_index_and_flag() {
        let inst = Instance::new(2, [1]).unwrap();
        let mut s = Session::new(&inst);
        let seq = driver(&mut s, &[0, 1], 1);
        let mut st = state_at(1, 3, false);
        two_test(&mut s, &[0, 1], &mut st, seq).unwrap();
        assert_eq!((st.k, st.pure_streak, st.mixed_pair), (2, 4, true));
        assert_eq!(s.query_count(), 3);
        assert_eq!(s.transcript().records[seq].status, Outcome::Pure);
    }

    #[test]
    fn double_pair_resets() {
        let inst = Instance::new(2, [0, 1]).unwrap();
        let mut s = Session::new(&inst);
        let seq = driver(&mut s, &[0, 1], 1);
        let mut st = state_at(1, 3, true);
        two_test(&mut s, &[0, 1], &mut st, seq).unwrap();
        assert_eq!((st.k, st.pure_streak, st.mixed_pair), (0, 0, false));
        assert_eq!(s.transcript().records[seq].status, Outcome::Contaminated);
    }

    #[test]
    fn lone_item_pair_costs_nothing_extra() {
        let inst = Instance::new(1, [0]).unwrap();
        let mut s = Session::new(&inst);
        let seq = driver(&mut s, &[0], 1);
        let mut st = state_at(1, 2, false);
        let ids = two_test(&mut s, &[0], &mut st, seq).unwrap();
        assert_eq!(ids, vec![(0, Label::Defective)]);
        assert_eq!(s.query_count(), 1);
        assert_eq!(st.k, 0);
    }

    #[test]
    fn triple_tests_every_item() {
        for mask in [0b011u64, 0b111, 0b100] {
            let inst = Instance::from_mask(3, mask).unwrap();
            let mut s = Session::new(&inst);
            let seq = driver(&mut s, &[0, 1, 2], 2);
            let mut st = state_at(2, 4, true);
            three_test(&mut s, &[0, 1, 2], &mut st, seq).unwrap();
            assert_eq!(s.transcript().incurred_count(seq), 4);
            assert_eq!((st.k, st.pure_streak, st.mixed_pair), (1, 0, false));
        }
    }

    #[test]
    fn oversized_inputs_rejected() {
        let inst = Instance::new(4, [0]).unwrap();
        let mut s = Session::new(&inst);
        let mut st = state_at(1, 0, false);
        assert!(matches!(
            two_test(&mut s, &[0, 1, 2], &mut st, 0),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            three_test(&mut s, &[0, 1, 2, 3], &mut st, 0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn single_defective_item() {
        let inst = Instance::new(1, [0]).unwrap();
        let r = run(&inst).unwrap();
        assert_eq!(r.tests_used, 1);
        finalize(&r, &inst).unwrap();
    }

    #[test]
    fn three_good_items() {
        let inst = Instance::new(3, []).unwrap();
        let r = run(&inst).unwrap();
        assert_eq!(r.tests_used, 2);
        let sizes: Vec<_> = r.transcript.records.iter().map(|t| t.pool.len()).collect();
        assert_eq!(sizes, vec![1, 2]);
    }

    #[test]
    fn seven_good_items() {
        let inst = Instance::new(7, []).unwrap();
        let r = run(&inst).unwrap();
        let sizes: Vec<_> = r.transcript.records.iter().map(|t| t.pool.len()).collect();
        assert_eq!(sizes, vec![1, 2, 3, 1]);
    }

    #[test]
    fn additional_test_after_six_pure() {
        // 1+2+3+6+12+24 = 48 good items, then more remain beyond a_6 = 48
        let inst = Instance::new(100, [99]).unwrap();
        let r = run(&inst).unwrap();
        finalize(&r, &inst).unwrap();
        let add: Vec<_> = r
            .transcript
            .records
            .iter()
            .filter(|t| t.kind == TestKind::Additional)
            .collect();
        assert_eq!(add.len(), 1);
        assert_eq!(add[0].seq, 6);
        assert_eq!(add[0].raw_outcome, Outcome::Contaminated);
        assert_eq!(add[0].pool.len(), 52);
    }

    #[test]
    fn every_mask_up_to_ten_is_classified() {
        for n in 0..=10usize {
            for mask in 0..1u64 << n {
                let inst = Instance::from_mask(n, mask).unwrap();
                let r = run(&inst).unwrap();
                finalize(&r, &inst).unwrap();
            }
        }
    }
}
