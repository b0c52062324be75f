use gtlab::analysis::{analyze_run, TupleType};
use gtlab::harness::enumerate::{choose, masks_from};
use gtlab::splitseq::{a_seq, four_split, four_way_sizes};
use gtlab::symmetric::Finisher;
use gtlab::{
    finalize, symmetric, upzigzag, zigzag, Algorithm, Instance, Session, Strategy, TestKind,
};

fn tests(alg: Algorithm, n: usize, defectives: &[usize]) -> usize {
    let inst = Instance::new(n, defectives.iter().copied()).unwrap();
    let run = alg.run(&inst).unwrap();
    finalize(&run, &inst).unwrap();
    run.tests_used
}

#[test]
fn every_mask_up_to_ten() {
    for alg in Algorithm::ALL {
        for n in 0..=10 {
            for d in 0..=n {
                for m in masks_from(n, d, 0, choose(n, d)).unwrap() {
                    let inst = Instance::from_mask(n, m).unwrap();
                    let run = alg.run(&inst).unwrap();
                    finalize(&run, &inst).unwrap_or_else(|e| panic!("{alg} n={n} mask={m:b}: {e}"));
                }
            }
        }
    }
}

#[test]
fn hand_traced_counts() {
    assert_eq!(tests(Algorithm::Zd, 4, &[]), 1);
    assert_eq!(tests(Algorithm::Zd, 1, &[0]), 1);
    assert_eq!(tests(Algorithm::Zd, 2, &[1]), 2);
    assert_eq!(tests(Algorithm::Zu, 1, &[0]), 1);
    assert_eq!(tests(Algorithm::Zu, 3, &[]), 2);
    assert_eq!(tests(Algorithm::Zu, 7, &[]), 4);
    assert_eq!(tests(Algorithm::Zc, 8, &[]), 4);
    assert_eq!(tests(Algorithm::Zc, 4, &[0, 1, 2, 3]), 8);
    assert_eq!(tests(Algorithm::Zc, 3, &[1]), 3);
    assert_eq!(tests(Algorithm::Individual, 5, &[0, 4]), 5);
}

#[test]
fn free_functions_match_the_enum() {
    let inst = Instance::new(40, [3, 17, 18, 30]).unwrap();
    assert_eq!(
        zigzag::run(&inst).unwrap(),
        Algorithm::Zd.run(&inst).unwrap()
    );
    assert_eq!(
        upzigzag::run(&inst).unwrap(),
        Algorithm::Zu.run(&inst).unwrap()
    );
    assert_eq!(
        symmetric::run(&inst).unwrap(),
        Algorithm::Zc.run(&inst).unwrap()
    );
}

#[test]
fn combined_strategy_hands_a_cleared_remainder_to_zig_zag() {
    let inst = Instance::new(8, [3]).unwrap();
    let run = symmetric::run(&inst).unwrap();
    let plan = run.plan.as_ref().unwrap();
    assert_eq!(plan.finisher, Finisher::DownZigZag);
    assert!(plan.zd_precondition_holds());
    assert!(run.zu_records.is_none());
}

#[test]
fn split_counts_on_full_pools() {
    // one defective at every position of a full pool, ranks 3..=7
    for k in 3..=7u32 {
        let len = a_seq(k);
        let [y, ..] = four_way_sizes(len, k);
        let items: Vec<usize> = (0..len).collect();
        for pos in 0..len {
            let inst = Instance::new(len, [pos]).unwrap();
            let mut s = Session::new(&inst);
            let (seq, _) = s.test(&items, TestKind::Driver, Some(k), None).unwrap();
            let out = four_split(&mut s, &items, k, Some(seq)).unwrap();
            assert_eq!(out.defective_found, Some(pos));
            let limit = if pos < y { k as usize - 1 } else { k as usize };
            assert!(
                out.tests_spent <= limit,
                "k={k} pos={pos}: {} > {limit}",
                out.tests_spent
            );
        }
    }
}

#[test]
fn known_tuple_budget_failure_is_reproducible() {
    let inst = Instance::new(9, [1, 6, 7]).unwrap();
    let run = upzigzag::run(&inst).unwrap();
    let a = analyze_run(&run).unwrap();
    assert_eq!(a.violations.len(), 1);
    let v = &a.violations[0];
    assert_eq!(v.check, "tuple_budget");
    assert_eq!(v.values["incurred"], 5.0);
    assert_eq!(v.values["identified"], 3.0);
    assert_eq!(v.values["defectives"], 2.0);
    let c = a.classification.unwrap();
    let t = c
        .tuples
        .iter()
        .find(|t| (t.pure_test, t.cont_test) == (1, 7))
        .unwrap();
    assert_eq!(t.tuple_type, TupleType::SplitAfterMixedPair);
}
