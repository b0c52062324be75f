//! Worst-case test counts over every (or a sample of) defective sets.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::enumerate::{choose, masks_from, MAX_MASK_BITS};
use super::grid::{bound_checks, BoundCheck};
use super::pool;
use crate::algorithm::Strategy;
use crate::analysis::{analyze_run, Counterexample};
use crate::error::{Error, Result};
use crate::instance::{Instance, Item};
use crate::transcript::finalize;

/// Default ceiling on `C(n, d)` for exhaustive enumeration.
pub const DEFAULT_CAP: u64 = 10_000_000;
/// Counterexamples kept per cell.
pub const MAX_COUNTEREXAMPLES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Mode {
    Exhaustive,
    Sampled { count: u64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WorstCaseOptions {
    pub cap: u64,
    /// Run the transcript analysis on every up-zig-zag (sub-)run.
    pub analyze: bool,
}

impl Default for WorstCaseOptions {
    fn default() -> Self {
        WorstCaseOptions {
            cap: DEFAULT_CAP,
            analyze: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisSummary {
    pub runs_analyzed: u64,
    pub violating_runs: u64,
    pub counterexamples: Vec<Counterexample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstCaseCell {
    pub algorithm: String,
    pub n: usize,
    pub d: usize,
    pub worst_tests: usize,
    /// Defective set of the first enumerated instance reaching the maximum.
    pub argmax_mask: Vec<Item>,
    pub mode: Mode,
    pub runs: u64,
    /// True in sampled mode: the maximum is only a lower estimate.
    pub lower_estimate: bool,
    /// Empty in sampled mode.
    pub bound_values: Vec<BoundCheck>,
    pub analysis: Option<AnalysisSummary>,
}

impl WorstCaseCell {
    /// No asserted bound failed and the analysis found nothing.
    pub fn passed(&self) -> bool {
        self.bound_values.iter().all(|b| b.pass || !b.asserted)
            && self.analysis.as_ref().is_none_or(|a| a.violating_runs == 0)
    }
}

/// Partial aggregate over a slice of the enumeration; `key` orders instances
/// (the mask in exhaustive mode, the sample index otherwise).
#[derive(Debug, Default)]
struct Acc {
    worst: Option<(usize, u64, Vec<Item>)>,
    runs: u64,
    analyzed: u64,
    violating: u64,
    cx: Vec<(u64, Counterexample)>,
    failure: Option<(u64, Error)>,
}

impl Acc {
    fn merge(mut self, o: Acc) -> Acc {
        self.worst = match (self.worst, o.worst) {
            (Some(a), Some(b)) => Some(
                if (b.0, std::cmp::Reverse(b.1)) > (a.0, std::cmp::Reverse(a.1)) {
                    b
                } else {
                    a
                },
            ),
            (a, b) => a.or(b),
        };
        self.runs += o.runs;
        self.analyzed += o.analyzed;
        self.violating += o.violating;
        self.cx.extend(o.cx);
        self.cx.sort_by_key(|(k, _)| *k);
        self.cx.truncate(MAX_COUNTEREXAMPLES);
        self.failure = match (self.failure, o.failure) {
            (Some(a), Some(b)) => Some(if b.0 < a.0 { b } else { a }),
            (a, b) => a.or(b),
        };
        self
    }

    fn visit(&mut self, strategy: &dyn Strategy, key: u64, instance: Instance, analyze: bool) {
        if self.failure.is_some() {
            return;
        }
        let fail = |e: Error| Error::RunFailed {
            defectives: instance.defectives().to_vec(),
            cause: Box::new(e),
        };
        let run = match strategy
            .run(&instance)
            .and_then(|r| finalize(&r, &instance).map(|_| r))
        {
            Ok(r) => r,
            Err(e) => {
                self.failure = Some((key, fail(e)));
                return;
            }
        };
        self.runs += 1;
        let t = run.tests_used;
        let better = match &self.worst {
            None => true,
            Some((w, k, _)) => t > *w || (t == *w && key < *k),
        };
        if analyze {
            if let Some(a) = analyze_run(&run) {
                self.analyzed += 1;
                if !a.passed() {
                    self.violating += 1;
                    if self.cx.len() < MAX_COUNTEREXAMPLES {
                        let zu = run.zu_transcript().unwrap_or_default();
                        self.cx
                            .push((key, Counterexample::new(&instance, &zu, &a.violations[0])));
                    }
                }
            }
        }
        if better {
            self.worst = Some((t, key, instance.defectives().to_vec()));
        }
    }
}

/// Worst number of tests `strategy` spends on `n` items with `d`
/// defectives. Every run is checked against the ground truth; the first
/// failing instance (in enumeration order) aborts with its defective set.
pub fn worst_case(
    strategy: &dyn Strategy,
    n: usize,
    d: usize,
    mode: Mode,
    options: WorstCaseOptions,
) -> Result<WorstCaseCell> {
    if d > n {
        return Err(Error::Usage(format!("d = {d} exceeds n = {n}")));
    }
    let acc = match mode {
        Mode::Exhaustive => {
            if n > MAX_MASK_BITS {
                return Err(Error::LimitExceeded(format!(
                    "exhaustive mode supports n ≤ {MAX_MASK_BITS}"
                )));
            }
            let total = choose(n, d);
            if total > options.cap {
                return Err(Error::LimitExceeded(format!(
                    "C({n}, {d}) = {total} exceeds the exhaustive cap {}",
                    options.cap
                )));
            }
            let chunk = (total / (super::worker_count() as u64 * 16)).max(256);
            let chunks = total.div_ceil(chunk);
            pool().install(|| {
                (0..chunks)
                    .into_par_iter()
                    .map(|c| {
                        let start = c * chunk;
                        let len = chunk.min(total - start);
                        let mut acc = Acc::default();
                        match masks_from(n, d, start, len) {
                            Ok(masks) => {
                                for m in masks {
                                    match Instance::from_mask(n, m) {
                                        Ok(inst) => acc.visit(strategy, m, inst, options.analyze),
                                        Err(e) => acc.failure = Some((m, e)),
                                    }
                                }
                            }
                            Err(e) => acc.failure = Some((start, e)),
                        }
                        acc
                    })
                    .reduce(Acc::default, Acc::merge)
            })
        }
        Mode::Sampled { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let samples: Vec<Vec<Item>> = (0..count)
                .map(|_| {
                    let mut v = sample(&mut rng, n, d).into_vec();
                    v.sort_unstable();
                    v
                })
                .collect();
            pool().install(|| {
                samples
                    .par_iter()
                    .enumerate()
                    .map(|(i, s)| {
                        let mut acc = Acc::default();
                        match Instance::new(n, s.iter().copied()) {
                            Ok(inst) => acc.visit(strategy, i as u64, inst, options.analyze),
                            Err(e) => acc.failure = Some((i as u64, e)),
                        }
                        acc
                    })
                    .reduce(Acc::default, Acc::merge)
            })
        }
    };

    if let Some((_, e)) = acc.failure {
        return Err(e);
    }
    let (worst_tests, _, argmax_mask) = acc.worst.unwrap_or((0, 0, Vec::new()));
    let exhaustive = mode == Mode::Exhaustive;
    let bound_values = if exhaustive {
        bound_checks(strategy.name(), n, d, worst_tests)
    } else {
        Vec::new()
    };
    Ok(WorstCaseCell {
        algorithm: strategy.name().to_string(),
        n,
        d,
        worst_tests,
        argmax_mask,
        mode,
        runs: acc.runs,
        lower_estimate: !exhaustive,
        bound_values,
        analysis: (options.analyze && acc.analyzed > 0).then(|| AnalysisSummary {
            runs_analyzed: acc.analyzed,
            violating_runs: acc.violating,
            counterexamples: acc.cx.into_iter().map(|(_, c)| c).collect(),
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithm::Algorithm;

    #[test]
    fn individual_worst_is_n() {
        for d in 0..=6 {
            let cell = worst_case(
                &Algorithm::Individual,
                6,
                d,
                Mode::Exhaustive,
                Default::default(),
            )
            .unwrap();
            assert_eq!(cell.worst_tests, 6);
            assert_eq!(cell.runs, choose(6, d));
        }
    }

    #[test]
    fn argmax_is_the_smallest_maximizing_mask() {
        // every instance ties at n tests, so the first mask wins
        let cell = worst_case(
            &Algorithm::Individual,
            5,
            2,
            Mode::Exhaustive,
            Default::default(),
        )
        .unwrap();
        assert_eq!(cell.worst_tests, 5);
        assert_eq!(cell.argmax_mask, vec![0, 1]);
    }

    #[test]
    fn cap_is_enforced() {
        let opts = WorstCaseOptions {
            cap: 10,
            analyze: false,
        };
        assert!(matches!(
            worst_case(&Algorithm::Zu, 6, 3, Mode::Exhaustive, opts),
            Err(Error::LimitExceeded(_))
        ));
    }

    #[test]
    fn sampled_mode_is_seeded_and_labelled() {
        let mode = Mode::Sampled { count: 50, seed: 7 };
        let a = worst_case(&Algorithm::Zc, 200, 9, mode, Default::default()).unwrap();
        let b = worst_case(&Algorithm::Zc, 200, 9, mode, Default::default()).unwrap();
        assert_eq!(a, b);
        assert!(a.lower_estimate && a.bound_values.is_empty());
        assert_eq!(a.runs, 50);
    }

    #[test]
    fn up_zig_zag_small_cells_pass_analysis() {
        for n in 0..=8 {
            for d in 0..=n {
                let cell =
                    worst_case(&Algorithm::Zu, n, d, Mode::Exhaustive, Default::default()).unwrap();
                assert!(cell.passed(), "n={n} d={d}: {:?}", cell);
            }
        }
    }
}
