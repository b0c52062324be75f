//! The improved zig-zag strategy: start with the whole set as the first
//! pool, grow the pool index after a pure answer and shrink it after
//! extracting a defective.

use crate::error::Result;
use crate::instance::{Instance, Item, Label, Outcome};
use crate::splitseq::{a_seq, four_split};
use crate::transcript::{RunResult, Session, TestKind};

/// Smallest `k` with `3·2^k >= 4n`, i.e. `⌈log₂(4n/3)⌉`, so `a_seq(k) >= n`.
pub fn initial_k(n: usize) -> u32 {
    let target = 4u128 * n as u128;
    (0u32..)
        .find(|&k| 3u128 << k >= target)
        .expect("bounded by 128 bits")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZdState {
    pub remaining: Vec<Item>,
    pub k: u32,
}

impl ZdState {
    pub fn new(items: &[Item]) -> Self {
        ZdState {
            remaining: items.to_vec(),
            k: initial_k(items.len()),
        }
    }
}

/// Runs the zig-zag procedure on `items`, recording into `session`.
/// An empty input costs nothing.
pub fn run_zd(session: &mut Session<'_>, items: &[Item]) -> Result<()> {
    let mut state = ZdState::new(items);
    while !state.remaining.is_empty() {
        let k = state.k;
        let size = a_seq(k).min(state.remaining.len());
        let pool: Vec<Item> = state.remaining[..size].to_vec();
        let (seq, outcome) = session.test(&pool, TestKind::Driver, Some(k), None)?;
        match outcome {
            Outcome::Pure => {
                session.identify_all(&pool, Label::Good, Some(seq), true)?;
                state.k += 1;
            }
            Outcome::Contaminated if k > 0 => {
                four_split(session, &pool, k, Some(seq))?;
                state.k -= 1;
            }
            Outcome::Contaminated => {
                // a_0 = 1: the pool is a single item
                session.identify(pool[0], Label::Defective, Some(seq), true)?;
            }
        }
        state.remaining.retain(|&i| !session.is_identified(i));
    }
    Ok(())
}

/// Standalone run on all items of `instance` in index order.
pub fn run(instance: &Instance) -> Result<RunResult> {
    let mut session = Session::new(instance);
    let items: Vec<Item> = (0..instance.n()).collect();
    run_zd(&mut session, &items)?;
    Ok(session.finish("zd"))
}
