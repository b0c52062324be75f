//! Ground-truth instances and the counting pool oracle.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of an item in `[0, n)`.
pub type Item = usize;

/// Answer of a group test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pure,
    Contaminated,
}

impl Outcome {
    pub fn is_contaminated(self) -> bool {
        matches!(self, Outcome::Contaminated)
    }
}

/// Classification of a single item.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Good,
    Defective,
}

/// A set of `n` items together with the hidden set of defectives.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance")]
pub struct Instance {
    n: usize,
    defectives: Vec<Item>,
    #[serde(skip)]
    membership: Vec<bool>,
}

impl Instance {
    pub fn new(n: usize, defectives: impl IntoIterator<Item = Item>) -> Result<Self> {
        let mut membership = vec![false; n];
        for item in defectives {
            if item >= n {
                return Err(Error::Usage(format!(
                    "defective index {item} out of range for n = {n}"
                )));
            }
            membership[item] = true;
        }
        let defectives = (0..n).filter(|&i| membership[i]).collect();
        Ok(Instance {
            n,
            defectives,
            membership,
        })
    }

    /// Builds an instance from a bitmask; bit `i` set means item `i` is defective.
    pub fn from_mask(n: usize, mask: u64) -> Result<Self> {
        if n > 64 {
            return Err(Error::Usage(format!(
                "bitmask instances support n <= 64, got {n}"
            )));
        }
        if n < 64 && mask >> n != 0 {
            return Err(Error::Usage(format!(
                "mask {mask:#x} has bits set at or above n = {n}"
            )));
        }
        Instance::new(n, (0..n).filter(|&i| mask >> i & 1 == 1))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.defectives.len()
    }

    /// Defective indices in ascending order.
    pub fn defectives(&self) -> &[Item] {
        &self.defectives
    }

    pub fn is_defective(&self, item: Item) -> bool {
        self.membership.get(item).copied().unwrap_or(false)
    }

    pub fn label(&self, item: Item) -> Label {
        if self.is_defective(item) {
            Label::Defective
        } else {
            Label::Good
        }
    }

    pub fn mask(&self) -> Option<u64> {
        (self.n <= 64).then(|| self.defectives.iter().fold(0u64, |m, &i| m | 1 << i))
    }
}

#[derive(Deserialize)]
struct RawInstance {
    n: usize,
    defectives: Vec<Item>,
}

impl TryFrom<RawInstance> for Instance {
    type Error = Error;

    fn try_from(raw: RawInstance) -> Result<Self> {
        Instance::new(raw.n, raw.defectives)
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} defectives={:?}", self.n, self.defectives)
    }
}

/// Answers pool queries against an [`Instance`] and counts them.
#[derive(Debug)]
pub struct PoolOracle<'a> {
    instance: &'a Instance,
    query_count: usize,
}

impl<'a> PoolOracle<'a> {
    pub fn new(instance: &'a Instance) -> Self {
        PoolOracle {
            instance,
            query_count: 0,
        }
    }

    pub fn instance(&self) -> &'a Instance {
        self.instance
    }

    pub fn query_count(&self) -> usize {
        self.query_count
    }

    /// Tests `pool` as a group. Every call costs exactly one test.
    pub fn contaminated(&mut self, pool: &[Item]) -> Result<Outcome> {
        if pool.is_empty() {
            return Err(Error::Usage("cannot test an empty pool".into()));
        }
        if let Some(&bad) = pool.iter().find(|&&i| i >= self.instance.n) {
            return Err(Error::Usage(format!(
                "pool item {bad} out of range for n = {}",
                self.instance.n
            )));
        }
        self.query_count += 1;
        if pool.iter().any(|&i| self.instance.is_defective(i)) {
            Ok(Outcome::Contaminated)
        } else {
            Ok(Outcome::Pure)
        }
    }
}
