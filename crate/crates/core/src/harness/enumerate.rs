//! Enumeration of `d`-subsets of `{0, …, n−1}` as bit masks.

use crate::error::{Error, Result};

/// Largest universe representable by a `u64` mask.
pub const MAX_MASK_BITS: usize = 64;

/// `C(n, d)` in `u64`, saturating.
pub fn choose(n: usize, d: usize) -> u64 {
    if d > n {
        return 0;
    }
    let d = d.min(n - d);
    let mut acc: u128 = 1;
    for i in 0..d {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Next mask with the same popcount in increasing numeric order
/// (Gosper's hack). `None` after the last mask of an `n`-bit universe.
pub fn next_mask(mask: u64, n: usize) -> Option<u64> {
    if mask == 0 {
        return None;
    }
    let c = mask & mask.wrapping_neg();
    let r = mask.checked_add(c)?;
    let next = (((r ^ mask) >> 2) / c) | r;
    (n >= 64 || next >> n == 0).then_some(next)
}

/// The `rank`-th `d`-subset of an `n`-set in increasing numeric order.
pub fn unrank(n: usize, d: usize, mut rank: u64) -> Result<u64> {
    if n > MAX_MASK_BITS {
        return Err(Error::LimitExceeded(format!(
            "n = {n} exceeds {MAX_MASK_BITS}"
        )));
    }
    if rank >= choose(n, d) {
        return Err(Error::Precondition(format!("rank {rank} out of range")));
    }
    // colexicographic order equals numeric order: pick the highest bit first
    let mut mask = 0u64;
    let mut k = d;
    for bit in (0..n).rev() {
        if k == 0 {
            break;
        }
        let below = choose(bit, k);
        if rank >= below {
            mask |= 1 << bit;
            rank -= below;
            k -= 1;
        }
    }
    Ok(mask)
}

/// Masks `[start, start + len)` in numeric order.
pub fn masks_from(n: usize, d: usize, start: u64, len: u64) -> Result<impl Iterator<Item = u64>> {
    let first = if len == 0 {
        None
    } else {
        Some(unrank(n, d, start)?)
    };
    let mut cur = first;
    let mut left = len;
    Ok(std::iter::from_fn(move || {
        if left == 0 {
            return None;
        }
        let m = cur?;
        left -= 1;
        cur = if d == 0 { None } else { next_mask(m, n) };
        Some(m)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(n: usize, d: usize) -> Vec<u64> {
        (0..1u64 << n)
            .filter(|m| m.count_ones() as usize == d)
            .collect()
    }

    #[test]
    fn gosper_walk_matches_brute_force() {
        for n in 0..=10 {
            for d in 0..=n {
                let all: Vec<u64> = masks_from(n, d, 0, choose(n, d)).unwrap().collect();
                assert_eq!(all, brute(n, d), "n={n} d={d}");
            }
        }
    }

    #[test]
    fn unrank_every_position() {
        let all = brute(9, 4);
        for (i, &m) in all.iter().enumerate() {
            assert_eq!(unrank(9, 4, i as u64).unwrap(), m);
        }
        assert!(unrank(9, 4, all.len() as u64).is_err());
    }

    #[test]
    fn full_width_masks() {
        assert_eq!(unrank(64, 64, 0).unwrap(), u64::MAX);
        assert_eq!(next_mask(u64::MAX, 64), None);
        assert_eq!(choose(64, 32), 1_832_624_140_942_590_534);
    }
}
