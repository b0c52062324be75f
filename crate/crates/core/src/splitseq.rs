//! The pool-size sequence, binary splitting (DIG) and the 4-Split procedure.

use crate::error::{Error, Result};
use crate::instance::{Item, Label, Outcome};
use crate::transcript::{Session, TestKind};

/// Pool size at index `i`: 1, 2, 3, 6, 12, 24, ... (`⌈3·2^(i-2)⌉`).
///
/// Saturates at `usize::MAX` for indices whose value does not fit.
pub fn a_seq(i: u32) -> usize {
    match i {
        0 => 1,
        1 => 2,
        _ => 3usize
            .checked_shl(i - 2)
            .filter(|v| v >> (i - 2) == 3)
            .unwrap_or(usize::MAX),
    }
}

/// `2^e` saturating, for partition sizes.
fn pow2(e: u32) -> usize {
    1usize.checked_shl(e).unwrap_or(usize::MAX)
}

/// Result of one defective-extraction call.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SplitOutcome {
    pub defective_found: Option<Item>,
    /// Good items identified by the call, in identification order.
    pub goods_identified: Vec<Item>,
    pub tests_spent: usize,
}

impl SplitOutcome {
    pub fn identified(&self) -> impl Iterator<Item = Item> + '_ {
        self.goods_identified
            .iter()
            .copied()
            .chain(self.defective_found)
    }
}

fn sub_kind(parent: Option<usize>) -> TestKind {
    if parent.is_some() {
        TestKind::Incurred
    } else {
        TestKind::Driver
    }
}

/// Binary splitting on a set known to be contaminated. Each round tests the
/// first `⌈|X|/2⌉` items; the pure half is identified good.
///
/// Tests are recorded as incurred by `parent` when given. Identifications
/// are attributed to `parent`.
pub fn dig(
    session: &mut Session<'_>,
    items: &[Item],
    parent: Option<usize>,
) -> Result<SplitOutcome> {
    if items.is_empty() {
        return Err(Error::Precondition("DIG on an empty set".into()));
    }
    let mut out = SplitOutcome::default();
    let mut current = items;
    // whether the current candidate set was itself observed contaminated
    let mut confirmed_by_test = false;
    while current.len() > 1 {
        let (half, rest) = current.split_at(current.len().div_ceil(2));
        let (_, outcome) = session.test(half, sub_kind(parent), None, parent)?;
        out.tests_spent += 1;
        match outcome {
            Outcome::Contaminated => {
                current = half;
                confirmed_by_test = true;
            }
            Outcome::Pure => {
                session.identify_all(half, Label::Good, parent, true)?;
                out.goods_identified.extend_from_slice(half);
                current = rest;
                confirmed_by_test = false;
            }
        }
    }
    let defective = current[0];
    session.identify(defective, Label::Defective, parent, confirmed_by_test)?;
    out.defective_found = Some(defective);
    Ok(out)
}

/// Sizes of the four consecutive parts `Y, Z, U, V` of a set of `len`
/// items at index `k` (requires `k >= 3`).
pub fn four_way_sizes(len: usize, k: u32) -> [usize; 4] {
    let big = pow2(k.saturating_sub(2));
    let small = pow2(k.saturating_sub(3));
    let y = big.min(len);
    let z = big.min(len - y);
    let u = small.min(len - y - z);
    let v = small.min(len - y - z - u);
    [y, z, u, v]
}

/// Identifies one defective (and possibly some goods) in a contaminated set
/// of at most `a_seq(k)` items.
///
/// * one item: it is the defective, no test.
/// * two or three items: individual tests in order until a defective shows
///   up; when every earlier item tested pure the last one is inferred.
/// * four or more: parts `Y, Z, U, V` are tested in order until the first
///   contaminated one, which then goes through [`dig`]. The last nonempty part
///   is never tested when every earlier part was pure. If only `Y` is
///   nonempty it goes straight to [`dig`].
///
/// Items after the found defective that were not tested stay unidentified.
pub fn four_split(
    session: &mut Session<'_>,
    items: &[Item],
    k: u32,
    parent: Option<usize>,
) -> Result<SplitOutcome> {
    if items.is_empty() {
        return Err(Error::Precondition("4-Split on an empty set".into()));
    }
    if items.len() > a_seq(k) {
        return Err(Error::Precondition(format!(
            "4-Split on {} items exceeds a_{k} = {}",
            items.len(),
            a_seq(k)
        )));
    }
    let kind = sub_kind(parent);
    let mut out = SplitOutcome::default();

    match items.len() {
        1 => {
            session.identify(items[0], Label::Defective, parent, false)?;
            out.defective_found = Some(items[0]);
        }
        2 | 3 => {
            let last = items.len() - 1;
            for (idx, &item) in items.iter().enumerate() {
                if idx == last {
                    // every predecessor tested pure
                    session.identify(item, Label::Defective, parent, false)?;
                    out.defective_found = Some(item);
                    break;
                }
                let (_, outcome) = session.test(&[item], kind, None, parent)?;
                out.tests_spent += 1;
                if outcome.is_contaminated() {
                    session.identify(item, Label::Defective, parent, true)?;
                    out.defective_found = Some(item);
                    break;
                }
                session.identify(item, Label::Good, parent, true)?;
                out.goods_identified.push(item);
            }
        }
        len => {
            let sizes = four_way_sizes(len, k);
            let mut parts = Vec::with_capacity(4);
            let mut start = 0;
            for s in sizes {
                parts.push(&items[start..start + s]);
                start += s;
            }
            let nonempty: Vec<&[Item]> = parts.into_iter().filter(|p| !p.is_empty()).collect();
            let mut target = None;
            for (idx, part) in nonempty.iter().enumerate() {
                if idx + 1 == nonempty.len() {
                    target = Some(*part);
                    break;
                }
                let (_, outcome) = session.test(part, kind, None, parent)?;
                out.tests_spent += 1;
                if outcome.is_contaminated() {
                    target = Some(*part);
                    break;
                }
                session.identify_all(part, Label::Good, parent, true)?;
                out.goods_identified.extend_from_slice(part);
            }
            let target = target.ok_or_else(|| Error::Internal("4-Split found no part".into()))?;
            let inner = dig(session, target, parent)?;
            out.tests_spent += inner.tests_spent;
            out.goods_identified.extend(inner.goods_identified);
            out.defective_found = inner.defective_found;
        }
    }
    Ok(out)
}
