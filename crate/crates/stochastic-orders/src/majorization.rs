//! Non-increasing exponent tuples, their majorization order, single-unit
//! transfers, and the constructive chain between any two comparable tuples.
//!
//! A tuple `p` sits below `q` when both have the same total and every
//! prefix sum of `p` is at most the matching prefix sum of `q`. A single
//! transfer moves one unit from a lower coordinate to a higher one; any
//! comparable pair is connected by a chain of such transfers, and
//! [`transfer_chain`] builds one explicitly.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TupleError {
    #[error("tuple entries must be non-increasing, got {0:?}")]
    NotSorted(Vec<u32>),
    #[error("tuple must be non-empty")]
    Empty,
    #[error("tuples have different lengths: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("tuples are not ordered: {0}")]
    NotDominated(String),
    #[error("cannot parse tuple from {0:?}")]
    Parse(String),
}

/// A non-increasing tuple of non-negative integer exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct ExponentTuple {
    entries: Vec<u32>,
}

impl ExponentTuple {
    /// Entries must already be sorted non-increasing; unsorted input is
    /// rejected rather than silently sorted.
    pub fn new(entries: Vec<u32>) -> Result<Self, TupleError> {
        if entries.is_empty() {
            return Err(TupleError::Empty);
        }
        if entries.windows(2).any(|w| w[0] < w[1]) {
            return Err(TupleError::NotSorted(entries));
        }
        Ok(ExponentTuple { entries })
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.entries.iter().map(|&e| e as u64).sum()
    }

    /// Comma-separated integers, e.g. `2,1,0`.
    pub fn parse(s: &str) -> Result<Self, TupleError> {
        let entries = s
            .split(',')
            .map(|part| part.trim().parse::<u32>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| TupleError::Parse(s.to_string()))?;
        ExponentTuple::new(entries)
    }

    /// True iff `self` sits below `other`: equal totals and every prefix sum
    /// of `self` at most that of `other`.
    pub fn is_dominated_by(&self, other: &ExponentTuple) -> Result<bool, TupleError> {
        if self.len() != other.len() {
            return Err(TupleError::LengthMismatch(self.len(), other.len()));
        }
        let mut acc_p = 0i64;
        let mut acc_q = 0i64;
        for (&p, &q) in self.entries.iter().zip(&other.entries) {
            acc_p += p as i64;
            acc_q += q as i64;
            if acc_p > acc_q {
                return Ok(false);
            }
        }
        Ok(acc_p == acc_q)
    }

    /// Prefix-sum gap `sum_m sum_{l<=m} (q_l - p_l)`: the descent quantity
    /// that strictly decreases along a transfer chain. Requires
    /// `self <= other`.
    pub fn chain_potential(&self, other: &ExponentTuple) -> Result<u64, TupleError> {
        require_dominated(self, other)?;
        let mut acc = 0i64;
        let mut total = 0i64;
        for (&p, &q) in self.entries.iter().zip(&other.entries) {
            acc += q as i64 - p as i64;
            total += acc;
        }
        Ok(total as u64)
    }
}

impl fmt::Display for ExponentTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(u32::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

impl TryFrom<Vec<u32>> for ExponentTuple {
    type Error = TupleError;
    fn try_from(v: Vec<u32>) -> Result<Self, TupleError> {
        ExponentTuple::new(v)
    }
}

impl From<ExponentTuple> for Vec<u32> {
    fn from(t: ExponentTuple) -> Vec<u32> {
        t.entries
    }
}

fn require_dominated(p: &ExponentTuple, q: &ExponentTuple) -> Result<(), TupleError> {
    if !p.is_dominated_by(q)? {
        return Err(TupleError::NotDominated(format!(
            "({p}) is not below ({q})"
        )));
    }
    Ok(())
}

/// If `p <= q` differ by exactly one unit transfer, return the 0-based
/// coordinate pair `(l1, l2)` with `q[l1] = p[l1] + 1`, `q[l2] = p[l2] - 1`;
/// `None` when the pair is comparable but not a single transfer apart.
pub fn transfer_step(
    p: &ExponentTuple,
    q: &ExponentTuple,
) -> Result<Option<(usize, usize)>, TupleError> {
    require_dominated(p, q)?;
    let mut up = None;
    let mut down = None;
    for (i, (&pi, &qi)) in p.entries.iter().zip(&q.entries).enumerate() {
        match qi as i64 - pi as i64 {
            0 => {}
            1 if up.is_none() => up = Some(i),
            -1 if down.is_none() => down = Some(i),
            _ => return Ok(None),
        }
    }
    match (up, down) {
        (Some(l1), Some(l2)) if l1 < l2 => Ok(Some((l1, l2))),
        _ => Ok(None),
    }
}

/// Build the chain `p = p^0 < p^1 < ... < p^I = q` in which consecutive
/// tuples differ by a single transfer.
///
/// Each step locates the leftmost block of strictly positive prefix-sum
/// differences, bounded by zero differences on both sides, and moves one
/// unit from the block's right boundary to its left boundary. Every
/// intermediate tuple stays non-increasing and the chain potential drops by
/// the block length at each step, so the loop terminates.
pub fn transfer_chain(
    p: &ExponentTuple,
    q: &ExponentTuple,
) -> Result<Vec<ExponentTuple>, TupleError> {
    require_dominated(p, q)?;
    let k = p.len();
    let mut chain = vec![p.clone()];
    let mut cur = p.entries.clone();
    while cur != q.entries {
        // Prefix-sum differences of q over the current tuple.
        let mut diff = Vec::with_capacity(k);
        let mut acc = 0i64;
        for (i, &qi) in q.entries.iter().enumerate() {
            acc += qi as i64 - cur[i] as i64;
            diff.push(acc);
        }
        let l1 = diff
            .iter()
            .position(|&d| d > 0)
            .expect("tuples differ, some prefix gap is positive");
        let l2 = (l1 + 1..k)
            .find(|&m| diff[m] == 0)
            .expect("total sums agree, the block closes");
        cur[l1] += 1;
        cur[l2] -= 1;
        debug_assert!(cur.windows(2).all(|w| w[0] >= w[1]));
        chain.push(ExponentTuple::new(cur.clone())?);
    }
    Ok(chain)
}

/// All non-increasing k-tuples of non-negative integers with the given
/// total (partitions into at most k parts, zero padded), in descending
/// lexicographic order.
pub fn enumerate_tuples(k: usize, total: u32) -> Vec<ExponentTuple> {
    fn rec(
        k_left: usize,
        remaining: u32,
        max_part: u32,
        prefix: &mut Vec<u32>,
        out: &mut Vec<ExponentTuple>,
    ) {
        if k_left == 0 {
            if remaining == 0 {
                out.push(ExponentTuple::new(prefix.clone()).expect("prefix is sorted"));
            }
            return;
        }
        // The first entry must leave a feasible remainder for the rest.
        let lo = remaining.div_ceil(k_left as u32);
        let hi = remaining.min(max_part);
        for part in (lo..=hi).rev() {
            prefix.push(part);
            rec(k_left - 1, remaining - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if k == 0 {
        return out;
    }
    rec(k, total, total.max(1), &mut Vec::new(), &mut out);
    // total = 0 gives the all-zero tuple.
    if total == 0 {
        out.clear();
        out.push(ExponentTuple::new(vec![0; k]).unwrap());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(entries: &[u32]) -> ExponentTuple {
        ExponentTuple::new(entries.to_vec()).unwrap()
    }

    #[test]
    fn construction_rules() {
        assert!(ExponentTuple::new(vec![2, 1, 1, 0]).is_ok());
        assert_eq!(
            ExponentTuple::new(vec![1, 2]),
            Err(TupleError::NotSorted(vec![1, 2]))
        );
        assert_eq!(ExponentTuple::new(vec![]), Err(TupleError::Empty));
        assert_eq!(ExponentTuple::parse("2,1,0").unwrap(), t(&[2, 1, 0]));
        assert!(ExponentTuple::parse("2,x").is_err());
    }

    #[test]
    fn dominance_examples() {
        assert!(t(&[1, 1]).is_dominated_by(&t(&[2, 0])).unwrap());
        assert!(t(&[1, 1, 1]).is_dominated_by(&t(&[2, 1, 0])).unwrap());
        assert!(!t(&[2, 0]).is_dominated_by(&t(&[1, 1])).unwrap());
        // Different totals are incomparable.
        assert!(!t(&[2, 1]).is_dominated_by(&t(&[2, 0])).unwrap());
        assert!(t(&[1, 1]).is_dominated_by(&t(&[1, 1, 0])).is_err());
    }

    #[test]
    fn transfer_step_examples() {
        assert_eq!(
            transfer_step(&t(&[1, 1]), &t(&[2, 0])).unwrap(),
            Some((0, 1))
        );
        assert_eq!(
            transfer_step(&t(&[1, 1, 1]), &t(&[2, 1, 0])).unwrap(),
            Some((0, 2))
        );
        assert_eq!(
            transfer_step(&t(&[1, 1, 1, 1]), &t(&[4, 0, 0, 0])).unwrap(),
            None
        );
        assert!(matches!(
            transfer_step(&t(&[2, 0]), &t(&[1, 1])),
            Err(TupleError::NotDominated(_))
        ));
    }

    #[test]
    fn chain_trivial_and_single_step() {
        assert_eq!(
            transfer_chain(&t(&[2, 0]), &t(&[2, 0])).unwrap(),
            vec![t(&[2, 0])]
        );
        assert_eq!(
            transfer_chain(&t(&[1, 1, 1]), &t(&[2, 1, 0])).unwrap(),
            vec![t(&[1, 1, 1]), t(&[2, 1, 0])]
        );
    }

    #[test]
    fn chain_steps_all_satisfy_transfer_condition() {
        let p = t(&[1, 1, 1, 1]);
        let q = t(&[4, 0, 0, 0]);
        let chain = transfer_chain(&p, &q).unwrap();
        assert_eq!(chain.first().unwrap(), &p);
        assert_eq!(chain.last().unwrap(), &q);
        for w in chain.windows(2) {
            assert!(transfer_step(&w[0], &w[1]).unwrap().is_some());
        }
    }

    #[test]
    fn potential_decreases_along_chain() {
        let p = t(&[2, 2, 1, 1, 0]);
        let q = t(&[5, 1, 0, 0, 0]);
        let chain = transfer_chain(&p, &q).unwrap();
        let mut last = chain[0].chain_potential(&q).unwrap();
        assert!(chain.len() as u64 <= last + 1);
        for link in &chain[1..] {
            let next = link.chain_potential(&q).unwrap();
            assert!(next < last);
            last = next;
        }
        assert_eq!(last, 0);
    }

    #[test]
    fn single_transfer_gives_single_step_chain() {
        for k in 1..=4usize {
            for total in 0..=6u32 {
                let tuples = enumerate_tuples(k, total);
                for p in &tuples {
                    for q in &tuples {
                        if !p.is_dominated_by(q).unwrap() {
                            continue;
                        }
                        let chain = transfer_chain(p, q).unwrap();
                        if transfer_step(p, q).unwrap().is_some() {
                            assert_eq!(chain.len(), 2);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn enumerate_small_cases() {
        assert_eq!(enumerate_tuples(2, 2), vec![t(&[2, 0]), t(&[1, 1])]);
        assert_eq!(
            enumerate_tuples(3, 3),
            vec![t(&[3, 0, 0]), t(&[2, 1, 0]), t(&[1, 1, 1])]
        );
        // Partitions of 6 into at most 5 parts.
        assert_eq!(enumerate_tuples(5, 6).len(), 10);
        assert_eq!(enumerate_tuples(3, 0), vec![t(&[0, 0, 0])]);
    }

    #[test]
    fn dominance_is_partial_order_small_exhaustive() {
        for k in 1..=4usize {
            for total in 0..=6u32 {
                let tuples = enumerate_tuples(k, total);
                for a in &tuples {
                    assert!(a.is_dominated_by(a).unwrap());
                    for b in &tuples {
                        let ab = a.is_dominated_by(b).unwrap();
                        let ba = b.is_dominated_by(a).unwrap();
                        if ab && ba {
                            assert_eq!(a, b);
                        }
                        for c in &tuples {
                            if ab && b.is_dominated_by(c).unwrap() {
                                assert!(a.is_dominated_by(c).unwrap());
                            }
                        }
                    }
                }
            }
        }
    }
}
