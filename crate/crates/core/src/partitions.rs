//! Partitions of `n` into exactly `k` parts, and the point count of the
//! Hilbert scheme of `n` points in the affine plane.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::exactq::{Exponent, QExpr};

/// Table of `P(n, k)` for `0 ≤ k ≤ n ≤ max_n`, built once and then read-only.
#[derive(Debug, Clone)]
pub struct PartitionTable {
    max_n: usize,
    // counts[n][k]
    counts: Vec<Vec<u128>>,
}

impl PartitionTable {
    /// Fills the table with `P(n,k) = P(n−1,k−1) + P(n−k,k)`.
    pub fn new(max_n: usize) -> Self {
        let mut counts: Vec<Vec<u128>> = Vec::with_capacity(max_n + 1);
        for n in 0..=max_n {
            let mut row = vec![0u128; n + 1];
            if n == 0 {
                row[0] = 1;
            }
            for k in 1..=n {
                let drop_one = counts[n - 1].get(k - 1).copied().unwrap_or(0);
                let shrink = counts[n - k].get(k).copied().unwrap_or(0);
                row[k] = drop_one + shrink;
            }
            counts.push(row);
        }
        Self { max_n, counts }
    }

    pub fn max_n(&self) -> usize {
        self.max_n
    }

    pub fn get(&self, n: usize, k: usize) -> u128 {
        assert!(n <= self.max_n, "n = {n} beyond table size {}", self.max_n);
        self.counts[n].get(k).copied().unwrap_or(0)
    }
}

const SHARED_MAX_N: usize = 120;

fn shared_table() -> &'static PartitionTable {
    static TABLE: OnceLock<PartitionTable> = OnceLock::new();
    TABLE.get_or_init(|| PartitionTable::new(SHARED_MAX_N))
}

/// Number of partitions of `n` into exactly `k` positive parts.
pub fn partition_count(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    if n <= SHARED_MAX_N {
        shared_table().get(n, k)
    } else {
        PartitionTable::new(n).get(n, k)
    }
}

/// All partitions of `n`, each with non-increasing parts, listed in
/// reverse lexicographic order (`[n]` first, `[1, …, 1]` last).
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(rest: usize, cap: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=cap.min(rest)).rev() {
            cur.push(part);
            go(rest - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// Partitions of `n` into exactly `k` parts, in the order of [`partitions`].
pub fn partitions_into(n: usize, k: usize) -> Vec<Vec<usize>> {
    partitions(n).into_iter().filter(|p| p.len() == k).collect()
}

/// `∑_{i=0}^{n−1} P(n, n−i) q^{2n−i}`, the number of `F_q`-points of the
/// Hilbert scheme of `n` points in the affine plane.
pub fn hilb_point_count(n: usize) -> QExpr {
    assert!(n >= 1, "Hilbert scheme of n points needs n >= 1");
    QExpr::from_terms((0..n).map(|i| {
        let c = BigRational::from_integer(BigInt::from(partition_count(n, n - i)));
        debug_assert!(!c.is_zero());
        (Exponent::from_integer((2 * n - i) as i64), c)
    }))
}
