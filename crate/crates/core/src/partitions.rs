//! Regular partitions of an `n`-qubit ring into four-qubit clusters.
//!
//! A cluster starting at `t` covers `{t, t+1, t+2, t+3}` (mod `n`). A list of
//! starts `t_1 < ... < t_L` is regular when every cyclic gap, including the
//! wrap-around gap `t_1 + n - t_L`, is at least 3, so neighbouring clusters
//! share at most one border qubit. Starts are 1-based throughout this module.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub const CLUSTER_SIZE: usize = 4;
pub const MIN_GAP: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RegularPartition {
    pub n: usize,
    pub starts: Vec<usize>,
}

impl RegularPartition {
    /// Canonical partition from starts in any order.
    pub fn new(n: usize, mut starts: Vec<usize>) -> Result<Self> {
        starts.sort_unstable();
        let p = RegularPartition { n, starts };
        if !p.is_regular() {
            return Err(invalid(format!("starts {:?} are not a regular partition of {n}", p.starts)));
        }
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.starts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.starts.is_empty()
    }

    /// Checks strictly increasing starts in `1..=n` and all cyclic gaps >= 3.
    pub fn is_regular(&self) -> bool {
        let s = &self.starts;
        if s.is_empty() || s[0] < 1 || *s.last().unwrap() > self.n {
            return false;
        }
        let inner = s.windows(2).all(|w| w[1] > w[0] && w[1] - w[0] >= MIN_GAP);
        inner && s[0] + self.n - s[s.len() - 1] >= MIN_GAP
    }

    /// 0-based member qubits of each cluster, in cluster order.
    pub fn clusters(&self) -> Vec<[usize; CLUSTER_SIZE]> {
        self.starts.iter().map(|&t| std::array::from_fn(|j| (t - 1 + j) % self.n)).collect()
    }
}

pub fn enumerate_regular(n: usize, l: usize) -> Vec<RegularPartition> {
    let mut out = Vec::new();
    if l == 0 || n < MIN_GAP * l {
        return out;
    }
    let mut starts = Vec::with_capacity(l);
    extend(n, l, 1, &mut starts, &mut out);
    out
}

fn extend(n: usize, l: usize, from: usize, starts: &mut Vec<usize>, out: &mut Vec<RegularPartition>) {
    if starts.len() == l {
        if starts[0] + n - starts[l - 1] >= MIN_GAP {
            out.push(RegularPartition { n, starts: starts.clone() });
        }
        return;
    }
    // Remaining clusters after this one each need at least MIN_GAP positions.
    let remaining = l - starts.len() - 1;
    let mut t = from;
    while t + remaining * MIN_GAP <= n {
        starts.push(t);
        extend(n, l, t + MIN_GAP, starts, out);
        starts.pop();
        t += 1;
    }
}

fn binomial(a: u128, b: u128) -> Option<u128> {
    if b > a {
        return Some(0);
    }
    let b = b.min(a - b);
    let mut c: u128 = 1;
    for i in 1..=b {
        c = c.checked_mul(a - b + i)? / i;
    }
    Some(c)
}

/// Whether at least one regular partition exists.
pub fn has_regular(n: usize, l: usize) -> bool {
    l >= 1 && n >= MIN_GAP * l
}

/// Closed-form count. Pairing each partition with one of its `l` starts
/// gives `n` rotations times the compositions of `n - 2l` into `l` positive
/// parts, so the count is `n * C(n - 2l - 1, l - 1) / l`.
pub fn count_regular(n: usize, l: usize) -> Result<u128> {
    if !has_regular(n, l) {
        return Ok(0);
    }
    let m = (n - 2 * l) as u128;
    let overflow = || invalid(format!("partition count for n={n}, l={l} overflows 128 bits"));
    let c = binomial(m - 1, l as u128 - 1).ok_or_else(overflow)?;
    Ok(c.checked_mul(n as u128).ok_or_else(overflow)? / l as u128)
}

/// Exactly uniform draw from the regular partitions. A rotation offset and a
/// composition of the slack are drawn uniformly; each partition arises from
/// exactly `l` (offset, composition) pairs.
pub fn sample_regular<R: Rng + ?Sized>(n: usize, l: usize, rng: &mut R) -> Result<RegularPartition> {
    if !has_regular(n, l) {
        return Err(Error::EmptyPartitionSet { n, l });
    }
    let m = n - 2 * l;
    let offset = rng.gen_range(0..n);
    let mut cuts: Vec<usize> = index::sample(rng, m - 1, l - 1).into_iter().map(|c| c + 1).collect();
    cuts.sort_unstable();
    let mut starts = Vec::with_capacity(l);
    let mut pos = offset;
    let mut prev = 0;
    for &c in cuts.iter().chain(std::iter::once(&m)) {
        starts.push(pos % n + 1);
        pos += (c - prev) + 2;
        prev = c;
    }
    starts.sort_unstable();
    Ok(RegularPartition { n, starts })
}
