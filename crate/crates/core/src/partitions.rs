//! Integer partitions, cell statistics of Young diagrams, and the
//! `(r, m)` decompositions indexing the finite sum for the universal
//! polynomial.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// A partition, stored as its weakly decreasing list of positive parts.
/// The empty list is the zero partition.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Partition(Vec<u32>);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CellStat {
    /// 1-based row index.
    pub row: u32,
    /// 1-based column index.
    pub col: u32,
    pub arm: u32,
    pub leg: u32,
    pub hook: u32,
}

impl Partition {
    /// Sorts the parts and drops zeros.
    pub fn new(mut parts: Vec<u32>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Multiplicity of each distinct part, largest part first.
    pub fn multiplicities(&self) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = Vec::new();
        for &p in &self.0 {
            match out.last_mut() {
                Some((q, k)) if *q == p => *k += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }

    /// Arm, leg and hook of every cell, row by row.
    pub fn cell_stats(&self) -> Vec<CellStat> {
        let mut out = Vec::with_capacity(self.size() as usize);
        for (i, &len) in self.0.iter().enumerate() {
            for j in 1..=len {
                let leg = self.0[i + 1..].iter().take_while(|&&p| p >= j).count() as u32;
                let arm = len - j;
                out.push(CellStat { row: i as u32 + 1, col: j, arm, leg, hook: 1 + arm + leg });
            }
        }
        out
    }

    /// Multiset union of the parts.
    pub fn sum(&self, other: &Partition) -> Partition {
        let mut parts = self.0.clone();
        parts.extend_from_slice(&other.0);
        Partition::new(parts)
    }

    /// Every part repeated `r` times.
    pub fn scale(&self, r: u32) -> Partition {
        Partition(self.0.iter().flat_map(|&p| std::iter::repeat_n(p, r as usize)).collect())
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// All partitions of `n`, in reverse lexicographic order: `(n)` first,
/// `(1,...,1)` last.
pub fn enumerate_partitions(n: u32) -> Vec<Partition> {
    fn rec(rest: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        for p in (1..=rest.min(max)).rev() {
            cur.push(p);
            rec(rest - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// One term `(r, m)` of the decomposition sum: `r * sum_l m_l * l = lambda_0`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Decomposition {
    pub r: u32,
    /// Partitions with their positive multiplicities `m_l`.
    pub mult: BTreeMap<Partition, u32>,
}

impl Decomposition {
    /// `-1 + sum_l m_l`.
    pub fn sigma(&self) -> i64 {
        self.mult.values().map(|&m| m as i64).sum::<i64>() - 1
    }

    /// Reassembles `r * sum_l m_l * l`.
    pub fn reconstruct(&self) -> Partition {
        let mut total = Partition::empty();
        for (lam, &m) in &self.mult {
            for _ in 0..m {
                total = total.sum(lam);
            }
        }
        total.scale(self.r)
    }
}

/// Every `(r, m)` with `r * sum m_l l = lambda0`, each exactly once.
///
/// `r` runs over the common divisors of the part multiplicities of
/// `lambda0`; for each `r` the parts of `lambda0 / r` are split into a
/// multiset of nonempty partitions.
pub fn enumerate_decompositions(lambda0: &Partition) -> crate::Result<Vec<Decomposition>> {
    if lambda0.is_empty() {
        return Err(crate::Error::InvalidInput("decompositions of the zero partition are not defined".into()));
    }
    let mults = lambda0.multiplicities();
    let values: Vec<u32> = mults.iter().map(|&(p, _)| p).collect();
    let g = mults.iter().fold(0u32, |acc, &(_, k)| num_integer::gcd(acc, k));
    let mut out = Vec::new();
    for r in 1..=g {
        if g % r != 0 {
            continue;
        }
        let counts: Vec<u32> = mults.iter().map(|&(_, k)| k / r).collect();
        for blocks in multiset_partitions(&counts) {
            let mut mult = BTreeMap::new();
            for b in blocks {
                let parts = values.iter().zip(&b).flat_map(|(&v, &c)| std::iter::repeat_n(v, c as usize)).collect();
                *mult.entry(Partition(parts)).or_insert(0) += 1;
            }
            out.push(Decomposition { r, mult });
        }
    }
    Ok(out)
}

/// Multiset partitions of the multiset with the given count vector, each
/// returned once as a list of blocks in non-increasing lexicographic order.
fn multiset_partitions(counts: &[u32]) -> Vec<Vec<Vec<u32>>> {
    fn rec(rest: &mut Vec<u32>, bound: &[u32], cur: &mut Vec<Vec<u32>>, out: &mut Vec<Vec<Vec<u32>>>) {
        if rest.iter().all(|&c| c == 0) {
            out.push(cur.clone());
            return;
        }
        // candidate blocks: nonzero vectors b <= rest (pointwise), b <= bound (lex)
        let mut b = vec![0u32; rest.len()];
        let mut candidates = Vec::new();
        fn gen(i: usize, b: &mut Vec<u32>, rest: &[u32], bound: &[u32], acc: &mut Vec<Vec<u32>>) {
            if i == b.len() {
                if b.iter().any(|&c| c > 0) && b.as_slice() <= bound {
                    acc.push(b.clone());
                }
                return;
            }
            for c in 0..=rest[i] {
                b[i] = c;
                gen(i + 1, b, rest, bound, acc);
            }
            b[i] = 0;
        }
        gen(0, &mut b, rest, bound, &mut candidates);
        candidates.sort_unstable_by(|x, y| y.cmp(x));
        for blk in candidates {
            for (r, c) in rest.iter_mut().zip(&blk) {
                *r -= c;
            }
            cur.push(blk.clone());
            rec(rest, &blk, cur, out);
            cur.pop();
            for (r, c) in rest.iter_mut().zip(&blk) {
                *r += c;
            }
        }
    }
    let mut out = Vec::new();
    let mut rest = counts.to_vec();
    rec(&mut rest, counts, &mut Vec::new(), &mut out);
    out
}
