//! Brute-force counts of stable Hitchin pairs of rank 1 and 2 on the
//! projective line over a small prime field, used as ground truth for the
//! genus-zero universal polynomials.
//!
//! A rank-2 bundle splits as `O(a) + O(e-a)`; a Higgs field is a 2x2 matrix
//! of binary forms. Each stable pair is weighted by `(q-1)/|Aut(E)|`, so the
//! total is the number of isomorphism classes.

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::scalars::Rational;
use crate::{Error, Result};

/// Largest number of (Higgs field, subbundle) pairs examined per splitting type.
pub const DEFAULT_BUDGET: u64 = 1 << 32;

#[derive(Clone, Debug, Serialize)]
pub struct SplittingTypeCount {
    /// Degrees `(a, b)` of `O(a) + O(b)`.
    pub a: i64,
    pub b: i64,
    pub higgs_fields: u64,
    pub stable: u64,
    /// `|Aut(O(a) + O(b))|`.
    #[serde(with = "crate::scalars::bigint_string")]
    pub automorphisms: BigInt,
    /// `stable * (q-1) / automorphisms`.
    pub contribution: Rational,
}

#[derive(Clone, Debug, Serialize)]
pub struct RankTwoCount {
    pub q: u64,
    pub e: i64,
    pub deg_d: i64,
    #[serde(with = "crate::scalars::bigint_string")]
    pub total: BigInt,
    pub by_type: Vec<SplittingTypeCount>,
}

/// `|H^0(P^1, O(k))|`-many forms: coefficient vectors of length `k + 1`
/// (empty for `k < 0`).
fn section_dim(k: i64) -> usize {
    if k < 0 {
        0
    } else {
        k as usize + 1
    }
}

fn is_prime(q: u64) -> bool {
    q >= 2 && (2..q).take_while(|d| d * d <= q).all(|d| !q.is_multiple_of(d))
}

/// Pairs `(E, theta)` of rank 1 are a line bundle of degree `e` and a
/// section of `O(deg D)`: `q^(m (deg D + 1))` of them over `F_{q^m}`.
pub fn count_p1_rank1(q: u64, _e: i64, deg_d: i64, m: u32) -> Result<BigInt> {
    if deg_d < -1 {
        return Err(Error::InvalidInput("deg D must be at least -1".into()));
    }
    if m == 0 {
        return Err(Error::InvalidInput("m must be at least 1".into()));
    }
    Ok(num_traits::pow(BigInt::from(q), (m as i64 * (deg_d + 1)) as usize))
}

/// Weighted count of stable rank-2 Hitchin pairs of odd degree `e`.
pub fn count_p1_rank2(q: u64, e: i64, deg_d: i64) -> Result<RankTwoCount> {
    count_p1_rank2_with_budget(q, e, deg_d, DEFAULT_BUDGET)
}

pub fn count_p1_rank2_with_budget(q: u64, e: i64, deg_d: i64, budget: u64) -> Result<RankTwoCount> {
    if !is_prime(q) || q > 5 {
        return Err(Error::InvalidInput(format!("q = {q} must be a prime at most 5")));
    }
    if e.rem_euclid(2) != 1 {
        return Err(Error::InvalidInput(format!("rank 2 needs odd degree, got e = {e}")));
    }
    if deg_d < -1 {
        return Err(Error::InvalidInput("deg D must be at least -1".into()));
    }
    let a_min = (e + 1).div_euclid(2);
    let a_max = (e + deg_d).div_euclid(2);
    let mut by_type = Vec::new();
    let mut total = Rational::zero();
    // one type past the bound is examined as a sanity check: it must contribute nothing
    for a in a_min..=a_max.max(a_min - 1) + 1 {
        let t = count_type(q, e, deg_d, a, budget)?;
        if a > a_max {
            if t.stable != 0 {
                return Err(Error::InvariantViolation(format!(
                    "splitting type ({a}, {}) beyond the bound has stable Higgs fields",
                    e - a
                )));
            }
            break;
        }
        total = &total + &t.contribution;
        by_type.push(t);
    }
    let total = total
        .to_integer()
        .ok_or_else(|| Error::InvariantViolation(format!("weighted count {total} is not an integer")))?;
    Ok(RankTwoCount { q, e, deg_d, total, by_type })
}

fn count_type(q: u64, e: i64, deg_d: i64, a: i64, budget: u64) -> Result<SplittingTypeCount> {
    let b = e - a;
    let dims = [
        section_dim(deg_d),         // O(a) -> O(a)(D)
        section_dim(a - b + deg_d), // O(b) -> O(a)(D)
        section_dim(b - a + deg_d), // O(a) -> O(b)(D)
        section_dim(deg_d),         // O(b) -> O(b)(D)
    ];
    let total_dim: usize = dims.iter().sum();
    let fields = (q as u128).pow(total_dim as u32);
    let subs = destabilizing_candidates(q, e, a, b);
    if fields * (subs.len().max(1) as u128) > budget as u128 {
        return Err(Error::BudgetExceeded(format!(
            "{fields} Higgs fields times {} subbundles for type ({a}, {b})",
            subs.len()
        )));
    }
    let fields = fields as u64;
    let stable: u64 = (0..fields)
        .into_par_iter()
        .filter(|&code| {
            let theta = decode(code, q, &dims);
            !subs.iter().any(|(f, g)| invariant(q, &theta, f, g))
        })
        .count() as u64;
    let automorphisms = if a > b {
        BigInt::from((q - 1).pow(2)) * num_traits::pow(BigInt::from(q), (a - b + 1) as usize)
    } else {
        BigInt::from((q * q - 1) * (q * q - q))
    };
    let contribution =
        &Rational::from(BigInt::from(stable) * BigInt::from(q - 1)) / &Rational::from(automorphisms.clone());
    Ok(SplittingTypeCount { a, b, higgs_fields: fields, stable, automorphisms, contribution })
}

/// Saturated line subbundles `O(c)` of `O(a) + O(b)` with `2c > e`, as
/// coprime pairs of forms of degrees `a - c`, `b - c`, one per scalar class.
fn destabilizing_candidates(q: u64, e: i64, a: i64, b: i64) -> Vec<(Vec<u64>, Vec<u64>)> {
    let mut out = Vec::new();
    let c_min = (e + 2).div_euclid(2);
    for c in c_min..=a.max(b) {
        let (df, dg) = (section_dim(a - c), section_dim(b - c));
        let n = (q as u128).pow((df + dg) as u32) as u64;
        for code in 0..n {
            let v = decode_flat(code, q, df + dg);
            // representative of the scalar class: first nonzero entry is 1
            match v.iter().find(|&&x| x != 0) {
                Some(&1) => {}
                _ => continue,
            }
            let (f, g) = (v[..df].to_vec(), v[df..].to_vec());
            if coprime_forms(q, &f, &g) {
                out.push((f, g));
            }
        }
    }
    out
}

fn decode_flat(mut code: u64, q: u64, len: usize) -> Vec<u64> {
    let mut v = Vec::with_capacity(len);
    for _ in 0..len {
        v.push(code % q);
        code /= q;
    }
    v
}

fn decode(code: u64, q: u64, dims: &[usize; 4]) -> [Vec<u64>; 4] {
    let flat = decode_flat(code, q, dims.iter().sum());
    let mut out: [Vec<u64>; 4] = Default::default();
    let mut start = 0;
    for (slot, &d) in out.iter_mut().zip(dims) {
        *slot = flat[start..start + d].to_vec();
        start += d;
    }
    out
}

/// Product of forms (coefficient vectors, index = power of X).
fn mul(q: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % q;
        }
    }
    out
}

fn add(q: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let n = a.len().max(b.len());
    (0..n).map(|i| (a.get(i).unwrap_or(&0) + b.get(i).unwrap_or(&0)) % q).collect()
}

fn is_zero(a: &[u64]) -> bool {
    a.iter().all(|&x| x == 0)
}

/// Whether the line spanned by `(f, g)` is preserved by `theta`:
/// `f (t21 f + t22 g) = g (t11 f + t12 g)`.
fn invariant(q: u64, theta: &[Vec<u64>; 4], f: &[u64], g: &[u64]) -> bool {
    let [t11, t12, t21, t22] = theta;
    let lhs = mul(q, f, &add(q, &mul(q, t21, f), &mul(q, t22, g)));
    let rhs = mul(q, g, &add(q, &mul(q, t11, f), &mul(q, t12, g)));
    let n = lhs.len().max(rhs.len());
    (0..n).all(|i| lhs.get(i).unwrap_or(&0) % q == rhs.get(i).unwrap_or(&0) % q)
}

/// Binary forms `f` (degree `f.len()-1`) and `g` share no root on `P^1`.
fn coprime_forms(q: u64, f: &[u64], g: &[u64]) -> bool {
    match (is_zero(f), is_zero(g)) {
        (true, true) => false,
        (true, false) => g.len() == 1,
        (false, true) => f.len() == 1,
        (false, false) => {
            // common root at infinity: both top coefficients vanish
            let inf = f.last() == Some(&0) && g.last() == Some(&0);
            !inf && poly_gcd_degree(q, f, g) == 0
        }
    }
}

fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn inv_mod(x: u64, q: u64) -> u64 {
    (1..q).find(|y| x * y % q == 1).expect("nonzero element of a prime field")
}

/// Degree of the gcd of two nonzero affine polynomials over `F_q`.
fn poly_gcd_degree(q: u64, a: &[u64], b: &[u64]) -> usize {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let lead = inv_mod(*b.last().unwrap(), q);
        while a.len() >= b.len() && !a.is_empty() {
            let c = a.last().unwrap() * lead % q;
            let shift = a.len() - b.len();
            for (j, &y) in b.iter().enumerate() {
                a[shift + j] = (a[shift + j] + q * q - c * y % q) % q;
            }
            a = trim(a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len() - 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_one_examples() {
        assert_eq!(count_p1_rank1(2, 0, 1, 1).unwrap(), BigInt::from(4));
        assert_eq!(count_p1_rank1(3, 5, 0, 1).unwrap(), BigInt::from(3));
        assert_eq!(count_p1_rank1(2, 0, -1, 1).unwrap(), BigInt::from(1));
        assert_eq!(count_p1_rank1(2, 0, 1, 2).unwrap(), BigInt::from(16));
    }

    #[test]
    fn coprimality() {
        // X and Y
        assert!(coprime_forms(3, &[0, 1], &[1, 0]));
        // X and X^2 + XY share X
        assert!(!coprime_forms(3, &[0, 1], &[0, 1, 1]));
        // Y and Y^2 share the root at infinity... as forms of degree 1 and 2 with top coefficient 0
        assert!(!coprime_forms(3, &[1, 0], &[1, 0, 0]));
        assert!(coprime_forms(2, &[1], &[]));
        assert!(!coprime_forms(2, &[0, 1], &[]));
    }

    #[test]
    fn hand_counted_instance() {
        // q = 2, e = 1, deg D = 1: only the type (1, 0) is admissible
        let c = count_p1_rank2(2, 1, 1).unwrap();
        assert_eq!(c.by_type.len(), 1);
        assert_eq!(c.total, BigInt::from(32));
    }

    #[test]
    fn empty_when_no_type_is_admissible() {
        let c = count_p1_rank2(3, 1, 0).unwrap();
        assert!(c.by_type.is_empty());
        assert_eq!(c.total, BigInt::from(0));
    }

    #[test]
    fn agrees_with_genus_zero_universal_polynomial() {
        for (q, e, deg_d) in [(2u64, 1i64, 0i64), (2, 1, 1), (3, 1, 0), (2, 1, -1), (2, 3, 1), (3, 1, 1), (2, 1, 2)] {
            let brute = count_p1_rank2(q, e, deg_d).unwrap().total;
            let formula = crate::universal::genus_zero_value(2, deg_d + 2, q as i64).unwrap();
            assert_eq!(brute, formula, "q = {q}, e = {e}, deg D = {deg_d}");
        }
    }

    #[test]
    fn invalid_instances_rejected() {
        assert!(count_p1_rank2(4, 1, 0).is_err());
        assert!(count_p1_rank2(2, 2, 0).is_err());
        assert!(matches!(count_p1_rank2_with_budget(3, 1, 2, 10), Err(Error::BudgetExceeded(_))));
    }
}
