//! Exact scalars (rationals and cyclotomic numbers) and the elementary number
//! theory used by the counting formulas.

mod cyclotomic;
mod rational;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

pub use cyclotomic::{cyclotomic_polynomial, Cyclotomic};
pub use rational::Rational;

use crate::Error;

/// Coefficient ring interface shared by the polynomial engine.
///
/// Elements carry enough context to build their own zero and one (a
/// cyclotomic number knows its order), so the engine never needs a global
/// constant.
pub trait Scalar: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync {
    fn is_zero(&self) -> bool;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negated(&self) -> Self;
    fn inverse(&self) -> Option<Self>;
    /// Embeds a rational number in the same ring as `self`.
    fn rational_like(&self, r: &Rational) -> Self;

    fn scaled(&self, r: &Rational) -> Self {
        self.times(&self.rational_like(r))
    }
}

impl Scalar for Rational {
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        Rational::zero()
    }
    fn one_like(&self) -> Self {
        Rational::one()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negated(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Option<Self> {
        self.recip()
    }
    fn rational_like(&self, r: &Rational) -> Self {
        r.clone()
    }
    fn scaled(&self, r: &Rational) -> Self {
        self * r
    }
}

impl Scalar for Cyclotomic {
    fn is_zero(&self) -> bool {
        Cyclotomic::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        Cyclotomic::zero(self.order())
    }
    fn one_like(&self) -> Self {
        Cyclotomic::one(self.order())
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negated(&self) -> Self {
        self.neg()
    }
    fn inverse(&self) -> Option<Self> {
        Cyclotomic::inverse(self)
    }
    fn rational_like(&self, r: &Rational) -> Self {
        Cyclotomic::from_rational(self.order(), r.clone())
    }
    fn scaled(&self, r: &Rational) -> Self {
        self.scale(r)
    }
}

/// Prime factorization by trial division, as `(prime, exponent)` pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut k = 0;
            while n.is_multiple_of(p) {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// The Möbius function.
pub fn moebius(n: u64) -> Result<i64, Error> {
    if n == 0 {
        return Err(Error::InvalidInput("moebius(0) is undefined".into()));
    }
    let f = factorize(n);
    if f.iter().any(|&(_, k)| k > 1) {
        return Ok(0);
    }
    Ok(if f.len().is_multiple_of(2) { 1 } else { -1 })
}

pub(crate) fn mu(n: u64) -> i64 {
    moebius(n).expect("moebius of a positive integer")
}

/// Positive divisors of `n` in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut i = 1;
    while i * i <= n {
        if n.is_multiple_of(i) {
            small.push(i);
            if i * i != n {
                large.push(n / i);
            }
        }
        i += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n).iter().fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

pub fn gcd(a: i64, b: i64) -> i64 {
    num_integer::gcd(a, b)
}

/// Number of elements of exact order `d` in `(Z/dZ)^(2g)`:
/// `sum_{j | d} mu(j) (d/j)^(2g)`.
pub fn psi_g_count(g: u32, d: u64) -> Result<BigInt, Error> {
    if d == 0 {
        return Err(Error::InvalidInput("psi_g(d) needs d >= 1".into()));
    }
    let mut total = BigInt::zero();
    for j in divisors(d) {
        let m = mu(j);
        if m != 0 {
            total += BigInt::from(m) * num_traits::pow(BigInt::from(d / j), 2 * g as usize);
        }
    }
    Ok(total)
}

/// Sum of `zeta^i` over the primitive `d`-th roots of unity, by the divisor
/// sum `sum_{j | gcd(d, i)} j mu(d/j)`.
pub fn ramanujan_sum(d: u64, i: i64) -> Result<i64, Error> {
    if d == 0 {
        return Err(Error::InvalidInput("ramanujan_sum needs d >= 1".into()));
    }
    let g = num_integer::gcd(d as i64, i) as u64;
    Ok(divisors(g).into_iter().map(|j| j as i64 * mu(d / j)).sum())
}

/// Serializes arbitrary-precision integers as decimal strings.
pub mod bigint_string {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(n)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// `n!` as a rational.
pub(crate) fn factorial(n: u64) -> Rational {
    Rational::from_integer((1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moebius_examples() {
        assert_eq!(moebius(1).unwrap(), 1);
        assert_eq!(moebius(4).unwrap(), 0);
        assert_eq!(moebius(6).unwrap(), 1);
        assert_eq!(moebius(30).unwrap(), -1);
        assert!(moebius(0).is_err());
    }

    #[test]
    fn moebius_sums_vanish() {
        for n in 1..=10_000u64 {
            let s: i64 = divisors(n).into_iter().map(mu).sum();
            assert_eq!(s, i64::from(n == 1), "n = {n}");
        }
    }

    /// Counts elements of exact order d in (Z/d)^(2g) by enumeration.
    fn brute_order_count(g: u32, d: u64) -> u64 {
        let dim = 2 * g as usize;
        let total = d.pow(dim as u32);
        (0..total)
            .filter(|&code| {
                let mut v = Vec::with_capacity(dim);
                let mut c = code;
                for _ in 0..dim {
                    v.push(c % d);
                    c /= d;
                }
                let ord = (1..=d).find(|k| v.iter().all(|x| (x * k) % d == 0)).unwrap();
                ord == d
            })
            .count() as u64
    }

    #[test]
    fn psi_examples_against_enumeration() {
        assert_eq!(psi_g_count(1, 1).unwrap(), BigInt::from(1));
        assert_eq!(psi_g_count(1, 2).unwrap(), BigInt::from(brute_order_count(1, 2)));
        assert_eq!(psi_g_count(1, 2).unwrap(), BigInt::from(3));
        assert_eq!(psi_g_count(2, 2).unwrap(), BigInt::from(brute_order_count(2, 2)));
        assert_eq!(psi_g_count(2, 2).unwrap(), BigInt::from(15));
        assert_eq!(psi_g_count(1, 6).unwrap(), BigInt::from(brute_order_count(1, 6)));
        assert_eq!(psi_g_count(2, 3).unwrap(), BigInt::from(brute_order_count(2, 3)));
    }

    #[test]
    fn psi_divisor_sum_is_full_group() {
        for g in 1..=5u32 {
            for n in 1..=30u64 {
                let s: BigInt = divisors(n).into_iter().map(|d| psi_g_count(g, d).unwrap()).sum();
                assert_eq!(s, num_traits::pow(BigInt::from(n), 2 * g as usize));
            }
        }
    }

    /// Brute-force sum of zeta^i over primitive d-th roots in exact arithmetic.
    fn brute_ramanujan(d: u32, i: i64) -> Rational {
        let mut acc = Cyclotomic::zero(d);
        for k in 1..=d as i64 {
            if gcd(k, d as i64) == 1 {
                acc = &acc + &Cyclotomic::root_power(d, k * i);
            }
        }
        acc.as_rational().unwrap()
    }

    #[test]
    fn ramanujan_examples() {
        assert_eq!(ramanujan_sum(4, 2).unwrap(), -2);
        assert_eq!(brute_ramanujan(4, 2), Rational::from(-2));
        assert_eq!(ramanujan_sum(1, 7).unwrap(), 1);
        assert_eq!(ramanujan_sum(6, 0).unwrap(), 2);
        assert_eq!(brute_ramanujan(6, 0), Rational::from(2));
    }

    #[test]
    fn ramanujan_matches_cyclotomic_brute_force() {
        for d in 1..=12u32 {
            for i in -12..=12i64 {
                assert_eq!(
                    Rational::from(ramanujan_sum(d as u64, i).unwrap()),
                    brute_ramanujan(d, i),
                    "d = {d}, i = {i}"
                );
            }
        }
    }

    #[test]
    fn divisors_and_phi() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(euler_phi(12), 4);
        assert_eq!(euler_phi(1), 1);
    }
}
