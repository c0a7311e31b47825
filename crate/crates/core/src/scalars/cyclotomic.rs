use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use super::Rational;
use crate::Error;

/// Coefficients of the `d`-th cyclotomic polynomial, constant term first.
pub fn cyclotomic_polynomial(d: u32) -> Arc<[i64]> {
    static CACHE: OnceLock<RwLock<HashMap<u32, Arc<[i64]>>>> = OnceLock::new();
    assert!(d >= 1, "cyclotomic polynomial of order 0");
    let cache = CACHE.get_or_init(Default::default);
    if let Some(p) = cache.read().unwrap().get(&d) {
        return p.clone();
    }
    // x^d - 1 divided by every Phi_k with k | d, k < d
    let mut num = vec![0i64; d as usize + 1];
    num[0] = -1;
    num[d as usize] = 1;
    for k in 1..d {
        if d.is_multiple_of(k) {
            num = divide_monic_int(&num, &cyclotomic_polynomial(k));
        }
    }
    let phi: Arc<[i64]> = num.into();
    cache.write().unwrap().insert(d, phi.clone());
    phi
}

fn divide_monic_int(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let mut quot = vec![0i64; num.len() - dn];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dn];
        quot[i] = c;
        for (j, &b) in den.iter().enumerate() {
            rem[i + j] -= c * b;
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0));
    quot
}

/// An element of the cyclotomic field `Q[x]/Phi_d(x)`, stored in the power
/// basis `1, x, ..., x^(phi(d)-1)` where `x` is the primitive root `exp(2 pi i/d)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Cyclotomic {
    order: u32,
    coeffs: Vec<Rational>,
}

impl Cyclotomic {
    /// Builds an element from an arbitrary coefficient list (constant first),
    /// reducing modulo `Phi_d`.
    pub fn from_coeffs(order: u32, coeffs: Vec<Rational>) -> Self {
        let mut c = Cyclotomic { order, coeffs };
        c.reduce();
        c
    }

    pub fn from_rational(order: u32, r: Rational) -> Self {
        Cyclotomic::from_coeffs(order, vec![r])
    }

    pub fn zero(order: u32) -> Self {
        Cyclotomic::from_coeffs(order, vec![])
    }

    pub fn one(order: u32) -> Self {
        Cyclotomic::from_rational(order, Rational::one())
    }

    /// The root `zeta_d^k` for any integer `k`.
    pub fn root_power(order: u32, k: i64) -> Self {
        let k = k.rem_euclid(order as i64) as usize;
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = Rational::one();
        Cyclotomic::from_coeffs(order, coeffs)
    }

    /// All `d`-th roots of unity `zeta_d^0, ..., zeta_d^(d-1)`.
    pub fn roots_of_unity(order: u32) -> Vec<Self> {
        (0..order as i64).map(|k| Cyclotomic::root_power(order, k)).collect()
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Rational::is_zero)
    }

    /// The rational value if this element lies in `Q`.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.coeffs.iter().skip(1).all(Rational::is_zero) {
            Some(self.coeffs.first().cloned().unwrap_or_else(Rational::zero))
        } else {
            None
        }
    }

    fn reduce(&mut self) {
        let phi = cyclotomic_polynomial(self.order);
        let deg = phi.len() - 1;
        for i in (deg..self.coeffs.len()).rev() {
            let c = std::mem::take(&mut self.coeffs[i]);
            if c.is_zero() {
                continue;
            }
            // x^deg = -(phi_0 + ... + phi_{deg-1} x^{deg-1})
            for (j, &b) in phi.iter().take(deg).enumerate() {
                if b != 0 {
                    let t = &c * &Rational::from(b);
                    self.coeffs[i - deg + j] = &self.coeffs[i - deg + j] - &t;
                }
            }
        }
        self.coeffs.resize(deg, Rational::zero());
    }

    fn check_order(&self, other: &Self) -> Result<(), Error> {
        if self.order != other.order {
            return Err(Error::OrderMismatch(self.order, other.order));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, Error> {
        self.check_order(other)?;
        Ok(self.add_same(other))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, Error> {
        self.check_order(other)?;
        Ok(self.mul_same(other))
    }

    fn add_same(&self, other: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Cyclotomic { order: self.order, coeffs }
    }

    fn sub_same(&self, other: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Cyclotomic { order: self.order, coeffs }
    }

    fn mul_same(&self, other: &Self) -> Self {
        let n = self.coeffs.len();
        if n == 0 {
            return self.clone();
        }
        let mut prod = vec![Rational::zero(); 2 * n - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] = &prod[i + j] + &(a * b);
                }
            }
        }
        Cyclotomic::from_coeffs(self.order, prod)
    }

    pub fn neg(&self) -> Self {
        Cyclotomic { order: self.order, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Cyclotomic { order: self.order, coeffs: self.coeffs.iter().map(|c| c * r).collect() }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm in `Q[x]`.
    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let phi: Vec<Rational> = cyclotomic_polynomial(self.order).iter().map(|&c| Rational::from(c)).collect();
        // invariant: s * self = r0 (mod phi)
        let (mut r0, mut r1) = (trim(self.coeffs.clone()), phi);
        let (mut s0, mut s1) = (vec![Rational::one()], vec![]);
        while !r1.is_empty() {
            let (q, r) = poly_divrem(&r0, &r1);
            let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
        }
        // r0 is a nonzero constant because Phi_d is irreducible
        debug_assert_eq!(r0.len(), 1);
        let c = r0[0].recip()?;
        let coeffs = s0.iter().map(|a| a * &c).collect();
        Some(Cyclotomic::from_coeffs(self.order, coeffs))
    }

    pub fn pow(&self, k: i64) -> Option<Self> {
        let base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Cyclotomic::one(self.order);
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_same(&b);
            }
            b = b.mul_same(&b);
            e >>= 1;
        }
        Some(acc)
    }

    /// Rational trace of the element down to `Q`, i.e. the sum of its
    /// Galois conjugates.
    pub fn trace(&self) -> Rational {
        let mut acc = Cyclotomic::zero(self.order);
        for k in 1..=self.order as i64 {
            if num_integer::gcd(k, self.order as i64) == 1 {
                acc = acc.add_same(&self.galois_conjugate(k));
            }
        }
        acc.as_rational().expect("trace of a cyclotomic element is rational")
    }

    /// Image under the automorphism `zeta -> zeta^k` (k coprime to the order).
    pub fn galois_conjugate(&self, k: i64) -> Self {
        let mut acc = Cyclotomic::zero(self.order);
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc = acc.add_same(&Cyclotomic::root_power(self.order, k * i as i64).scale(c));
            }
        }
        acc
    }
}

impl std::ops::Add<&Cyclotomic> for &Cyclotomic {
    type Output = Cyclotomic;
    /// Panics on mismatched orders; use [`Cyclotomic::try_add`] to get an error.
    fn add(self, rhs: &Cyclotomic) -> Cyclotomic {
        self.try_add(rhs).expect("cyclotomic order mismatch")
    }
}

impl std::ops::Sub<&Cyclotomic> for &Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, rhs: &Cyclotomic) -> Cyclotomic {
        self.check_order(rhs).expect("cyclotomic order mismatch");
        self.sub_same(rhs)
    }
}

impl std::ops::Mul<&Cyclotomic> for &Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: &Cyclotomic) -> Cyclotomic {
        self.try_mul(rhs).expect("cyclotomic order mismatch")
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*zeta{}", self.order)?,
                _ => write!(f, "({c})*zeta{}^{i}", self.order)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn trim(mut p: Vec<Rational>) -> Vec<Rational> {
    while p.last().is_some_and(Rational::is_zero) {
        p.pop();
    }
    p
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    trim(out)
}

fn poly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_default();
            let y = b.get(i).cloned().unwrap_or_default();
            &x - &y
        })
        .collect();
    trim(out)
}

fn poly_divrem(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut rem = trim(a.to_vec());
    let lead = b.last().expect("division by zero polynomial").recip().unwrap();
    if rem.len() < b.len() {
        return (vec![], rem);
    }
    let mut quot = vec![Rational::zero(); rem.len() - b.len() + 1];
    while rem.len() >= b.len() {
        let shift = rem.len() - b.len();
        let c = rem.last().unwrap() * &lead;
        for (j, y) in b.iter().enumerate() {
            rem[shift + j] = &rem[shift + j] - &(&c * y);
        }
        quot[shift] = c;
        rem = trim(rem);
    }
    (trim(quot), rem)
}
