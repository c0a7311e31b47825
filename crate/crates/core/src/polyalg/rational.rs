use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use super::{Exp, LaurentPoly, VarSet};
use crate::scalars::{Rational, Scalar};
use crate::Result;

/// A rational function `numerator / prod (1 - x^m)^k` whose denominator is a
/// multiset of binomials with nonconstant monomials `x^m`.
///
/// No general gcd is ever taken: sums use the multiset maximum of the
/// denominators, and [`FactoredRational::normalize`] clears the denominator
/// by exact division when the value is known to be a Laurent polynomial.
#[derive(Clone, PartialEq)]
pub struct FactoredRational<S> {
    num: LaurentPoly<S>,
    den: BTreeMap<Exp, u32>,
}

impl<S: Scalar> FactoredRational<S> {
    pub fn from_poly(p: LaurentPoly<S>) -> Self {
        FactoredRational { num: p, den: BTreeMap::new() }
    }

    pub fn zero(vars: &VarSet) -> Self {
        Self::from_poly(LaurentPoly::zero(vars))
    }

    /// `num / prod (1 - x^m)` over the listed exponents (repeats allowed).
    pub fn new(num: LaurentPoly<S>, den: impl IntoIterator<Item = Exp>) -> Self {
        let mut out = Self::from_poly(num);
        for m in den {
            assert!(m.iter().any(|&x| x != 0), "denominator binomial with constant monomial");
            *out.den.entry(m).or_insert(0) += 1;
        }
        out
    }

    pub fn vars(&self) -> &VarSet {
        self.num.vars()
    }

    pub fn numerator(&self) -> &LaurentPoly<S> {
        &self.num
    }

    pub fn denominator(&self) -> &BTreeMap<Exp, u32> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut den = self.den.clone();
        for (m, k) in &other.den {
            *den.entry(m.clone()).or_insert(0) += k;
        }
        FactoredRational { num: &self.num * &other.num, den }
    }

    pub fn mul_poly(&self, p: &LaurentPoly<S>) -> Self {
        FactoredRational { num: &self.num * p, den: self.den.clone() }
    }

    pub fn pow(&self, k: u32, one: &S) -> Self {
        FactoredRational { num: self.num.pow(k, one), den: self.den.iter().map(|(m, j)| (m.clone(), j * k)).collect() }
    }

    pub fn neg(&self) -> Self {
        FactoredRational { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        FactoredRational { num: self.num.scale_rational(r), den: self.den.clone() }
    }

    pub fn adams(&self, r: u32) -> Self {
        let r = r as i32;
        FactoredRational {
            num: self.num.adams(r as u32),
            den: self.den.iter().map(|(m, k)| (m.iter().map(|x| x * r).collect(), *k)).collect(),
        }
    }

    /// Multiplies by `1 - x^m`, cancelling a denominator factor if present.
    pub fn mul_binomial(&self, m: &Exp) -> Self {
        let mut out = self.clone();
        match out.den.get_mut(m) {
            Some(k) if *k > 1 => *k -= 1,
            Some(_) => {
                out.den.remove(m);
            }
            None => out.num = out.num.mul_binomial(m),
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::sum_all(self.vars(), vec![self.clone(), other.clone()])
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Sum over the common denominator (multiset maximum); numerators are
    /// lifted and added in parallel.
    pub fn sum_all(vars: &VarSet, items: Vec<Self>) -> Self {
        let items: Vec<Self> = items.into_iter().filter(|f| !f.is_zero()).collect();
        let mut den: BTreeMap<Exp, u32> = BTreeMap::new();
        for f in &items {
            for (m, &k) in &f.den {
                let e = den.entry(m.clone()).or_insert(0);
                *e = (*e).max(k);
            }
        }
        let lifted: Vec<LaurentPoly<S>> = items
            .into_par_iter()
            .map(|f| {
                let mut num = f.num;
                for (m, &k) in &den {
                    let have = f.den.get(m).copied().unwrap_or(0);
                    for _ in have..k {
                        num = num.mul_binomial(m);
                    }
                }
                num
            })
            .collect();
        FactoredRational { num: LaurentPoly::sum_all(vars, lifted), den }
    }

    /// Clears the denominator by exact division, one binomial at a time.
    ///
    /// Fails with `NotDivisible` if the value is not a Laurent polynomial.
    pub fn normalize(&self) -> Result<LaurentPoly<S>> {
        let mut num = self.num.clone();
        if num.is_zero() {
            return Ok(num);
        }
        let one = num.terms()[0].1.one_like();
        for (m, &k) in &self.den {
            for _ in 0..k {
                num = num.div_binomial(m, &one)?;
            }
        }
        Ok(num)
    }

    /// Value equality (cross-multiplication, no normalization needed).
    pub fn value_eq(&self, other: &Self) -> bool {
        self.sub(other).num.is_zero()
    }
}

impl<S: Scalar> fmt::Display for FactoredRational<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.num)?;
        if !self.den.is_empty() {
            write!(f, " / ")?;
            for (m, k) in &self.den {
                let mono = LaurentPoly::monomial(self.vars(), m.clone(), Rational::one());
                write!(f, "(1 - {mono})")?;
                if *k > 1 {
                    write!(f, "^{k}")?;
                }
            }
        }
        Ok(())
    }
}

impl<S: Scalar> fmt::Debug for FactoredRational<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
