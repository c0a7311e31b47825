use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rayon::prelude::*;
use smallvec::SmallVec;

use super::VarSet;
use crate::scalars::{Rational, Scalar};
use crate::{Error, Result};

/// Exponent vector, one entry per variable of the owning [`VarSet`].
pub type Exp = SmallVec<[i32; 8]>;

/// Products with more term pairs than this are split across threads.
const PAR_THRESHOLD: usize = 1 << 14;

/// A sparse multivariate Laurent polynomial.
///
/// Terms are kept sorted by exponent vector (lexicographic, ascending) with
/// no zero coefficients, so structural equality is value equality.
#[derive(Clone, PartialEq)]
pub struct LaurentPoly<S> {
    vars: VarSet,
    terms: Vec<(Exp, S)>,
}

/// Image of one variable under a substitution: `coeff * monomial`.
#[derive(Clone, Debug)]
pub struct MonomialImage<S> {
    pub coeff: S,
    pub exp: Exp,
}

pub fn zero_exp(n: usize) -> Exp {
    SmallVec::from_elem(0, n)
}

fn add_exp(a: &Exp, b: &Exp) -> Exp {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub_exp(a: &Exp, b: &Exp) -> Exp {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn dot(a: &Exp, b: &Exp) -> i64 {
    a.iter().zip(b).map(|(&x, &y)| x as i64 * y as i64).sum()
}

impl<S: Scalar> LaurentPoly<S> {
    pub fn zero(vars: &VarSet) -> Self {
        LaurentPoly { vars: vars.clone(), terms: Vec::new() }
    }

    pub fn constant(vars: &VarSet, c: S) -> Self {
        Self::monomial(vars, zero_exp(vars.len()), c)
    }

    pub fn monomial(vars: &VarSet, exp: Exp, c: S) -> Self {
        assert_eq!(exp.len(), vars.len(), "exponent length does not match the variable set");
        let terms = if c.is_zero() { Vec::new() } else { vec![(exp, c)] };
        LaurentPoly { vars: vars.clone(), terms }
    }

    /// The polynomial `one * name`.
    pub fn var(vars: &VarSet, name: &str, one: S) -> Result<Self> {
        let i = vars.require(name)?;
        let mut e = zero_exp(vars.len());
        e[i] = 1;
        Ok(Self::monomial(vars, e, one))
    }

    /// Collects terms, adding coefficients of repeated exponents.
    pub fn from_terms<I: IntoIterator<Item = (Exp, S)>>(vars: &VarSet, terms: I) -> Self {
        let mut acc: HashMap<Exp, S> = HashMap::new();
        for (e, c) in terms {
            assert_eq!(e.len(), vars.len(), "exponent length does not match the variable set");
            accumulate(&mut acc, e, c);
        }
        Self::from_map(vars, acc)
    }

    fn from_map(vars: &VarSet, acc: HashMap<Exp, S>) -> Self {
        let mut terms: Vec<(Exp, S)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        LaurentPoly { vars: vars.clone(), terms }
    }

    /// Builds from terms already sorted, distinct and nonzero.
    fn from_sorted(vars: &VarSet, terms: Vec<(Exp, S)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(terms.iter().all(|(_, c)| !c.is_zero()));
        LaurentPoly { vars: vars.clone(), terms }
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn terms(&self) -> &[(Exp, S)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(Exp, S)> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn coeff(&self, exp: &[i32]) -> Option<&S> {
        self.terms.binary_search_by(|(e, _)| e.as_slice().cmp(exp)).ok().map(|i| &self.terms[i].1)
    }

    /// The coefficient if the polynomial is a constant (zero gives `None`).
    pub fn as_constant(&self) -> Option<&S> {
        match self.terms.as_slice() {
            [(e, c)] if e.iter().all(|&x| x == 0) => Some(c),
            _ => None,
        }
    }

    /// Componentwise minimum exponent over all terms (zeros for the zero polynomial).
    pub fn min_exponents(&self) -> Exp {
        self.fold_exponents(i32::min)
    }

    pub fn max_exponents(&self) -> Exp {
        self.fold_exponents(i32::max)
    }

    fn fold_exponents(&self, f: fn(i32, i32) -> i32) -> Exp {
        let mut it = self.terms.iter();
        let Some((first, _)) = it.next() else {
            return zero_exp(self.vars.len());
        };
        let mut out = first.clone();
        for (e, _) in it {
            for (o, &x) in out.iter_mut().zip(e) {
                *o = f(*o, x);
            }
        }
        out
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.vars.check_same(&other.vars)?;
        Ok(self.merge(other, false))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.vars.check_same(&other.vars)?;
        Ok(self.merge(other, true))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.vars.check_same(&other.vars)?;
        Ok(self.mul_same(other))
    }

    /// Sorted merge of two term lists.
    fn merge(&self, other: &Self, subtract: bool) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        let rhs = |c: &S| if subtract { c.negated() } else { c.clone() };
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((b[j].0.clone(), rhs(&b[j].1)));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = if subtract { a[i].1.minus(&b[j].1) } else { a[i].1.plus(&b[j].1) };
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().map(|(e, c)| (e.clone(), rhs(c))));
        Self::from_sorted(&self.vars, out)
    }

    fn mul_same(&self, other: &Self) -> Self {
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        if small.is_zero() {
            return Self::zero(&self.vars);
        }
        if small.len() == 1 {
            let (e, c) = &small.terms[0];
            return large.mul_term(e, c);
        }
        let partial = |chunk: &[(Exp, S)]| {
            let mut acc: HashMap<Exp, S> = HashMap::with_capacity((chunk.len() * large.len()).min(1 << 16));
            for (e1, c1) in chunk {
                for (e2, c2) in &large.terms {
                    accumulate(&mut acc, add_exp(e1, e2), c1.times(c2));
                }
            }
            acc
        };
        let acc = if small.len() * large.len() > PAR_THRESHOLD {
            let chunk = small.len().div_ceil(rayon::current_num_threads().max(1)).max(1);
            small.terms.par_chunks(chunk).map(partial).reduce(HashMap::new, merge_maps)
        } else {
            partial(&small.terms)
        };
        Self::from_map(&self.vars, acc)
    }

    /// Multiplies by `c * x^e`.
    pub fn mul_term(&self, e: &Exp, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        let terms = self.terms.iter().map(|(e2, c2)| (add_exp(e, e2), c.times(c2))).collect();
        // shifting preserves the order; multiplying by a nonzero scalar in a field keeps terms nonzero
        Self::from_sorted(&self.vars, terms)
    }

    pub fn scale(&self, c: &S) -> Self {
        self.mul_term(&zero_exp(self.vars.len()), c)
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Self::zero(&self.vars);
        }
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), c.scaled(r))).collect();
        Self::from_sorted(&self.vars, terms)
    }

    pub fn neg(&self) -> Self {
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), c.negated())).collect();
        Self::from_sorted(&self.vars, terms)
    }

    pub fn pow(&self, k: u32, one: &S) -> Self {
        let mut acc = Self::constant(&self.vars, one.clone());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul_same(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul_same(&base);
            }
        }
        acc
    }

    /// Product of several polynomials over the same variables.
    pub fn product<'a, I: IntoIterator<Item = &'a Self>>(vars: &VarSet, one: &S, factors: I) -> Self
    where
        S: 'a,
    {
        let mut acc = Self::constant(vars, one.clone());
        for f in factors {
            acc = acc.mul_same(f);
        }
        acc
    }

    /// Sum of polynomials over the same variables, reduced in parallel.
    pub fn sum_all(vars: &VarSet, items: Vec<Self>) -> Self {
        let acc = items
            .into_par_iter()
            .fold(HashMap::new, |mut acc: HashMap<Exp, S>, p| {
                for (e, c) in p.terms {
                    accumulate(&mut acc, e, c);
                }
                acc
            })
            .reduce(HashMap::new, merge_maps);
        Self::from_map(vars, acc)
    }

    /// The Adams operation: every variable raised to the `r`-th power.
    pub fn adams(&self, r: u32) -> Self {
        let r = r as i32;
        let terms = self.terms.iter().map(|(e, c)| (e.iter().map(|x| x * r).collect(), c.clone())).collect();
        // scaling by a positive integer preserves lexicographic order
        Self::from_sorted(&self.vars, terms)
    }

    /// The ring map sending variable `i` to `images[i]`, landing in `target`.
    ///
    /// Fails if a variable with a zero image occurs with a negative exponent.
    pub fn substitute(&self, target: &VarSet, images: &[MonomialImage<S>]) -> Result<Self> {
        if images.len() != self.vars.len() {
            return Err(Error::InvalidInput(format!(
                "substitution has {} images for {} variables",
                images.len(),
                self.vars.len()
            )));
        }
        if let Some(im) = images.iter().find(|im| im.exp.len() != target.len()) {
            return Err(Error::InvalidInput(format!("image exponent {:?} does not fit {target:?}", im.exp)));
        }
        let mut cache: Vec<HashMap<i32, Option<S>>> = vec![HashMap::new(); images.len()];
        let mut acc: HashMap<Exp, S> = HashMap::new();
        for (e, c) in &self.terms {
            let mut exp = zero_exp(target.len());
            let mut coeff = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let im = &images[i];
                for (x, &y) in exp.iter_mut().zip(&im.exp) {
                    *x += k * y;
                }
                let power = cache[i].entry(k).or_insert_with(|| scalar_pow(&im.coeff, k)).clone();
                match power {
                    Some(pw) => coeff = coeff.times(&pw),
                    None => {
                        return Err(Error::InvalidInput(format!(
                            "variable {} has a non-invertible image but occurs with exponent {k}",
                            self.vars.names()[i]
                        )))
                    }
                }
            }
            accumulate(&mut acc, exp, coeff);
        }
        Ok(Self::from_map(target, acc))
    }

    /// Shorthand for substituting some variables by scalars, keeping the rest.
    pub fn specialize(&self, values: &[(&str, S)]) -> Result<Self> {
        let one = match self.terms.first() {
            Some((_, c)) => c.one_like(),
            None => return Ok(self.clone()),
        };
        let n = self.vars.len();
        let mut images: Vec<MonomialImage<S>> = (0..n)
            .map(|i| {
                let mut e = zero_exp(n);
                e[i] = 1;
                MonomialImage { coeff: one.clone(), exp: e }
            })
            .collect();
        for (name, v) in values {
            let i = self.vars.require(name)?;
            images[i] = MonomialImage { coeff: v.clone(), exp: zero_exp(n) };
        }
        self.substitute(&self.vars, &images)
    }

    /// Keeps only the terms satisfying `keep`.
    pub fn filter_terms(&self, mut keep: impl FnMut(&Exp, &S) -> bool) -> Self {
        let terms = self.terms.iter().filter(|(e, c)| keep(e, c)).cloned().collect();
        Self::from_sorted(&self.vars, terms)
    }

    pub fn map_coeffs<T: Scalar>(&self, f: impl Fn(&S) -> T) -> LaurentPoly<T> {
        LaurentPoly::from_terms(&self.vars, self.terms.iter().map(|(e, c)| (e.clone(), f(c))))
    }

    /// Multiplies by `1 - x^m`.
    pub fn mul_binomial(&self, m: &Exp) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let one = self.terms[0].1.one_like();
        self.merge(&self.mul_term(m, &one), true)
    }

    /// Divides exactly by `1 - gamma * x^m`.
    ///
    /// Writing exponents as `rep + k m`, each residue class is a
    /// one-variable problem solved by the recurrence `Q_k = P_k + gamma Q_{k-1}`.
    pub fn div_binomial(&self, m: &Exp, gamma: &S) -> Result<Self> {
        if self.is_zero() {
            return Ok(self.clone());
        }
        let Some(pivot) = m.iter().position(|&x| x != 0) else {
            let c = self.terms[0].1.one_like().minus(gamma);
            let inv = c.inverse().ok_or_else(|| Error::NotDivisible { remainder: self.to_string() })?;
            return Ok(self.scale(&inv));
        };
        let step = m[pivot];
        let mut classes: HashMap<Exp, BTreeMap<i64, S>> = HashMap::new();
        for (e, c) in &self.terms {
            let k = e[pivot].div_euclid(step) as i64;
            let rep: Exp = e.iter().zip(m).map(|(&x, &y)| x - (k as i32) * y).collect();
            classes.entry(rep).or_default().insert(k, c.clone());
        }
        let mut out: HashMap<Exp, S> = HashMap::new();
        for (rep, line) in classes {
            let (&kmin, _) = line.iter().next().unwrap();
            let (&kmax, _) = line.iter().next_back().unwrap();
            let mut prev: Option<S> = None;
            for k in kmin..kmax {
                let mut q = line.get(&k).cloned().unwrap_or_else(|| gamma.zero_like());
                if let Some(p) = &prev {
                    q = q.plus(&gamma.times(p));
                }
                if !q.is_zero() {
                    let e: Exp = rep.iter().zip(m).map(|(&x, &y)| x + (k as i32) * y).collect();
                    out.insert(e, q.clone());
                }
                prev = Some(q);
            }
            let top = line[&kmax].clone();
            let residue = match &prev {
                Some(p) => top.plus(&gamma.times(p)),
                None => top,
            };
            if !residue.is_zero() {
                return Err(Error::NotDivisible {
                    remainder: format!("{residue} at class {rep:?} (dividing by 1 - ({gamma})*x^{m:?})"),
                });
            }
        }
        Ok(Self::from_map(&self.vars, out))
    }

    /// Exact quotient `self / q` in the Laurent ring.
    ///
    /// Monomials and binomials take fast paths; otherwise both sides are
    /// shifted to ordinary polynomials and divided with respect to the
    /// graded lexicographic order, and a nonzero remainder is an error.
    pub fn exact_divide(&self, q: &Self) -> Result<Self> {
        self.vars.check_same(&q.vars)?;
        match q.terms.as_slice() {
            [] => Err(Error::InvalidInput("division by the zero polynomial".into())),
            [(e, c)] => {
                let inv = c.inverse().ok_or_else(|| Error::NotDivisible { remainder: self.to_string() })?;
                Ok(self.mul_term(&e.iter().map(|x| -x).collect(), &inv))
            }
            [(e0, c0), (e1, c1)] => {
                // q = c0 x^e0 (1 - gamma x^(e1 - e0)) with gamma = -c1/c0
                let inv = c0.inverse().ok_or_else(|| Error::NotDivisible { remainder: self.to_string() })?;
                let gamma = c1.times(&inv).negated();
                let shifted = self.mul_term(&e0.iter().map(|x| -x).collect(), &inv);
                shifted.div_binomial(&sub_exp(e1, e0), &gamma)
            }
            _ => self.grlex_divide(q),
        }
    }

    fn grlex_divide(&self, q: &Self) -> Result<Self> {
        if self.is_zero() {
            return Ok(self.clone());
        }
        let n = self.vars.len();
        let ps = self.min_exponents();
        let qs = q.min_exponents();
        let key = |e: &Exp| -> (i64, Exp) { (e.iter().map(|&x| x as i64).sum(), e.clone()) };
        let mut rem: BTreeMap<(i64, Exp), S> =
            self.terms.iter().map(|(e, c)| (key(&sub_exp(e, &ps)), c.clone())).collect();
        let divisor: Vec<(Exp, S)> = q.terms.iter().map(|(e, c)| (sub_exp(e, &qs), c.clone())).collect();
        let (lead_e, lead_c) = divisor.iter().max_by(|a, b| key(&a.0).cmp(&key(&b.0))).unwrap().clone();
        let lead_inv = lead_c.inverse().ok_or_else(|| Error::NotDivisible { remainder: self.to_string() })?;
        let mut quot: Vec<(Exp, S)> = Vec::new();
        let mut leftover: Vec<(Exp, S)> = Vec::new();
        while let Some(((_, e), c)) = rem.pop_last() {
            if e.iter().zip(&lead_e).all(|(a, b)| a >= b) {
                let qe = sub_exp(&e, &lead_e);
                let qc = c.times(&lead_inv);
                for (de, dc) in &divisor {
                    if *de == lead_e {
                        continue;
                    }
                    let k = key(&add_exp(&qe, de));
                    let delta = qc.times(dc);
                    match rem.get_mut(&k) {
                        Some(v) => {
                            *v = v.minus(&delta);
                            if v.is_zero() {
                                rem.remove(&k);
                            }
                        }
                        None => {
                            rem.insert(k, delta.negated());
                        }
                    }
                }
                quot.push((qe, qc));
            } else {
                leftover.push((e, c));
            }
        }
        if !leftover.is_empty() {
            let r = LaurentPoly::from_terms(&self.vars, leftover.into_iter().map(|(e, c)| (add_exp(&e, &ps), c)));
            return Err(Error::NotDivisible { remainder: r.to_string() });
        }
        let shift = sub_exp(&ps, &qs);
        debug_assert_eq!(shift.len(), n);
        Ok(LaurentPoly::from_terms(&self.vars, quot.into_iter().map(|(e, c)| (add_exp(&e, &shift), c))))
    }

    /// Re-expresses the polynomial over a larger variable set containing
    /// every current variable (new variables get exponent zero).
    pub fn embed(&self, target: &VarSet) -> Result<Self> {
        let idx: Vec<usize> = self.vars.names().iter().map(|v| target.require(v)).collect::<Result<_>>()?;
        Ok(LaurentPoly::from_terms(
            target,
            self.terms.iter().map(|(e, c)| {
                let mut out = zero_exp(target.len());
                for (&i, &x) in idx.iter().zip(e) {
                    out[i] = x;
                }
                (out, c.clone())
            }),
        ))
    }

    /// Drops variables that do not occur, mapping into `target`, which must
    /// contain every variable with a nonzero exponent.
    pub fn restrict(&self, target: &VarSet) -> Result<Self> {
        let mut idx = Vec::with_capacity(self.vars.len());
        for (i, v) in self.vars.names().iter().enumerate() {
            match target.index(v) {
                Some(j) => idx.push(Some(j)),
                None => {
                    if self.terms.iter().any(|(e, _)| e[i] != 0) {
                        return Err(Error::InvalidInput(format!("variable {v} still occurs")));
                    }
                    idx.push(None);
                }
            }
        }
        Ok(LaurentPoly::from_terms(
            target,
            self.terms.iter().map(|(e, c)| {
                let mut out = zero_exp(target.len());
                for (j, &x) in idx.iter().zip(e) {
                    if let Some(j) = j {
                        out[*j] = x;
                    }
                }
                (out, c.clone())
            }),
        ))
    }

    /// Maximum of `w . e` over the exponents `e` of the terms.
    pub fn max_weight(&self, w: &Exp) -> Option<i64> {
        self.terms.iter().map(|(e, _)| dot(e, w)).max()
    }
}

fn accumulate<S: Scalar>(acc: &mut HashMap<Exp, S>, e: Exp, c: S) {
    match acc.entry(e) {
        std::collections::hash_map::Entry::Occupied(mut o) => {
            let v = o.get().plus(&c);
            *o.get_mut() = v;
        }
        std::collections::hash_map::Entry::Vacant(v) => {
            v.insert(c);
        }
    }
}

fn merge_maps<S: Scalar>(mut a: HashMap<Exp, S>, b: HashMap<Exp, S>) -> HashMap<Exp, S> {
    if a.len() < b.len() {
        return merge_maps(b, a);
    }
    for (e, c) in b {
        accumulate(&mut a, e, c);
    }
    a
}

fn scalar_pow<S: Scalar>(c: &S, k: i32) -> Option<S> {
    let base = if k < 0 { c.inverse()? } else { c.clone() };
    let mut acc = c.one_like();
    for _ in 0..k.unsigned_abs() {
        acc = acc.times(&base);
    }
    Some(acc)
}

macro_rules! forward_poly_op {
    ($trait:ident, $method:ident, $impl:ident) => {
        impl<S: Scalar> std::ops::$trait<&LaurentPoly<S>> for &LaurentPoly<S> {
            type Output = LaurentPoly<S>;
            /// Panics if the variable sets differ.
            fn $method(self, rhs: &LaurentPoly<S>) -> LaurentPoly<S> {
                self.$impl(rhs).expect("polynomial variable sets differ")
            }
        }
    };
}

forward_poly_op!(Add, add, try_add);
forward_poly_op!(Sub, sub, try_sub);
forward_poly_op!(Mul, mul, try_mul);

impl<S: Scalar> std::ops::Neg for &LaurentPoly<S> {
    type Output = LaurentPoly<S>;
    fn neg(self) -> LaurentPoly<S> {
        LaurentPoly::neg(self)
    }
}

impl<S: Scalar> fmt::Display for LaurentPoly<S> {
    /// Terms in descending canonical order, e.g. `z^2 - x_1*z + 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.terms.iter().rev().enumerate() {
            let mono: Vec<String> = e
                .iter()
                .zip(self.vars.names())
                .filter(|(&k, _)| k != 0)
                .map(|(&k, v)| if k == 1 { v.clone() } else { format!("{v}^{k}") })
                .collect();
            let cs = c.to_string();
            let (neg, body) = match cs.strip_prefix('-') {
                Some(rest) if !rest.contains(['+', ' ']) => (true, rest.to_string()),
                _ => (false, cs.clone()),
            };
            let body = if body.contains(['+', ' ']) { format!("({body})") } else { body };
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            match (mono.is_empty(), body == "1") {
                (true, _) => write!(f, "{body}")?,
                (false, true) => write!(f, "{}", mono.join("*"))?,
                (false, false) => write!(f, "{body}*{}", mono.join("*"))?,
            }
        }
        Ok(())
    }
}

impl<S: Scalar> fmt::Debug for LaurentPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} over {:?}", self.vars)
    }
}
