//! Zeta numerators of curves over finite fields and their Frobenius
//! eigenvalues.

use astro_float::{BigFloat, RoundingMode};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::complex::{log2_magnitude, to_f64, Cx, Prec};
use crate::scalars::Rational;
use crate::{Error, Result};

/// Working precision and the accepted distance of a count to an integer.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalPrecision {
    pub bits: usize,
    pub integrality_tolerance: f64,
}

impl Default for EvalPrecision {
    fn default() -> Self {
        EvalPrecision { bits: 256, integrality_tolerance: 2f64.powi(-20) }
    }
}

impl EvalPrecision {
    pub fn with_bits(bits: usize) -> Self {
        EvalPrecision { bits, ..Default::default() }
    }

    pub fn check(&self) -> Result<()> {
        if self.bits < 64 {
            return Err(Error::InvalidInput(format!("precision of {} bits is below the minimum of 64", self.bits)));
        }
        if !(self.integrality_tolerance > 0.0 && self.integrality_tolerance < 0.5) {
            return Err(Error::InvalidInput("integrality tolerance must lie in (0, 1/2)".into()));
        }
        Ok(())
    }

    pub(crate) fn prec(&self) -> Prec {
        Prec(self.bits)
    }
}

/// `(q, g, P)` with `P(T) = a_0 + a_1 T + ... + a_{2g} T^{2g}` the numerator
/// of the zeta function.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeilDatum {
    pub q: u64,
    pub g: u32,
    pub zeta_numerator: Vec<i64>,
}

pub(crate) fn is_prime_power(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let p = (2..=q).find(|p| q.is_multiple_of(*p)).expect("q >= 2 has a prime factor");
    let mut r = q;
    while r.is_multiple_of(p) {
        r /= p;
    }
    r == 1
}

/// Elementary symmetric functions to power sums, `s_1..s_count`.
fn power_sums(a: &[BigInt], count: usize) -> Vec<BigInt> {
    // a_k = (-1)^k e_k
    let e = |k: usize| -> BigInt {
        let v = a.get(k).cloned().unwrap_or_default();
        if k % 2 == 1 {
            -v
        } else {
            v
        }
    };
    let mut s = vec![BigInt::zero(); count + 1];
    for k in 1..=count {
        let mut acc = BigInt::zero();
        for i in 1..k {
            let term = e(i) * &s[k - i];
            acc += if i % 2 == 1 { term } else { -term };
        }
        let last = e(k) * k;
        acc += if k % 2 == 1 { last } else { -last };
        s[k] = acc;
    }
    s
}

/// Power sums `t_1..t_n` of `n` values back to `1 - e_1 T + e_2 T^2 - ...`.
fn from_power_sums(t: &[BigInt], n: usize) -> Result<Vec<BigInt>> {
    let mut e = vec![BigInt::one()];
    for k in 1..=n {
        let mut acc = BigInt::zero();
        for i in 1..=k {
            let term = &e[k - i] * &t[i];
            acc += if i % 2 == 1 { term } else { -term };
        }
        if !(&acc % k).is_zero() {
            return Err(Error::InvariantViolation("base change produced a non-integral coefficient".into()));
        }
        e.push(acc / k);
    }
    Ok(e.into_iter().enumerate().map(|(k, v)| if k % 2 == 1 { -v } else { v }).collect())
}

impl WeilDatum {
    pub fn new(q: u64, g: u32, zeta_numerator: Vec<i64>) -> Self {
        WeilDatum { q, g, zeta_numerator }
    }

    pub fn projective_line(q: u64) -> Self {
        WeilDatum { q, g: 0, zeta_numerator: vec![1] }
    }

    pub fn coeffs(&self) -> Vec<BigInt> {
        self.zeta_numerator.iter().map(|&a| BigInt::from(a)).collect()
    }

    /// Shape checks and the exact functional equation `a_{2g-i} = q^(g-i) a_i`.
    pub fn check_exact(&self) -> Result<()> {
        if !is_prime_power(self.q) {
            return Err(Error::InvalidInput(format!("q = {} is not a prime power", self.q)));
        }
        let want = 2 * self.g as usize + 1;
        if self.zeta_numerator.len() != want {
            return Err(Error::InvalidInput(format!(
                "zeta numerator of a genus {} curve needs {want} coefficients, got {}",
                self.g,
                self.zeta_numerator.len()
            )));
        }
        if self.zeta_numerator[0] != 1 {
            return Err(Error::InvalidInput("zeta numerator must have constant term 1".into()));
        }
        let a = self.coeffs();
        let q = BigInt::from(self.q);
        let n = 2 * self.g as usize;
        for i in 0..=n {
            if &a[n - i] * q.pow(i as u32) != &a[i] * q.pow(self.g) {
                return Err(Error::FunctionalEquationViolated(format!(
                    "a_{} = {} but q^{} a_{} requires {}",
                    n - i,
                    a[n - i],
                    self.g as i64 - i as i64,
                    i,
                    Rational::new(&a[i] * q.pow(self.g), q.pow(i as u32)).expect("q > 0")
                )));
            }
        }
        Ok(())
    }

    /// The zeta numerator of the same curve over the degree-`m` extension.
    pub fn base_change(&self, m: u32) -> Result<WeilDatum> {
        if m == 0 {
            return Err(Error::InvalidInput("extension degree must be at least 1".into()));
        }
        let n = 2 * self.g as usize;
        let s = power_sums(&self.coeffs(), n * m as usize);
        let mut t = vec![BigInt::zero()];
        t.extend((1..=n).map(|k| s[k * m as usize].clone()));
        let coeffs = from_power_sums(&t, n)?
            .into_iter()
            .map(|c| i64::try_from(&c).map_err(|_| Error::InvalidInput(format!("coefficient {c} exceeds 64 bits"))))
            .collect::<Result<Vec<_>>>()?;
        let q = self.q.checked_pow(m).ok_or_else(|| Error::InvalidInput(format!("q^{m} exceeds 64 bits")))?;
        Ok(WeilDatum { q, g: self.g, zeta_numerator: coeffs })
    }

    /// `|J(F_{q^m})| = P_m(1)`.
    pub fn jacobian_order(&self, m: u32) -> Result<BigInt> {
        let b = self.base_change(m)?;
        Ok(b.zeta_numerator.iter().map(|&a| BigInt::from(a)).sum())
    }

    /// Power sums `s_k` of all `2g` eigenvalues, `k = 0..=count`.
    pub fn eigenvalue_power_sums(&self, count: usize) -> Vec<BigInt> {
        let mut s = power_sums(&self.coeffs(), count);
        s[0] = BigInt::from(2 * self.g);
        s
    }
}

/// A validated datum together with one eigenvalue from each pair `{l, q/l}`.
#[derive(Clone, Debug)]
pub struct ValidatedWeil {
    pub datum: WeilDatum,
    pub lambdas: Vec<Cx>,
    pub precision: EvalPrecision,
}

impl ValidatedWeil {
    pub fn duals(&self) -> Vec<Cx> {
        let p = self.precision.prec();
        let q = p.int(self.datum.q as i64);
        self.lambdas.iter().map(|l| p.div(&q, l)).collect()
    }
}

pub fn validate_weil(w: &WeilDatum, prec: &EvalPrecision) -> Result<ValidatedWeil> {
    prec.check()?;
    w.check_exact()?;
    let a: Vec<Rational> = w.zeta_numerator.iter().map(|&c| Rational::from(c)).collect();
    let lambdas = weil_pairs(&a, w.q, prec)?;
    Ok(ValidatedWeil { datum: w.clone(), lambdas, precision: *prec })
}

// Univariate polynomials over Q, coefficients from the constant term up.

fn trim(mut p: Vec<Rational>) -> Vec<Rational> {
    while p.last().is_some_and(Rational::is_zero) {
        p.pop();
    }
    p
}

fn derivative(p: &[Rational]) -> Vec<Rational> {
    trim(p.iter().enumerate().skip(1).map(|(i, c)| c * &Rational::from(i as i64)).collect())
}

fn divrem(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let b = trim(b.to_vec());
    let mut r = trim(a.to_vec());
    if r.len() < b.len() {
        return (vec![], r);
    }
    let lead = b.last().expect("nonzero divisor").clone();
    let mut q = vec![Rational::zero(); r.len() - b.len() + 1];
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let c = r.last().unwrap() / &lead;
        for (i, bc) in b.iter().enumerate() {
            r[i + shift] = &r[i + shift] - &(&c * bc);
        }
        q[shift] = c;
        r.pop();
        r = trim(r);
    }
    (trim(q), r)
}

fn monic(p: Vec<Rational>) -> Vec<Rational> {
    let lead = p.last().expect("nonzero polynomial").clone();
    p.iter().map(|c| c / &lead).collect()
}

fn gcd(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let (mut x, mut y) = (trim(a.to_vec()), trim(b.to_vec()));
    while !y.is_empty() {
        let (_, r) = divrem(&x, &y);
        x = y;
        y = r;
    }
    monic(x)
}

/// Yun's square-free decomposition: `f = prod_i f_i^i`, returned as `(f_i, i)`.
fn square_free_parts(f: &[Rational]) -> Vec<(Vec<Rational>, usize)> {
    let f = monic(trim(f.to_vec()));
    if f.len() <= 1 {
        return vec![];
    }
    let df = derivative(&f);
    let a0 = gcd(&f, &df);
    let mut b = divrem(&f, &a0).0;
    let mut c = divrem(&df, &a0).0;
    let mut out = Vec::new();
    let mut i = 1;
    loop {
        let db = derivative(&b);
        let d: Vec<Rational> = {
            let n = c.len().max(db.len());
            trim(
                (0..n)
                    .map(|k| {
                        let x = c.get(k).cloned().unwrap_or_else(Rational::zero);
                        let y = db.get(k).cloned().unwrap_or_else(Rational::zero);
                        &x - &y
                    })
                    .collect(),
            )
        };
        if b.len() <= 1 {
            break;
        }
        let a = if d.is_empty() { monic(b.clone()) } else { gcd(&b, &d) };
        if a.len() > 1 {
            out.push((a.clone(), i));
        }
        b = divrem(&b, &a).0;
        c = if d.is_empty() { vec![] } else { divrem(&d, &a).0 };
        i += 1;
    }
    out
}

fn eval(p: Prec, coeffs: &[BigFloat], x: &Cx) -> Cx {
    let mut acc = Cx::real(coeffs.last().expect("nonempty").clone());
    for c in coeffs.iter().rev().skip(1) {
        acc = p.add(&p.mul(&acc, x), &Cx::real(c.clone()));
    }
    acc
}

/// Roots of a square-free monic polynomial by simultaneous (Durand-Kerner)
/// iteration.
fn durand_kerner(f: &[Rational], radius: f64, prec: Prec) -> Result<Vec<Cx>> {
    let n = f.len() - 1;
    let p = Prec(prec.0 + 64);
    let coeffs: Vec<BigFloat> = f.iter().map(|c| p.real_rational(c)).collect();
    if n == 1 {
        return Ok(vec![Cx::real(coeffs[0].neg())]);
    }
    let seed = Cx { re: p.real_rational(&"2/5".parse().unwrap()), im: p.real_rational(&"9/10".parse().unwrap()) };
    let r = p
        .real_rational(&Rational::new(BigInt::from((radius * 1024.0).round() as i64 + 1), BigInt::from(1024)).unwrap());
    let mut z: Vec<Cx> = (0..n).map(|k| p.scale(&p.powi(&seed, k as i64), &r)).collect();
    let target = -2 * (prec.0 as i64 + 8) + 2 * (radius.log2().ceil() as i64 + 1);
    for _ in 0..5000 {
        let mut worst: Option<i64> = None;
        for j in 0..n {
            let mut den = p.int(1);
            for l in 0..n {
                if l != j {
                    den = p.mul(&den, &p.sub(&z[j], &z[l]));
                }
            }
            let step = p.div(&eval(p, &coeffs, &z[j]), &den);
            z[j] = p.sub(&z[j], &step);
            let size = log2_magnitude(&p.norm_sqr(&step));
            worst = match (worst, size) {
                (Some(a), Some(b)) => Some(a.max(b)),
                (a, b) => a.or(b),
            };
        }
        if worst.is_none_or(|k| k < target) {
            return Ok(z);
        }
    }
    Err(Error::InvalidInput("root finder did not converge".into()))
}

/// Roots of `T^n P(1/T)`, i.e. the eigenvalues, with multiplicities.
pub(crate) fn eigenvalues(a: &[Rational], q: u64, prec: &EvalPrecision) -> Result<Vec<(Cx, usize)>> {
    let reversed: Vec<Rational> = trim(a.to_vec()).into_iter().rev().collect();
    let radius = (q as f64).sqrt();
    let mut out = Vec::new();
    for (factor, mult) in square_free_parts(&reversed) {
        for root in durand_kerner(&factor, radius, prec.prec())? {
            out.push((root, mult));
        }
    }
    let p = prec.prec();
    Ok(out
        .into_iter()
        .map(|(mut c, m)| {
            c.re.set_precision(p.0, RoundingMode::ToEven).expect("valid precision");
            c.im.set_precision(p.0, RoundingMode::ToEven).expect("valid precision");
            (c, m)
        })
        .collect())
}

fn lex_cmp(a: &Cx, b: &Cx) -> std::cmp::Ordering {
    let c = a.re.cmp(&b.re).unwrap_or(0);
    let c = if c == 0 { a.im.cmp(&b.im).unwrap_or(0) } else { c };
    c.cmp(&0)
}

/// Eigenvalues with multiplicity, after checking `|l|^2 = q` for each.
pub(crate) fn checked_eigenvalues(a: &[Rational], q: u64, prec: &EvalPrecision) -> Result<Vec<(Cx, usize)>> {
    let p = prec.prec();
    let qf = p.int(q as i64);
    let half = -(prec.bits as i64) / 2;
    let roots = eigenvalues(a, q, prec)?;
    for (root, _) in &roots {
        let dev = p.norm_sqr(root).sub(&qf.re, p.0, RoundingMode::ToEven);
        let rel = dev.div(&qf.re, p.0, RoundingMode::ToEven);
        if log2_magnitude(&rel).is_some_and(|k| k > half) {
            let (re, im) = root.to_f64_pair();
            return Err(Error::RootModulusViolated(format!(
                "eigenvalue {re} + {im}i has absolute value {} instead of sqrt({q})",
                (re * re + im * im).sqrt()
            )));
        }
    }
    Ok(roots)
}

/// Picks one eigenvalue from each pair `{l, q/l}`: those with positive
/// imaginary part, and half of each real eigenvalue's multiplicity; sorted
/// lexicographically.
pub(crate) fn weil_pairs(a: &[Rational], q: u64, prec: &EvalPrecision) -> Result<Vec<Cx>> {
    let half = -(prec.bits as i64) / 2;
    let mut chosen = Vec::new();
    let (mut upper, mut lower) = (0usize, 0usize);
    for (root, mult) in checked_eigenvalues(a, q, prec)? {
        let im_size = log2_magnitude(&root.im);
        let real = im_size.is_none_or(|k| k < half + (q as f64).log2().ceil() as i64);
        if real {
            if mult % 2 == 1 {
                return Err(Error::FunctionalEquationViolated(format!(
                    "real eigenvalue {} has odd multiplicity {mult}",
                    to_f64(&root.re)
                )));
            }
            let r = Cx::real(root.re.clone());
            chosen.extend(std::iter::repeat_n(r, mult / 2));
        } else if root.im.is_positive() {
            upper += mult;
            chosen.extend(std::iter::repeat_n(root, mult));
        } else {
            lower += mult;
        }
    }
    if upper != lower {
        return Err(Error::FunctionalEquationViolated("eigenvalues are not closed under complex conjugation".into()));
    }
    chosen.sort_by(lex_cmp);
    Ok(chosen)
}

/// All eigenvalues, repeated by multiplicity and sorted lexicographically.
pub(crate) fn sorted_eigenvalues(a: &[Rational], q: u64, prec: &EvalPrecision) -> Result<Vec<Cx>> {
    let mut out: Vec<Cx> =
        checked_eigenvalues(a, q, prec)?.into_iter().flat_map(|(r, m)| std::iter::repeat_n(r, m)).collect();
    out.sort_by(lex_cmp);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::complex::round_to_bigint;

    fn prec() -> EvalPrecision {
        EvalPrecision::default()
    }

    #[test]
    fn elliptic_example() {
        let v = validate_weil(&WeilDatum::new(2, 1, vec![1, 0, 2]), &prec()).unwrap();
        assert_eq!(v.lambdas.len(), 1);
        let (re, im) = v.lambdas[0].to_f64_pair();
        assert!(re.abs() < 1e-30 && (im - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn genus_zero_has_no_eigenvalues() {
        let v = validate_weil(&WeilDatum::projective_line(2), &prec()).unwrap();
        assert!(v.lambdas.is_empty());
    }

    #[test]
    fn hasse_bound_violation() {
        let w = WeilDatum::new(2, 1, vec![1, 3, 2]);
        assert!(w.check_exact().is_ok());
        assert!(matches!(validate_weil(&w, &prec()), Err(Error::RootModulusViolated(_))));
    }

    #[test]
    fn functional_equation_violation() {
        let w = WeilDatum::new(3, 1, vec![1, 1, 2]);
        assert!(matches!(validate_weil(&w, &prec()), Err(Error::FunctionalEquationViolated(_))));
        assert!(matches!(validate_weil(&WeilDatum::new(6, 0, vec![1]), &prec()), Err(Error::InvalidInput(_))));
        assert!(matches!(
            validate_weil(&WeilDatum::new(2, 1, vec![1, 0, 2]), &EvalPrecision::with_bits(32)),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn repeated_and_real_eigenvalues() {
        // (1 + 2T^2)^2: eigenvalues +-i sqrt 2, each twice
        let v = validate_weil(&WeilDatum::new(2, 2, vec![1, 0, 4, 0, 4]), &prec()).unwrap();
        assert_eq!(v.lambdas.len(), 2);
        // (1 - 2T)^2 over F_4: eigenvalue 2 twice
        let v = validate_weil(&WeilDatum::new(4, 1, vec![1, -4, 4]), &prec()).unwrap();
        assert_eq!(round_to_bigint(&v.lambdas[0].re), BigInt::from(2));
    }

    #[test]
    fn genus_two_pairs_are_conjugate() {
        // y^2 = x^5 + 1 style datum over F_3: 1 + 0T + 0T^2 + 0T^3 + 9T^4
        let v = validate_weil(&WeilDatum::new(3, 2, vec![1, 0, 0, 0, 9]), &prec()).unwrap();
        let p = prec().prec();
        for (l, d) in v.lambdas.iter().zip(v.duals()) {
            let c = l.conj();
            assert!(log2_magnitude(&p.norm_sqr(&p.sub(&c, &d))).is_none_or(|k| k < -200));
        }
    }

    #[test]
    fn base_change_and_jacobian() {
        let w = WeilDatum::new(2, 1, vec![1, 0, 2]);
        assert_eq!(w.base_change(2).unwrap(), WeilDatum::new(4, 1, vec![1, 4, 4]));
        assert_eq!(w.jacobian_order(1).unwrap(), BigInt::from(3));
        assert_eq!(w.jacobian_order(2).unwrap(), BigInt::from(9));
        let e = WeilDatum::new(7, 1, vec![1, 0, 7]);
        assert_eq!(e.jacobian_order(1).unwrap(), BigInt::from(8));
        assert_eq!(WeilDatum::projective_line(5).base_change(3).unwrap(), WeilDatum::projective_line(125));
        // base change composes
        let g2 = WeilDatum::new(3, 2, vec![1, 1, 3, 3, 9]);
        assert_eq!(g2.base_change(6).unwrap(), g2.base_change(2).unwrap().base_change(3).unwrap());
    }

    #[test]
    fn square_free_split() {
        let f: Vec<Rational> = [4, 0, 4, 0, 1].iter().map(|&c| Rational::from(c)).collect();
        let parts = square_free_parts(&f);
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].1, 2);
        assert_eq!(parts[0].0.len(), 3);
    }
}
