//! The universal polynomials counting stable Hitchin bundles.
//!
//! `hcal(g, n, p)` is the coefficient of `T^n` in `(1-t)(1-zt) Log Z_{g,p}`,
//! computed through the finite sum over partitions `lambda0` of `n` and their
//! `(r, m)` decompositions; `universal_h` evaluates it at `t = 1` and applies
//! the sign and power of `z`. The plethystic-series route is kept as an
//! independent cross-check ([`hcal_via_series`]).
//!
//! The formulas are stated for `p >= 1`; every function here accepts any
//! integer `p`, and polynomiality of the result is checked, never assumed.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::partitions::{enumerate_decompositions, enumerate_partitions, Partition};
use crate::polyalg::{zero_exp, Exp, FactoredRational, LaurentPoly, MonomialImage, RatPoly, TruncSeries, VarSet};
use crate::scalars::{factorial, mu, Rational};
use crate::{Error, Result, ENGINE_VERSION};

type Frac = FactoredRational<Rational>;

/// Variables `x_1..x_g, z, t`.
pub fn hcal_vars(g: u32) -> VarSet {
    VarSet::standard(g, &["t"])
}

/// Variables `x_1..x_g, z`.
pub fn h_vars(g: u32) -> VarSet {
    VarSet::standard(g, &[])
}

/// Exponent vector over `x_1..x_g, z, t` with the given `z` and `t` degrees.
fn zt(g: u32, z: i32, t: i32) -> Exp {
    let mut e = zero_exp(g as usize + 2);
    e[g as usize] = z;
    e[g as usize + 1] = t;
    e
}

/// `prod_i (1 - x_i T)(1 - x_i^-1 z T) / ((1 - T)(1 - z T))` where `T` is
/// the monomial `t_arg` in `z, t` (an exponent vector over [`hcal_vars`]).
pub fn z_g(g: u32, t_arg: &Exp) -> Frac {
    let vars = hcal_vars(g);
    let mut num = LaurentPoly::constant(&vars, Rational::one());
    for i in 0..g as usize {
        let mut a = t_arg.clone();
        a[i] += 1;
        let mut b = t_arg.clone();
        b[i] -= 1;
        b[g as usize] += 1;
        num = num.mul_binomial(&a).mul_binomial(&b);
    }
    let mut zt_arg = t_arg.clone();
    zt_arg[g as usize] += 1;
    FactoredRational::new(num, [t_arg.clone(), zt_arg])
}

/// The factor attached to a partition:
/// `prod_cells (-t^(a-l) z^a)^p t^((1-g)(2l+1)) Z_g(t^h z^a)`.
pub fn zcal_term(g: u32, p: i64, lambda: &Partition) -> Frac {
    let vars = hcal_vars(g);
    let gi = g as i64;
    let mut acc = FactoredRational::from_poly(LaurentPoly::constant(&vars, Rational::one()));
    let (mut zexp, mut texp) = (0i64, 0i64);
    for c in lambda.cell_stats() {
        let (a, l, h) = (c.arm as i64, c.leg as i64, c.hook as i64);
        zexp += p * a;
        texp += p * (a - l) + (1 - gi) * (2 * l + 1);
        acc = acc.mul(&z_g(g, &zt(g, a as i32, h as i32)));
    }
    let sign = if (p * lambda.size() as i64).rem_euclid(2) == 1 { -1 } else { 1 };
    let mono = LaurentPoly::monomial(&vars, zt(g, zexp as i32, texp as i32), Rational::from(sign));
    acc.mul_poly(&mono)
}

/// Cancels `(1 - t)(1 - z t)` against the sum and clears the denominator.
fn finish(g: u32, f: &Frac) -> Result<RatPoly> {
    f.mul_binomial(&zt(g, 0, 1)).mul_binomial(&zt(g, 1, 1)).normalize()
}

/// `H_{g,n,p}` in `x_1..x_g, z, t` by the finite partition sum.
///
/// Single terms are genuine rational functions; only the full sum over
/// `lambda0` is a Laurent polynomial, so the denominator is cleared once at
/// the end.
pub fn hcal(g: u32, n: u32, p: i64) -> Result<RatPoly> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let vars = hcal_vars(g);
    let one = Rational::one();
    let mut factors: HashMap<Partition, Frac> = HashMap::new();
    for k in 1..=n {
        for lam in enumerate_partitions(k) {
            let f = zcal_term(g, p, &lam);
            factors.insert(lam, f);
        }
    }
    let mut jobs = Vec::new();
    for lambda0 in enumerate_partitions(n) {
        jobs.extend(enumerate_decompositions(&lambda0)?);
    }
    let terms: Vec<Frac> = jobs
        .par_iter()
        .filter(|d| mu(d.r as u64) != 0)
        .map(|d| {
            let sigma = d.sigma();
            let mut coeff = &Rational::from(mu(d.r as u64)) * &factorial(sigma as u64);
            coeff = &coeff / &Rational::from(d.r as i64);
            if sigma % 2 == 1 {
                coeff = -coeff;
            }
            let mut prod = FactoredRational::from_poly(LaurentPoly::constant(&vars, one.clone()));
            for (lam, &m) in &d.mult {
                coeff = &coeff / &factorial(m as u64);
                prod = prod.mul(&factors[lam].adams(d.r).pow(m, &one));
            }
            prod.scale_rational(&coeff)
        })
        .collect();
    finish(g, &FactoredRational::sum_all(&vars, terms))
}

/// `H_{g,n,p}` as the `T^n` coefficient of `(1-t)(1-zt) Log(1 + sum_k Z_k T^k)`.
pub fn hcal_via_series(g: u32, n: u32, p: i64) -> Result<RatPoly> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let vars = hcal_vars(g);
    let mut coeffs = vec![FactoredRational::from_poly(LaurentPoly::constant(&vars, Rational::one()))];
    for k in 1..=n {
        let parts: Vec<Frac> = enumerate_partitions(k).iter().map(|lam| zcal_term(g, p, lam)).collect();
        coeffs.push(FactoredRational::sum_all(&vars, parts));
    }
    let series = TruncSeries::new(&vars, n as usize, coeffs);
    let log = series.plethystic_log()?;
    finish(g, log.coeff(n as usize))
}

/// A computed universal polynomial with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniversalPoly {
    pub g: u32,
    pub n: u32,
    pub p: i64,
    #[serde(skip)]
    pub poly: RatPoly,
    /// Hex SHA-256 of the parameters and engine version.
    pub provenance: String,
}

pub fn provenance(family: &str, params: &[i64]) -> String {
    let key = format!("{family}|{}|{ENGINE_VERSION}", params.iter().map(i64::to_string).collect::<Vec<_>>().join("|"));
    hex::encode(Sha256::digest(key.as_bytes()))
}

/// The power of `z` in the normalization of the universal polynomial,
/// `(g-1) n^2 + p n (n+1) / 2`.
pub fn z_shift(g: u32, n: u32, p: i64) -> i64 {
    (g as i64 - 1) * (n as i64).pow(2) + p * (n as i64) * (n as i64 + 1) / 2
}

/// `prod_i (1 - x_i)(1 - x_i^-1 z)` over `x_1..x_g, z`.
pub fn jacobian_factor(g: u32) -> RatPoly {
    let vars = h_vars(g);
    let mut out = LaurentPoly::constant(&vars, Rational::one());
    for i in 0..g as usize {
        let mut a = zero_exp(g as usize + 1);
        a[i] = 1;
        let mut b = zero_exp(g as usize + 1);
        b[i] = -1;
        b[g as usize] = 1;
        out = out.mul_binomial(&a).mul_binomial(&b);
    }
    out
}

/// Evaluates `H_{g,n,p}` at `t = 1`, applies `(-1)^(pn) z^shift`, and
/// checks integrality, symmetry and divisibility before returning.
pub fn universal_h(g: u32, n: u32, p: i64) -> Result<UniversalPoly> {
    let h = hcal(g, n, p)?;
    let at_one = h.specialize(&[("t", Rational::one())])?.restrict(&h_vars(g))?;
    let sign = if (p * n as i64).rem_euclid(2) == 1 { -1 } else { 1 };
    let mut shift = zero_exp(g as usize + 1);
    shift[g as usize] = z_shift(g, n, p) as i32;
    let poly = at_one.mul_term(&shift, &Rational::from(sign));
    let out = UniversalPoly { g, n, p, poly, provenance: provenance("universal", &[g as i64, n as i64, p]) };
    check_invariants(&out)?;
    Ok(out)
}

/// Memoized [`universal_h`]; results are shared for the life of the process.
pub fn universal_h_cached(g: u32, n: u32, p: i64) -> Result<Arc<UniversalPoly>> {
    type Table = HashMap<(u32, u32, i64), Arc<UniversalPoly>>;
    static CACHE: OnceLock<Mutex<Table>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(u) = cache.lock().unwrap().get(&(g, n, p)) {
        return Ok(u.clone());
    }
    let u = Arc::new(universal_h(g, n, p)?);
    cache.lock().unwrap().insert((g, n, p), u.clone());
    Ok(u)
}

/// Images realizing the transposition `x_i <-> x_j` on `x_1..x_g, z`.
pub fn transposition(g: u32, i: usize, j: usize) -> Vec<MonomialImage<Rational>> {
    let n = g as usize + 1;
    (0..n)
        .map(|k| {
            let target = if k == i {
                j
            } else if k == j {
                i
            } else {
                k
            };
            let mut e = zero_exp(n);
            e[target] = 1;
            MonomialImage { coeff: Rational::one(), exp: e }
        })
        .collect()
}

/// Images realizing the flip `x_i -> z x_i^-1` on `x_1..x_g, z`.
pub fn flip(g: u32, i: usize) -> Vec<MonomialImage<Rational>> {
    let n = g as usize + 1;
    (0..n)
        .map(|k| {
            let mut e = zero_exp(n);
            if k == i {
                e[i] = -1;
                e[g as usize] = 1;
            } else {
                e[k] = 1;
            }
            MonomialImage { coeff: Rational::one(), exp: e }
        })
        .collect()
}

/// Whether `p` is fixed by all transpositions and flips of `x_1..x_g`.
pub fn is_symmetric(g: u32, p: &RatPoly) -> Result<bool> {
    let vars = p.vars().clone();
    for i in 0..g as usize {
        if p.substitute(&vars, &flip(g, i))? != *p {
            return Ok(false);
        }
        for j in i + 1..g as usize {
            if p.substitute(&vars, &transposition(g, i, j))? != *p {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The quotient `H / (z^shift prod (1-x_i)(1-x_i^-1 z))`, which must be a
/// polynomial in `z` (for `g = 0` only the power of `z` is removed).
pub fn reduced_quotient(u: &UniversalPoly) -> Result<RatPoly> {
    let mut q = u.poly.exact_divide(&jacobian_factor(u.g))?;
    let mut shift = zero_exp(u.g as usize + 1);
    shift[u.g as usize] = -z_shift(u.g, u.n, u.p) as i32;
    q = q.mul_term(&shift, &Rational::one());
    Ok(q)
}

fn check_invariants(u: &UniversalPoly) -> Result<()> {
    let ctx = |what: &str| format!("universal polynomial (g={}, n={}, p={}): {what}", u.g, u.n, u.p);
    if !u.poly.is_integral() {
        return Err(Error::InvariantViolation(ctx("non-integer coefficient")));
    }
    if !is_symmetric(u.g, &u.poly)? {
        return Err(Error::InvariantViolation(ctx("not invariant under transpositions and flips")));
    }
    let q = reduced_quotient(u).map_err(|e| match e {
        Error::NotDivisible { remainder } => {
            Error::InvariantViolation(ctx(&format!("not divisible by the Jacobian factor: {remainder}")))
        }
        other => other,
    })?;
    // the bound on the z-degree is only claimed in the range p >= 1
    if u.p >= 1 && !q.is_zero() && q.min_exponents()[u.g as usize] < 0 {
        return Err(Error::InvariantViolation(ctx("negative power of z after removing the normalization")));
    }
    Ok(())
}

/// `z^(g-1+p) prod (1-x_i)(1-x_i^-1 z)`, the value of the rank-one polynomial.
pub fn rank_one_closed_form(g: u32, p: i64) -> RatPoly {
    let mut e = zero_exp(g as usize + 1);
    e[g as usize] = (g as i64 - 1 + p) as i32;
    jacobian_factor(g).mul_term(&e, &Rational::one())
}

/// Evaluates a polynomial in `x_1..x_g, z` with all `x_i` and `z` set to integers.
pub fn eval_integer(p: &RatPoly, xs: &[i64], z: i64) -> Result<Rational> {
    let mut values: Vec<(String, Rational)> =
        xs.iter().enumerate().map(|(i, &x)| (format!("x_{}", i + 1), Rational::from(x))).collect();
    values.push(("z".into(), Rational::from(z)));
    let refs: Vec<(&str, Rational)> = values.iter().map(|(n, v)| (n.as_str(), v.clone())).collect();
    let s = p.specialize(&refs)?;
    Ok(s.as_constant().cloned().unwrap_or_else(Rational::zero))
}

/// The integer value of `H_{0,n,p}` at `z = q`.
pub fn genus_zero_value(n: u32, p: i64, q: i64) -> Result<BigInt> {
    let h = universal_h_cached(0, n, p)?;
    let v = eval_integer(&h.poly, &[], q)?;
    v.to_integer().ok_or_else(|| Error::InvariantViolation(format!("non-integral value {v}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::Partition;

    fn vars_t(g: u32) -> VarSet {
        hcal_vars(g)
    }

    #[test]
    fn z_g_small_cases() {
        let v = vars_t(0);
        let f = z_g(0, &zt(0, 0, 1));
        assert_eq!(f.numerator(), &LaurentPoly::constant(&v, Rational::one()));
        assert_eq!(f.denominator().len(), 2);

        // g = 1: (1 - x t)(1 - x^-1 z t) / ((1-t)(1-zt)); check numerator expansion
        let f = z_g(1, &zt(1, 0, 1));
        let v = vars_t(1);
        let want = LaurentPoly::from_terms(
            &v,
            [
                (zero_exp(3), Rational::from(1)),
                ([1, 0, 1].into_iter().collect(), Rational::from(-1)),
                ([-1, 1, 1].into_iter().collect(), Rational::from(-1)),
                ([0, 1, 2].into_iter().collect(), Rational::from(1)),
            ],
        );
        assert_eq!(f.numerator(), &want);

        // substitution instance t -> t^2 z
        let f2 = z_g(1, &zt(1, 1, 2));
        let images = vec![
            MonomialImage { coeff: Rational::one(), exp: [1, 0, 0].into_iter().collect() },
            MonomialImage { coeff: Rational::one(), exp: [0, 1, 0].into_iter().collect() },
            MonomialImage { coeff: Rational::one(), exp: [0, 1, 2].into_iter().collect() },
        ];
        assert_eq!(f.numerator().substitute(&v, &images).unwrap(), *f2.numerator());
    }

    #[test]
    fn zcal_single_cell() {
        // lambda = (1): (-1)^p t^(1-g) Z_g
        for g in 0..=2 {
            for p in 1..=3 {
                let f = zcal_term(g, p, &Partition::new(vec![1]));
                let sign = if p % 2 == 1 { -1 } else { 1 };
                let want = z_g(g, &zt(g, 0, 1)).mul_poly(&LaurentPoly::monomial(
                    &vars_t(g),
                    zt(g, 0, 1 - g as i32),
                    Rational::from(sign),
                ));
                assert!(f.value_eq(&want));
            }
        }
        // g = 1, p = 2: exactly Z_1
        assert!(zcal_term(1, 2, &Partition::new(vec![1])).value_eq(&z_g(1, &zt(1, 0, 1))));
    }

    #[test]
    fn zcal_two_cell_row_by_hand() {
        // lambda = (2), g = 0, p = 1: cells (a,l,h) = (1,0,2), (0,0,1)
        // factor: (-t z)(t) * (-1)(t) * Z_0(t^2 z) Z_0(t) = t^3 z Z_0(t^2 z) Z_0(t)
        let f = zcal_term(0, 1, &Partition::new(vec![2]));
        let v = vars_t(0);
        let want = z_g(0, &zt(0, 1, 2)).mul(&z_g(0, &zt(0, 0, 1))).mul_poly(&LaurentPoly::monomial(
            &v,
            zt(0, 1, 3),
            Rational::one(),
        ));
        assert!(f.value_eq(&want));
    }

    #[test]
    fn hcal_rank_one_closed_form() {
        for g in 0..=2u32 {
            for p in 1..=3 {
                let h = hcal(g, 1, p).unwrap();
                let v = vars_t(g);
                let sign = if p % 2 == 1 { -1 } else { 1 };
                let mut want = LaurentPoly::monomial(&v, zt(g, 0, 1 - g as i32), Rational::from(sign));
                for i in 0..g as usize {
                    let mut a = zt(g, 0, 1);
                    a[i] = 1;
                    let mut b = zt(g, 1, 1);
                    b[i] = -1;
                    want = want.mul_binomial(&a).mul_binomial(&b);
                }
                assert_eq!(h, want, "g = {g}, p = {p}");
            }
        }
    }

    #[test]
    fn hcal_matches_series_small() {
        assert_eq!(hcal(1, 2, 1).unwrap(), hcal_via_series(1, 2, 1).unwrap());
        assert_eq!(hcal(0, 3, 2).unwrap(), hcal_via_series(0, 3, 2).unwrap());
    }

    #[test]
    fn universal_rank_one() {
        for (g, p) in [(0, 1), (0, 3), (1, 1), (1, 2), (2, 2)] {
            assert_eq!(universal_h(g, 1, p).unwrap().poly, rank_one_closed_form(g, p));
        }
        assert_eq!(universal_h(0, 1, 3).unwrap().poly.to_string(), "z^2");
    }

    #[test]
    fn rank_one_reduced_quotient_is_one() {
        for g in 0..=2 {
            let h = universal_h(g, 1, 2).unwrap();
            assert_eq!(reduced_quotient(&h).unwrap(), LaurentPoly::constant(&h_vars(g), Rational::one()));
        }
    }

    #[test]
    fn rank_two_genus_zero_small_twists_vanish() {
        // no stable rank-2 pairs on the projective line with deg D <= 0
        assert!(universal_h(0, 2, 1).unwrap().poly.is_zero());
        assert!(universal_h(0, 2, 2).unwrap().poly.is_zero());
    }

    #[test]
    fn rank_two_genus_one_factorizes() {
        // hand factorization of the computed value: z^3 (1 + z) (1 - x)(1 - z/x)
        let u = universal_h(1, 2, 1).unwrap();
        let v = h_vars(1);
        let z3 = LaurentPoly::from_terms(
            &v,
            [([0, 3].into_iter().collect(), Rational::one()), ([0, 4].into_iter().collect(), Rational::one())],
        );
        assert_eq!(u.poly, &z3 * &jacobian_factor(1));
    }

    #[test]
    fn provenance_is_stable() {
        assert_eq!(provenance("universal", &[1, 2, 3]), provenance("universal", &[1, 2, 3]));
        assert_ne!(provenance("universal", &[1, 2, 3]), provenance("universal", &[1, 3, 2]));
    }
}
