//! Point counts over `F_{q^m}` from Frobenius eigenvalues.
//!
//! Universal and twisted polynomials are evaluated at `x_i = l_i^m`,
//! `z = q^m` in high-precision complex arithmetic and rounded to the
//! nearest integer, with the distance to that integer checked against the
//! tolerance. In genus at most one an exact path is available: the
//! polynomials are symmetric under `x <-> z/x`, so each monomial only needs
//! the power sums of the eigenvalues, which are integers.

pub mod complex;
pub mod cover;
pub mod weil;

use astro_float::Consts;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

pub use complex::{Cx, Prec};
pub use cover::{orbit_points, CharacterOrbit, CoverDatum};
pub use weil::{validate_weil, EvalPrecision, ValidatedWeil, WeilDatum};

use crate::polyalg::RatPoly;
use crate::scalars::{Cyclotomic, Rational};
use crate::twist::{block_weights, cover_genus, twisted_h, twisted_h_tilde};
use crate::universal::universal_h_cached;
use crate::{Error, Result};

/// A rounded point count.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Count {
    #[serde(with = "crate::scalars::bigint_string")]
    pub value: BigInt,
    /// Distance of the evaluated value to `value` (0 on the exact path).
    pub residual: f64,
    pub exact: bool,
    pub warnings: Vec<String>,
}

/// Which evaluation to use for the count functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Exact in genus at most one, numeric otherwise.
    Auto,
    Numeric,
}

/// Evaluates a Laurent polynomial in `x_1..x_k, z` at complex points.
pub fn evaluate(poly: &RatPoly, xs: &[Cx], z: &Cx, p: Prec) -> Result<Cx> {
    let nv = poly.vars().len();
    if nv != xs.len() + 1 {
        return Err(Error::InvalidInput(format!("{} points given for {} variables", xs.len() + 1, nv)));
    }
    let point = |i: usize| if i < xs.len() { &xs[i] } else { z };
    let mut powers: Vec<std::collections::HashMap<i32, Cx>> = vec![Default::default(); nv];
    let mut acc = p.int(0);
    for (exp, c) in poly.terms() {
        let mut t = p.rational(c);
        for (i, &k) in exp.iter().enumerate() {
            if k != 0 {
                let pw = powers[i].entry(k).or_insert_with(|| p.powi(point(i), k as i64));
                t = p.mul(&t, pw);
            }
        }
        acc = p.add(&acc, &t);
    }
    Ok(acc)
}

fn round_checked(v: &Cx, prec: &EvalPrecision) -> Result<(BigInt, f64)> {
    let r = complex::round_to_bigint(&v.re);
    let p = prec.prec();
    let diff = v.re.sub(&p.real_int(&r), p.0, astro_float::RoundingMode::ToEven);
    let residual = complex::to_f64(&diff).abs().max(complex::to_f64(&v.im).abs());
    if residual.is_nan() || residual >= prec.integrality_tolerance {
        let (re, im) = v.to_f64_pair();
        return Err(Error::IntegralityFailed {
            value: format!("{re:e} + {im:e} i (at {} bits)", prec.bits),
            tolerance: format!("{:e}", prec.integrality_tolerance),
        });
    }
    Ok((r, residual))
}

fn nonnegative(v: BigInt, what: &str) -> Result<BigInt> {
    if v.is_negative() {
        return Err(Error::InvalidInput(format!("{what} is negative ({v}); the data cannot come from a curve")));
    }
    Ok(v)
}

fn q_pow(q: u64, k: i64) -> Rational {
    Rational::from(BigInt::from(q)).pow(k as i32).expect("q is nonzero")
}

/// Exact value of a polynomial in `x_1..x_g, z` (`g <= 1`) that is symmetric
/// under `x_1 <-> z/x_1`, at `x_1 = l^m`, `z = q^m`: the two eigenvalues give
/// the same value, so each monomial contributes half the power sum.
pub fn evaluate_exact(poly: &RatPoly, w: &WeilDatum, m: u32) -> Result<Rational> {
    let g = w.g as usize;
    if g > 1 || poly.vars().len() != g + 1 {
        return Err(Error::InvalidInput("exact evaluation needs genus at most one".into()));
    }
    let qm = |k: i64| q_pow(w.q, m as i64 * k);
    if g == 0 {
        return Ok(poly.terms().iter().fold(Rational::zero(), |acc, (e, c)| &acc + &(c * &qm(e[0] as i64))));
    }
    let top = poly.terms().iter().map(|(e, _)| e[0].unsigned_abs() as usize).max().unwrap_or(0);
    let s = w.eigenvalue_power_sums(top * m as usize);
    let half = Rational::new(1.into(), 2.into()).expect("nonzero");
    let mut acc = Rational::zero();
    for (e, c) in poly.terms() {
        let (k, j) = (e[0] as i64, e[1] as i64);
        let mut t = &(c * &qm(j)) * &Rational::from(s[k.unsigned_abs() as usize * m as usize].clone());
        if k < 0 {
            t = &t * &qm(k);
        }
        acc = &acc + &t;
    }
    Ok(&acc * &half)
}

fn check_count_inputs(g: u32, n: u32, e: i64, deg_d: i64, m: u32) -> Result<i64> {
    if n == 0 {
        return Err(Error::InvalidInput("rank must be at least 1".into()));
    }
    if e.gcd(&(n as i64)) != 1 {
        return Err(Error::InvalidInput(format!("degree {e} is not coprime to the rank {n}")));
    }
    if deg_d <= 2 * g as i64 - 2 {
        return Err(Error::InvalidInput(format!("deg D = {deg_d} must exceed 2g - 2 = {}", 2 * g as i64 - 2)));
    }
    if m == 0 {
        return Err(Error::InvalidInput("extension degree must be at least 1".into()));
    }
    Ok(deg_d - (2 * g as i64 - 2))
}

fn powers_m(xs: &[Cx], m: u32, p: Prec) -> Vec<Cx> {
    xs.iter().map(|x| p.powi(x, m as i64)).collect()
}

/// `|M_n^e(F_{q^m})|`, the universal polynomial at the eigenvalues.
pub fn count_m(w: &WeilDatum, n: u32, e: i64, deg_d: i64, m: u32, prec: &EvalPrecision) -> Result<Count> {
    count_m_with(w, n, e, deg_d, m, prec, Method::Auto)
}

pub fn count_m_with(
    w: &WeilDatum,
    n: u32,
    e: i64,
    deg_d: i64,
    m: u32,
    prec: &EvalPrecision,
    method: Method,
) -> Result<Count> {
    let v = validate_weil(w, prec)?;
    let p_twist = check_count_inputs(w.g, n, e, deg_d, m)?;
    let h = universal_h_cached(w.g, n, p_twist)?;
    let (value, residual, exact) = if method == Method::Auto && w.g <= 1 {
        let r = evaluate_exact(&h.poly, w, m)?;
        let value = r
            .to_integer()
            .ok_or_else(|| Error::IntegralityFailed { value: r.to_string(), tolerance: "exact".into() })?;
        (value, 0.0, true)
    } else {
        let p = prec.prec();
        let xs = powers_m(&v.lambdas, m, p);
        let z = p.real_int(&BigInt::from(w.q).pow(m));
        let val = evaluate(&h.poly, &xs, &Cx::real(z), p)?;
        let (value, residual) = round_checked(&val, prec)?;
        (value, residual, false)
    };
    Ok(Count { value: nonnegative(value, "count")?, residual, exact, warnings: vec![] })
}

/// The parameters shared by every orbit term.
#[derive(Clone, Copy)]
struct Twist {
    n: u32,
    deg_d: i64,
    m: u32,
    /// `deg D - (2g - 2)`.
    p: i64,
    /// `e + n(n-1)/2 deg D`.
    e_tilde: i64,
}

/// Shared preconditions of the twisted counts; returns the parameters and
/// the cover warnings.
fn twisted_setup(
    w: &WeilDatum,
    cover: &CoverDatum,
    n: u32,
    e: i64,
    deg_d: i64,
    m: u32,
) -> Result<(Twist, Vec<String>)> {
    if w.g == 0 {
        return Err(Error::InvalidInput("twisted counts need genus at least 1".into()));
    }
    let p = check_count_inputs(w.g, n, e, deg_d, m)?;
    let warnings = cover.validate(w, n)?;
    let ni = n as i64;
    Ok((Twist { n, deg_d, m, p, e_tilde: e + ni * (ni - 1) * deg_d / 2 }, warnings))
}

/// `n_chi^2 d (d-1) / 2 * deg D`.
fn orbit_q_exponent(n: u32, d: u32, deg_d: i64) -> i64 {
    let nc = (n / d) as i64;
    nc * nc * (d as i64) * (d as i64 - 1) / 2 * deg_d
}

/// Which polynomial is summed over the orbits.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Family {
    Twisted,
    Quotient,
}

fn family_poly(f: Family, g: u32, n: u32, p: i64, d: u32, e: i64) -> Result<RatPoly> {
    match f {
        Family::Twisted => Ok(twisted_h(g, n, p, d, e)?.poly),
        Family::Quotient => twisted_h_tilde(g, n, p, d, e),
    }
}

/// `sum_orbits mult * (q^(r deg D) unit)^m * value(orbit)`, exactly (genus one).
fn orbit_sum_exact(f: Family, w: &WeilDatum, cover: &CoverDatum, t: Twist) -> Result<Cyclotomic> {
    let Twist { n, deg_d, m, .. } = t;
    let order =
        cover.orbits.iter().map(|o| u32::try_from(o.unit_exponent.denom()).unwrap_or(1)).fold(1u32, |a, b| a.lcm(&b));
    let terms = cover
        .orbits
        .par_iter()
        .map(|o| {
            let poly = family_poly(f, w.g, n, t.p, o.d, t.e_tilde)?;
            let value = evaluate_exact(&poly, w, m)?;
            let scalar = &(&value * &Rational::from(BigInt::from(o.multiplicity)))
                * &q_pow(w.q, m as i64 * orbit_q_exponent(n, o.d, deg_d));
            let turns = &o.unit_exponent * &Rational::from(order as i64 * m as i64);
            let k = turns.to_i64().expect("the order clears every denominator");
            Ok(Cyclotomic::root_power(order, k).scale(&scalar))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(terms.iter().fold(Cyclotomic::zero(order), |a, b| &a + b))
}

/// The same sum at working precision.
fn orbit_sum_numeric(f: Family, v: &ValidatedWeil, cover: &CoverDatum, t: Twist) -> Result<Cx> {
    let Twist { n, deg_d, m, .. } = t;
    let p = v.precision.prec();
    let q = v.datum.q;
    let terms = cover
        .orbits
        .par_iter()
        .map(|o| {
            let mut cc = Consts::new().map_err(|e| Error::InvalidInput(format!("constant cache: {e:?}")))?;
            let poly = family_poly(f, v.datum.g, n, t.p, o.d, t.e_tilde)?;
            let xs = powers_m(&orbit_points(v, o)?, m, p);
            let z = Cx::real(p.real_int(&BigInt::from(q).pow(m)));
            let value = evaluate(&poly, &xs, &z, p)?;
            let unit = p.unit(&(&o.unit_exponent * &Rational::from(m as i64)), &mut cc);
            let scalar =
                &q_pow(q, m as i64 * orbit_q_exponent(n, o.d, deg_d)) * &Rational::from(BigInt::from(o.multiplicity));
            Ok(p.mul(&p.scale(&unit, &p.real_rational(&scalar)), &value))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(terms.iter().fold(p.int(0), |a, b| p.add(&a, b)))
}

fn exact_integer(c: &Cyclotomic, divisor: &BigInt) -> Result<BigInt> {
    let fail = || Error::IntegralityFailed { value: format!("{c} / {divisor}"), tolerance: "exact".into() };
    let r = c.as_rational().ok_or_else(fail)?;
    (&r / &Rational::from(divisor.clone())).to_integer().ok_or_else(fail)
}

#[allow(clippy::too_many_arguments)]
fn twisted_count(
    f: Family,
    w: &WeilDatum,
    cover: &CoverDatum,
    n: u32,
    e: i64,
    deg_d: i64,
    m: u32,
    prec: &EvalPrecision,
    method: Method,
) -> Result<Count> {
    let v = validate_weil(w, prec)?;
    let (t, warnings) = twisted_setup(w, cover, n, e, deg_d, m)?;
    let divisor = match f {
        Family::Twisted => w.jacobian_order(m)?,
        Family::Quotient => BigInt::from(1),
    };
    if divisor.is_zero() {
        return Err(Error::InvalidInput("the Jacobian has no points".into()));
    }
    let (value, residual, exact) = if method == Method::Auto && w.g <= 1 {
        let sum = orbit_sum_exact(f, w, cover, t)?;
        (exact_integer(&sum, &divisor)?, 0.0, true)
    } else {
        let p = prec.prec();
        let sum = orbit_sum_numeric(f, &v, cover, t)?;
        let scaled = p.scale(&sum, &p.real_int(&divisor).reciprocal(p.0, astro_float::RoundingMode::ToEven));
        let (value, residual) = round_checked(&scaled, prec)?;
        (value, residual, false)
    };
    Ok(Count { value: nonnegative(value, "count")?, residual, exact, warnings })
}

/// `|N_n^beta(F_{q^m})|`: fixed determinant and trace zero.
pub fn count_n_trace0(
    w: &WeilDatum,
    cover: &CoverDatum,
    n: u32,
    e: i64,
    deg_d: i64,
    m: u32,
    prec: &EvalPrecision,
) -> Result<Count> {
    twisted_count(Family::Quotient, w, cover, n, e, deg_d, m, prec, Method::Auto)
}

#[allow(clippy::too_many_arguments)]
pub fn count_n_trace0_with(
    w: &WeilDatum,
    cover: &CoverDatum,
    n: u32,
    e: i64,
    deg_d: i64,
    m: u32,
    prec: &EvalPrecision,
    method: Method,
) -> Result<Count> {
    twisted_count(Family::Quotient, w, cover, n, e, deg_d, m, prec, method)
}

/// `|M_n^beta(F_{q^m})|`: fixed determinant.
pub fn count_m_fixed_det(
    w: &WeilDatum,
    cover: &CoverDatum,
    n: u32,
    e: i64,
    deg_d: i64,
    m: u32,
    prec: &EvalPrecision,
) -> Result<Count> {
    twisted_count(Family::Twisted, w, cover, n, e, deg_d, m, prec, Method::Auto)
}

#[allow(clippy::too_many_arguments)]
pub fn count_m_fixed_det_with(
    w: &WeilDatum,
    cover: &CoverDatum,
    n: u32,
    e: i64,
    deg_d: i64,
    m: u32,
    prec: &EvalPrecision,
    method: Method,
) -> Result<Count> {
    twisted_count(Family::Twisted, w, cover, n, e, deg_d, m, prec, method)
}

/// One orbit's share of the cover-side sum.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitTerm {
    pub d: u32,
    pub multiplicity: u64,
    /// `|M_{n/d}^e|` of the untwisted cover, from its own Weil datum.
    #[serde(with = "crate::scalars::bigint_string")]
    pub cover_count: BigInt,
    /// The same count as the untwisted term of the orbit average.
    pub cover_count_from_points: (f64, f64),
    /// Real and imaginary part of the orbit's contribution before dividing
    /// by `|J|`.
    pub contribution: (f64, f64),
}

/// Both sides of the fixed-determinant count: the twisted-polynomial
/// formula and the sum over covers of their own point counts.
#[derive(Clone, Debug, Serialize)]
pub struct ComparisonReport {
    #[serde(with = "crate::scalars::bigint_string")]
    pub lhs: BigInt,
    pub rhs: (f64, f64),
    #[serde(with = "crate::scalars::bigint_string")]
    pub rhs_rounded: BigInt,
    pub residual: f64,
    pub tolerance: f64,
    pub agree: bool,
    pub orbits: Vec<OrbitTerm>,
    pub warnings: Vec<String>,
}

/// Recomputes the fixed-determinant count as
/// `1/|J| sum_orbits mult q^(m r deg D) unit^m (1/d) sum_k zeta^(k e~) |M(C_k)|`,
/// where `C_k` is the cover with block `i` twisted by `zeta^(ik)`; the term
/// `k = 0` is also counted through the cover's own Weil datum.
pub fn verify_comparison(
    w: &WeilDatum,
    cover: &CoverDatum,
    n: u32,
    e: i64,
    deg_d: i64,
    m: u32,
    prec: &EvalPrecision,
) -> Result<ComparisonReport> {
    let lhs = count_m_fixed_det(w, cover, n, e, deg_d, m, prec)?;
    let v = validate_weil(w, prec)?;
    let (t, warnings) = twisted_setup(w, cover, n, e, deg_d, m)?;
    let p = prec.prec();
    let q = w.q;
    let z = Cx::real(p.real_int(&BigInt::from(q).pow(m)));
    let orbits = cover
        .orbits
        .par_iter()
        .map(|o| {
            let mut cc = Consts::new().map_err(|e| Error::InvalidInput(format!("constant cache: {e:?}")))?;
            let d = o.d;
            let nc = n / d;
            let cover_weil = o.cover_weil(w)?;
            let cover_count = count_m(&cover_weil, nc, e, d as i64 * deg_d, m, prec).map_err(|err| match err {
                Error::RootModulusViolated(s) | Error::FunctionalEquationViolated(s) => {
                    Error::CoverInconsistent(format!("cover of order {d}: {s}"))
                }
                other => other,
            })?;
            let h = universal_h_cached(cover_genus(w.g, d), nc, d as i64 * t.p)?;
            let base_points = powers_m(&orbit_points(&v, o)?, m, p);
            let weights = block_weights(w.g, d);
            let mut avg = p.int(0);
            let mut untwisted = p.int(0);
            for k in 0..d as i64 {
                let xs: Vec<Cx> = base_points
                    .iter()
                    .zip(&weights)
                    .map(|(x, &wt)| {
                        let turn = Rational::new(BigInt::from(k * wt as i64), BigInt::from(d)).expect("d > 0");
                        p.mul(&p.unit(&turn, &mut cc), x)
                    })
                    .collect();
                let val = evaluate(&h.poly, &xs, &z, p)?;
                if k == 0 {
                    untwisted = val.clone();
                }
                let turn = Rational::new(BigInt::from(k * t.e_tilde), BigInt::from(d)).expect("d > 0");
                avg = p.add(&avg, &p.mul(&p.unit(&turn, &mut cc), &val));
            }
            let (from_points, _) = round_checked(&untwisted, prec)?;
            if from_points != cover_count.value {
                return Err(Error::CoverInconsistent(format!(
                    "cover of order {d}: eigenvalue blocks give {from_points} points, its Weil datum gives {}",
                    cover_count.value
                )));
            }
            let unit = p.unit(&(&o.unit_exponent * &Rational::from(m as i64)), &mut cc);
            let scalar = &(&q_pow(q, m as i64 * orbit_q_exponent(n, d, deg_d))
                * &Rational::from(BigInt::from(o.multiplicity)))
                / &Rational::from(d as i64);
            let contribution = p.mul(&p.scale(&unit, &p.real_rational(&scalar)), &avg);
            Ok((
                OrbitTerm {
                    d,
                    multiplicity: o.multiplicity,
                    cover_count: cover_count.value,
                    cover_count_from_points: untwisted.to_f64_pair(),
                    contribution: contribution.to_f64_pair(),
                },
                contribution,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let total = orbits.iter().fold(p.int(0), |a, (_, c)| p.add(&a, c));
    let jac = w.jacobian_order(m)?;
    let rhs = p.scale(&total, &p.real_int(&jac).reciprocal(p.0, astro_float::RoundingMode::ToEven));
    let (rhs_rounded, residual, agree) = match round_checked(&rhs, prec) {
        Ok((r, res)) => (r.clone(), res, r == lhs.value),
        Err(_) => (complex::round_to_bigint(&rhs.re), f64::INFINITY, false),
    };
    Ok(ComparisonReport {
        lhs: lhs.value,
        rhs: rhs.to_f64_pair(),
        rhs_rounded,
        residual,
        tolerance: prec.integrality_tolerance,
        agree,
        orbits: orbits.into_iter().map(|(t, _)| t).collect(),
        warnings,
    })
}
