//! Compactly supported Betti numbers and Euler characteristic of the
//! trace-free, fixed-determinant moduli space `N_n^beta(C, D)`.
//!
//! The Poincare polynomial is
//! `sum_{d | n} psi_g(d) u^(degD (d-1) n^2 / d) H~flat_{g,n,p,d,e~}(-u)` with
//! `p = degD - (2g - 2)` and `e~ = e + n(n-1) degD / 2`. The formulas are
//! proved for `p >= 1`; smaller `p` is accepted and computed the same way,
//! and the result is flagged through [`PoincareResult::in_proven_range`].

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::polyalg::{LaurentPoly, RatPoly};
use crate::scalars::{bigint_string, divisors, gcd, mu, psi_g_count, Rational};
use crate::twist::{flat_h_tilde, u_vars};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PoincareResult {
    pub g: u32,
    pub n: u32,
    pub deg_d: i64,
    pub e: i64,
    pub p: i64,
    pub in_proven_range: bool,
    /// `betti[i]` is the dimension of compactly supported cohomology in degree `i`.
    pub betti: Vec<u64>,
}

impl PoincareResult {
    /// Value at `u = -1`.
    pub fn euler(&self) -> BigInt {
        self.betti.iter().enumerate().map(|(i, &b)| if i % 2 == 0 { BigInt::from(b) } else { -BigInt::from(b) }).sum()
    }

    pub fn top_degree(&self) -> usize {
        self.betti.len().saturating_sub(1)
    }
}

/// `e + n(n-1) degD / 2`.
pub fn shifted_degree(n: u32, e: i64, deg_d: i64) -> i64 {
    let n = n as i64;
    e + n * (n - 1) / 2 * deg_d
}

/// `degD - (2g - 2)`.
pub fn twist_excess(g: u32, deg_d: i64) -> i64 {
    deg_d - (2 * g as i64 - 2)
}

fn check_inputs(g: u32, n: u32, deg_d: i64, e: i64) -> Result<()> {
    if g == 0 || n == 0 {
        return Err(Error::InvalidInput("need g >= 1 and n >= 1".into()));
    }
    if deg_d < 1 {
        return Err(Error::InvalidInput(format!("deg D = {deg_d} must be positive")));
    }
    if gcd(e, n as i64) != 1 {
        return Err(Error::InvalidInput(format!("degree {e} is not prime to the rank {n}")));
    }
    Ok(())
}

/// `p(u) -> p(-u)`.
fn negate_variable(p: &RatPoly) -> RatPoly {
    LaurentPoly::from_terms(
        p.vars(),
        p.terms().iter().map(|(e, c)| (e.clone(), if e[0] % 2 != 0 { -c.clone() } else { c.clone() })),
    )
}

/// One summand of the Poincare polynomial for the divisor `d`.
fn summand(g: u32, n: u32, deg_d: i64, e: i64, d: u32) -> Result<RatPoly> {
    let p = twist_excess(g, deg_d);
    let flat = flat_h_tilde(g, n, p, d, shifted_degree(n, e, deg_d))?;
    let weight = psi_g_count(g, d as u64)?;
    let shift = deg_d * (d as i64 - 1) * (n as i64).pow(2) / d as i64;
    Ok(negate_variable(&flat).mul_term(&[shift as i32].into_iter().collect(), &Rational::from(weight)))
}

pub fn poincare_polynomial(g: u32, n: u32, deg_d: i64, e: i64) -> Result<PoincareResult> {
    check_inputs(g, n, deg_d, e)?;
    let u = u_vars();
    let parts =
        divisors(n as u64).into_par_iter().map(|d| summand(g, n, deg_d, e, d as u32)).collect::<Result<Vec<_>>>()?;
    let total = LaurentPoly::sum_all(&u, parts);
    let ctx = |what: String| {
        Error::InvariantViolation(format!("Poincare polynomial (g={g}, n={n}, deg D={deg_d}, e={e}): {what}"))
    };
    let bound = 2 * ((n as i64).pow(2) - 1) * deg_d;
    let mut betti = Vec::new();
    for (exp, c) in total.terms() {
        let i = exp[0] as i64;
        if i < 0 || i > bound {
            return Err(ctx(format!("term in degree {i} outside 0..={bound}")));
        }
        let c = c.to_integer().ok_or_else(|| ctx(format!("non-integral coefficient {c}")))?;
        if c.is_negative() {
            return Err(ctx(format!("negative coefficient {c} in degree {i}")));
        }
        let c = c.to_u64().ok_or_else(|| ctx(format!("coefficient {c} too large")))?;
        if betti.len() <= i as usize {
            betti.resize(i as usize + 1, 0);
        }
        betti[i as usize] = c;
    }
    let p = twist_excess(g, deg_d);
    Ok(PoincareResult { g, n, deg_d, e, p, in_proven_range: p >= 1, betti })
}

/// The closed-form Euler characteristic.
pub fn euler_closed_form(g: u32, n: u32, deg_d: i64) -> BigInt {
    let exceptional = deg_d.rem_euclid(2) == 1 && n % 4 == 2;
    if g == 1 {
        return BigInt::from(if exceptional { 5 } else { 1 });
    }
    let v = BigInt::from(mu(n as u64)) * BigInt::from(n).pow(4 * g - 3);
    if exceptional {
        -v
    } else {
        v
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EulerReport {
    pub g: u32,
    pub n: u32,
    pub deg_d: i64,
    pub e: i64,
    #[serde(with = "bigint_string")]
    pub from_betti: BigInt,
    #[serde(with = "bigint_string")]
    pub closed_form: BigInt,
}

/// Evaluates the Poincare polynomial at `-1` and compares with the closed form.
pub fn euler_characteristic(g: u32, n: u32, deg_d: i64, e: i64) -> Result<EulerReport> {
    let from_betti = poincare_polynomial(g, n, deg_d, e)?.euler();
    let closed_form = euler_closed_form(g, n, deg_d);
    if from_betti != closed_form {
        return Err(Error::InvariantViolation(format!(
            "Euler characteristic (g={g}, n={n}, deg D={deg_d}, e={e}): Betti numbers give {from_betti}, closed form gives {closed_form}"
        )));
    }
    Ok(EulerReport { g, n, deg_d, e, from_betti, closed_form })
}

/// `H~flat_{g,n,p,d,e}(1)`.
pub fn flat_tilde_at_one(g: u32, n: u32, p: i64, d: u32, e: i64) -> Result<Rational> {
    let f = flat_h_tilde(g, n, p, d, e)?;
    Ok(f.terms().iter().fold(Rational::zero(), |acc, (_, c)| &acc + c))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivisorSum {
    pub d: u64,
    pub value: i64,
    pub expected: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GcdLemmaReport {
    pub n: u32,
    pub e: i64,
    pub deg_d: i64,
    pub e_tilde: i64,
    pub gcd: i64,
    /// `deg D` odd and `n = 2 mod 4`.
    pub exceptional: bool,
    pub sums: Vec<DivisorSum>,
    pub holds: bool,
}

/// Checks that `gcd(n, e~)` is 2 exactly in the exceptional case and 1
/// otherwise, and that `sum_{j | (d, e~)} j mu(n/j)` equals `(-1)^(d-1) mu(n)`
/// in the exceptional case and `mu(n)` otherwise, for every `d | n`.
pub fn gcd_lemma_check(n: u32, e: i64, deg_d: i64) -> Result<GcdLemmaReport> {
    if n == 0 || gcd(e, n as i64) != 1 {
        return Err(Error::InvalidInput(format!("degree {e} is not prime to the rank {n}")));
    }
    let e_tilde = shifted_degree(n, e, deg_d);
    let g = gcd(n as i64, e_tilde);
    let exceptional = deg_d.rem_euclid(2) == 1 && n % 4 == 2;
    let mu_n = mu(n as u64);
    let sums: Vec<DivisorSum> = divisors(n as u64)
        .into_iter()
        .map(|d| {
            let value = divisors(gcd(d as i64, e_tilde) as u64).into_iter().map(|j| j as i64 * mu(n as u64 / j)).sum();
            let expected = if exceptional && d % 2 == 0 { -mu_n } else { mu_n };
            DivisorSum { d, value, expected }
        })
        .collect();
    let holds = g == if exceptional { 2 } else { 1 } && sums.iter().all(|s| s.value == s.expected);
    Ok(GcdLemmaReport { n, e, deg_d, e_tilde, gcd: g, exceptional, sums, holds })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_one_is_a_point() {
        for (g, deg_d) in [(1, 1), (1, 3), (2, 3), (3, 5)] {
            let r = poincare_polynomial(g, 1, deg_d, 0).unwrap();
            assert_eq!(r.betti, vec![1]);
        }
    }

    #[test]
    fn genus_one_examples() {
        assert_eq!(euler_characteristic(1, 2, 1, 1).unwrap().from_betti, BigInt::from(5));
        assert_eq!(euler_characteristic(1, 2, 2, 1).unwrap().from_betti, BigInt::from(1));
        assert_eq!(euler_characteristic(1, 3, 1, 1).unwrap().from_betti, BigInt::from(1));
    }

    #[test]
    fn rank_two_genus_one_betti_shape() {
        let r = poincare_polynomial(1, 2, 1, 1).unwrap();
        assert!(r.top_degree() <= 6);
        assert_eq!(r.betti[0], 0);
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(euler_closed_form(2, 2, 2), BigInt::from(-32));
        assert_eq!(euler_closed_form(2, 2, 1), BigInt::from(32));
        assert_eq!(euler_closed_form(2, 3, 2), BigInt::from(-243));
        assert_eq!(euler_closed_form(2, 4, 3), BigInt::from(0));
        assert_eq!(euler_closed_form(1, 6, 3), BigInt::from(5));
    }

    #[test]
    fn depends_on_degree_only_mod_rank() {
        for (g, n, deg_d, e) in [(1, 2, 1, 1), (1, 3, 2, 1), (2, 2, 3, 1)] {
            assert_eq!(
                poincare_polynomial(g, n, deg_d, e).unwrap().betti,
                poincare_polynomial(g, n, deg_d, e + n as i64).unwrap().betti
            );
        }
    }

    #[test]
    fn gcd_lemma_examples() {
        let r = gcd_lemma_check(2, 1, 1).unwrap();
        assert!(r.exceptional && r.gcd == 2 && r.holds);
        let r = gcd_lemma_check(3, 1, 1).unwrap();
        assert!(!r.exceptional && r.gcd == 1 && r.holds);
        let r = gcd_lemma_check(4, 1, 1).unwrap();
        assert_eq!(r.e_tilde, 7);
        assert!(r.gcd == 1 && r.holds && r.sums.iter().all(|s| s.value == 0));
        assert!(gcd_lemma_check(4, 2, 1).is_err());
    }

    #[test]
    fn gcd_lemma_grid() {
        for n in 1..=12u32 {
            for deg_d in 1..=3 {
                for e in -(n as i64)..=2 * n as i64 {
                    if gcd(e, n as i64) == 1 {
                        assert!(gcd_lemma_check(n, e, deg_d).unwrap().holds, "n={n} e={e} degD={deg_d}");
                    }
                }
            }
        }
    }

    #[test]
    fn non_coprime_blocks_vanish_at_one() {
        for e in 0..2 {
            assert!(flat_tilde_at_one(2, 4, 1, 2, e).unwrap().is_zero());
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(poincare_polynomial(0, 2, 1, 1), Err(Error::InvalidInput(_))));
        assert!(matches!(poincare_polynomial(1, 2, 1, 2), Err(Error::InvalidInput(_))));
        assert!(matches!(poincare_polynomial(1, 2, 0, 1), Err(Error::InvalidInput(_))));
    }
}
