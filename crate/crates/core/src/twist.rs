//! Averages of universal polynomials over `d`-th roots of unity acting on
//! blocks of variables, the quotient polynomial, and the one-variable
//! specializations used by the topological formulas.
//!
//! For `d | n` write `g' = d(g-1)+1` and `n' = n/d`. The variables
//! `x_1..x_g` of `H_{g',n',dp}` have weight 0 and the rest are split into
//! `d-1` blocks of `g-1` variables, the block of weight `i` being acted on by
//! `zeta^i`.

use serde::Serialize;

use crate::polyalg::{zero_exp, Exp, LaurentPoly, MonomialImage, RatPoly, VarSet};
use crate::scalars::{mu, Cyclotomic, Rational};
use crate::universal::{h_vars, jacobian_factor, universal_h_cached};
use crate::{Error, Result};

pub type CycPoly = LaurentPoly<Cyclotomic>;

/// Genus of the degree-`d` cover: `d(g-1)+1`.
pub fn cover_genus(g: u32, d: u32) -> u32 {
    d * (g - 1) + 1
}

/// Weight of each of the `g'` variables under the root-of-unity action.
pub fn block_weights(g: u32, d: u32) -> Vec<u32> {
    let gp = cover_genus(g, d);
    (1..=gp).map(|j| if j <= g { 0 } else { (j - 2) / (g - 1) }).collect()
}

fn check_params(g: u32, n: u32, d: u32) -> Result<()> {
    if g == 0 {
        return Err(Error::InvalidInput("twisted polynomials need g >= 1".into()));
    }
    if d == 0 || n == 0 || !n.is_multiple_of(d) {
        return Err(Error::InvalidInput(format!("d = {d} must divide n = {n}")));
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct TwistedPoly {
    pub g: u32,
    pub n: u32,
    pub p: i64,
    pub d: u32,
    pub e_mod_d: u32,
    #[serde(skip)]
    pub poly: RatPoly,
}

fn weight_of(e: &Exp, weights: &[u32]) -> i64 {
    weights.iter().zip(e).map(|(&w, &k)| w as i64 * k as i64).sum()
}

/// The monomials of `H_{g',n',dp}` whose block weight `w` satisfies
/// `e + w = 0 mod d`; equal to the average `(1/d) sum zeta^e (zeta . H)`.
pub fn twisted_h(g: u32, n: u32, p: i64, d: u32, e: i64) -> Result<TwistedPoly> {
    check_params(g, n, d)?;
    let gp = cover_genus(g, d);
    let base = universal_h_cached(gp, n / d, d as i64 * p)?;
    let weights = block_weights(g, d);
    let poly = base.poly.filter_terms(|x, _| (e + weight_of(x, &weights)).rem_euclid(d as i64) == 0);
    Ok(TwistedPoly { g, n, p, d, e_mod_d: e.rem_euclid(d as i64) as u32, poly })
}

/// The same average computed literally with cyclotomic scalars.
pub fn twisted_h_by_average(g: u32, n: u32, p: i64, d: u32, e: i64) -> Result<CycPoly> {
    check_params(g, n, d)?;
    let gp = cover_genus(g, d);
    let base = universal_h_cached(gp, n / d, d as i64 * p)?;
    let vars = base.poly.vars().clone();
    let weights = block_weights(g, d);
    let lifted = to_cyclotomic(&base.poly, d);
    let mut acc = CycPoly::zero(&vars);
    for k in 0..d as i64 {
        let images: Vec<MonomialImage<Cyclotomic>> = (0..vars.len())
            .map(|i| {
                let mut x = zero_exp(vars.len());
                x[i] = 1;
                let w = if i < weights.len() { weights[i] as i64 } else { 0 };
                MonomialImage { coeff: Cyclotomic::root_power(d, k * w), exp: x }
            })
            .collect();
        let acted = lifted.substitute(&vars, &images)?;
        acc = &acc + &acted.scale(&Cyclotomic::root_power(d, k * e));
    }
    Ok(acc.scale_rational(&Rational::from(d as i64).recip().unwrap()))
}

pub fn to_cyclotomic(p: &RatPoly, d: u32) -> CycPoly {
    p.map_coeffs(|c| Cyclotomic::from_rational(d, c.clone()))
}

/// `z^(p+g-1) prod_{i<=g} (1-x_i)(1-z/x_i)` over the cover variables.
fn tilde_divisor(g: u32, p: i64, gp: u32) -> Result<RatPoly> {
    let vars = h_vars(gp);
    let mut shift = zero_exp(gp as usize + 1);
    shift[gp as usize] = (p + g as i64 - 1) as i32;
    Ok(jacobian_factor(g).embed(&vars)?.mul_term(&shift, &Rational::one()))
}

/// `H~ = H_{g,n,p,d,e} / (z^(p+g-1) prod_{i<=g} (1-x_i)(1-z/x_i))`.
pub fn twisted_h_tilde(g: u32, n: u32, p: i64, d: u32, e: i64) -> Result<RatPoly> {
    let t = twisted_h(g, n, p, d, e)?;
    let gp = cover_genus(g, d);
    t.poly.exact_divide(&tilde_divisor(g, p, gp)?)
}

/// Variables `xi, u` of the two-variable specialization.
pub fn flat_vars() -> VarSet {
    VarSet::new(["xi", "u"]).expect("distinct names")
}

/// Variable `u`.
pub fn u_vars() -> VarSet {
    VarSet::new(["u"]).expect("single name")
}

/// `H_{g',n',dp}` at `z = u^2`, `x_i = u` for `i <= g`, `x_j = xi^w u` on
/// the weight-`w` block.
pub fn flat_h(g: u32, n: u32, p: i64, d: u32) -> Result<RatPoly> {
    check_params(g, n, d)?;
    let gp = cover_genus(g, d);
    let base = universal_h_cached(gp, n / d, d as i64 * p)?;
    let weights = block_weights(g, d);
    let target = flat_vars();
    let mut images: Vec<MonomialImage<Rational>> = weights
        .iter()
        .map(|&w| MonomialImage { coeff: Rational::one(), exp: [w as i32, 1].into_iter().collect() })
        .collect();
    images.push(MonomialImage { coeff: Rational::one(), exp: [0, 2].into_iter().collect() });
    base.poly.substitute(&target, &images)
}

fn all_to_u(gp: u32) -> Vec<MonomialImage<Rational>> {
    let mut images: Vec<MonomialImage<Rational>> =
        (0..gp).map(|_| MonomialImage { coeff: Rational::one(), exp: [1].into_iter().collect() }).collect();
    images.push(MonomialImage { coeff: Rational::one(), exp: [2].into_iter().collect() });
    images
}

/// `H~` at `z = u^2` and every `x_j = u`.
pub fn flat_h_tilde(g: u32, n: u32, p: i64, d: u32, e: i64) -> Result<RatPoly> {
    let t = twisted_h_tilde(g, n, p, d, e)?;
    t.substitute(&u_vars(), &all_to_u(cover_genus(g, d)))
}

/// `(1-u)^k` over the variable set of `like`, in the last variable `u`.
fn one_minus_u_pow<S: crate::scalars::Scalar>(like: &LaurentPoly<S>, one: &S, k: u32) -> LaurentPoly<S> {
    let vars = like.vars();
    let mut m = zero_exp(vars.len());
    m[vars.len() - 1] = 1;
    let mut out = LaurentPoly::constant(vars, one.clone());
    for _ in 0..k {
        out = out.mul_binomial(&m);
    }
    out
}

/// Both sides of the averaging identity
/// `(1/d) sum_zeta zeta^e H^flat(zeta, u) = u^(2(p+g-1)) (1-u)^(2g) H~^flat(u)`,
/// as polynomials in `u` with cyclotomic coefficients.
pub fn key_identity_sides(g: u32, n: u32, p: i64, d: u32, e: i64) -> Result<(CycPoly, CycPoly)> {
    let flat = to_cyclotomic(&flat_h(g, n, p, d)?, d);
    let u = u_vars();
    let mut lhs = CycPoly::zero(&u);
    for k in 0..d as i64 {
        let images = [
            MonomialImage { coeff: Cyclotomic::root_power(d, k), exp: [0].into_iter().collect() },
            MonomialImage { coeff: Cyclotomic::one(d), exp: [1].into_iter().collect() },
        ];
        let at_zeta = flat.substitute(&u, &images)?;
        lhs = &lhs + &at_zeta.scale(&Cyclotomic::root_power(d, k * e));
    }
    lhs = lhs.scale_rational(&Rational::from(d as i64).recip().unwrap());
    let tilde = to_cyclotomic(&flat_h_tilde(g, n, p, d, e)?, d);
    let one = Cyclotomic::one(d);
    let shift: Exp = [(2 * (p + g as i64 - 1)) as i32].into_iter().collect();
    let rhs = (&tilde * &one_minus_u_pow(&tilde, &one, 2 * g)).mul_term(&shift, &one);
    Ok((lhs, rhs))
}

/// Value at `u = 1` of `H^flat(zeta, u) / (1-u)^(2g)` for `zeta = zeta_d^k`.
pub fn flat_value_at_one(g: u32, n: u32, p: i64, d: u32, k: i64) -> Result<Cyclotomic> {
    let flat = to_cyclotomic(&flat_h(g, n, p, d)?, d);
    let u = u_vars();
    let images = [
        MonomialImage { coeff: Cyclotomic::root_power(d, k), exp: [0].into_iter().collect() },
        MonomialImage { coeff: Cyclotomic::one(d), exp: [1].into_iter().collect() },
    ];
    let mut poly = flat.substitute(&u, &images)?;
    let one = Cyclotomic::one(d);
    for _ in 0..2 * g {
        poly = poly.div_binomial(&[1].into_iter().collect(), &one)?;
    }
    Ok(poly.terms().iter().fold(Cyclotomic::zero(d), |acc, (_, c)| &acc + c))
}

/// The closed form predicted for [`flat_value_at_one`].
pub fn flat_value_closed_form(g: u32, n: u32, p: i64, d: u32, k: i64) -> Cyclotomic {
    let np = (n / d) as i64;
    if g == 1 {
        let v = if (p * d as i64).rem_euclid(2) == 1 && np % 4 == 2 { 2 } else { 1 };
        return Cyclotomic::from_rational(d, Rational::from(v));
    }
    let sign = if (p * (n as i64 - d as i64)).rem_euclid(2) == 1 { -1 } else { 1 };
    let scalar = Rational::from(sign * mu(np as u64) * np.pow(2 * g - 3));
    let mut acc = Cyclotomic::from_rational(d, scalar);
    let one = Cyclotomic::one(d);
    for i in 1..d as i64 {
        let a = &one - &Cyclotomic::root_power(d, k * i * np);
        let b = &one - &Cyclotomic::root_power(d, -k * i * np);
        acc = &acc * &(&a * &b).pow(g as i64 - 1).unwrap();
    }
    acc
}
