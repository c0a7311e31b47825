use proptest::prelude::*;

use super::*;
use crate::scalars::{Cyclotomic, Rational};

fn vs(names: &[&str]) -> VarSet {
    VarSet::new(names.iter().copied()).unwrap()
}

fn e(v: &[i32]) -> Exp {
    v.iter().copied().collect()
}

fn r(n: i64) -> Rational {
    Rational::from(n)
}

fn poly(vars: &VarSet, terms: &[(&[i32], i64)]) -> RatPoly {
    LaurentPoly::from_terms(vars, terms.iter().map(|(x, c)| (e(x), r(*c))))
}

fn one_image(n: usize, i: usize) -> MonomialImage<Rational> {
    let mut x = zero_exp(n);
    x[i] = 1;
    MonomialImage { coeff: r(1), exp: x }
}

#[test]
fn arithmetic_examples() {
    let v = vs(&["x"]);
    let a = poly(&v, &[(&[0], 1), (&[1], -1)]);
    let b = poly(&v, &[(&[0], 1), (&[1], 1)]);
    assert_eq!(&a * &b, poly(&v, &[(&[0], 1), (&[2], -1)]));
    assert_eq!(&a + &LaurentPoly::zero(&v), a);

    let v = vs(&["x", "z"]);
    let p = poly(&v, &[(&[-1, 1], 1)]);
    let q = poly(&v, &[(&[1, -1], 1)]);
    assert_eq!(&p * &q, LaurentPoly::constant(&v, r(1)));
}

#[test]
fn varset_mismatch_is_an_error() {
    let a = poly(&vs(&["x"]), &[(&[1], 1)]);
    let b = poly(&vs(&["y"]), &[(&[1], 1)]);
    assert!(matches!(a.try_add(&b), Err(Error::VarSetMismatch(..))));
    assert!(a.exact_divide(&b).is_err());
    assert!(VarSet::new(["x", "x"]).is_err());
}

#[test]
fn adams_and_substitution_examples() {
    let v = vs(&["x_1", "z", "t"]);
    let p = poly(&v, &[(&[1, 0, 0], 1), (&[0, 1, -1], 1)]);
    assert_eq!(p.adams(2), poly(&v, &[(&[2, 0, 0], 1), (&[0, 2, -2], 1)]));

    // x_1 -> u, z -> u^2 on 1 - x_1^-1 z
    let src = vs(&["x_1", "z"]);
    let u = vs(&["u"]);
    let p = poly(&src, &[(&[0, 0], 1), (&[-1, 1], -1)]);
    let images = [MonomialImage { coeff: r(1), exp: e(&[1]) }, MonomialImage { coeff: r(1), exp: e(&[2]) }];
    assert_eq!(p.substitute(&u, &images).unwrap(), poly(&u, &[(&[0], 1), (&[1], -1)]));

    // zero image into a negative exponent is rejected
    let images = [MonomialImage { coeff: r(0), exp: e(&[0]) }, MonomialImage { coeff: r(1), exp: e(&[2]) }];
    assert!(p.substitute(&u, &images).is_err());
}

#[test]
fn root_of_unity_action_on_weighted_variable() {
    let v = vs(&["x_1", "x_2"]);
    let p: LaurentPoly<Cyclotomic> =
        poly(&v, &[(&[1, 1], 1), (&[0, 2], 3)]).map_coeffs(|c| Cyclotomic::from_rational(3, c.clone()));
    let zeta = Cyclotomic::root_power(3, 1);
    // x_2 has weight 1: x_2 -> zeta x_2
    let images = [
        MonomialImage { coeff: Cyclotomic::one(3), exp: e(&[1, 0]) },
        MonomialImage { coeff: zeta.clone(), exp: e(&[0, 1]) },
    ];
    let got = p.substitute(&v, &images).unwrap();
    assert_eq!(got.coeff(&[1, 1]).unwrap(), &zeta);
    assert_eq!(got.coeff(&[0, 2]).unwrap(), &(&zeta * &zeta).scale(&r(3)));
}

#[test]
fn exact_division_examples() {
    let v = vs(&["x"]);
    let num = poly(&v, &[(&[0], 1), (&[2], -1)]);
    let den = poly(&v, &[(&[0], 1), (&[1], -1)]);
    assert_eq!(num.exact_divide(&den).unwrap(), poly(&v, &[(&[0], 1), (&[1], 1)]));

    let v = vs(&["z"]);
    let num = poly(&v, &[(&[2], 1), (&[1], -1)]);
    let den = poly(&v, &[(&[1], 1)]);
    assert_eq!(num.exact_divide(&den).unwrap(), poly(&v, &[(&[1], 1), (&[0], -1)]));

    let v = vs(&["x"]);
    let num = poly(&v, &[(&[0], 1), (&[2], 1)]);
    assert!(matches!(num.exact_divide(&den_x(&v)), Err(Error::NotDivisible { .. })));
}

fn den_x(v: &VarSet) -> RatPoly {
    poly(v, &[(&[0], 1), (&[1], -1)])
}

#[test]
fn general_division_of_trinomials() {
    let v = vs(&["x", "y"]);
    let a = poly(&v, &[(&[2, 0], 1), (&[1, 1], 1), (&[0, 2], 1)]);
    let b = poly(&v, &[(&[-1, 0], 2), (&[3, 1], -1), (&[0, 0], 5), (&[1, -2], 1)]);
    let prod = &a * &b;
    assert_eq!(prod.exact_divide(&a).unwrap(), b);
    assert_eq!(prod.exact_divide(&b).unwrap(), a);
    let bumped = &prod + &LaurentPoly::constant(&v, r(1));
    assert!(matches!(bumped.exact_divide(&a), Err(Error::NotDivisible { .. })));
}

#[test]
fn normalize_examples() {
    let v = vs(&["t"]);
    let f = FactoredRational::new(poly(&v, &[(&[0], 1), (&[2], -1)]), [e(&[1])]);
    assert_eq!(f.normalize().unwrap(), poly(&v, &[(&[0], 1), (&[1], 1)]));

    // a numerator built from its own denominator round-trips
    let v = vs(&["z", "t"]);
    let num = poly(&v, &[(&[0, 0], 1)]).mul_binomial(&e(&[0, 1])).mul_binomial(&e(&[1, 1]));
    let f = FactoredRational::new(num, [e(&[0, 1]), e(&[1, 1])]);
    assert_eq!(f.normalize().unwrap(), LaurentPoly::constant(&v, r(1)));

    let g = FactoredRational::new(poly(&v, &[(&[0, 0], 1)]), [e(&[0, 1])]);
    assert!(g.normalize().is_err());
}

#[test]
fn factored_sums_use_common_denominators() {
    let v = vs(&["t"]);
    let one = poly(&v, &[(&[0], 1)]);
    // 1/(1-t) - t/(1-t) = 1
    let a = FactoredRational::new(one.clone(), [e(&[1])]);
    let b = FactoredRational::new(poly(&v, &[(&[1], 1)]), [e(&[1])]);
    assert_eq!(a.sub(&b).normalize().unwrap(), one);
    // 1/(1-t) = (1+t)/(1-t^2)
    let c = FactoredRational::new(poly(&v, &[(&[0], 1), (&[1], 1)]), [e(&[2])]);
    assert!(a.value_eq(&c));
}

#[test]
fn json_round_trip_and_shape() {
    let v = vs(&["x_1", "z"]);
    let p =
        LaurentPoly::from_terms(&v, [(e(&[-1, 2]), Rational::new(3.into(), 2.into()).unwrap()), (e(&[0, 0]), r(-4))]);
    let j = p.to_json();
    assert_eq!(j.to_string(), r#"{"vars":["x_1","z"],"terms":[{"c":"3/2","e":{"x_1":-1,"z":2}},{"c":"-4","e":{}}]}"#);
    assert_eq!(RatPoly::from_json(&j).unwrap(), p);
    assert!(RatPoly::from_json(&serde_json::json!({"vars":["x"],"terms":[{"c":"1","e":{"y":1}}]})).is_err());
}

#[test]
fn display_format() {
    let v = vs(&["x_1", "z"]);
    assert_eq!(poly(&v, &[(&[0, 2], 1)]).to_string(), "z^2");
    assert_eq!(poly(&v, &[(&[0, 0], 1), (&[1, 0], -1)]).to_string(), "-x_1 + 1");
    assert_eq!(LaurentPoly::<Rational>::zero(&v).to_string(), "0");
}

fn constant_series(v: &VarSet, order: usize, cs: &[RatPoly]) -> TruncSeries {
    TruncSeries::new(v, order, cs.iter().cloned().map(FactoredRational::from_poly).collect())
}

#[test]
fn exp_of_t_is_geometric() {
    let v = vs(&["z"]);
    let n = 5;
    for i in 1..=4 {
        let s = TruncSeries::monomial(&v, n, i).plethystic_exp().unwrap();
        for k in 0..=n {
            let want = if k % i == 0 { 1 } else { 0 };
            assert_eq!(s.coeff(k).normalize().unwrap(), poly(&v, &[(&[0], want)]), "i = {i}, k = {k}");
        }
    }
}

#[test]
fn exp_of_t_plus_t_squared() {
    // Exp(T + T^2) = 1/((1-T)(1-T^2)) = 1 + T + 2T^2 + ...
    let v = vs(&["z"]);
    let one = poly(&v, &[(&[0], 1)]);
    let f = constant_series(&v, 2, &[LaurentPoly::zero(&v), one.clone(), one]);
    let s = f.plethystic_exp().unwrap();
    assert_eq!(s.coeff(2).normalize().unwrap(), poly(&v, &[(&[0], 2)]));

    // with a variable coefficient the Adams operator shows up: Exp(zT) has T^2 coefficient (z^2 + z^2)/2 = z^2
    let zt = constant_series(&v, 2, &[LaurentPoly::zero(&v), poly(&v, &[(&[1], 1)])]);
    let s = zt.plethystic_exp().unwrap();
    assert_eq!(s.coeff(2).normalize().unwrap(), poly(&v, &[(&[2], 1)]));
}

#[test]
fn wrong_constant_terms_rejected() {
    let v = vs(&["z"]);
    let s = TruncSeries::monomial(&v, 3, 0);
    assert!(matches!(s.plethystic_exp(), Err(Error::WrongConstantTerm(_))));
    assert!(matches!(TruncSeries::zero(&v, 3).plethystic_log(), Err(Error::WrongConstantTerm(_))));
}

fn arb_poly(nvars: usize, max_terms: usize, lo: i32, hi: i32) -> impl Strategy<Value = RatPoly> {
    prop::collection::vec((prop::collection::vec(lo..=hi, nvars), -5i64..=5), 0..=max_terms).prop_map(move |terms| {
        let names: Vec<String> = (0..nvars).map(|i| format!("v{i}")).collect();
        let v = VarSet::new(names).unwrap();
        LaurentPoly::from_terms(&v, terms.into_iter().map(|(x, c)| (x.into_iter().collect(), r(c))))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn divide_product_recovers_factor(p in arb_poly(3, 8, -3, 3), q in arb_poly(3, 8, -3, 3)) {
        prop_assume!(!q.is_zero());
        let prod = &p * &q;
        prop_assert_eq!(prod.exact_divide(&q).unwrap(), p);
    }

    #[test]
    fn adams_composes(p in arb_poly(3, 8, -3, 3), a in 1u32..4, b in 1u32..4) {
        prop_assert_eq!(p.adams(a).adams(b), p.adams(a * b));
    }

    #[test]
    fn identity_substitution(p in arb_poly(3, 8, -3, 3)) {
        let images: Vec<_> = (0..3).map(|i| one_image(3, i)).collect();
        prop_assert_eq!(p.substitute(p.vars(), &images).unwrap(), p);
    }

    #[test]
    fn json_round_trips(p in arb_poly(3, 8, -3, 3)) {
        prop_assert_eq!(RatPoly::from_json(&p.to_json()).unwrap(), p);
    }

    #[test]
    fn binomial_division_inverts_multiplication(p in arb_poly(3, 6, -2, 2), m in prop::collection::vec(-2i32..=2, 3)) {
        prop_assume!(m.iter().any(|&x| x != 0));
        let m: Exp = m.into_iter().collect();
        prop_assert_eq!(p.mul_binomial(&m).div_binomial(&m, &r(1)).unwrap(), p);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn plethystic_log_inverts_exp(cs in prop::collection::vec(arb_poly(3, 2, 0, 2), 1..=4)) {
        let v = cs[0].vars().clone();
        let order = cs.len();
        let mut coeffs = vec![LaurentPoly::zero(&v)];
        coeffs.extend(cs.iter().cloned());
        let f = constant_series(&v, order, &coeffs);
        let back = f.plethystic_exp().unwrap().plethystic_log().unwrap();
        for k in 0..=order {
            prop_assert_eq!(back.coeff(k).normalize().unwrap(), f.coeff(k).normalize().unwrap());
        }
        // and the other way around, starting from 1 + f
        let mut g = f.clone();
        let mut gc: Vec<_> = g.coeffs().to_vec();
        gc[0] = FactoredRational::from_poly(LaurentPoly::constant(&v, r(1)));
        g = TruncSeries::new(&v, order, gc);
        let again = g.plethystic_log().unwrap().plethystic_exp().unwrap();
        for k in 0..=order {
            prop_assert_eq!(again.coeff(k).normalize().unwrap(), g.coeff(k).normalize().unwrap());
        }
    }
}
