//! Properties of the point counts over random Weil data.

use hitchin_core::counting::{count_m, count_m_with, evaluate, validate_weil, EvalPrecision, Method, WeilDatum};
use hitchin_core::universal::universal_h_cached;
use num_bigint::BigInt;
use proptest::prelude::*;

const PRIMES: [u64; 5] = [2, 3, 5, 7, 11];

/// `1 + a T + q T^2` with `a^2 <= 4q`.
fn elliptic() -> impl Strategy<Value = WeilDatum> {
    prop::sample::select(PRIMES.to_vec()).prop_flat_map(|q| {
        let bound = (4.0 * q as f64).sqrt().floor() as i64;
        (-bound..=bound).prop_map(move |a| WeilDatum::new(q, 1, vec![1, a, q as i64]))
    })
}

/// Products of two elliptic numerators over the same field.
fn genus_two() -> impl Strategy<Value = WeilDatum> {
    prop::sample::select(PRIMES[..3].to_vec()).prop_flat_map(|q| {
        let bound = (4.0 * q as f64).sqrt().floor() as i64;
        (-bound..=bound, -bound..=bound).prop_map(move |(a, b)| {
            let q = q as i64;
            WeilDatum::new(q as u64, 2, vec![1, a + b, 2 * q + a * b, q * (a + b), q * q])
        })
    })
}

fn prec() -> EvalPrecision {
    EvalPrecision::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exact_and_numeric_paths_agree(w in elliptic(), n in 1u32..=3, deg_d in 1i64..=2, m in 1u32..=2) {
        let exact = count_m(&w, n, 1, deg_d, m, &prec()).unwrap();
        let numeric = count_m_with(&w, n, 1, deg_d, m, &prec(), Method::Numeric).unwrap();
        prop_assert!(exact.exact);
        prop_assert_eq!(exact.value, numeric.value);
        prop_assert!(numeric.residual < prec().integrality_tolerance);
    }

    #[test]
    fn rank_one_is_jacobian_times_sections(w in genus_two(), extra in 0i64..=2, m in 1u32..=2) {
        let deg_d = 3 + extra;
        let c = count_m(&w, 1, 0, deg_d, m, &prec()).unwrap();
        let sections = BigInt::from(w.q).pow(m * (deg_d as u32 - 1));
        prop_assert_eq!(c.value, w.jacobian_order(m).unwrap() * sections);
    }

    #[test]
    fn base_change_commutes_with_counting(w in elliptic(), m in 1u32..=3) {
        let direct = count_m(&w, 2, 1, 1, m, &prec()).unwrap();
        let changed = count_m(&w.base_change(m).unwrap(), 2, 1, 1, 1, &prec()).unwrap();
        prop_assert_eq!(direct.value, changed.value);
    }

    #[test]
    fn genus_two_base_change(w in genus_two(), m in 1u32..=3) {
        let direct = count_m(&w, 2, 1, 3, m, &prec()).unwrap();
        let changed = count_m(&w.base_change(m).unwrap(), 2, 1, 3, 1, &prec()).unwrap();
        prop_assert_eq!(direct.value, changed.value);
    }

    #[test]
    fn degree_enters_only_through_coprimality(w in genus_two(), shift in 1i64..=2) {
        let a = count_m(&w, 2, 1, 3, 1, &prec()).unwrap();
        let b = count_m(&w, 2, 1 + 2 * shift, 3, 1, &prec()).unwrap();
        prop_assert_eq!(a.value, b.value);
    }

    #[test]
    fn eigenvalue_order_and_duals_do_not_matter(w in genus_two(), flip0: bool, flip1: bool, swap: bool) {
        let v = validate_weil(&w, &prec()).unwrap();
        let p = hitchin_core::counting::Prec(prec().bits);
        let h = universal_h_cached(2, 2, 1).unwrap();
        let z = p.int(w.q as i64);
        let duals = v.duals();
        let reference = evaluate(&h.poly, &v.lambdas, &z, p).unwrap();
        let mut xs = vec![
            if flip0 { duals[0].clone() } else { v.lambdas[0].clone() },
            if flip1 { duals[1].clone() } else { v.lambdas[1].clone() },
        ];
        if swap {
            xs.swap(0, 1);
        }
        let moved = evaluate(&h.poly, &xs, &z, p).unwrap();
        let (a, b) = (reference.to_f64_pair(), moved.to_f64_pair());
        prop_assert!((a.0 - b.0).abs() <= 1e-9 * a.0.abs().max(1.0));
        prop_assert!(b.1.abs() <= 1e-9 * a.0.abs().max(1.0));
    }

    #[test]
    fn counts_are_nonnegative(w in genus_two(), n in 1u32..=2) {
        let c = count_m(&w, n, 1, 3, 1, &prec()).unwrap();
        prop_assert!(c.value >= BigInt::from(0));
    }
}
