//! The acceptance suite. Each criterion is a function returning a report;
//! the integration test and the `selfcheck` command both run [`run_all`].

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::counting::{
    count_m, count_m_fixed_det, count_n_trace0, validate_weil, verify_comparison, CoverDatum, EvalPrecision, WeilDatum,
};
use crate::oracle::{count_p1_rank1, count_p1_rank2};
use crate::scalars::{divisors, gcd, psi_g_count, ramanujan_sum, Cyclotomic, Rational};
use crate::topology::{euler_characteristic, gcd_lemma_check, poincare_polynomial};
use crate::twist::{flat_value_at_one, flat_value_closed_form, key_identity_sides};
use crate::universal::{hcal, hcal_via_series, is_symmetric, rank_one_closed_form, reduced_quotient, universal_h};
use crate::Result;

pub const ELLIPTIC_WEIL_JSON: &str = include_str!("../fixtures/elliptic_f2.json");
pub const COVER_BASE_WEIL_JSON: &str = include_str!("../fixtures/genus1_f7.json");
pub const COVER_JSON: &str = include_str!("../fixtures/genus1_f7_rank2_cover.json");

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub seconds: f64,
    pub limit_seconds: Option<f64>,
    /// One line per sub-check that failed, or a summary when all passed.
    pub details: Vec<String>,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let limit = self.limit_seconds.map(|l| format!(" (limit {l:.0} s)")).unwrap_or_default();
        format!("[{verdict}] criterion {:>2}: {} [{:.2} s{limit}]", self.id, self.title, self.seconds)
    }
}

/// Collects sub-check outcomes for one criterion.
struct Tally {
    failures: Vec<String>,
    checked: usize,
}

impl Tally {
    fn new() -> Self {
        Tally { failures: Vec::new(), checked: 0 }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn result<T>(&mut self, r: Result<T>, what: impl FnOnce() -> String) -> Option<T> {
        self.checked += 1;
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.failures.push(format!("{}: {e}", what()));
                None
            }
        }
    }
}

fn run(id: u32, title: &'static str, limit: Option<Duration>, body: impl FnOnce(&mut Tally)) -> CriterionReport {
    let start = Instant::now();
    let mut t = Tally::new();
    body(&mut t);
    let elapsed = start.elapsed();
    let mut details = t.failures;
    let in_time = limit.is_none_or(|l| elapsed <= l);
    if !in_time {
        details.push(format!("took {:.1} s, over the limit", elapsed.as_secs_f64()));
    }
    let passed = details.is_empty();
    if passed {
        details.push(format!("{} sub-checks passed", t.checked));
    }
    CriterionReport {
        id,
        title,
        passed,
        seconds: elapsed.as_secs_f64(),
        limit_seconds: limit.map(|l| l.as_secs_f64()),
        details,
    }
}

const SERIES_GRID: [(u32, u32, i64); 27] = {
    let mut out = [(0, 0, 0); 27];
    let mut i = 0;
    while i < 27 {
        out[i] = ((i / 9) as u32, (i / 3 % 3) as u32 + 1, (i % 3) as i64 + 1);
        i += 1;
    }
    out
};

pub fn rank_one_closed_form_check() -> CriterionReport {
    run(1, "rank-one universal polynomials in closed form", Some(Duration::from_secs(1)), |t| {
        for (g, p) in [(0, 1), (0, 3), (1, 1), (1, 2), (2, 2)] {
            if let Some(u) = t.result(universal_h(g, 1, p), || format!("(g, p) = ({g}, {p})")) {
                t.check(u.poly == rank_one_closed_form(g, p), || format!("(g, p) = ({g}, {p}): got {}", u.poly));
            }
        }
    })
}

pub fn series_agreement() -> CriterionReport {
    run(2, "partition sum equals the plethystic-log coefficient", Some(Duration::from_secs(300)), |t| {
        let results: Vec<_> = SERIES_GRID
            .par_iter()
            .map(|&(g, n, p)| {
                let direct = hcal(g, n, p);
                let series = hcal_via_series(g, n, p);
                ((g, n, p), direct, series)
            })
            .collect();
        for ((g, n, p), direct, series) in results {
            let ctx = || format!("(g, n, p) = ({g}, {n}, {p})");
            let (Some(a), Some(b)) = (t.result(direct, ctx), t.result(series, ctx)) else { continue };
            t.check(a == b, ctx);
        }
    })
}

pub fn universal_invariants() -> CriterionReport {
    run(3, "symmetry, integrality and divisibility of universal polynomials", None, |t| {
        let results: Vec<_> = SERIES_GRID.par_iter().map(|&(g, n, p)| ((g, n, p), universal_h(g, n, p))).collect();
        for ((g, n, p), u) in results {
            let ctx = || format!("(g, n, p) = ({g}, {n}, {p})");
            let Some(u) = t.result(u, ctx) else { continue };
            t.check(u.poly.is_integral(), || format!("{}: non-integral", ctx()));
            let sym = t.result(is_symmetric(g, &u.poly), ctx);
            t.check(sym == Some(true), || format!("{}: not symmetric", ctx()));
            t.result(reduced_quotient(&u), || format!("{}: divisibility", ctx()));
        }
    })
}

pub const EULER_CASES: [(u32, u32, i64, i64); 6] =
    [(2, 2, 2, -32), (2, 2, 1, 32), (1, 2, 1, 5), (1, 2, 2, 1), (1, 3, 1, 1), (2, 3, 2, -243)];

pub fn euler_values() -> CriterionReport {
    run(4, "Euler characteristics from Betti numbers and closed form", Some(Duration::from_secs(600)), |t| {
        for (g, n, deg_d, want) in EULER_CASES {
            let ctx = || format!("(g, n, deg D) = ({g}, {n}, {deg_d})");
            if let Some(r) = t.result(euler_characteristic(g, n, deg_d, 1), ctx) {
                let want = BigInt::from(want);
                t.check(r.from_betti == want && r.closed_form == want, || {
                    format!("{}: Betti {} / closed form {}, expected {want}", ctx(), r.from_betti, r.closed_form)
                });
            }
        }
    })
}

pub fn poincare_bounds() -> CriterionReport {
    run(5, "Poincaré polynomials are nonnegative within the degree bound", None, |t| {
        for (g, n, deg_d, _) in EULER_CASES {
            let ctx = || format!("(g, n, deg D) = ({g}, {n}, {deg_d})");
            // the nonnegativity and bound are also enforced inside the computation
            if let Some(r) = t.result(poincare_polynomial(g, n, deg_d, 1), ctx) {
                let bound = 2 * (n as i64 * n as i64 - 1) * deg_d;
                t.check(r.top_degree() as i64 <= bound, || format!("{}: degree {} > {bound}", ctx(), r.top_degree()));
            }
        }
    })
}

pub fn projective_line_oracle() -> CriterionReport {
    run(6, "counts on the projective line match brute force", Some(Duration::from_secs(600)), |t| {
        let prec = EvalPrecision::default();
        for (q, e, deg_d) in [(2u64, 1i64, 0i64), (2, 1, 1), (3, 1, 0)] {
            let ctx = || format!("rank 2, (q, e, deg D) = ({q}, {e}, {deg_d})");
            let got = t.result(count_m(&WeilDatum::projective_line(q), 2, e, deg_d, 1, &prec), ctx);
            let want = t.result(count_p1_rank2(q, e, deg_d), ctx);
            if let (Some(got), Some(want)) = (got, want) {
                t.check(got.value == want.total, || format!("{}: {} vs {}", ctx(), got.value, want.total));
            }
        }
        for q in [2u64, 3, 5] {
            for deg_d in -1..=2 {
                for m in 1..=2 {
                    let ctx = || format!("rank 1, (q, deg D, m) = ({q}, {deg_d}, {m})");
                    let got = t.result(count_m(&WeilDatum::projective_line(q), 1, 0, deg_d, m, &prec), ctx);
                    let want = t.result(count_p1_rank1(q, 0, deg_d, m), ctx);
                    if let (Some(got), Some(want)) = (got, want) {
                        t.check(got.value == want, || format!("{}: {} vs {want}", ctx(), got.value));
                    }
                }
            }
        }
    })
}

pub fn key_identity() -> CriterionReport {
    run(7, "root-of-unity average of the specialization", None, |t| {
        for (g, n, d, e) in [(1, 2, 2, 0), (1, 2, 2, 1), (2, 2, 2, 0), (2, 2, 2, 1)] {
            for p in 1..=2 {
                let ctx = || format!("(g, n, d, e, p) = ({g}, {n}, {d}, {e}, {p})");
                if let Some((lhs, rhs)) = t.result(key_identity_sides(g, n, p, d, e), ctx) {
                    t.check(lhs == rhs, ctx);
                }
            }
        }
    })
}

pub const FLAT_GRID: [(u32, u32, u32); 6] = [(1, 2, 1), (1, 2, 2), (2, 2, 1), (2, 2, 2), (2, 3, 1), (2, 3, 3)];

pub fn arithmetic_lemmas() -> CriterionReport {
    run(8, "values at u = 1, Ramanujan sums, the gcd lemma and torsion counts", None, |t| {
        for (g, n, d) in FLAT_GRID {
            for p in 1..=2 {
                for k in 0..d as i64 {
                    let ctx = || format!("value at 1, (g, n, p, d, k) = ({g}, {n}, {p}, {d}, {k})");
                    if let Some(v) = t.result(flat_value_at_one(g, n, p, d, k), ctx) {
                        let want = flat_value_closed_form(g, n, p, d, k);
                        t.check(v == want, || format!("{}: {v} vs {want}", ctx()));
                    }
                }
            }
        }
        for d in 1..=12u64 {
            for i in -(d as i64)..=2 * d as i64 {
                let brute = (0..d as i64)
                    .filter(|&k| gcd(k, d as i64) == 1)
                    .fold(Cyclotomic::zero(d as u32), |acc, k| &acc + &Cyclotomic::root_power(d as u32, k * i));
                let got = ramanujan_sum(d, i).map(Rational::from);
                let ok = matches!((&got, brute.as_rational()), (Ok(a), Some(b)) if *a == b);
                t.check(ok, || format!("Ramanujan sum (d, i) = ({d}, {i}): {got:?} vs {brute}"));
            }
        }
        for n in 1..=12u32 {
            for deg_d in 1..=3 {
                for e in (-(n as i64)..=2 * n as i64).filter(|&e| gcd(e, n as i64) == 1) {
                    let ctx = || format!("gcd lemma (n, e, deg D) = ({n}, {e}, {deg_d})");
                    if let Some(r) = t.result(gcd_lemma_check(n, e, deg_d), ctx) {
                        t.check(r.holds, || format!("{}: {r:?}", ctx()));
                    }
                }
            }
        }
        for g in 1..=5u32 {
            for n in 1..=30u64 {
                let sum: Result<BigInt> = divisors(n).into_iter().map(|d| psi_g_count(g, d)).sum();
                let want = num_traits::pow(BigInt::from(n), 2 * g as usize);
                let ctx = || format!("torsion count (g, n) = ({g}, {n})");
                if let Some(s) = t.result(sum, ctx) {
                    t.check(s == want, || format!("{}: {s} vs {want}", ctx()));
                }
            }
        }
    })
}

fn parse_weil(json: &str) -> Result<WeilDatum> {
    serde_json::from_str(json).map_err(|e| crate::Error::InvalidInput(format!("Weil datum: {e}")))
}

fn parse_cover(json: &str) -> Result<CoverDatum> {
    serde_json::from_str(json).map_err(|e| crate::Error::InvalidInput(format!("cover datum: {e}")))
}

pub fn elliptic_fixture() -> CriterionReport {
    run(9, "elliptic curve over F_2", None, |t| {
        let prec = EvalPrecision::default();
        let Some(w) = t.result(parse_weil(ELLIPTIC_WEIL_JSON), || "fixture".into()) else { return };
        if let Some(v) = t.result(validate_weil(&w, &prec), || "validation".into()) {
            let (re, im) = v.lambdas[0].to_f64_pair();
            t.check(re.abs() < 1e-30 && (im - 2f64.sqrt()).abs() < 1e-12, || format!("eigenvalue {re} + {im} i"));
        }
        if let Some(c) = t.result(count_m(&w, 1, 0, 1, 1, &prec), || "rank-one count".into()) {
            t.check(c.value == BigInt::from(6), || format!("rank-one count {} != 6", c.value));
        }
        let Some(w2) = t.result(w.base_change(2), || "base change".into()) else { return };
        for (n, e) in [(1, 0), (2, 1), (3, 1)] {
            let ctx = || format!("m = 2 consistency, n = {n}");
            let a = t.result(count_m(&w, n, e, 1, 2, &prec), ctx);
            let b = t.result(count_m(&w2, n, e, 1, 1, &prec), ctx);
            if let (Some(a), Some(b)) = (a, b) {
                t.check(a.value == b.value, || format!("{}: {} vs {}", ctx(), a.value, b.value));
            }
        }
    })
}

pub fn twisted_fixture() -> CriterionReport {
    run(10, "fixed-determinant, trace-zero and cover counts agree on the fixture", None, |t| {
        let prec = EvalPrecision::default();
        let Some(w) = t.result(parse_weil(COVER_BASE_WEIL_JSON), || "base fixture".into()) else { return };
        let Some(cover) = t.result(parse_cover(COVER_JSON), || "cover fixture".into()) else { return };
        for deg_d in 1..=2i64 {
            for m in 1..=2u32 {
                let ctx = || format!("(deg D, m) = ({deg_d}, {m})");
                let fixed = t.result(count_m_fixed_det(&w, &cover, 2, 1, deg_d, m, &prec), ctx);
                let trace0 = t.result(count_n_trace0(&w, &cover, 2, 1, deg_d, m, &prec), ctx);
                if let (Some(f), Some(n)) = (&fixed, &trace0) {
                    let factor = BigInt::from(w.q).pow(m * (deg_d + 1 - w.g as i64) as u32);
                    t.check(f.value == &n.value * &factor, || {
                        format!("{}: {} != {factor} * {}", ctx(), f.value, n.value)
                    });
                }
                if let Some(r) = t.result(verify_comparison(&w, &cover, 2, 1, deg_d, m, &prec), ctx) {
                    t.check(r.agree && r.residual < prec.integrality_tolerance, || {
                        format!("{}: lhs {} rhs {:?} residual {:e}", ctx(), r.lhs, r.rhs, r.residual)
                    });
                }
            }
        }
    })
}

/// All criteria, in order.
pub fn run_all() -> Vec<CriterionReport> {
    vec![
        rank_one_closed_form_check(),
        series_agreement(),
        universal_invariants(),
        euler_values(),
        poincare_bounds(),
        projective_line_oracle(),
        key_identity(),
        arithmetic_lemmas(),
        elliptic_fixture(),
        twisted_fixture(),
    ]
}

/// A faster subset for interactive use.
pub fn run_quick() -> Vec<CriterionReport> {
    vec![rank_one_closed_form_check(), key_identity(), elliptic_fixture(), twisted_fixture()]
}
