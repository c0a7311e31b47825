//! Per-character arithmetic data of the cyclic covers attached to the
//! characters of order dividing `n` of the Jacobian.
//!
//! Each orbit stores the blocks `i = 0..=d/2` of Frobenius eigenvalues on
//! `H^1` of the cover, as zeta-style integer polynomials `prod (1 - l T)`.
//! Block 0 is the base curve. For `0 < i < d/2` the block of `-i` is not
//! stored; its eigenvalues are `q/l` over the block of `i`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::complex::{Cx, Prec};
use super::weil::{sorted_eigenvalues, weil_pairs, ValidatedWeil, WeilDatum};
use crate::scalars::Rational;
use crate::twist::{block_weights, cover_genus};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterOrbit {
    /// Order of the characters in the orbit.
    pub d: u32,
    pub multiplicity: u64,
    /// The unit is `exp(2 pi i * unit_exponent)`.
    pub unit_exponent: Rational,
    pub eigen_blocks: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverDatum {
    pub orbits: Vec<CharacterOrbit>,
}

fn inconsistent(msg: String) -> Error {
    Error::CoverInconsistent(msg)
}

impl CharacterOrbit {
    pub fn unit_is_one(&self) -> bool {
        self.unit_exponent.is_integer()
    }

    /// Zeta numerator of the cover curve: block 0, each stored block
    /// `0 < i < d/2` together with its dual, and the middle block.
    pub fn cover_numerator(&self, q: u64) -> Result<Vec<i64>> {
        let mut acc: Vec<BigInt> = vec![BigInt::one()];
        for (i, block) in self.eigen_blocks.iter().enumerate() {
            let b: Vec<BigInt> = block.iter().map(|&c| BigInt::from(c)).collect();
            acc = poly_mul(&acc, &b);
            if i > 0 && 2 * i < self.d as usize {
                acc = poly_mul(&acc, &dual_block(&b, q)?);
            }
        }
        acc.into_iter()
            .map(|c| i64::try_from(&c).map_err(|_| inconsistent(format!("cover coefficient {c} exceeds 64 bits"))))
            .collect()
    }

    pub fn cover_weil(&self, base: &WeilDatum) -> Result<WeilDatum> {
        let g = cover_genus(base.g, self.d);
        Ok(WeilDatum { q: base.q, g, zeta_numerator: self.cover_numerator(base.q)? })
    }
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `prod (1 - (q/l) T)` from `prod (1 - l T)`.
fn dual_block(b: &[BigInt], q: u64) -> Result<Vec<BigInt>> {
    let k = b.len() - 1;
    let lead = &b[k];
    if lead.is_zero() {
        return Err(inconsistent("eigenvalue block has a zero eigenvalue".into()));
    }
    let q = BigInt::from(q);
    (0..=k)
        .map(|j| {
            let num = &b[k - j] * q.pow(j as u32);
            let (quo, rem) = num.div_rem(lead);
            if rem.is_zero() {
                Ok(quo)
            } else {
                Err(inconsistent("dual eigenvalue block is not integral".into()))
            }
        })
        .collect()
}

impl CoverDatum {
    /// The datum of the rank-1 case: the trivial character alone.
    pub fn trivial(base: &WeilDatum) -> Self {
        CoverDatum {
            orbits: vec![CharacterOrbit {
                d: 1,
                multiplicity: 1,
                unit_exponent: Rational::zero(),
                eigen_blocks: vec![base.zeta_numerator.clone()],
            }],
        }
    }

    /// Structural checks against the base curve and rank `n`; returns
    /// warnings about units that the sign rule says should be trivial.
    pub fn validate(&self, base: &WeilDatum, n: u32) -> Result<Vec<String>> {
        let g = base.g;
        if self.orbits.is_empty() {
            return Err(inconsistent("no character orbits".into()));
        }
        let total: BigInt = self.orbits.iter().map(|o| BigInt::from(o.multiplicity)).sum();
        let want = BigInt::from(n).pow(2 * g);
        if total != want {
            return Err(inconsistent(format!("orbit multiplicities sum to {total}, expected n^(2g) = {want}")));
        }
        let trivial: u64 = self.orbits.iter().filter(|o| o.d == 1).map(|o| o.multiplicity).sum();
        if trivial != 1 {
            return Err(inconsistent(format!("the trivial character must appear exactly once, found {trivial}")));
        }
        let mut warnings = Vec::new();
        for (k, o) in self.orbits.iter().enumerate() {
            let ctx = |msg: String| inconsistent(format!("orbit {k} (d = {}): {msg}", o.d));
            if o.d == 0 || !n.is_multiple_of(o.d) {
                return Err(ctx(format!("order does not divide n = {n}")));
            }
            if o.multiplicity == 0 {
                return Err(ctx("multiplicity 0".into()));
            }
            if !(&o.unit_exponent * &Rational::from(o.d as i64)).is_integer() {
                return Err(ctx(format!("unit exponent {} is not a multiple of 1/{}", o.unit_exponent, o.d)));
            }
            if o.d == 1 && !o.unit_is_one() {
                return Err(ctx("the trivial character has unit 1".into()));
            }
            if o.d % 2 == 1 && !o.unit_is_one() {
                warnings.push(format!(
                    "orbit {k}: d = {} is odd but the unit exp(2 pi i {}) is not 1; the sign rule predicts 1",
                    o.d, o.unit_exponent
                ));
            }
            let blocks = o.d as usize / 2 + 1;
            if o.eigen_blocks.len() != blocks {
                return Err(ctx(format!("expected {blocks} eigenvalue blocks, got {}", o.eigen_blocks.len())));
            }
            if o.eigen_blocks[0] != base.zeta_numerator {
                return Err(ctx("block 0 differs from the base curve".into()));
            }
            for (i, b) in o.eigen_blocks.iter().enumerate().skip(1) {
                if b.len() != 2 * g as usize - 1 {
                    return Err(ctx(format!("block {i} must have degree 2g - 2 = {}", 2 * g as i64 - 2)));
                }
                if b[0] != 1 {
                    return Err(ctx(format!("block {i} must have constant term 1")));
                }
            }
        }
        Ok(warnings)
    }
}

/// The values of `x_1..x_{g'}` for an orbit, ordered as the block weights:
/// the base pairs for weight 0; for `0 < i < d/2`, half of block `i` on
/// weight `i` and `q/l` of the other half on weight `d - i`; one of each
/// pair `{l, q/l}` of the middle block on weight `d/2`.
pub fn orbit_points(base: &ValidatedWeil, orbit: &CharacterOrbit) -> Result<Vec<Cx>> {
    let prec = &base.precision;
    let p: Prec = prec.prec();
    let (g, d, q) = (base.datum.g, orbit.d, base.datum.q);
    let qc = p.int(q as i64);
    let mut by_weight: Vec<Vec<Cx>> = vec![Vec::new(); d as usize];
    by_weight[0] = base.lambdas.clone();
    for i in 1..=(d / 2) as usize {
        let a: Vec<Rational> = orbit.eigen_blocks[i].iter().map(|&c| Rational::from(c)).collect();
        let wrap = |e: Error| match e {
            Error::RootModulusViolated(m) | Error::FunctionalEquationViolated(m) => {
                inconsistent(format!("eigenvalue block {i}: {m}"))
            }
            other => other,
        };
        if 2 * i == d as usize {
            by_weight[i] = weil_pairs(&a, q, prec).map_err(wrap)?;
        } else {
            let roots = sorted_eigenvalues(&a, q, prec).map_err(wrap)?;
            let (first, second) = roots.split_at(g as usize - 1);
            by_weight[i] = first.to_vec();
            by_weight[d as usize - i] = second.iter().map(|l| p.div(&qc, l)).collect();
        }
    }
    let weights = block_weights(g, d);
    let mut out = Vec::with_capacity(weights.len());
    let mut cursor = vec![0usize; d as usize];
    for w in weights {
        let w = w as usize;
        let v = by_weight[w]
            .get(cursor[w])
            .cloned()
            .ok_or_else(|| inconsistent(format!("missing eigenvalues of weight {w}")))?;
        cursor[w] += 1;
        out.push(v);
    }
    Ok(out)
}
