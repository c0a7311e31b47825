//! Complex numbers over `astro_float::BigFloat` at a fixed working precision.

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::{BigInt, Sign as IntSign};
use num_traits::Zero;

use crate::scalars::Rational;

const RM: RoundingMode = RoundingMode::ToEven;

/// Working precision in bits; every operation rounds to it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Prec(pub usize);

impl Prec {
    pub fn real_int(self, x: &BigInt) -> BigFloat {
        let (sign, digits) = x.to_u64_digits();
        // exact conversion at a precision wide enough for every digit
        let wide = self.0.max(64 * digits.len() + 64);
        let two32 = BigFloat::from_word(1 << 32, wide);
        let base = two32.mul(&two32, wide, RM);
        let mut acc = BigFloat::new(wide);
        for &d in digits.iter().rev() {
            acc = acc.mul(&base, wide, RM).add(&BigFloat::from_word(d, wide), wide, RM);
        }
        if sign == IntSign::Minus {
            acc = acc.neg();
        }
        let mut out = acc;
        out.set_precision(self.0, RM).expect("valid precision");
        out
    }

    pub fn real_rational(self, r: &Rational) -> BigFloat {
        let n = self.real_int(r.numer());
        if r.denom() == &BigInt::from(1) {
            return n;
        }
        n.div(&self.real_int(r.denom()), self.0, RM)
    }

    pub fn int(self, x: i64) -> Cx {
        Cx::real(self.real_int(&BigInt::from(x)))
    }

    pub fn rational(self, r: &Rational) -> Cx {
        Cx::real(self.real_rational(r))
    }

    /// `exp(2 pi i r)`.
    pub fn unit(self, r: &Rational, cc: &mut Consts) -> Cx {
        let num = r.numer().clone() % r.denom();
        let num = if num < BigInt::zero() { num + r.denom() } else { num };
        let reduced = Rational::new(num, r.denom().clone()).expect("nonzero denominator");
        // exact quarter turns avoid rounding noise in the common cases
        let four = reduced.numer().clone() * 4u32;
        if (&four % reduced.denom()).is_zero() {
            let one = self.real_int(&BigInt::from(1));
            let zero = BigFloat::new(self.0);
            return match i64::try_from(four / reduced.denom()).unwrap_or(0) {
                0 => Cx { re: one, im: zero },
                1 => Cx { re: zero, im: one },
                2 => Cx { re: one.neg(), im: zero },
                _ => Cx { re: zero, im: one.neg() },
            };
        }
        let p = self.0 + 32;
        let angle = cc.pi(p, RM).mul(&BigFloat::from_word(2, p), p, RM).mul(&Prec(p).real_rational(&reduced), p, RM);
        let mut re = angle.cos(p, RM, cc);
        let mut im = angle.sin(p, RM, cc);
        re.set_precision(self.0, RM).expect("valid precision");
        im.set_precision(self.0, RM).expect("valid precision");
        Cx { re, im }
    }

    pub fn add(self, a: &Cx, b: &Cx) -> Cx {
        Cx { re: a.re.add(&b.re, self.0, RM), im: a.im.add(&b.im, self.0, RM) }
    }

    pub fn sub(self, a: &Cx, b: &Cx) -> Cx {
        Cx { re: a.re.sub(&b.re, self.0, RM), im: a.im.sub(&b.im, self.0, RM) }
    }

    pub fn mul(self, a: &Cx, b: &Cx) -> Cx {
        let p = self.0;
        let re = a.re.mul(&b.re, p, RM).sub(&a.im.mul(&b.im, p, RM), p, RM);
        let im = a.re.mul(&b.im, p, RM).add(&a.im.mul(&b.re, p, RM), p, RM);
        Cx { re, im }
    }

    pub fn scale(self, a: &Cx, s: &BigFloat) -> Cx {
        Cx { re: a.re.mul(s, self.0, RM), im: a.im.mul(s, self.0, RM) }
    }

    pub fn norm_sqr(self, a: &Cx) -> BigFloat {
        a.re.mul(&a.re, self.0, RM).add(&a.im.mul(&a.im, self.0, RM), self.0, RM)
    }

    pub fn div(self, a: &Cx, b: &Cx) -> Cx {
        let n = self.norm_sqr(b);
        let num = self.mul(a, &b.conj());
        Cx { re: num.re.div(&n, self.0, RM), im: num.im.div(&n, self.0, RM) }
    }

    pub fn recip(self, a: &Cx) -> Cx {
        self.div(&self.int(1), a)
    }

    pub fn powi(self, a: &Cx, k: i64) -> Cx {
        let mut base = if k < 0 { self.recip(a) } else { a.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = self.int(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    pub fn sqrt_real(self, x: &BigFloat) -> BigFloat {
        x.sqrt(self.0, RM)
    }
}

#[derive(Clone, Debug)]
pub struct Cx {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl Cx {
    pub fn real(re: BigFloat) -> Self {
        let p = re.precision().unwrap_or(64);
        Cx { re, im: BigFloat::new(p) }
    }

    pub fn conj(&self) -> Cx {
        Cx { re: self.re.clone(), im: self.im.neg() }
    }

    pub fn neg(&self) -> Cx {
        Cx { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (to_f64(&self.re), to_f64(&self.im))
    }
}

/// Binary exponent `k` with `2^(k-1) <= |x| < 2^k`; `None` for zero.
pub fn log2_magnitude(x: &BigFloat) -> Option<i64> {
    if x.is_zero() {
        None
    } else {
        x.exponent().map(i64::from)
    }
}

pub fn to_f64(x: &BigFloat) -> f64 {
    match x.as_raw_parts() {
        Some((m, _, s, e, _)) if !x.is_zero() => {
            let top = *m.last().unwrap_or(&0) as f64;
            let v = top * 2f64.powi(e - 64);
            if s == Sign::Neg {
                -v
            } else {
                v
            }
        }
        _ => 0.0,
    }
}

/// The integer nearest to `x` (ties to even).
pub fn round_to_bigint(x: &BigFloat) -> BigInt {
    if x.is_zero() {
        return BigInt::zero();
    }
    let r = x.round(0, RM);
    if r.is_zero() {
        return BigInt::zero();
    }
    let (m, _, s, e, _) = r.as_raw_parts().expect("finite value");
    let mut mag = BigInt::from_slice(IntSign::Plus, &words_to_u32(m));
    let width = 64 * m.len() as i64;
    let shift = e as i64 - width;
    mag = if shift >= 0 { mag << shift as usize } else { mag >> (-shift) as usize };
    if s == Sign::Neg {
        -mag
    } else {
        mag
    }
}

fn words_to_u32(m: &[u64]) -> Vec<u32> {
    m.iter().flat_map(|&w| [w as u32, (w >> 32) as u32]).collect()
}
