use super::{FactoredRational, LaurentPoly, VarSet};
use crate::scalars::{mu, Rational};
use crate::{Error, Result};

type Coeff = FactoredRational<Rational>;

/// A power series `c_0 + c_1 T + ... + c_N T^N` in an auxiliary variable
/// `T`, with rational-function coefficients. Higher powers are discarded.
#[derive(Clone, Debug)]
pub struct TruncSeries {
    vars: VarSet,
    coeffs: Vec<Coeff>,
}

impl TruncSeries {
    /// Pads or truncates `coeffs` to `order + 1` entries.
    pub fn new(vars: &VarSet, order: usize, mut coeffs: Vec<Coeff>) -> Self {
        coeffs.resize_with(order + 1, || FactoredRational::zero(vars));
        coeffs.truncate(order + 1);
        TruncSeries { vars: vars.clone(), coeffs }
    }

    pub fn zero(vars: &VarSet, order: usize) -> Self {
        Self::new(vars, order, Vec::new())
    }

    /// The series `T^k` (zero if `k` exceeds the order).
    pub fn monomial(vars: &VarSet, order: usize, k: usize) -> Self {
        let mut s = Self::zero(vars, order);
        if k <= order {
            s.coeffs[k] = FactoredRational::from_poly(LaurentPoly::constant(vars, Rational::one()));
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn coeff(&self, k: usize) -> &Coeff {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[Coeff] {
        &self.coeffs
    }

    pub fn add(&self, other: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add(b)).collect();
        TruncSeries { vars: self.vars.clone(), coeffs }
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        let coeffs = self.coeffs.iter().map(|c| c.scale_rational(r)).collect();
        TruncSeries { vars: self.vars.clone(), coeffs }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let coeffs = (0..=n)
            .map(|k| {
                let parts = (0..=k)
                    .filter(|&i| !self.coeffs[i].is_zero() && !other.coeffs[k - i].is_zero())
                    .map(|i| self.coeffs[i].mul(&other.coeffs[k - i]))
                    .collect();
                FactoredRational::sum_all(&self.vars, parts)
            })
            .collect();
        TruncSeries { vars: self.vars.clone(), coeffs }
    }

    /// Adams operation: `psi_r(sum a_i T^i) = sum psi_r(a_i) T^(r i)`.
    pub fn adams(&self, r: u32) -> Self {
        let mut out = Self::zero(&self.vars, self.order());
        for (i, c) in self.coeffs.iter().enumerate() {
            let k = i * r as usize;
            if k <= self.order() {
                out.coeffs[k] = c.adams(r);
            }
        }
        out
    }

    fn constant_is(&self, value: i64) -> Result<bool> {
        let c = self.coeffs[0].normalize()?;
        Ok(c == LaurentPoly::constant(&self.vars, Rational::from(value)) || (value == 0 && c.is_zero()))
    }

    /// `exp(f) = sum f^k / k!` for `f` with zero constant term.
    pub fn exp(&self) -> Result<Self> {
        if !self.constant_is(0)? {
            return Err(Error::WrongConstantTerm("exp needs constant term 0".into()));
        }
        let mut out = Self::monomial(&self.vars, self.order(), 0);
        let mut power = out.clone();
        for k in 1..=self.order() {
            power = power.mul(self).scale_rational(&frac(1, k));
            out = out.add(&power);
        }
        Ok(out)
    }

    /// `log(f) = sum (-1)^(k+1) (f - 1)^k / k` for `f` with constant term 1.
    pub fn log(&self) -> Result<Self> {
        if !self.constant_is(1)? {
            return Err(Error::WrongConstantTerm("log needs constant term 1".into()));
        }
        let mut g = self.clone();
        g.coeffs[0] = FactoredRational::zero(&self.vars);
        let mut out = Self::zero(&self.vars, self.order());
        let mut power = Self::monomial(&self.vars, self.order(), 0);
        for k in 1..=self.order() {
            power = power.mul(&g);
            let sign = if k % 2 == 1 { 1 } else { -1 };
            out = out.add(&power.scale_rational(&frac(sign, k)));
        }
        Ok(out)
    }

    /// Plethystic exponential `exp(sum_r psi_r(f) / r)`.
    pub fn plethystic_exp(&self) -> Result<Self> {
        if !self.constant_is(0)? {
            return Err(Error::WrongConstantTerm("plethystic Exp needs constant term 0".into()));
        }
        let mut inner = Self::zero(&self.vars, self.order());
        for r in 1..=self.order().max(1) {
            inner = inner.add(&self.adams(r as u32).scale_rational(&frac(1, r)));
        }
        inner.exp()
    }

    /// Plethystic logarithm `sum_r (mu(r) / r) psi_r(log f)`.
    pub fn plethystic_log(&self) -> Result<Self> {
        let l = self.log()?;
        let mut out = Self::zero(&self.vars, self.order());
        for r in 1..=self.order().max(1) {
            let m = mu(r as u64);
            if m != 0 {
                out = out.add(&l.adams(r as u32).scale_rational(&frac(m, r)));
            }
        }
        Ok(out)
    }
}

/// `a / b` as a rational.
fn frac(a: i64, b: usize) -> Rational {
    Rational::new(a.into(), (b as i64).into()).expect("nonzero denominator")
}
