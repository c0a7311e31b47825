//! Exact multivariate Laurent polynomials, rational functions with factored
//! binomial denominators, and truncated power series with plethystic
//! operations.

mod laurent;
mod rational;
mod series;
mod varset;

use serde_json::{json, Map, Value};

pub use laurent::{zero_exp, Exp, LaurentPoly, MonomialImage};
pub use rational::FactoredRational;
pub use series::TruncSeries;
pub use varset::VarSet;

use crate::scalars::Rational;
use crate::{Error, Result};

pub type RatPoly = LaurentPoly<Rational>;

impl LaurentPoly<Rational> {
    /// Canonical JSON: `{"vars":[...],"terms":[{"c":"3/2","e":{"x_1":1}}]}`
    /// with terms in ascending exponent order and zero exponents omitted.
    pub fn to_json(&self) -> Value {
        let names = self.vars().names();
        let terms: Vec<Value> = self
            .terms()
            .iter()
            .map(|(e, c)| {
                let mut exps = Map::new();
                for (name, &k) in names.iter().zip(e) {
                    if k != 0 {
                        exps.insert(name.clone(), json!(k));
                    }
                }
                json!({ "c": c.to_string(), "e": exps })
            })
            .collect();
        json!({ "vars": names, "terms": terms })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |what: &str| Error::InvalidInput(format!("polynomial JSON: {what}"));
        let vars = v
            .get("vars")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing \"vars\" array"))?
            .iter()
            .map(|n| n.as_str().map(str::to_owned).ok_or_else(|| bad("variable names must be strings")))
            .collect::<Result<Vec<_>>>()?;
        let vars = VarSet::new(vars)?;
        let terms = v.get("terms").and_then(Value::as_array).ok_or_else(|| bad("missing \"terms\" array"))?;
        let mut out = Vec::with_capacity(terms.len());
        for t in terms {
            let c: Rational =
                t.get("c").and_then(Value::as_str).ok_or_else(|| bad("coefficient must be a string"))?.parse()?;
            let mut e = zero_exp(vars.len());
            if let Some(map) = t.get("e").and_then(Value::as_object) {
                for (name, k) in map {
                    let i = vars.require(name)?;
                    let k = k.as_i64().and_then(|k| i32::try_from(k).ok()).ok_or_else(|| bad("bad exponent"))?;
                    e[i] = k;
                }
            } else if t.get("e").is_some() {
                return Err(bad("\"e\" must be an object"));
            }
            out.push((e, c));
        }
        Ok(LaurentPoly::from_terms(&vars, out))
    }

    /// Whether every coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.terms().iter().all(|(_, c)| c.is_integer())
    }
}

#[cfg(test)]
mod tests;
