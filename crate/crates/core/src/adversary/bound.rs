use num_bigint::BigInt;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::Rational;
use crate::error::{Error, Result};

/// `coefficient · log₃(argument)` queries, kept exact.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LowerBound {
    /// `c₁n`, the number of humble players.
    #[serde(serialize_with = "as_text")]
    pub coefficient: BigInt,
    /// `D·c₁/c₂`.
    #[serde(serialize_with = "as_text")]
    pub argument: Rational,
    pub decimal: f64,
}

fn as_text<T: std::fmt::Display, S: serde::Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl LowerBound {
    /// Whether `q` queries reach the bound, decided exactly:
    /// `3^q ≥ argument^coefficient`.
    pub fn met_by(&self, q: u64) -> bool {
        if self.argument <= Rational::one() {
            return true;
        }
        let c = self.coefficient.to_u32().expect("coefficient fits in u32");
        let lhs = BigInt::from(3).pow(q as u32) * Pow::pow(self.argument.denom(), c);
        lhs >= Pow::pow(self.argument.numer(), c)
    }

    /// Smallest query count meeting the bound.
    pub fn min_queries(&self) -> u64 {
        let mut q = self.decimal.max(0.0).floor() as u64;
        q = q.saturating_sub(1);
        while !self.met_by(q) {
            q += 1;
        }
        q
    }
}

/// `c₁n · (log₃D + log₃(c₁/c₂))`.
pub fn lower_bound_value(n: u64, c1: &Rational, c2: &Rational, d: &BigInt) -> Result<LowerBound> {
    let unit = Rational::one();
    for (name, c) in [("c1", c1), ("c2", c2)] {
        if !c.is_positive() || c >= &unit {
            return Err(Error::domain(format!("{name} = {c} is outside (0, 1)")));
        }
    }
    if !d.is_positive() {
        return Err(Error::domain(format!("D = {d} must be positive")));
    }
    let c1n = c1 * Rational::from_integer(BigInt::from(n));
    if !c1n.is_integer() || c1n.is_zero() {
        return Err(Error::domain(format!("c1·n = {c1n} is not a positive integer")));
    }
    let coefficient = c1n.to_integer();
    let argument = Rational::from_integer(d.clone()) * c1 / c2;
    let log3 = |r: &Rational| (r.numer().to_f64().unwrap_or(f64::MAX).ln() - r.denom().to_f64().unwrap_or(f64::MAX).ln()) / 3f64.ln();
    let decimal = coefficient.to_f64().unwrap_or(f64::MAX) * log3(&argument);
    Ok(LowerBound {
        coefficient,
        argument,
        decimal,
    })
}
