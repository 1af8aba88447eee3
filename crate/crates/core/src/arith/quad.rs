use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Rational;
use crate::error::{Error, Result};

/// `a + b·√m` with `m >= 2` square-free, so the pair `(a, b)` is unique.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadScalar {
    a: Rational,
    b: Rational,
    m: u64,
}

pub fn is_square_free(m: u64) -> bool {
    if m == 0 {
        return false;
    }
    let mut n = m;
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

impl QuadScalar {
    pub fn new(a: Rational, b: Rational, m: u64) -> Result<Self> {
        if m < 2 || !is_square_free(m) {
            return Err(Error::domain(format!(
                "quadratic field parameter must be square-free and >= 2, got {m}"
            )));
        }
        Ok(QuadScalar { a, b, m })
    }

    pub(crate) fn raw(a: Rational, b: Rational, m: u64) -> Self {
        QuadScalar { a, b, m }
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    fn m_rat(&self) -> Rational {
        Rational::from_integer(BigInt::from(self.m))
    }

    /// Exact sign of `a + b√m`, decided by comparing `a²` with `b²m`
    /// when the two terms disagree in sign.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&Rational::zero());
        let sb = self.b.cmp(&Rational::zero());
        if sb == Ordering::Equal {
            return sa;
        }
        if sa == Ordering::Equal || sa == sb {
            return sb;
        }
        let a2 = &self.a * &self.a;
        let b2m = &self.b * &self.b * self.m_rat();
        // a² = b²m is impossible for square-free m >= 2 and b != 0
        if a2 > b2m {
            sa
        } else {
            sb
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub(crate) fn add(&self, o: &QuadScalar) -> QuadScalar {
        QuadScalar::raw(&self.a + &o.a, &self.b + &o.b, self.m)
    }

    pub(crate) fn sub(&self, o: &QuadScalar) -> QuadScalar {
        QuadScalar::raw(&self.a - &o.a, &self.b - &o.b, self.m)
    }

    pub(crate) fn mul(&self, o: &QuadScalar) -> QuadScalar {
        let m = self.m_rat();
        let a = &self.a * &o.a + &self.b * &o.b * m;
        let b = &self.a * &o.b + &self.b * &o.a;
        QuadScalar::raw(a, b, self.m)
    }

    pub(crate) fn add_rat(&self, r: &Rational) -> QuadScalar {
        QuadScalar::raw(&self.a + r, self.b.clone(), self.m)
    }

    pub(crate) fn scale(&self, r: &Rational) -> QuadScalar {
        QuadScalar::raw(&self.a * r, &self.b * r, self.m)
    }

    pub(crate) fn neg(&self) -> QuadScalar {
        QuadScalar::raw(-&self.a, -&self.b, self.m)
    }

    /// `1 / (a + b√m) = (a - b√m) / (a² - b²m)`.
    pub(crate) fn recip(&self) -> QuadScalar {
        assert!(!self.is_zero(), "division by zero");
        let norm = &self.a * &self.a - &self.b * &self.b * self.m_rat();
        QuadScalar::raw(&self.a / &norm, -(&self.b / &norm), self.m)
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.a.to_f64().unwrap_or(f64::NAN)
            + self.b.to_f64().unwrap_or(f64::NAN) * (self.m as f64).sqrt()
    }

    /// Exact `floor(a + b√m)`.
    pub fn floor(&self) -> BigInt {
        let fa = self.a.floor().to_integer();
        if self.b.is_zero() {
            return fa;
        }
        // |b|√m = √(b²m), never a perfect square here
        let r = &self.b * &self.b * self.m_rat();
        let s: BigInt = floor_sqrt(&r);
        let fb = if self.b.is_positive() { s } else { -(s + BigInt::one()) };
        // floor(a) + floor(b√m) <= value < floor(a) + floor(b√m) + 2
        let k0 = fa + fb;
        let next = Rational::from_integer(&k0 + 1);
        let diff = QuadScalar::raw(&self.a - next, self.b.clone(), self.m);
        if diff.signum() != Ordering::Less {
            k0 + 1
        } else {
            k0
        }
    }
}

/// `floor(√r)` for `r >= 0`: with `r = p/q`, `√r = √(pq)/q`.
fn floor_sqrt(r: &Rational) -> BigInt {
    let pq = r.numer() * r.denom();
    pq.sqrt().div_floor(r.denom())
}

impl fmt::Display for QuadScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_negative() {
            write!(f, "{}-{}*sqrt({})", self.a, -&self.b, self.m)
        } else {
            write!(f, "{}+{}*sqrt({})", self.a, self.b, self.m)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn square_free_detection() {
        assert!(is_square_free(2));
        assert!(is_square_free(6));
        assert!(!is_square_free(8));
        assert!(!is_square_free(18));
        assert!(QuadScalar::new(r(1, 1), r(1, 1), 4).is_err());
        assert!(QuadScalar::new(r(1, 1), r(1, 1), 1).is_err());
    }

    #[test]
    fn floor_of_surds() {
        let q = |a: (i64, i64), b: (i64, i64)| QuadScalar::new(r(a.0, a.1), r(b.0, b.1), 2).unwrap();
        assert_eq!(q((0, 1), (1, 1)).floor(), BigInt::from(1));
        assert_eq!(q((0, 1), (-1, 1)).floor(), BigInt::from(-2));
        assert_eq!(q((0, 1), (100, 1)).floor(), BigInt::from(141));
        assert_eq!(q((-141, 1), (100, 1)).floor(), BigInt::from(0));
        assert_eq!(q((1, 2), (1, 1)).floor(), BigInt::from(1));
        assert_eq!(q((3, 1), (-2, 1)).floor(), BigInt::from(0));
    }
}
