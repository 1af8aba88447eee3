use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{QuadScalar, Rational};
use crate::error::{Error, Result};

/// An exact real number: a rational or an element of one quadratic field.
///
/// Mixing a rational with a quadratic scalar promotes the rational. Mixing two
/// different fields is a logic error; the operator impls panic on it and
/// [`Scalar::try_cmp`] reports it as [`Error::FieldMismatch`].
#[derive(Clone, Debug)]
pub enum Scalar {
    Rational(Rational),
    Quad(QuadScalar),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rational(Rational::zero())
    }

    pub fn one() -> Self {
        Scalar::Rational(Rational::one())
    }

    pub fn int(n: i64) -> Self {
        Scalar::Rational(Rational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Scalar::Rational(Rational::from_integer(n))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Scalar::Rational(Rational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn quad(a: Rational, b: Rational, m: u64) -> Result<Self> {
        QuadScalar::new(a, b, m).map(Scalar::Quad)
    }

    /// `b·√m`.
    pub fn sqrt_of(m: u64) -> Result<Self> {
        Scalar::quad(Rational::zero(), Rational::one(), m)
    }

    pub fn field(&self) -> Option<u64> {
        match self {
            Scalar::Rational(_) => None,
            Scalar::Quad(q) => Some(q.m()),
        }
    }

    /// The rational value, if the number is rational (a quadratic scalar with
    /// zero surd part counts).
    pub fn to_rational(&self) -> Option<Rational> {
        match self {
            Scalar::Rational(r) => Some(r.clone()),
            Scalar::Quad(q) if q.b().is_zero() => Some(q.a().clone()),
            Scalar::Quad(_) => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        match self {
            Scalar::Rational(_) => true,
            Scalar::Quad(q) => q.b().is_zero(),
        }
    }

    pub fn signum(&self) -> Ordering {
        match self {
            Scalar::Rational(r) => r.cmp(&Rational::zero()),
            Scalar::Quad(q) => q.signum(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.signum() == Ordering::Equal
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn abs(&self) -> Scalar {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Rational(r.recip()),
            Scalar::Quad(q) => Scalar::Quad(q.recip()),
        }
    }

    pub fn floor(&self) -> BigInt {
        match self {
            Scalar::Rational(r) => r.floor().to_integer(),
            Scalar::Quad(q) => q.floor(),
        }
    }

    pub fn ceil(&self) -> BigInt {
        -(-self).floor()
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            Scalar::Quad(q) => q.to_f64(),
        }
    }

    /// Exact comparison; fails only when the operands live in different fields.
    pub fn try_cmp(&self, other: &Scalar) -> Result<Ordering> {
        match (self, other) {
            (Scalar::Rational(x), Scalar::Rational(y)) => Ok(x.cmp(y)),
            (Scalar::Quad(x), Scalar::Quad(y)) if x.m() != y.m() => {
                Err(Error::FieldMismatch(x.m(), y.m()))
            }
            _ => Ok(binop(self, other, Op::Sub).signum()),
        }
    }

    pub fn min(self, other: Scalar) -> Scalar {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Scalar) -> Scalar {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Same number, but carried in the representation of `like` (a rational
    /// is promoted into `like`'s quadratic field).
    pub fn promote_like(&self, like: &Scalar) -> Scalar {
        match (self, like) {
            (Scalar::Rational(r), Scalar::Quad(q)) => {
                Scalar::Quad(QuadScalar::raw(r.clone(), Rational::zero(), q.m()))
            }
            _ => self.clone(),
        }
    }
}

/// Exact three-way comparison of two scalars of the same kind.
pub fn quad_cmp(x: &Scalar, y: &Scalar) -> Result<Ordering> {
    x.try_cmp(y)
}

#[derive(Clone, Copy)]
enum Op {
    Add,
    Sub,
    Mul,
    Div,
}

fn check_fields(x: &QuadScalar, y: &QuadScalar) {
    assert_eq!(
        x.m(),
        y.m(),
        "arithmetic across quadratic fields sqrt({}) and sqrt({})",
        x.m(),
        y.m()
    );
}

fn binop(lhs: &Scalar, rhs: &Scalar, op: Op) -> Scalar {
    use Scalar::{Quad, Rational as Rat};
    match (lhs, rhs) {
        (Rat(x), Rat(y)) => Rat(match op {
            Op::Add => x + y,
            Op::Sub => x - y,
            Op::Mul => x * y,
            Op::Div => x / y,
        }),
        (Quad(x), Rat(y)) => Quad(match op {
            Op::Add => x.add_rat(y),
            Op::Sub => x.add_rat(&-y),
            Op::Mul => x.scale(y),
            Op::Div => x.scale(&y.recip()),
        }),
        (Rat(x), Quad(y)) => Quad(match op {
            Op::Add => y.add_rat(x),
            Op::Sub => y.neg().add_rat(x),
            Op::Mul => y.scale(x),
            Op::Div => y.recip().scale(x),
        }),
        (Quad(x), Quad(y)) => {
            check_fields(x, y);
            Quad(match op {
                Op::Add => x.add(y),
                Op::Sub => x.sub(y),
                Op::Mul => x.mul(y),
                Op::Div => x.mul(&y.recip()),
            })
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $op:expr) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                binop(self, rhs, $op)
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                binop(self, &rhs, $op)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                binop(&self, rhs, $op)
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                binop(&self, &rhs, $op)
            }
        }
    };
}

forward_binop!(Add, add, Op::Add);
forward_binop!(Sub, sub, Op::Sub);
forward_binop!(Mul, mul, Op::Mul);
forward_binop!(Div, div, Op::Div);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Rational(-r),
            Scalar::Quad(q) => Scalar::Quad(q.neg()),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

impl<'a> std::iter::Sum<&'a Scalar> for Scalar {
    fn sum<I: Iterator<Item = &'a Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Scalar) -> bool {
        matches!(self.try_cmp(other), Ok(Ordering::Equal))
    }
}

impl Eq for Scalar {}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Scalar) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Scalar) -> Ordering {
        self.try_cmp(other).expect("comparison across quadratic fields")
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::Rational(r)
    }
}

impl From<BigInt> for Scalar {
    fn from(n: BigInt) -> Self {
        Scalar::from_bigint(n)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl From<QuadScalar> for Scalar {
    fn from(q: QuadScalar) -> Self {
        Scalar::Quad(q)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => write!(f, "{r}"),
            Scalar::Quad(q) => write!(f, "{q}"),
        }
    }
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(BigInt::from_str(s).map_err(|_| bad())?)),
    }
}

impl FromStr for Scalar {
    type Err = Error;

    /// Accepts `"p/q"`, `"p"`, and surd forms such as `"1/2+3*sqrt(2)"`,
    /// `"-sqrt(5)"` or `"2-1/3*sqrt(2)"`.
    fn from_str(s: &str) -> Result<Scalar> {
        let s = s.trim();
        let Some(pos) = s.find("sqrt(") else {
            return parse_rational(s).map(Scalar::Rational);
        };
        let bad = || Error::Parse(format!("not a quadratic scalar: {s:?}"));
        let m: u64 = s[pos + 5..]
            .strip_suffix(')')
            .ok_or_else(bad)?
            .trim()
            .parse()
            .map_err(|_| bad())?;
        let head = s[..pos].trim_end();
        let head = head.strip_suffix('*').unwrap_or(head).trim_end();
        // the separator is the last sign that is not a leading sign
        let split = head
            .char_indices()
            .filter(|&(i, c)| i > 0 && (c == '+' || c == '-'))
            .map(|(i, _)| i)
            .last();
        let (a_txt, b_txt) = match split {
            Some(i) => (&head[..i], &head[i..]),
            None => ("0", head),
        };
        let a = parse_rational(a_txt)?;
        let b = match b_txt.trim() {
            "" | "+" => Rational::one(),
            "-" => -Rational::one(),
            t => parse_rational(t.strip_prefix('+').unwrap_or(t))?,
        };
        Scalar::quad(a, b, m)
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Scalar::Rational(r) => serializer.serialize_str(&r.to_string()),
            Scalar::Quad(q) => {
                use serde::ser::SerializeStruct;
                let mut st = serializer.serialize_struct("QuadScalar", 3)?;
                st.serialize_field("a", &q.a().to_string())?;
                st.serialize_field("b", &q.b().to_string())?;
                st.serialize_field("m", &q.m())?;
                st.end()
            }
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ScalarRepr {
    Text(String),
    Quad { a: String, b: String, m: u64 },
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Scalar, D::Error> {
        use serde::de::Error as _;
        match ScalarRepr::deserialize(deserializer)? {
            ScalarRepr::Text(s) => s.parse().map_err(D::Error::custom),
            ScalarRepr::Quad { a, b, m } => {
                let a = parse_rational(&a).map_err(D::Error::custom)?;
                let b = parse_rational(&b).map_err(D::Error::custom)?;
                Scalar::quad(a, b, m).map_err(D::Error::custom)
            }
        }
    }
}

impl Scalar {
    /// Integer value when the scalar is an integer.
    pub fn to_integer(&self) -> Option<BigInt> {
        let r = self.to_rational()?;
        r.is_integer().then(|| r.to_integer())
    }

    pub fn is_integer(&self) -> bool {
        self.to_integer().is_some()
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}
