use std::fmt;
use std::str::FromStr;

use super::Piece;
use crate::arith::Scalar;
use crate::error::{Error, Result};

/// How a knife sweeps its domain. Positions are measured in volume: the
/// piece cut at position `x` always has volume exactly `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KnifeKind {
    /// Left-to-right through the domain laid out end to end.
    Prefix,
    /// A window growing symmetrically around `midpoint`, sliding inwards
    /// once it reaches either end of the domain.
    Centered { midpoint: Scalar },
    /// `parts` congruent windows, one starting at each `1/parts` mark of the
    /// domain, growing together.
    Translated { parts: u32 },
    /// Vertical sweep over a rectangle of the given height.
    Sweep { height: Scalar },
}

/// A monotone knife `f` on a domain piece `I`: `f(x) ⊆ f(y)` for `x <= y`
/// and `vol(f(x)) = x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Knife {
    kind: KnifeKind,
    domain: Piece,
}

impl Knife {
    pub fn new(kind: KnifeKind, domain: Piece) -> Result<Self> {
        match &kind {
            KnifeKind::Translated { parts: 0 } => {
                return Err(Error::domain("translated knife needs at least one part"))
            }
            KnifeKind::Sweep { height } if !height.is_positive() => {
                return Err(Error::domain("sweep knife needs a positive height"))
            }
            _ => {}
        }
        Ok(Knife { kind, domain })
    }

    pub fn prefix(domain: Piece) -> Self {
        Knife {
            kind: KnifeKind::Prefix,
            domain,
        }
    }

    pub fn kind(&self) -> &KnifeKind {
        &self.kind
    }

    pub fn domain(&self) -> &Piece {
        &self.domain
    }

    /// Volume per unit of sweep length.
    pub fn scale(&self) -> Scalar {
        match &self.kind {
            KnifeKind::Sweep { height } => height.clone(),
            _ => Scalar::one(),
        }
    }

    /// `λ(I)`, the largest admissible knife position.
    pub fn volume(&self) -> Scalar {
        self.scale() * self.domain.length()
    }

    /// Windows of `f(x)` in unrolled domain coordinates.
    fn windows(&self, x: &Scalar) -> Vec<(Scalar, Scalar)> {
        let w = x / self.scale();
        let total = self.domain.length();
        match &self.kind {
            KnifeKind::Prefix | KnifeKind::Sweep { .. } => vec![(Scalar::zero(), w)],
            KnifeKind::Centered { midpoint } => {
                let t = self.domain.position_of(midpoint);
                let start = (&t - &w / Scalar::int(2))
                    .max(Scalar::zero())
                    .min(&total - &w);
                let end = &start + &w;
                vec![(start, end)]
            }
            KnifeKind::Translated { parts } => {
                let k = Scalar::int(i64::from(*parts));
                let step = &total / &k;
                let width = &w / &k;
                (0..*parts)
                    .map(|i| {
                        let o = &step * Scalar::int(i64::from(i));
                        let e = &o + &width;
                        (o, e)
                    })
                    .collect()
            }
        }
    }

    /// `f(x)`.
    pub fn piece(&self, x: &Scalar) -> Result<Piece> {
        if x.is_negative() || *x > self.volume() {
            return Err(Error::domain(format!(
                "knife position {x} outside [0, {}]",
                self.volume()
            )));
        }
        Ok(self.piece_unchecked(x))
    }

    pub(crate) fn piece_unchecked(&self, x: &Scalar) -> Piece {
        let parts: Vec<Piece> = self
            .windows(x)
            .iter()
            .map(|(a, b)| self.domain.window(a, b))
            .collect();
        match parts.len() {
            1 => parts.into_iter().next().unwrap_or_default(),
            _ => parts.iter().fold(Piece::empty(), |acc, p| acc.union(p)),
        }
    }

    /// Knife positions where some window endpoint meets one of the unrolled
    /// breakpoints `u_breaks`, plus regime changes and both ends. Between two
    /// consecutive returned positions the value of `f(x)` under any
    /// piecewise-constant density with those breakpoints is affine in `x`.
    pub(crate) fn critical_points(&self, u_breaks: &[Scalar]) -> Vec<Scalar> {
        let s = self.scale();
        let total = self.domain.length();
        let lambda = &s * &total;
        let mut xs = vec![Scalar::zero(), lambda.clone()];
        match &self.kind {
            KnifeKind::Prefix | KnifeKind::Sweep { .. } => {
                xs.extend(u_breaks.iter().map(|u| &s * u));
            }
            KnifeKind::Centered { midpoint } => {
                let t = self.domain.position_of(midpoint);
                let two_s = &s * Scalar::int(2);
                xs.push(&two_s * &t);
                xs.push(&two_s * (&total - &t));
                for u in u_breaks {
                    xs.push(&two_s * (&t - u));
                    xs.push(&two_s * (u - &t));
                    xs.push(&s * u);
                    xs.push(&s * (&total - u));
                }
            }
            KnifeKind::Translated { parts } => {
                let k = Scalar::int(i64::from(*parts));
                let step = &total / &k;
                let sk = &s * &k;
                for i in 0..*parts {
                    let o = &step * Scalar::int(i64::from(i));
                    for u in u_breaks {
                        xs.push(&sk * (u - &o));
                    }
                }
            }
        }
        xs.retain(|x| !x.is_negative() && *x <= lambda);
        xs.sort();
        xs.dedup();
        xs
    }

    pub fn with_domain(&self, domain: Piece) -> Knife {
        Knife {
            kind: self.kind.clone(),
            domain,
        }
    }
}

/// The knife family a protocol applies to every sub-piece it works on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KnifeStyle {
    Prefix,
    /// Centered on the point splitting the domain's length in half.
    Centered,
    Translated(u32),
    Sweep(Scalar),
}

impl KnifeStyle {
    pub fn on(&self, domain: Piece) -> Knife {
        let kind = match self {
            KnifeStyle::Prefix => KnifeKind::Prefix,
            KnifeStyle::Centered => {
                let half = domain.length() / Scalar::int(2);
                let midpoint = domain.locate(&half).unwrap_or_else(Scalar::zero);
                KnifeKind::Centered { midpoint }
            }
            KnifeStyle::Translated(k) => KnifeKind::Translated { parts: (*k).max(1) },
            KnifeStyle::Sweep(h) => KnifeKind::Sweep { height: h.clone() },
        };
        Knife { kind, domain }
    }
}

impl FromStr for KnifeStyle {
    type Err = Error;

    /// `prefix`, `centered`, `translated` (two parts) or `translated:K`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "prefix" => Ok(KnifeStyle::Prefix),
            "centered" => Ok(KnifeStyle::Centered),
            "translated" => Ok(KnifeStyle::Translated(2)),
            other => {
                let k = other
                    .strip_prefix("translated:")
                    .and_then(|k| k.parse::<u32>().ok())
                    .filter(|k| *k >= 1)
                    .ok_or_else(|| Error::Parse(format!("unknown knife {other:?}")))?;
                Ok(KnifeStyle::Translated(k))
            }
        }
    }
}

impl fmt::Display for Knife {
    /// `prefix@<piece>`, `centered(<mid>)@<piece>`, `translated(<k>)@<piece>`,
    /// `sweep(<height>)@<piece>`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            KnifeKind::Prefix => write!(f, "prefix")?,
            KnifeKind::Centered { midpoint } => write!(f, "centered({midpoint})")?,
            KnifeKind::Translated { parts } => write!(f, "translated({parts})")?,
            KnifeKind::Sweep { height } => write!(f, "sweep({height})")?,
        }
        write!(f, "@{}", self.domain)
    }
}

impl FromStr for Knife {
    type Err = Error;

    fn from_str(s: &str) -> Result<Knife> {
        let (head, piece) = s
            .split_once('@')
            .ok_or_else(|| Error::Parse(format!("bad knife {s:?}")))?;
        let domain: Piece = piece.parse()?;
        let arg = |name: &str| {
            head.strip_prefix(name)
                .and_then(|r| r.strip_prefix('('))
                .and_then(|r| r.strip_suffix(')'))
        };
        let kind = if head == "prefix" {
            KnifeKind::Prefix
        } else if let Some(a) = arg("centered") {
            KnifeKind::Centered { midpoint: a.parse()? }
        } else if let Some(a) = arg("translated") {
            KnifeKind::Translated {
                parts: a.parse().map_err(|_| Error::Parse(format!("bad knife {s:?}")))?,
            }
        } else if let Some(a) = arg("sweep") {
            KnifeKind::Sweep { height: a.parse()? }
        } else {
            return Err(Error::Parse(format!("bad knife {s:?}")));
        };
        Knife::new(kind, domain)
    }
}
