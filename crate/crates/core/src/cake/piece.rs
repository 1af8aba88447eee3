use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::Scalar;
use crate::error::{Error, Result};

/// Half-open interval `[lo, hi)` in cake (sweep) coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: Scalar,
    hi: Scalar,
}

impl Interval {
    pub fn new(lo: Scalar, hi: Scalar) -> Result<Self> {
        if lo > hi {
            return Err(Error::domain(format!("interval [{lo}, {hi}) has lo > hi")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn lo(&self) -> &Scalar {
        &self.lo
    }

    pub fn hi(&self) -> &Scalar {
        &self.hi
    }

    pub fn len(&self) -> Scalar {
        &self.hi - &self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.lo == self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{})", self.lo, self.hi)
    }
}

/// A finite union of half-open intervals, kept canonical: sorted, disjoint,
/// no empty members and no two members touching.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Piece {
    intervals: Vec<Interval>,
}

impl Piece {
    pub fn empty() -> Self {
        Piece::default()
    }

    /// `[lo, hi)`; empty when `lo >= hi`.
    pub fn interval(lo: Scalar, hi: Scalar) -> Self {
        if lo < hi {
            Piece {
                intervals: vec![Interval { lo, hi }],
            }
        } else {
            Piece::empty()
        }
    }

    pub fn from_intervals<I: IntoIterator<Item = Interval>>(iter: I) -> Self {
        let mut v: Vec<Interval> = iter.into_iter().filter(|i| !i.is_empty()).collect();
        v.sort_by(|a, b| a.lo.cmp(&b.lo));
        Piece::from_sorted(v)
    }

    /// Merges an already sorted run of non-empty intervals.
    fn from_sorted(v: Vec<Interval>) -> Self {
        let mut out: Vec<Interval> = Vec::with_capacity(v.len());
        for iv in v {
            match out.last_mut() {
                Some(last) if iv.lo <= last.hi => {
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                    }
                }
                _ => out.push(iv),
            }
        }
        Piece { intervals: out }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// One-dimensional volume: the summed interval lengths.
    pub fn length(&self) -> Scalar {
        self.intervals.iter().map(Interval::len).sum()
    }

    pub fn bounds(&self) -> Option<(&Scalar, &Scalar)> {
        Some((&self.intervals.first()?.lo, &self.intervals.last()?.hi))
    }

    pub fn union(&self, other: &Piece) -> Piece {
        let mut v = Vec::with_capacity(self.intervals.len() + other.intervals.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.intervals, &other.intervals);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].lo <= b[j].lo) {
                v.push(a[i].clone());
                i += 1;
            } else {
                v.push(b[j].clone());
                j += 1;
            }
        }
        Piece::from_sorted(v)
    }

    pub fn intersect(&self, other: &Piece) -> Piece {
        let (a, b) = (&self.intervals, &other.intervals);
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            let lo = if a[i].lo > b[j].lo { &a[i].lo } else { &b[j].lo };
            let hi = if a[i].hi < b[j].hi { &a[i].hi } else { &b[j].hi };
            if lo < hi {
                out.push(Interval {
                    lo: lo.clone(),
                    hi: hi.clone(),
                });
            }
            if a[i].hi < b[j].hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        Piece { intervals: out }
    }

    pub fn subtract(&self, other: &Piece) -> Piece {
        let b = &other.intervals;
        let mut out = Vec::new();
        let mut j = 0;
        for a in &self.intervals {
            let mut lo = a.lo.clone();
            while j < b.len() && b[j].hi <= lo {
                j += 1;
            }
            let mut k = j;
            while k < b.len() && b[k].lo < a.hi {
                if b[k].lo > lo {
                    out.push(Interval {
                        lo: lo.clone(),
                        hi: b[k].lo.clone(),
                    });
                }
                if b[k].hi > lo {
                    lo = b[k].hi.clone();
                }
                if lo >= a.hi {
                    break;
                }
                k += 1;
            }
            if lo < a.hi {
                out.push(Interval {
                    lo,
                    hi: a.hi.clone(),
                });
            }
        }
        Piece { intervals: out }
    }

    pub fn is_subset_of(&self, other: &Piece) -> bool {
        self.subtract(other).is_empty()
    }

    pub fn is_disjoint_from(&self, other: &Piece) -> bool {
        self.intersect(other).is_empty()
    }

    /// Length of the part of the piece lying left of `c`: the unrolled
    /// coordinate of `c` when the piece is laid out end to end.
    pub fn position_of(&self, c: &Scalar) -> Scalar {
        let mut acc = Scalar::zero();
        for iv in &self.intervals {
            if *c <= iv.lo {
                break;
            }
            if *c >= iv.hi {
                acc = acc + iv.len();
            } else {
                acc = acc + (c - &iv.lo);
                break;
            }
        }
        acc
    }

    /// Cake coordinate of unrolled position `u` (clamped to the piece).
    pub fn locate(&self, u: &Scalar) -> Option<Scalar> {
        let mut offset = Scalar::zero();
        for iv in &self.intervals {
            let end = &offset + iv.len();
            if *u < end {
                return Some(&iv.lo + (u - &offset));
            }
            offset = end;
        }
        self.intervals.last().map(|iv| iv.hi.clone())
    }

    /// The sub-piece between unrolled positions `u0 <= u1`.
    pub fn window(&self, u0: &Scalar, u1: &Scalar) -> Piece {
        let mut out = Vec::new();
        let mut offset = Scalar::zero();
        for iv in &self.intervals {
            if offset >= *u1 {
                break;
            }
            let len = iv.len();
            let end = &offset + &len;
            if end > *u0 {
                let s = if *u0 > offset { u0 - &offset } else { Scalar::zero() };
                let e = if *u1 < end { u1 - &offset } else { len };
                if s < e {
                    out.push(Interval {
                        lo: &iv.lo + s,
                        hi: &iv.lo + e,
                    });
                }
            }
            offset = end;
        }
        Piece { intervals: out }
    }

    /// Unrolled positions of every interval boundary of the piece together
    /// with every point of `cuts` (sorted cake coordinates) falling inside it.
    pub fn unrolled_breaks(&self, cuts: &[Scalar]) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero()];
        let mut offset = Scalar::zero();
        for iv in &self.intervals {
            let start = cuts.partition_point(|c| *c <= iv.lo);
            for c in cuts[start..].iter().take_while(|c| **c < iv.hi) {
                out.push(&offset + (c - &iv.lo));
            }
            offset = offset + iv.len();
            out.push(offset.clone());
        }
        out
    }
}

impl fmt::Display for Piece {
    /// `[a,b)|[c,d)`, or `empty`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "empty");
        }
        for (i, iv) in self.intervals.iter().enumerate() {
            if i > 0 {
                write!(f, "|")?;
            }
            write!(f, "{iv}")?;
        }
        Ok(())
    }
}

impl FromStr for Piece {
    type Err = Error;

    fn from_str(s: &str) -> Result<Piece> {
        let s = s.trim();
        if s == "empty" {
            return Ok(Piece::empty());
        }
        let mut v = Vec::new();
        for part in s.split('|') {
            let inner = part
                .trim()
                .strip_prefix('[')
                .and_then(|p| p.strip_suffix(')'))
                .ok_or_else(|| Error::Parse(format!("bad interval {part:?}")))?;
            let (lo, hi) = inner
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("bad interval {part:?}")))?;
            v.push(Interval::new(lo.parse()?, hi.parse()?)?);
        }
        Ok(Piece::from_intervals(v))
    }
}

impl Serialize for Piece {
    /// `[["lo","hi"], ...]`
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = serializer.serialize_seq(Some(self.intervals.len()))?;
        for iv in &self.intervals {
            seq.serialize_element(&(&iv.lo, &iv.hi))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Piece {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Piece, D::Error> {
        use serde::de::Error as _;
        let pairs: Vec<(Scalar, Scalar)> = Vec::deserialize(deserializer)?;
        let mut v = Vec::with_capacity(pairs.len());
        for (lo, hi) in pairs {
            v.push(Interval::new(lo, hi).map_err(D::Error::custom)?);
        }
        Ok(Piece::from_intervals(v))
    }
}
