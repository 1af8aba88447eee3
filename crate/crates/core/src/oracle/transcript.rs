use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;

use crate::arith::Scalar;
use crate::cake::{Knife, Piece};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QueryKind {
    Eval,
    Cut,
    Pcut,
}

impl QueryKind {
    pub fn name(self) -> &'static str {
        match self {
            QueryKind::Eval => "eval",
            QueryKind::Cut => "cut",
            QueryKind::Pcut => "pcut",
        }
    }
}

/// A query as issued by a protocol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Query {
    /// `μ(piece)`, or `μ(piece) / μ(within)` when the player is asked about
    /// `within` reindexed as the whole cake.
    Eval { piece: Piece, within: Option<Piece> },
    Cut { knife: Knife, alpha: Scalar },
    Pcut { knife: Knife, a: BigInt, b: BigInt },
}

impl Query {
    pub fn kind(&self) -> QueryKind {
        match self {
            Query::Eval { .. } => QueryKind::Eval,
            Query::Cut { .. } => QueryKind::Cut,
            Query::Pcut { .. } => QueryKind::Pcut,
        }
    }

    /// The `args=` field of a transcript line.
    pub fn args(&self) -> String {
        match self {
            Query::Eval { piece, within: None } => piece.to_string(),
            Query::Eval {
                piece,
                within: Some(w),
            } => format!("{piece}~{w}"),
            Query::Cut { knife, alpha } => format!("{knife}#{alpha}"),
            Query::Pcut { knife, a, b } => format!("{knife}#{a}:{b}"),
        }
    }

    fn parse(kind: &str, args: &str) -> Result<Query> {
        let bad = || Error::Parse(format!("bad {kind} arguments {args:?}"));
        match kind {
            "eval" => Ok(match args.split_once('~') {
                Some((p, w)) => Query::Eval {
                    piece: p.parse()?,
                    within: Some(w.parse()?),
                },
                None => Query::Eval {
                    piece: args.parse()?,
                    within: None,
                },
            }),
            "cut" => {
                let (k, a) = args.rsplit_once('#').ok_or_else(bad)?;
                Ok(Query::Cut {
                    knife: k.parse()?,
                    alpha: a.parse()?,
                })
            }
            "pcut" => {
                let (k, r) = args.rsplit_once('#').ok_or_else(bad)?;
                let (a, b) = r.split_once(':').ok_or_else(bad)?;
                Ok(Query::Pcut {
                    knife: k.parse()?,
                    a: a.parse().map_err(|_| bad())?,
                    b: b.parse().map_err(|_| bad())?,
                })
            }
            _ => Err(Error::Parse(format!("unknown query kind {kind:?}"))),
        }
    }
}

/// One answered query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub player: usize,
    pub query: Query,
    /// `None` for a cut whose value exceeds the whole domain.
    pub answer: Option<Scalar>,
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "player={} kind={} args={} ans=",
            self.player,
            self.query.kind().name(),
            self.query.args()
        )?;
        match &self.answer {
            Some(a) => write!(f, "{a}"),
            None => write!(f, "none"),
        }
    }
}

impl FromStr for Entry {
    type Err = Error;

    fn from_str(line: &str) -> Result<Entry> {
        let bad = || Error::Parse(format!("bad transcript line {line:?}"));
        let mut fields = line.split_whitespace();
        let mut next = |key: &str| {
            fields
                .next()
                .and_then(|f| f.strip_prefix(key))
                .and_then(|f| f.strip_prefix('='))
                .ok_or_else(bad)
        };
        let player = next("player")?.parse().map_err(|_| bad())?;
        let kind = next("kind")?;
        let args = next("args")?;
        let ans = next("ans")?;
        let answer = match ans {
            "none" => None,
            a => Some(a.parse()?),
        };
        Ok(Entry {
            player,
            query: Query::parse(kind, args)?,
            answer,
        })
    }
}

/// Ordered log of every query a run issued.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Transcript {
    entries: Vec<Entry>,
}

impl Transcript {
    pub fn new() -> Self {
        Transcript::default()
    }

    pub fn push(&mut self, e: Entry) {
        self.entries.push(e);
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn count(&self, player: Option<usize>, kind: QueryKind) -> usize {
        self.entries
            .iter()
            .filter(|e| e.query.kind() == kind && player.map_or(true, |p| p == e.player))
            .count()
    }
}

impl fmt::Display for Transcript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            writeln!(f, "{e}")?;
        }
        Ok(())
    }
}

impl FromStr for Transcript {
    type Err = Error;

    fn from_str(s: &str) -> Result<Transcript> {
        let entries = s
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(str::parse)
            .collect::<Result<_>>()?;
        Ok(Transcript { entries })
    }
}
