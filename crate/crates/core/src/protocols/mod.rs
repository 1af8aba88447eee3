//! Division protocols. Each one talks to the players only through an
//! [`Oracle`] and returns a [`Division`] of the piece it was given.

mod batch;
mod clone;
mod cnh;
mod division;
mod irrational;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::arith::ceil_log2;
use crate::cake::{KnifeStyle, Piece};
use crate::error::{Error, Result};
use crate::oracle::{Instance, Ledger, Oracle, Transcript};

pub use batch::batch_near_half;
pub use clone::{alias_ids, clone_divide, clone_transform, Cloned};
pub use cnh::{cut_near_halves_2p, recursive_cnh};
pub use division::{Division, DivisionRecord};
pub use irrational::{irrational_divide, round_up_demands, IrrationalOutcome, SubInstanceSpec, SubInstanceTag};

/// Anything that can divide a piece among integer-demand players.
pub trait DivisionProtocol: Sync {
    fn name(&self) -> String;

    fn divide(
        &self,
        oracle: &mut Oracle,
        players: &[(usize, BigInt)],
        piece: &Piece,
        style: &KnifeStyle,
    ) -> Result<Division>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Protocol {
    /// The batch near-half protocol.
    Batch,
    /// Two-player Cut Near-Halves.
    Cnh2,
    /// Recursive n-player Cut Near-Halves.
    CnhRec,
    /// Batch protocol on unit-demand clones.
    Clone,
    /// Decomposition for irrational demands.
    Irrational,
}

impl Protocol {
    pub const ALL: [Protocol; 5] = [
        Protocol::Batch,
        Protocol::Cnh2,
        Protocol::CnhRec,
        Protocol::Clone,
        Protocol::Irrational,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Protocol::Batch => "batch",
            Protocol::Cnh2 => "cnh2",
            Protocol::CnhRec => "cnh-rec",
            Protocol::Clone => "clone",
            Protocol::Irrational => "irrational",
        }
    }

    /// Worst-case high-level query count for these demands (in protocol
    /// order), where one is known.
    pub fn query_bound(self, demands: &[BigInt]) -> Result<Option<u64>> {
        let total: BigInt = demands.iter().sum();
        let n = demands.len() as u64;
        Ok(match self {
            Protocol::Batch => Some(batch_bound(n, &total)?),
            Protocol::Cnh2 => {
                if demands.len() != 2 {
                    return Err(Error::domain("cnh2 needs exactly two players"));
                }
                Some(2 * ceil_log2(&total)?)
            }
            Protocol::CnhRec => Some(recursive_cnh_bound(demands)?),
            Protocol::Clone => {
                let d = u64::try_from(&total).map_err(|_| Error::domain("D too large to clone"))?;
                Some(batch_bound(d, &total)?)
            }
            Protocol::Irrational => None,
        })
    }
}

/// `2(n−1)⌈log₂D⌉`.
pub fn batch_bound(n: u64, total: &BigInt) -> Result<u64> {
    Ok(2 * n.saturating_sub(1) * ceil_log2(total)?)
}

/// `Σ_{i=1}^{n−1} 2i⌈log₂(d_1 + … + d_{i+1})⌉`.
pub fn recursive_cnh_bound(demands: &[BigInt]) -> Result<u64> {
    let mut prefix = demands.first().cloned().unwrap_or_default();
    let mut sum = 0;
    for (i, d) in demands.iter().enumerate().skip(1) {
        prefix += d;
        sum += 2 * i as u64 * ceil_log2(&prefix)?;
    }
    Ok(sum)
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Protocol> {
        Protocol::ALL
            .into_iter()
            .find(|p| p.as_str() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown protocol {s:?}")))
    }
}

impl DivisionProtocol for Protocol {
    fn name(&self) -> String {
        self.as_str().to_string()
    }

    fn divide(
        &self,
        oracle: &mut Oracle,
        players: &[(usize, BigInt)],
        piece: &Piece,
        style: &KnifeStyle,
    ) -> Result<Division> {
        match self {
            // with integer demands the decomposition is a single rational node
            Protocol::Batch | Protocol::Irrational => batch_near_half(oracle, players, piece, style),
            Protocol::Cnh2 => match players {
                [a, b] => cut_near_halves_2p(oracle, a.clone(), b.clone(), piece, style),
                _ => Err(Error::domain("cnh2 needs exactly two players")),
            },
            Protocol::CnhRec => recursive_cnh(oracle, players, piece, style),
            Protocol::Clone => clone_divide(oracle, players, piece, style),
        }
    }
}

/// Everything one protocol run produced.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub protocol: Protocol,
    pub division: Division,
    /// Counters keyed by instance player (clones folded into their owner).
    pub ledger: Ledger,
    pub transcript: Transcript,
    pub bound: Option<u64>,
    /// Decomposition nodes of an irrational run.
    pub nodes: Vec<SubInstanceSpec>,
}

/// Runs `protocol` on the whole cake of `instance` with truthful players.
pub fn run(protocol: Protocol, instance: &Instance, style: &KnifeStyle) -> Result<RunReport> {
    run_with(protocol, instance, style, true)
}

/// [`run`], optionally without keeping a transcript.
pub fn run_with(protocol: Protocol, instance: &Instance, style: &KnifeStyle, record: bool) -> Result<RunReport> {
    let style = instance.cake().knife_style(style);
    let mut oracle = Oracle::for_instance(instance);
    oracle.set_recording(record);
    let whole = instance.cake().whole();
    let (division, nodes, bound) = if protocol == Protocol::Irrational {
        let out = irrational_divide(&mut oracle, instance, &style)?;
        (out.division, out.nodes, None)
    } else {
        let players = instance.integer_demands()?;
        let demands: Vec<BigInt> = players.iter().map(|(_, d)| d.clone()).collect();
        let bound = protocol.query_bound(&demands)?;
        (protocol.divide(&mut oracle, &players, &whole, &style)?, Vec::new(), bound)
    };
    let (ledger, transcript) = oracle.into_parts();
    let ledger = if protocol == Protocol::Clone {
        let owner: std::collections::HashMap<usize, usize> =
            alias_ids(&instance.integer_demands()?)?.into_iter().collect();
        ledger.fold(|id| owner.get(&id).copied().unwrap_or(id))
    } else {
        ledger
    };
    Ok(RunReport {
        protocol,
        division,
        ledger,
        transcript,
        bound,
        nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn bounds_match_their_formulas() {
        assert_eq!(recursive_cnh_bound(&b(&[1, 1, 1])).unwrap(), 2 + 4 * 2);
        assert_eq!(recursive_cnh_bound(&b(&[1, 1])).unwrap(), 2);
        assert_eq!(Protocol::Batch.query_bound(&b(&[1, 3, 1])).unwrap(), Some(2 * 2 * 3));
        assert_eq!(Protocol::Cnh2.query_bound(&b(&[1, 3])).unwrap(), Some(4));
        assert_eq!(Protocol::Clone.query_bound(&b(&[100, 156])).unwrap(), Some(2 * 255 * 8));
        assert!(Protocol::Cnh2.query_bound(&b(&[1, 1, 1])).is_err());
    }

    #[test]
    fn protocol_names_round_trip() {
        for p in Protocol::ALL {
            assert_eq!(p.as_str().parse::<Protocol>().unwrap(), p);
        }
        assert!("even-paz".parse::<Protocol>().is_err());
    }
}
