use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Weight of one proportional cut when converted to plain cut and eval
/// queries.
pub const PCUT_WS_WEIGHT: u64 = 5;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryCounts {
    pub eval: u64,
    pub cut: u64,
    pub pcut: u64,
}

impl QueryCounts {
    /// One per query of any kind.
    pub fn highlevel(&self) -> u64 {
        self.eval + self.cut + self.pcut
    }

    /// Proportional cuts weighted by [`PCUT_WS_WEIGHT`].
    pub fn ws_equivalent(&self) -> u64 {
        self.eval + self.cut + PCUT_WS_WEIGHT * self.pcut
    }

    fn absorb(&mut self, other: &QueryCounts) {
        self.eval += other.eval;
        self.cut += other.cut;
        self.pcut += other.pcut;
    }
}

/// Per-player query counters. Counters only ever grow.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Ledger {
    per_player: BTreeMap<usize, QueryCounts>,
}

impl Ledger {
    pub fn new() -> Self {
        Ledger::default()
    }

    pub(crate) fn entry(&mut self, player: usize) -> &mut QueryCounts {
        self.per_player.entry(player).or_default()
    }

    pub fn player(&self, id: usize) -> QueryCounts {
        self.per_player.get(&id).copied().unwrap_or_default()
    }

    pub fn players(&self) -> impl Iterator<Item = (usize, QueryCounts)> + '_ {
        self.per_player.iter().map(|(&id, &c)| (id, c))
    }

    pub fn totals(&self) -> QueryCounts {
        let mut t = QueryCounts::default();
        for c in self.per_player.values() {
            t.absorb(c);
        }
        t
    }

    pub fn highlevel(&self) -> u64 {
        self.totals().highlevel()
    }

    pub fn ws_equivalent(&self) -> u64 {
        self.totals().ws_equivalent()
    }

    /// Re-keys the counters, summing players that map to the same id.
    pub fn fold(&self, mut map: impl FnMut(usize) -> usize) -> Ledger {
        let mut out = Ledger::new();
        for (&id, c) in &self.per_player {
            out.entry(map(id)).absorb(c);
        }
        out
    }

    pub fn report(&self) -> LedgerReport {
        let row = |player: Option<usize>, c: QueryCounts| LedgerRow {
            player,
            eval: c.eval,
            cut: c.cut,
            pcut: c.pcut,
            highlevel: c.highlevel(),
            ws_equivalent: c.ws_equivalent(),
        };
        LedgerReport {
            players: self.players().map(|(id, c)| row(Some(id), c)).collect(),
            total: row(None, self.totals()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerRow {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub player: Option<usize>,
    pub eval: u64,
    pub cut: u64,
    pub pcut: u64,
    pub highlevel: u64,
    pub ws_equivalent: u64,
}

/// Counts in both accounting views, per player and in total.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerReport {
    pub players: Vec<LedgerRow>,
    pub total: LedgerRow,
}

impl fmt::Display for LedgerReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:>8} {:>8} {:>8} {:>8} {:>10} {:>8}", "player", "eval", "cut", "pcut", "highlevel", "ws")?;
        let line = |f: &mut fmt::Formatter<'_>, name: String, r: &LedgerRow| {
            writeln!(
                f,
                "{:>8} {:>8} {:>8} {:>8} {:>10} {:>8}",
                name, r.eval, r.cut, r.pcut, r.highlevel, r.ws_equivalent
            )
        };
        for r in &self.players {
            line(f, r.player.map(|p| p.to_string()).unwrap_or_default(), r)?;
        }
        line(f, "total".into(), &self.total)
    }
}
