use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::arith::Scalar;
use crate::cake::{Cake, Piece};
use crate::error::{Error, Result};
use crate::oracle::Instance;

/// An allocation of pieces to player ids.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Division {
    pieces: BTreeMap<usize, Piece>,
}

impl Division {
    pub fn new() -> Self {
        Division::default()
    }

    /// Adds `piece` to whatever the player already holds.
    pub fn give(&mut self, player: usize, piece: Piece) {
        let slot = self.pieces.entry(player).or_default();
        *slot = slot.union(&piece);
    }

    pub fn piece(&self, player: usize) -> Piece {
        self.pieces.get(&player).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Piece)> {
        self.pieces.iter().map(|(&id, p)| (id, p))
    }

    pub fn players(&self) -> impl Iterator<Item = usize> + '_ {
        self.pieces.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn absorb(&mut self, other: Division) {
        for (id, p) in other.pieces {
            self.give(id, p);
        }
    }

    /// Re-keys pieces, uniting those that map to the same id.
    pub fn fold(&self, mut map: impl FnMut(usize) -> usize) -> Division {
        let mut out = Division::new();
        for (&id, p) in &self.pieces {
            out.give(map(id), p.clone());
        }
        out
    }

    /// Swaps the pieces held by two players.
    pub fn swap(&mut self, a: usize, b: usize) {
        let pa = self.pieces.remove(&a).unwrap_or_default();
        let pb = self.pieces.remove(&b).unwrap_or_default();
        self.pieces.insert(a, pb);
        self.pieces.insert(b, pa);
    }

    /// Checks that the pieces are pairwise disjoint and cover `whole`
    /// exactly.
    pub fn check_partition(&self, whole: &Piece) -> Result<()> {
        let mut owned: Vec<(&Scalar, &Scalar, usize)> = self
            .pieces
            .iter()
            .flat_map(|(&id, p)| p.intervals().iter().map(move |iv| (iv.lo(), iv.hi(), id)))
            .collect();
        owned.sort_by(|a, b| a.0.cmp(b.0).then(a.1.cmp(b.1)));
        for (lo, hi, id) in &owned {
            let iv = Piece::interval((*lo).clone(), (*hi).clone());
            if !iv.is_subset_of(whole) {
                let outside = iv.subtract(whole);
                let (olo, ohi) = outside.bounds().expect("non-empty");
                return Err(Error::domain(format!(
                    "player {id} holds [{olo}, {ohi}) outside the cake"
                )));
            }
        }
        let mut covered = Piece::empty();
        let mut reach: Option<(Scalar, usize)> = None;
        for (lo, hi, id) in owned {
            if let Some((r, owner)) = &reach {
                if lo < r {
                    let end = if hi < r { hi } else { r };
                    return Err(Error::Overlap {
                        first: *owner,
                        second: id,
                        lo: lo.to_string(),
                        hi: end.to_string(),
                    });
                }
            }
            if reach.as_ref().map_or(true, |(r, _)| hi > r) {
                reach = Some((hi.clone(), id));
            }
            covered = covered.union(&Piece::interval(lo.clone(), hi.clone()));
        }
        let gap = whole.subtract(&covered);
        if let Some(first) = gap.intervals().first() {
            return Err(Error::Coverage {
                lo: first.lo().to_string(),
                hi: first.hi().to_string(),
            });
        }
        Ok(())
    }

    /// One record per instance player, with exact values.
    pub fn records(&self, instance: &Instance) -> Result<Vec<DivisionRecord>> {
        instance
            .players()
            .iter()
            .map(|p| {
                let piece = self.piece(p.id);
                Ok(DivisionRecord {
                    player: p.id,
                    value: p.measure.eval(&piece)?,
                    piece,
                    demand: p.demand.clone(),
                })
            })
            .collect()
    }

    pub fn to_json(&self, instance: &Instance) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.records(instance)?)?)
    }

    pub fn from_records(records: Vec<DivisionRecord>) -> Division {
        let mut d = Division::new();
        for r in records {
            d.give(r.player, r.piece);
        }
        d
    }

    /// Reads the JSON written by [`Division::to_json`]; values are ignored.
    pub fn from_json(text: &str) -> Result<Division> {
        #[derive(Deserialize)]
        struct Loose {
            player: usize,
            piece: Piece,
        }
        let rows: Vec<Loose> = serde_json::from_str(text)?;
        let mut d = Division::new();
        for r in rows {
            d.give(r.player, r.piece);
        }
        Ok(d)
    }

    /// `μ_i(X_i) − d_i` per player.
    pub fn margins(&self, instance: &Instance) -> Result<Vec<(usize, Scalar)>> {
        instance
            .players()
            .iter()
            .map(|p| Ok((p.id, p.measure.eval(&self.piece(p.id))? - &p.demand)))
            .collect()
    }

    pub fn is_proportional(&self, instance: &Instance) -> Result<bool> {
        Ok(self.margins(instance)?.iter().all(|(_, m)| !m.is_negative()))
    }

    /// Partition of the whole cake plus proportionality.
    pub fn check(&self, instance: &Instance) -> Result<()> {
        self.check_against(instance.cake())?;
        for (id, m) in self.margins(instance)? {
            if m.is_negative() {
                return Err(Error::Protocol(format!("player {id} falls short of its demand by {}", -m)));
            }
        }
        Ok(())
    }

    fn check_against(&self, cake: &Cake) -> Result<()> {
        self.check_partition(&cake.whole())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisionRecord {
    pub player: usize,
    pub piece: Piece,
    pub value: Scalar,
    pub demand: Scalar,
}
