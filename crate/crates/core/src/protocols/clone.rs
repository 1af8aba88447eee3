use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use super::{batch_near_half, Division};
use crate::arith::Scalar;
use crate::cake::{KnifeStyle, Piece};
use crate::error::{Error, Result};
use crate::oracle::{Instance, Ledger, Oracle, Player};

/// An equal-shares instance in which every original player is replaced by
/// `d_i` unit-demand clones sharing its measure.
#[derive(Clone, Debug)]
pub struct Cloned {
    pub instance: Instance,
    /// Clone id → original id.
    pub owner: BTreeMap<usize, usize>,
}

impl Cloned {
    /// Unites every clone's piece into its original's.
    pub fn fold(&self, division: &Division) -> Division {
        division.fold(|id| self.owner.get(&id).copied().unwrap_or(id))
    }

    pub fn fold_ledger(&self, ledger: &Ledger) -> Ledger {
        ledger.fold(|id| self.owner.get(&id).copied().unwrap_or(id))
    }
}

/// Clone ids `first, first+1, …`, clones of one player consecutive, paired
/// with their original.
fn clone_ids(players: &[(usize, BigInt)], first: usize) -> Result<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    let mut next = first;
    for (id, d) in players {
        let copies = d
            .to_usize()
            .filter(|c| *c >= 1)
            .ok_or_else(|| Error::domain(format!("player {id}: cannot clone demand {d}")))?;
        for _ in 0..copies {
            out.push((next, *id));
            next += 1;
        }
    }
    Ok(out)
}

/// The clone ids [`clone_divide`] registers, paired with their originals:
/// numbered upwards from one past the largest original id.
pub fn alias_ids(players: &[(usize, BigInt)]) -> Result<Vec<(usize, usize)>> {
    let first = players.iter().map(|(id, _)| *id).max().unwrap_or(0) + 1;
    clone_ids(players, first)
}

/// Replaces each player by `d_i` unit-demand clones, numbered `1..=D`.
pub fn clone_transform(instance: &Instance) -> Result<Cloned> {
    let ids = clone_ids(&instance.integer_demands()?, 1)?;
    let mut players = Vec::with_capacity(ids.len());
    for &(clone, owner) in &ids {
        let original = instance.player(owner)?;
        players.push(Player {
            id: clone,
            demand: Scalar::one(),
            measure: original.measure.clone(),
        });
    }
    Ok(Cloned {
        instance: Instance::from_players(instance.cake().clone(), instance.kind(), players)?,
        owner: ids.into_iter().collect(),
    })
}

/// Runs the batch protocol on unit-demand clones registered as aliases of
/// the original players in `oracle`, then folds the result back.
pub fn clone_divide(
    oracle: &mut Oracle,
    players: &[(usize, BigInt)],
    piece: &Piece,
    style: &KnifeStyle,
) -> Result<Division> {
    let ids = alias_ids(players)?;
    for &(clone, owner) in &ids {
        let slot = oracle.slot_of(owner)?;
        oracle.add_alias(clone, slot)?;
    }
    let units: Vec<(usize, BigInt)> = ids.iter().map(|&(c, _)| (c, BigInt::one())).collect();
    let division = batch_near_half(oracle, &units, piece, style)?;
    let owner: BTreeMap<usize, usize> = ids.into_iter().collect();
    Ok(division.fold(|id| owner[&id]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cake::{Cake, Measure, PlayerMeasure};
    use crate::oracle::ScalarKind;

    fn uniform(demands: &[i64]) -> Instance {
        let total: i64 = demands.iter().sum();
        Instance::new(
            Cake::unit(),
            ScalarKind::Rational,
            demands
                .iter()
                .map(|&d| {
                    (
                        Scalar::int(d),
                        PlayerMeasure::Line(Measure::uniform(Scalar::one(), &Scalar::int(total))),
                    )
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn clones_share_their_original_measure() {
        let inst = uniform(&[1, 3, 1]);
        let c = clone_transform(&inst).unwrap();
        assert_eq!(c.instance.n(), 5);
        let owners: Vec<usize> = c.owner.values().copied().collect();
        assert_eq!(owners, vec![1, 2, 2, 2, 3]);
        for k in 2..=4 {
            let clone = c.instance.player(k).unwrap();
            assert!(std::sync::Arc::ptr_eq(&clone.measure, &inst.player(2).unwrap().measure));
        }
    }

    #[test]
    fn unit_demands_are_left_alone() {
        let inst = uniform(&[1, 1, 1]);
        let c = clone_transform(&inst).unwrap();
        assert!(c.owner.iter().all(|(k, v)| k == v));
        assert_eq!(c.instance.players().len(), 3);
    }

    #[test]
    fn folded_clone_division_is_proportional() {
        let inst = uniform(&[2, 3, 1]);
        let c = clone_transform(&inst).unwrap();
        let mut o = Oracle::for_instance(&c.instance);
        let d = batch_near_half(
            &mut o,
            &c.instance.integer_demands().unwrap(),
            &inst.cake().whole(),
            &KnifeStyle::Prefix,
        )
        .unwrap();
        c.fold(&d).check(&inst).unwrap();
    }
}
