use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::Division;
use crate::arith::{near_half_split, Scalar};
use crate::cake::{KnifeStyle, Piece};
use crate::error::{Error, Result};
use crate::oracle::Oracle;

/// Two-player Cut Near-Halves on `piece`.
///
/// The player with the lesser current demand (ties: `first`) cuts the
/// remaining piece into near-halves; the other takes the half it values
/// furthest above its nominal share (exact ties: the complement of the cut
/// piece) and its demand drops by that nominal share. Repeats until one
/// demand is exhausted; the other player keeps what is left.
pub fn cut_near_halves_2p(
    oracle: &mut Oracle,
    first: (usize, BigInt),
    second: (usize, BigInt),
    piece: &Piece,
    style: &KnifeStyle,
) -> Result<Division> {
    for (id, d) in [&first, &second] {
        if !d.is_positive() {
            return Err(Error::domain(format!("player {id}: demand {d} is not positive")));
        }
    }
    let mut players = [first, second];
    let mut rest = piece.clone();
    let mut out = Division::new();
    loop {
        if players[0].1.is_zero() || players[1].1.is_zero() {
            let keeper = if players[0].1.is_zero() { &players[1] } else { &players[0] };
            out.give(keeper.0, rest);
            out.give(players[0].0, Piece::empty());
            out.give(players[1].0, Piece::empty());
            return Ok(out);
        }
        let total = &players[0].1 + &players[1].1;
        let (half, upper) = near_half_split(&total)?;
        let (c, p) = if players[1].1 < players[0].1 { (1, 0) } else { (0, 1) };
        let knife = style.on(rest.clone());
        let x = oracle.proportional_cut(players[c].0, &knife, &half, &upper)?;
        let cut = knife.piece(&x)?;
        let other = rest.subtract(&cut);
        let total_s = Scalar::from_bigint(total);
        let w = oracle.eval_within(players[p].0, &cut, &rest)? * &total_s;
        let surplus_cut = &w - Scalar::from_bigint(half.clone());
        let surplus_other = &total_s - &w - Scalar::from_bigint(upper.clone());
        if surplus_cut > surplus_other {
            out.give(players[p].0, cut);
            players[p].1 -= half;
            rest = other;
        } else {
            out.give(players[p].0, other);
            players[p].1 -= upper;
            rest = cut;
        }
    }
}

/// The n-player generalisation: player `k` in input order challenges each
/// earlier player `i` for the share `d_k / (d_1 + … + d_{k−1})` of the piece
/// `i` holds, one two-player game per earlier player.
pub fn recursive_cnh(
    oracle: &mut Oracle,
    players: &[(usize, BigInt)],
    piece: &Piece,
    style: &KnifeStyle,
) -> Result<Division> {
    let Some(((id0, d0), later)) = players.split_first() else {
        return Err(Error::domain("no players to divide among"));
    };
    for (id, d) in players {
        if !d.is_positive() {
            return Err(Error::domain(format!("player {id}: demand {d} is not positive")));
        }
    }
    let mut holdings: Vec<(usize, Piece)> = vec![(*id0, piece.clone())];
    let mut earlier = d0.clone();
    for (idk, dk) in later {
        let mut gained = Piece::empty();
        for (idi, held) in holdings.iter_mut() {
            let game = cut_near_halves_2p(
                oracle,
                (*idi, earlier.clone()),
                (*idk, dk.clone()),
                held,
                style,
            )?;
            *held = game.piece(*idi);
            gained = gained.union(&game.piece(*idk));
        }
        holdings.push((*idk, gained));
        earlier += dk;
    }
    let mut out = Division::new();
    for (id, p) in holdings {
        out.give(id, p);
    }
    Ok(out)
}
