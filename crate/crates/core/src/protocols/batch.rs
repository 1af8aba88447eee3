use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::Division;
use crate::arith::{near_half_split, Scalar};
use crate::cake::{KnifeStyle, Piece};
use crate::error::{Error, Result};
use crate::oracle::Oracle;

/// Divides `piece` among `players` (id, integer demand) so that each gets
/// at least `d_i / Σd` of its own value of `piece`.
///
/// Every player marks the near-half of the current piece; the piece is cut
/// at the mark of the player where the demand prefix sum (in mark order)
/// first reaches `⌊D/2⌋`, and both sides are solved recursively. That
/// player takes part on both sides.
pub fn batch_near_half(
    oracle: &mut Oracle,
    players: &[(usize, BigInt)],
    piece: &Piece,
    style: &KnifeStyle,
) -> Result<Division> {
    for (id, d) in players {
        if !d.is_positive() {
            return Err(Error::domain(format!("player {id}: demand {d} is not positive")));
        }
    }
    if players.is_empty() {
        return Err(Error::domain("no players to divide among"));
    }
    let mut out = Division::new();
    split(oracle, players.to_vec(), piece.clone(), style, &mut out)?;
    Ok(out)
}

fn split(
    oracle: &mut Oracle,
    players: Vec<(usize, BigInt)>,
    piece: Piece,
    style: &KnifeStyle,
    out: &mut Division,
) -> Result<()> {
    if players.len() == 1 {
        out.give(players[0].0, piece);
        return Ok(());
    }
    let total: BigInt = players.iter().map(|(_, d)| d).sum();
    let (half, rest) = near_half_split(&total)?;
    let knife = style.on(piece.clone());
    let mut marks: Vec<(Scalar, usize, BigInt)> = Vec::with_capacity(players.len());
    for (id, d) in players {
        let x = oracle.proportional_cut(id, &knife, &half, &rest)?;
        marks.push((x, id, d));
    }
    marks.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut prefix = BigInt::zero();
    let mut j = 0;
    for (i, (_, _, d)) in marks.iter().enumerate() {
        prefix += d;
        if prefix >= half {
            j = i;
            break;
        }
    }
    let (x_j, id_j, d_j) = &marks[j];
    let left_piece = knife.piece(x_j)?;
    let right_piece = piece.subtract(&left_piece);

    let mut left: Vec<(usize, BigInt)> = marks[..j].iter().map(|(_, id, d)| (*id, d.clone())).collect();
    left.push((*id_j, d_j - &prefix + &half));
    let mut right = Vec::with_capacity(marks.len() - j);
    let spill = &prefix - &half;
    if spill.is_positive() {
        right.push((*id_j, spill));
    }
    right.extend(marks[j + 1..].iter().map(|(_, id, d)| (*id, d.clone())));

    split(oracle, left, left_piece, style, out)?;
    split(oracle, right, right_piece, style, out)
}
