#![allow(dead_code)]

use std::cmp::Ordering;

use cakecut::arith::{Rational, Scalar};
use cakecut::cake::{Cake, Cell, Knife, KnifeKind, KnifeStyle, Measure, Piece, PlayerMeasure};
use cakecut::oracle::{Instance, ScalarKind};
use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn q(n: i64, d: i64) -> Scalar {
    Scalar::ratio(n, d)
}

pub fn iv(a: Scalar, b: Scalar) -> Piece {
    Piece::interval(a, b)
}

pub fn uniform_instance(demands: &[i64]) -> Instance {
    let total: i64 = demands.iter().sum();
    let m = PlayerMeasure::Line(Measure::uniform(Scalar::one(), &Scalar::int(total)));
    Instance::new(
        Cake::unit(),
        ScalarKind::Rational,
        demands.iter().map(|&d| (Scalar::int(d), m.clone())).collect(),
    )
    .unwrap()
}

/// `⌈log₂ n⌉` by repeated doubling.
pub fn clog2(n: u64) -> u64 {
    let mut k = 0;
    while (1u128 << k) < n as u128 {
        k += 1;
    }
    k
}

/// Independent integral of a step density over a piece: every cell is cut
/// against every interval and the overlaps summed.
pub fn integrate(cells: &[Cell], piece: &Piece) -> Scalar {
    let mut acc = Scalar::zero();
    let mut from = Scalar::zero();
    for c in cells {
        for i in piece.intervals() {
            let lo = if *i.lo() > from { i.lo().clone() } else { from.clone() };
            let hi = if *i.hi() < c.to { i.hi().clone() } else { c.to.clone() };
            if lo < hi {
                acc = acc + &c.density * (hi - lo);
            }
        }
        from = c.to.clone();
    }
    acc
}

pub fn cells_of(m: &PlayerMeasure) -> &[Cell] {
    match m {
        PlayerMeasure::Line(m) => m.cells(),
        PlayerMeasure::Grid(_) => panic!("line measure expected"),
    }
}

/// Union of up to `max` random intervals with endpoints on the grid
/// `length·j/grid`.
pub fn random_piece(rng: &mut ChaCha8Rng, length: &Scalar, grid: i64, max: usize) -> Piece {
    let k = rng.gen_range(1..=max);
    let mut pts: Vec<i64> = (0..2 * k).map(|_| rng.gen_range(0..=grid)).collect();
    pts.sort_unstable();
    pts.dedup();
    let mut p = Piece::empty();
    for pair in pts.chunks(2) {
        if let [a, b] = pair {
            p = p.union(&iv(length * &q(*a, grid), length * &q(*b, grid)));
        }
    }
    if p.is_empty() {
        let a = rng.gen_range(0..grid);
        p = iv(length * &q(a, grid), length * &q(a + 1, grid));
    }
    p
}

/// A random knife on `domain` suited to `cake`.
pub fn random_knife(rng: &mut ChaCha8Rng, cake: &Cake, domain: Piece) -> Knife {
    match cake {
        Cake::Rect { height, .. } => KnifeStyle::Sweep(height.clone()).on(domain),
        Cake::Interval { .. } => match rng.gen_range(0..4) {
            0 => KnifeStyle::Prefix.on(domain),
            1 => KnifeStyle::Centered.on(domain),
            2 => KnifeStyle::Translated(rng.gen_range(2..=3)).on(domain),
            _ => {
                let (lo, hi) = {
                    let (a, b) = domain.bounds().unwrap();
                    (a.clone(), b.clone())
                };
                let mid = &lo + (&hi - &lo) * q(rng.gen_range(0..=8), 8);
                Knife::new(KnifeKind::Centered { midpoint: mid }, domain).unwrap()
            }
        },
    }
}

/// Interval `[0, D)` or a rectangle of area `D`.
pub fn random_adversary_cake(rng: &mut ChaCha8Rng, d: i64) -> Cake {
    if rng.gen_bool(0.25) {
        let h = rng.gen_range(1..=3);
        Cake::rect(q(d, h), Scalar::int(h)).unwrap()
    } else {
        Cake::interval(Scalar::int(d)).unwrap()
    }
}

pub enum AdvQuery {
    Eval(Piece),
    Cut(Knife, Scalar),
    Pcut(Knife, BigInt, BigInt),
}

pub fn random_query(rng: &mut ChaCha8Rng, cake: &Cake) -> AdvQuery {
    let length = cake.sweep_length().clone();
    let piece = random_piece(rng, &length, 60, 3);
    let d = cake.total_volume();
    match rng.gen_range(0..10) {
        0..=3 => AdvQuery::Eval(piece),
        4..=7 => {
            let alpha = &d * &q(rng.gen_range(1..=70), 100);
            AdvQuery::Cut(random_knife(rng, cake, piece), alpha)
        }
        _ => {
            let a = BigInt::from(rng.gen_range(0..=5));
            let b = BigInt::from(rng.gen_range(1..=5));
            AdvQuery::Pcut(random_knife(rng, cake, piece), a, b)
        }
    }
}

/// Floating-point comparison, trusted only when the two values are far
/// apart.
pub fn approx_cmp(x: &Scalar, y: &Scalar) -> Option<Ordering> {
    let diff = x.to_f64() - y.to_f64();
    if diff.abs() < 1e-6 {
        None
    } else {
        diff.partial_cmp(&0.0)
    }
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}
