use num_bigint::BigInt;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{Rational, Scalar};
use crate::cake::{Cake, Cell, Measure, PlayerMeasure};
use crate::error::{Error, Result};
use crate::oracle::{Instance, ScalarKind};

/// The generator every seeded routine uses.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random step measure on `[0, 1)` with at most `max_cells` cells and
/// total exactly `total`. Breakpoints sit on a grid of `4·max_cells`.
fn random_measure(rng: &mut ChaCha8Rng, total: &Scalar, max_cells: usize) -> Result<Measure> {
    let k = rng.gen_range(1..=max_cells);
    let grid = 4 * max_cells;
    let mut cuts: Vec<usize> = sample(rng, grid - 1, k - 1).into_iter().map(|c| c + 1).collect();
    cuts.sort_unstable();
    cuts.push(grid);
    let mut weights: Vec<i64> = (0..k).map(|_| rng.gen_range(0..=8)).collect();
    if weights.iter().all(|w| *w == 0) {
        let i = rng.gen_range(0..k);
        weights[i] = 1;
    }
    let sum: i64 = weights.iter().sum();
    let mut cells = Vec::with_capacity(k);
    let mut prev = 0;
    for (to, w) in cuts.into_iter().zip(weights) {
        let width = Scalar::ratio((to - prev) as i64, grid as i64);
        let density = total * &Scalar::ratio(w, sum) / width;
        cells.push(Cell {
            to: Scalar::ratio(to as i64, grid as i64),
            density,
        });
        prev = to;
    }
    Measure::new(cells)
}

/// A reproducible integer-demand instance on the unit interval: `n`
/// positive demands summing to `D`, every measure a step function with at
/// most `max_cells` cells and total `D`.
pub fn gen_random_instance(seed: u64, n: usize, d: u64, max_cells: usize) -> Result<Instance> {
    if n == 0 || max_cells == 0 {
        return Err(Error::domain("need n >= 1 and max_cells >= 1"));
    }
    if d < n as u64 {
        return Err(Error::domain(format!("D = {d} < n = {n}: positive integer demands impossible")));
    }
    let mut rng = rng_from_seed(seed);
    let mut marks: Vec<u64> = sample(&mut rng, (d - 1) as usize, n - 1)
        .into_iter()
        .map(|m| m as u64 + 1)
        .collect();
    marks.sort_unstable();
    marks.push(d);
    let total = Scalar::from_bigint(BigInt::from(d));
    let mut players = Vec::with_capacity(n);
    let mut prev = 0;
    for m in marks {
        let demand = Scalar::from_bigint(BigInt::from(m - prev));
        prev = m;
        players.push((demand, PlayerMeasure::Line(random_measure(&mut rng, &total, max_cells)?)));
    }
    Instance::new(Cake::unit(), ScalarKind::Rational, players)
}

/// A reproducible instance over ℚ(√m): demands `a + b√m` with small
/// rational `a`, `b`, measures as in [`gen_random_instance`] scaled to the
/// irrational total.
pub fn gen_random_quad_instance(seed: u64, n: usize, m: u64, max_cells: usize) -> Result<Instance> {
    if n == 0 || max_cells == 0 {
        return Err(Error::domain("need n >= 1 and max_cells >= 1"));
    }
    let mut rng = rng_from_seed(seed);
    let mut demands = Vec::with_capacity(n);
    while demands.len() < n {
        let a = Rational::new(BigInt::from(rng.gen_range(0..=12)), BigInt::from(rng.gen_range(1..=4)));
        let b = Rational::new(BigInt::from(rng.gen_range(-3..=6)), BigInt::from(rng.gen_range(1..=4)));
        let d = Scalar::quad(a, b, m)?;
        if d.is_positive() {
            demands.push(d);
        }
    }
    let total: Scalar = demands.iter().sum();
    let mut players = Vec::with_capacity(n);
    for demand in demands {
        players.push((demand, PlayerMeasure::Line(random_measure(&mut rng, &total, max_cells)?)));
    }
    Instance::new(Cake::unit(), ScalarKind::Quad { m }, players)
}
