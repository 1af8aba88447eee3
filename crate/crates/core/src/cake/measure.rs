use serde::{Deserialize, Serialize};

use super::{Cake, Knife, KnifeKind, Piece};
use crate::arith::Scalar;
use crate::error::{Error, Result};

/// One cell of a piecewise-constant density: constant `density` from the
/// previous cell's `to` (or 0) up to `to`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub to: Scalar,
    pub density: Scalar,
}

/// Piecewise-constant density on `[0, L)` of the sweep coordinate.
///
/// On a rectangle cake this is the sweep marginal: the density per unit of
/// sweep length, already integrated over the height.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Cell>", into = "Vec<Cell>")]
pub struct Measure {
    cells: Vec<Cell>,
}

impl TryFrom<Vec<Cell>> for Measure {
    type Error = Error;
    fn try_from(cells: Vec<Cell>) -> Result<Self> {
        Measure::new(cells)
    }
}

impl From<Measure> for Vec<Cell> {
    fn from(m: Measure) -> Self {
        m.cells
    }
}

impl Measure {
    pub fn new(cells: Vec<Cell>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::domain("measure needs at least one cell"));
        }
        let mut prev = Scalar::zero();
        for c in &cells {
            if c.to <= prev {
                return Err(Error::domain(format!(
                    "cell boundaries must increase strictly (got {} after {prev})",
                    c.to
                )));
            }
            if c.density.is_negative() {
                return Err(Error::domain(format!("negative density {}", c.density)));
            }
            prev = c.to.clone();
        }
        Ok(Measure { cells })
    }

    /// Density `total / length` on `[0, length)`.
    pub fn uniform(length: Scalar, total: &Scalar) -> Self {
        let density = total / &length;
        Measure {
            cells: vec![Cell { to: length, density }],
        }
    }

    /// Builds a measure from `(from, to, density)` runs that tile `[0, L)`
    /// in order; adjacent runs of equal density are merged.
    pub(crate) fn from_runs(runs: impl IntoIterator<Item = (Scalar, Scalar, Scalar)>) -> Result<Self> {
        let mut cells: Vec<Cell> = Vec::new();
        let mut prev = Scalar::zero();
        for (from, to, density) in runs {
            if from != prev {
                return Err(Error::domain("runs do not tile the cake"));
            }
            match cells.last_mut() {
                Some(last) if last.density == density => last.to = to.clone(),
                _ => cells.push(Cell {
                    to: to.clone(),
                    density,
                }),
            }
            prev = to;
        }
        Measure::new(cells)
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn length(&self) -> &Scalar {
        &self.cells[self.cells.len() - 1].to
    }

    pub fn total(&self) -> Scalar {
        let mut prev = Scalar::zero();
        let mut acc = Scalar::zero();
        for c in &self.cells {
            acc = acc + &c.density * (&c.to - &prev);
            prev = c.to.clone();
        }
        acc
    }

    /// Every cell boundary, including 0 and L.
    pub fn breakpoints(&self) -> Vec<Scalar> {
        std::iter::once(Scalar::zero())
            .chain(self.cells.iter().map(|c| c.to.clone()))
            .collect()
    }

    fn check_within(&self, piece: &Piece) -> Result<()> {
        if let Some((lo, hi)) = piece.bounds() {
            if lo.is_negative() || hi > self.length() {
                return Err(Error::domain(format!(
                    "piece {piece} leaves the measured range [0, {})",
                    self.length()
                )));
            }
        }
        Ok(())
    }

    /// Exact integral of the density over `piece`.
    pub fn eval(&self, piece: &Piece) -> Result<Scalar> {
        self.check_within(piece)?;
        Ok(self.eval_unchecked(piece))
    }

    fn eval_unchecked(&self, piece: &Piece) -> Scalar {
        let mut acc = Scalar::zero();
        for iv in piece.intervals() {
            let mut c = self.cells.partition_point(|c| c.to <= *iv.lo());
            let mut start = if c == 0 {
                Scalar::zero()
            } else {
                self.cells[c - 1].to.clone()
            };
            while c < self.cells.len() && start < *iv.hi() {
                let cell = &self.cells[c];
                let lo = if *iv.lo() > start { iv.lo() } else { &start };
                let hi = if *iv.hi() < cell.to { iv.hi() } else { &cell.to };
                if !cell.density.is_zero() {
                    acc = acc + &cell.density * (hi - lo);
                }
                start = cell.to.clone();
                c += 1;
            }
        }
        acc
    }

    /// Leftmost knife position `x` with `μ(f(x)) = alpha`; `None` when
    /// `alpha` exceeds `μ(I)`.
    pub fn cut(&self, knife: &Knife, alpha: &Scalar) -> Result<Option<Scalar>> {
        self.check_within(knife.domain())?;
        match knife.kind() {
            KnifeKind::Prefix | KnifeKind::Sweep { .. } if !alpha.is_negative() => Ok(self.sweep_cut(knife, alpha)),
            _ => solve_cut(knife, alpha, &self.breakpoints(), |p| self.eval_unchecked(p)),
        }
    }

    /// Left-to-right knives in a single pass over the domain and the cells.
    fn sweep_cut(&self, knife: &Knife, alpha: &Scalar) -> Option<Scalar> {
        if alpha.is_zero() {
            return Some(Scalar::zero());
        }
        let scale = knife.scale();
        let mut acc = Scalar::zero();
        let mut offset = Scalar::zero();
        for iv in knife.domain().intervals() {
            let mut c = self.cells.partition_point(|c| c.to <= *iv.lo());
            let mut start = if c == 0 {
                Scalar::zero()
            } else {
                self.cells[c - 1].to.clone()
            };
            while c < self.cells.len() && start < *iv.hi() {
                let cell = &self.cells[c];
                let lo = if *iv.lo() > start { iv.lo() } else { &start };
                let hi = if *iv.hi() < cell.to { iv.hi() } else { &cell.to };
                if !cell.density.is_zero() {
                    let seg = &cell.density * (hi - lo);
                    let next = &acc + &seg;
                    if next >= *alpha {
                        let u = lo + (alpha - &acc) / &cell.density;
                        return Some(scale * (offset + (u - iv.lo())));
                    }
                    acc = next;
                }
                start = cell.to.clone();
                c += 1;
            }
            offset = offset + iv.len();
        }
        None
    }
}

/// Density constant on each cell of a rectangular grid, per unit area.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridMeasure {
    /// Right edges of the columns.
    x: Vec<Scalar>,
    /// Top edges of the rows.
    y: Vec<Scalar>,
    /// `density[row][column]`.
    density: Vec<Vec<Scalar>>,
}

impl GridMeasure {
    pub fn new(x: Vec<Scalar>, y: Vec<Scalar>, density: Vec<Vec<Scalar>>) -> Result<Self> {
        let increasing = |v: &[Scalar]| {
            !v.is_empty()
                && v[0].is_positive()
                && v.windows(2).all(|w| w[0] < w[1])
        };
        if !increasing(&x) || !increasing(&y) {
            return Err(Error::domain("grid edges must be positive and strictly increasing"));
        }
        if density.len() != y.len() || density.iter().any(|row| row.len() != x.len()) {
            return Err(Error::domain("grid density shape does not match its edges"));
        }
        if density.iter().flatten().any(Scalar::is_negative) {
            return Err(Error::domain("negative grid density"));
        }
        Ok(GridMeasure { x, y, density })
    }

    pub fn width(&self) -> &Scalar {
        &self.x[self.x.len() - 1]
    }

    pub fn height(&self) -> &Scalar {
        &self.y[self.y.len() - 1]
    }

    fn row_heights(&self) -> Vec<Scalar> {
        let mut prev = Scalar::zero();
        self.y
            .iter()
            .map(|t| {
                let h = t - &prev;
                prev = t.clone();
                h
            })
            .collect()
    }

    /// Integrates over full-height strips cell by cell.
    fn eval_unchecked(&self, piece: &Piece) -> Scalar {
        let heights = self.row_heights();
        let mut acc = Scalar::zero();
        for (row, h) in self.density.iter().zip(&heights) {
            let mut start = Scalar::zero();
            for (col, right) in self.x.iter().enumerate() {
                for iv in piece.intervals() {
                    let lo = if *iv.lo() > start { iv.lo() } else { &start };
                    let hi = if iv.hi() < right { iv.hi() } else { right };
                    if lo < hi {
                        acc = acc + &row[col] * h * (hi - lo);
                    }
                }
                start = right.clone();
            }
        }
        acc
    }

    pub fn eval(&self, piece: &Piece) -> Result<Scalar> {
        if let Some((lo, hi)) = piece.bounds() {
            if lo.is_negative() || hi > self.width() {
                return Err(Error::domain(format!("piece {piece} leaves the rectangle")));
            }
        }
        Ok(self.eval_unchecked(piece))
    }

    pub fn total(&self) -> Scalar {
        self.eval_unchecked(&Piece::interval(Scalar::zero(), self.width().clone()))
    }

    pub fn cut(&self, knife: &Knife, alpha: &Scalar) -> Result<Option<Scalar>> {
        let mut breaks = vec![Scalar::zero()];
        breaks.extend(self.x.iter().cloned());
        solve_cut(knife, alpha, &breaks, |p| self.eval_unchecked(p))
    }

    /// The sweep-marginal density: each column's density integrated over the
    /// height.
    pub fn marginal(&self) -> Measure {
        let heights = self.row_heights();
        let cells = self
            .x
            .iter()
            .enumerate()
            .map(|(col, to)| Cell {
                to: to.clone(),
                density: self
                    .density
                    .iter()
                    .zip(&heights)
                    .map(|(row, h)| &row[col] * h)
                    .sum(),
            })
            .collect();
        Measure { cells }
    }
}

/// A player's valuation of the cake.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlayerMeasure {
    Line(Measure),
    Grid(GridMeasure),
}

impl PlayerMeasure {
    pub fn eval(&self, piece: &Piece) -> Result<Scalar> {
        match self {
            PlayerMeasure::Line(m) => m.eval(piece),
            PlayerMeasure::Grid(g) => g.eval(piece),
        }
    }

    pub fn cut(&self, knife: &Knife, alpha: &Scalar) -> Result<Option<Scalar>> {
        match self {
            PlayerMeasure::Line(m) => m.cut(knife, alpha),
            PlayerMeasure::Grid(g) => g.cut(knife, alpha),
        }
    }

    pub fn total(&self) -> Scalar {
        match self {
            PlayerMeasure::Line(m) => m.total(),
            PlayerMeasure::Grid(g) => g.total(),
        }
    }

    /// Checks that the measure spans exactly the cake's sweep range.
    pub fn fits(&self, cake: &Cake) -> Result<()> {
        let ok = match (self, cake) {
            (PlayerMeasure::Line(m), _) => m.length() == cake.sweep_length(),
            (PlayerMeasure::Grid(g), Cake::Rect { width, height }) => {
                g.width() == width && g.height() == height
            }
            (PlayerMeasure::Grid(_), Cake::Interval { .. }) => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain("measure does not span the cake"))
        }
    }
}

/// Exact integral of `mu` over `piece`.
pub fn measure_eval(mu: &PlayerMeasure, piece: &Piece) -> Result<Scalar> {
    mu.eval(piece)
}

/// Leftmost knife position at which `mu` values the cut piece at `alpha`.
pub fn measure_cut(mu: &PlayerMeasure, knife: &Knife, alpha: &Scalar) -> Result<Option<Scalar>> {
    mu.cut(knife, alpha)
}

/// Finds the leftmost `x` with `F(x) = alpha` for `F(x) = eval(f(x))`.
///
/// `F` is non-decreasing and affine between consecutive critical points of
/// the knife, so a binary search over those points followed by one exact
/// interpolation suffices.
pub(crate) fn solve_cut(
    knife: &Knife,
    alpha: &Scalar,
    breaks: &[Scalar],
    eval: impl Fn(&Piece) -> Scalar,
) -> Result<Option<Scalar>> {
    if alpha.is_negative() {
        return Err(Error::domain(format!("cut value {alpha} is negative")));
    }
    if alpha.is_zero() {
        return Ok(Some(Scalar::zero()));
    }
    let xs = knife.critical_points(&knife.domain().unrolled_breaks(breaks));
    let f = |x: &Scalar| eval(&knife.piece_unchecked(x));
    let last = xs.len() - 1;
    let f_top = f(&xs[last]);
    if *alpha > f_top {
        return Ok(None);
    }
    // smallest index with F >= alpha; F(xs[0]) = F(0) = 0 < alpha
    let (mut lo, mut hi) = (0usize, last);
    let mut f_hi = f_top;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        let fm = f(&xs[mid]);
        if fm >= *alpha {
            hi = mid;
            f_hi = fm;
        } else {
            lo = mid;
        }
    }
    if f_hi == *alpha {
        return Ok(Some(xs[hi].clone()));
    }
    let f_lo = f(&xs[lo]);
    let x = &xs[lo] + (alpha - &f_lo) * (&xs[hi] - &xs[lo]) / (f_hi - f_lo);
    Ok(Some(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cells(v: &[((i64, i64), i64)]) -> Measure {
        Measure::new(
            v.iter()
                .map(|&((n, d), rho)| Cell {
                    to: Scalar::ratio(n, d),
                    density: Scalar::int(rho),
                })
                .collect(),
        )
        .unwrap()
    }

    fn iv(a: (i64, i64), b: (i64, i64)) -> Piece {
        Piece::interval(Scalar::ratio(a.0, a.1), Scalar::ratio(b.0, b.1))
    }

    fn unit() -> Piece {
        iv((0, 1), (1, 1))
    }

    #[test]
    fn eval_examples() {
        let uniform = Measure::uniform(Scalar::one(), &Scalar::int(5));
        assert_eq!(uniform.eval(&iv((0, 1), (2, 5))).unwrap(), Scalar::int(2));
        let step = cells(&[((1, 2), 4), ((1, 1), 0)]);
        assert_eq!(step.total(), Scalar::int(2));
        assert_eq!(step.eval(&iv((1, 4), (3, 4))).unwrap(), Scalar::one());
        assert_eq!(step.eval(&unit()).unwrap(), Scalar::int(2));
        assert!(step.eval(&iv((1, 2), (3, 2))).is_err());
    }

    #[test]
    fn cut_examples() {
        let uniform = Measure::uniform(Scalar::one(), &Scalar::int(5));
        let k = Knife::prefix(unit());
        assert_eq!(uniform.cut(&k, &Scalar::int(2)).unwrap(), Some(Scalar::ratio(2, 5)));
        let plateau = cells(&[((1, 4), 0), ((3, 4), 4), ((1, 1), 0)]);
        assert_eq!(plateau.cut(&k, &Scalar::zero()).unwrap(), Some(Scalar::zero()));
        assert_eq!(plateau.cut(&k, &Scalar::one()).unwrap(), Some(Scalar::ratio(1, 2)));
        // leftmost: value 2 is already reached at 3/4
        assert_eq!(plateau.cut(&k, &Scalar::int(2)).unwrap(), Some(Scalar::ratio(3, 4)));
        assert_eq!(plateau.cut(&k, &Scalar::int(3)).unwrap(), None);
        assert!(plateau.cut(&k, &Scalar::int(-1)).is_err());
    }

    #[test]
    fn cut_with_centered_and_translated_knives() {
        let m = cells(&[((1, 4), 0), ((3, 4), 4), ((1, 1), 0)]);
        let c = Knife::new(KnifeKind::Centered { midpoint: Scalar::ratio(1, 2) }, unit()).unwrap();
        // window [1/2 - x/2, 1/2 + x/2) carries 4x until it reaches the plateaus
        assert_eq!(m.cut(&c, &Scalar::one()).unwrap(), Some(Scalar::ratio(1, 4)));
        let t = Knife::new(KnifeKind::Translated { parts: 2 }, unit()).unwrap();
        // windows [0, x/2) and [1/2, 1/2 + x/2): value 4·(x/2 - 1/4) + 4·(x/2)
        assert_eq!(m.cut(&t, &Scalar::one()).unwrap(), Some(Scalar::ratio(1, 2)));
    }

    #[test]
    fn grid_marginal_matches_direct_integration() {
        let g = GridMeasure::new(
            vec![Scalar::ratio(1, 2), Scalar::one()],
            vec![Scalar::one(), Scalar::int(2)],
            vec![vec![Scalar::int(2), Scalar::int(4)], vec![Scalar::int(0), Scalar::int(6)]],
        )
        .unwrap();
        let m = g.marginal();
        assert_eq!(m.cells()[0].density, Scalar::int(2));
        assert_eq!(m.cells()[1].density, Scalar::int(10));
        assert_eq!(g.total(), Scalar::int(6));
        let p = iv((1, 4), (3, 4));
        assert_eq!(g.eval(&p).unwrap(), m.eval(&p).unwrap());
    }

    #[test]
    fn single_pass_cut_agrees_with_the_search() {
        let m = cells(&[((1, 4), 2), ((1, 2), 0), ((3, 4), 6), ((1, 1), 0)]);
        let domains = [
            iv((0, 1), (1, 1)),
            iv((1, 8), (7, 8)),
            iv((0, 1), (1, 8)).union(&iv((3, 8), (5, 8))).union(&iv((7, 10), (1, 1))),
        ];
        for d in domains {
            let k = Knife::prefix(d);
            let top = m.eval(k.domain()).unwrap();
            for i in 0..=12 {
                let alpha = &top * Scalar::ratio(i, 10);
                let fast = m.sweep_cut(&k, &alpha);
                let slow = solve_cut(&k, &alpha, &m.breakpoints(), |p| m.eval_unchecked(p)).unwrap();
                assert_eq!(fast, slow, "alpha {alpha} on {}", k.domain());
            }
        }
    }
}
