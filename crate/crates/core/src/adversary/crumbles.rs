use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::arith::Scalar;
use crate::cake::{solve_cut, Cake, Knife, Measure, Piece, PlayerMeasure};
use crate::error::{Error, Result};
use crate::oracle::{Entry, Query, Respondent};

/// A block of the adversary's information partition with the value it
/// currently carries.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Crumble {
    pub region: Piece,
    pub volume: Scalar,
    pub value: Scalar,
}

/// The adversary's state for one player: a partition of the cake into
/// crumbles whose values always sum to `D = λ(X)`, plus the number of
/// queries answered so far.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrumbleSet {
    cake: Cake,
    total: Scalar,
    crumbles: Vec<Crumble>,
    q: u64,
}

impl CrumbleSet {
    /// A fresh adversary on `cake`; the player's total value is the cake's
    /// volume.
    pub fn new(cake: Cake) -> Result<Self> {
        cake.validate()?;
        let total = cake.total_volume();
        Ok(CrumbleSet {
            crumbles: vec![Crumble {
                region: cake.whole(),
                volume: total.clone(),
                value: total.clone(),
            }],
            cake,
            total,
            q: 0,
        })
    }

    /// A fresh adversary on the interval `[0, D)`.
    pub fn interval(total: Scalar) -> Result<Self> {
        CrumbleSet::new(Cake::interval(total)?)
    }

    pub fn cake(&self) -> &Cake {
        &self.cake
    }

    pub fn total(&self) -> &Scalar {
        &self.total
    }

    pub fn crumbles(&self) -> &[Crumble] {
        &self.crumbles
    }

    /// Queries answered so far.
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn volume(&self, region: &Piece) -> Scalar {
        self.cake.volume(region)
    }

    fn crumble(&self, region: Piece, value: Scalar) -> Crumble {
        Crumble {
            volume: self.volume(&region),
            region,
            value,
        }
    }

    /// Splits every crumble by `piece`; the part holding at least half of a
    /// crumble's volume inherits its value (the inside wins ties).
    pub fn adv_eval(&mut self, piece: &Piece) -> Result<Scalar> {
        self.cake.check_contains(piece)?;
        let mut next = Vec::with_capacity(self.crumbles.len() + 1);
        let mut answer = Scalar::zero();
        for c in &self.crumbles {
            let inside = c.region.intersect(piece);
            let outside = c.region.subtract(piece);
            let keep_inside = self.volume(&inside) * Scalar::int(2) >= c.volume;
            if !inside.is_empty() {
                let value = if keep_inside { c.value.clone() } else { Scalar::zero() };
                answer = answer + &value;
                next.push(self.crumble(inside, value));
            }
            if !outside.is_empty() {
                let value = if keep_inside { Scalar::zero() } else { c.value.clone() };
                next.push(self.crumble(outside, value));
            }
        }
        self.crumbles = next;
        self.q += 1;
        Ok(answer)
    }

    /// Answers a cut query; `None` when the knife's domain cannot carry
    /// `alpha`.
    pub fn adv_cut(&mut self, knife: &Knife, alpha: &Scalar) -> Result<Option<Scalar>> {
        if alpha.is_negative() {
            return Err(Error::domain(format!("cut value {alpha} is negative")));
        }
        if alpha.is_zero() {
            self.cake.check_contains(knife.domain())?;
            self.q += 1;
            return Ok(Some(Scalar::zero()));
        }
        let alpha = alpha.clone();
        self.cut_with(knife, move |_| alpha)
    }

    /// A ratio `a:b` cut answered as a single query: the target value is
    /// fixed once the first round has decided how much the domain carries.
    pub fn adv_proportional_cut(&mut self, knife: &Knife, a: &BigInt, b: &BigInt) -> Result<Scalar> {
        let (a, sum) = (Scalar::from_bigint(a.clone()), Scalar::from_bigint(a + b));
        if sum.is_zero() || a.is_negative() || a > sum {
            return Err(Error::domain(format!("invalid ratio {a}:{}", &sum - &a)));
        }
        self.cut_with(knife, move |carried| carried * &a / &sum)?
            .ok_or_else(|| Error::Protocol("ratio cut exceeded the carried value".into()))
    }

    fn cut_with(&mut self, knife: &Knife, target: impl FnOnce(&Scalar) -> Scalar) -> Result<Option<Scalar>> {
        let domain = knife.domain();
        self.cake.check_contains(domain)?;
        // first round: the part of each crumble inside the domain keeps the
        // value only if it holds two thirds of the volume
        let mut next = Vec::with_capacity(self.crumbles.len() * 3);
        let mut inter: Vec<Crumble> = Vec::new();
        for c in &self.crumbles {
            let inside = c.region.intersect(domain);
            let outside = c.region.subtract(domain);
            let keep_inside = self.volume(&inside) * Scalar::int(3) >= &c.volume * Scalar::int(2);
            if !outside.is_empty() {
                let value = if keep_inside { Scalar::zero() } else { c.value.clone() };
                next.push(self.crumble(outside, value));
            }
            if !inside.is_empty() {
                let value = if keep_inside { c.value.clone() } else { Scalar::zero() };
                inter.push(self.crumble(inside, value));
            }
        }
        self.q += 1;
        let carried: Scalar = inter.iter().map(|c| &c.value).sum();
        let alpha = target(&carried);
        if alpha > carried || alpha.is_zero() {
            next.extend(inter);
            self.crumbles = next;
            return Ok(if alpha.is_zero() { Some(Scalar::zero()) } else { None });
        }

        // second round: order the intermediates by where the knife halves
        // them and cut them all at the k-th halving point
        let mut halves = Vec::with_capacity(inter.len());
        for c in &inter {
            let half = &c.volume / Scalar::int(2);
            let breaks: Vec<Scalar> = c
                .region
                .intervals()
                .iter()
                .flat_map(|iv| [iv.lo().clone(), iv.hi().clone()])
                .collect();
            let x = solve_cut(knife, &half, &breaks, |p| self.cake.volume(&p.intersect(&c.region)))?
                .ok_or_else(|| Error::Protocol("crumble cannot be halved".into()))?;
            halves.push(x);
        }
        let mut order: Vec<usize> = (0..inter.len()).collect();
        order.sort_by(|&i, &j| halves[i].cmp(&halves[j]));
        let mut before = Scalar::zero();
        let mut k = order.len() - 1;
        for (rank, &i) in order.iter().enumerate() {
            if &before + &inter[i].value >= alpha {
                k = rank;
                break;
            }
            before = before + &inter[i].value;
        }
        let xk = halves[order[k]].clone();
        let cut = knife.piece(&xk)?;
        let mut rank_of = vec![0; inter.len()];
        for (rank, &i) in order.iter().enumerate() {
            rank_of[i] = rank;
        }
        for (i, c) in inter.into_iter().enumerate() {
            let (vin, vout) = match rank_of[i].cmp(&k) {
                std::cmp::Ordering::Less => (c.value.clone(), Scalar::zero()),
                std::cmp::Ordering::Greater => (Scalar::zero(), c.value.clone()),
                std::cmp::Ordering::Equal => (&alpha - &before, &c.value + &before - &alpha),
            };
            let inside = c.region.intersect(&cut);
            let outside = c.region.subtract(&cut);
            if !inside.is_empty() {
                next.push(self.crumble(inside, vin));
            }
            if !outside.is_empty() {
                next.push(self.crumble(outside, vout));
            }
        }
        self.crumbles = next;
        Ok(Some(xk))
    }

    /// Smallest volume among crumbles carrying positive value.
    pub fn min_positive_volume(&self) -> Scalar {
        self.crumbles
            .iter()
            .filter(|c| c.value.is_positive())
            .map(|c| c.volume.clone())
            .min()
            .unwrap_or_else(Scalar::zero)
    }

    /// Value of `z` counting only crumbles wholly inside it.
    pub fn adv_value(&self, z: &Piece) -> Scalar {
        self.crumbles
            .iter()
            .filter(|c| c.region.is_subset_of(z))
            .map(|c| &c.value)
            .sum()
    }

    /// A measure consistent with every answer given: each crumble's value
    /// spread evenly over it.
    pub fn materialize(&self) -> Measure {
        let mut runs: Vec<(Scalar, Scalar, Scalar)> = Vec::new();
        for c in &self.crumbles {
            let density = &c.value / c.region.length();
            for iv in c.region.intervals() {
                runs.push((iv.lo().clone(), iv.hi().clone(), density.clone()));
            }
        }
        runs.sort_by(|a, b| a.0.cmp(&b.0));
        Measure::from_runs(runs).expect("crumbles tile the cake")
    }

    /// Partition, value conservation, the `3^q` crumble count and the
    /// `D / 3^q` volume floor.
    pub fn check_invariants(&self) -> Result<()> {
        let mut union = Piece::empty();
        let mut volume = Scalar::zero();
        let mut value = Scalar::zero();
        for c in &self.crumbles {
            if c.region.is_empty() || c.value.is_negative() {
                return Err(Error::Protocol("empty or negative crumble".into()));
            }
            union = union.union(&c.region);
            volume = volume + c.volume.clone();
            value = value + &c.value;
        }
        if union != self.cake.whole() || volume != self.cake.total_volume() {
            return Err(Error::Protocol("crumbles do not partition the cake".into()));
        }
        if value != self.total {
            return Err(Error::Protocol(format!("crumble values sum to {value}, not {}", self.total)));
        }
        let cap = BigInt::from(3).pow(self.q as u32);
        if BigInt::from(self.crumbles.len()) > cap {
            return Err(Error::Protocol(format!("{} crumbles after {} queries", self.crumbles.len(), self.q)));
        }
        let floor = &self.total / Scalar::from_bigint(cap);
        if self.min_positive_volume() < floor {
            return Err(Error::Protocol(format!(
                "positive crumble of volume {} below {floor}",
                self.min_positive_volume()
            )));
        }
        Ok(())
    }
}

impl Respondent for CrumbleSet {
    fn eval(&mut self, piece: &Piece) -> Result<Scalar> {
        self.adv_eval(piece)
    }

    fn cut(&mut self, knife: &Knife, alpha: &Scalar) -> Result<Option<Scalar>> {
        self.adv_cut(knife, alpha)
    }

    fn proportional_cut(&mut self, knife: &Knife, a: &BigInt, b: &BigInt) -> Result<Scalar> {
        self.adv_proportional_cut(knife, a, b)
    }
}

/// An adversary that stays inspectable while an oracle drives it.
#[derive(Clone, Debug)]
pub struct SharedAdversary(pub Arc<Mutex<CrumbleSet>>);

impl SharedAdversary {
    pub fn new(set: CrumbleSet) -> Self {
        SharedAdversary(Arc::new(Mutex::new(set)))
    }

    pub fn snapshot(&self) -> CrumbleSet {
        self.0.lock().expect("adversary lock").clone()
    }
}

impl Respondent for SharedAdversary {
    fn eval(&mut self, piece: &Piece) -> Result<Scalar> {
        self.0.lock().expect("adversary lock").adv_eval(piece)
    }

    fn cut(&mut self, knife: &Knife, alpha: &Scalar) -> Result<Option<Scalar>> {
        self.0.lock().expect("adversary lock").adv_cut(knife, alpha)
    }

    fn proportional_cut(&mut self, knife: &Knife, a: &BigInt, b: &BigInt) -> Result<Scalar> {
        self.0.lock().expect("adversary lock").adv_proportional_cut(knife, a, b)
    }
}

/// Checks every recorded answer against `measure`: eval answers must match
/// exactly, a cut position `x` must satisfy `μ(f(x)) = α` (a ratio cut
/// `b·μ(f(x)) = a·μ(I ∖ f(x))`), and an unanswerable cut must ask for more
/// than the domain holds.
pub fn check_witness<'a>(measure: &PlayerMeasure, entries: impl IntoIterator<Item = &'a Entry>) -> Result<()> {
    for (n, e) in entries.into_iter().enumerate() {
        let fail = |why: String| Err(Error::Protocol(format!("witness disagrees with answer {}: {why}", n + 1)));
        match (&e.query, &e.answer) {
            (Query::Eval { piece, within }, Some(ans)) => {
                let mut v = measure.eval(piece)?;
                if let Some(w) = within {
                    let wv = measure.eval(w)?;
                    v = if wv.is_zero() { Scalar::zero() } else { v / wv };
                }
                if &v != ans {
                    return fail(format!("eval gives {v}, recorded {ans}"));
                }
            }
            (Query::Cut { knife, alpha }, Some(x)) => {
                let v = measure.eval(&knife.piece(x)?)?;
                if &v != alpha {
                    return fail(format!("cut piece worth {v}, asked {alpha}"));
                }
            }
            (Query::Cut { knife, alpha }, None) => {
                let whole = measure.eval(knife.domain())?;
                if alpha <= &whole {
                    return fail(format!("cut of {alpha} was refused but the domain holds {whole}"));
                }
            }
            (Query::Pcut { knife, a, b }, Some(x)) => {
                let part = knife.piece(x)?;
                let left = measure.eval(&part)?;
                let right = measure.eval(&knife.domain().subtract(&part))?;
                if Scalar::from_bigint(b.clone()) * &left != Scalar::from_bigint(a.clone()) * &right {
                    return fail(format!("ratio cut splits {left} : {right}, asked {a}:{b}"));
                }
            }
            _ => return fail("missing answer".into()),
        }
    }
    Ok(())
}

/// `3^q` as an exact scalar.
pub(crate) fn pow3(q: u64) -> Scalar {
    let mut p = BigInt::one();
    for _ in 0..q {
        p *= 3;
    }
    Scalar::from_bigint(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cake::KnifeKind;

    fn iv(a: (i64, i64), b: (i64, i64)) -> Piece {
        Piece::interval(Scalar::ratio(a.0, a.1), Scalar::ratio(b.0, b.1))
    }

    fn fresh() -> CrumbleSet {
        CrumbleSet::interval(Scalar::int(3)).unwrap()
    }

    #[test]
    fn eval_examples() {
        let mut s = fresh();
        assert_eq!(s.adv_eval(&iv((0, 1), (2, 1))).unwrap(), Scalar::int(3));
        let mut s = fresh();
        assert_eq!(s.adv_eval(&iv((0, 1), (1, 1))).unwrap(), Scalar::zero());
        let mut s = fresh();
        assert_eq!(s.adv_eval(&iv((0, 1), (3, 1))).unwrap(), Scalar::int(3));
        assert_eq!(s.q(), 1);
    }

    #[test]
    fn cut_examples() {
        let whole = Knife::prefix(iv((0, 1), (3, 1)));
        let mut s = fresh();
        assert_eq!(s.adv_cut(&whole, &Scalar::ratio(3, 2)).unwrap(), Some(Scalar::ratio(3, 2)));
        let values: Vec<_> = s.crumbles().iter().map(|c| c.value.clone()).collect();
        assert_eq!(values, vec![Scalar::ratio(3, 2), Scalar::ratio(3, 2)]);
        assert_eq!(s.min_positive_volume(), Scalar::ratio(3, 2));
        s.check_invariants().unwrap();

        let mut s = fresh();
        assert_eq!(s.adv_cut(&whole, &Scalar::int(4)).unwrap(), None);
        let mut s = fresh();
        let short = Knife::prefix(iv((0, 1), (1, 1)));
        assert_eq!(s.adv_cut(&short, &Scalar::ratio(1, 100)).unwrap(), None);
        s.check_invariants().unwrap();
    }

    #[test]
    fn fresh_state() {
        let s = fresh();
        assert_eq!(s.min_positive_volume(), Scalar::int(3));
        assert_eq!(s.adv_value(&iv((0, 1), (3, 1))), Scalar::int(3));
        assert_eq!(s.adv_value(&iv((0, 1), (2, 1))), Scalar::zero());
        assert_eq!(s.materialize(), Measure::uniform(Scalar::int(3), &Scalar::int(3)));
    }

    #[test]
    fn materialized_eval_example() {
        let mut s = fresh();
        s.adv_eval(&iv((0, 1), (2, 1))).unwrap();
        let m = s.materialize();
        assert_eq!(m.cells().len(), 2);
        assert_eq!(m.cells()[0].density, Scalar::ratio(3, 2));
        assert_eq!(m.cells()[1].density, Scalar::zero());
    }

    #[test]
    fn containment_value_sums_whole_crumbles() {
        let mut s = fresh();
        s.adv_eval(&iv((0, 1), (2, 1))).unwrap();
        s.adv_cut(&Knife::prefix(iv((0, 1), (2, 1))), &Scalar::int(2)).unwrap();
        let positive: Vec<&Crumble> = s.crumbles().iter().filter(|c| c.value.is_positive()).collect();
        assert_eq!(positive.len(), 2);
        let z = positive[0].region.union(&positive[1].region);
        assert_eq!(s.adv_value(&z), &positive[0].value + &positive[1].value);
    }

    #[test]
    fn ratio_cut_is_one_query_and_splits_the_carried_value() {
        let mut s = fresh();
        let k = Knife::new(KnifeKind::Centered { midpoint: Scalar::ratio(3, 2) }, iv((0, 1), (3, 1))).unwrap();
        let x = s.adv_proportional_cut(&k, &BigInt::from(1), &BigInt::from(2)).unwrap();
        assert_eq!(s.q(), 1);
        let m = PlayerMeasure::Line(s.materialize());
        let inside = m.eval(&k.piece(&x).unwrap()).unwrap();
        assert_eq!(inside, Scalar::one());
        s.check_invariants().unwrap();
    }
}
