//! The Robertson–Webb query interface. Protocols never see a measure; they
//! talk to an [`Oracle`], which routes each query to the player's
//! [`Respondent`], counts it and logs it.

mod instance;
mod ledger;
mod transcript;

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::arith::Scalar;
use crate::cake::{Knife, Piece, PlayerMeasure};
use crate::error::{Error, Result};

pub use instance::{Instance, Player, ScalarKind};
pub use ledger::{Ledger, LedgerReport, LedgerRow, QueryCounts, PCUT_WS_WEIGHT};
pub use transcript::{Entry, Query, QueryKind, Transcript};

/// Whoever answers a player's queries: a fixed measure, or an adversary
/// choosing answers as it goes.
pub trait Respondent: Send {
    fn eval(&mut self, piece: &Piece) -> Result<Scalar>;

    fn cut(&mut self, knife: &Knife, alpha: &Scalar) -> Result<Option<Scalar>>;

    /// `μ(part) / μ(within)`: `part` valued with `within` reindexed as the
    /// whole cake. A worthless `within` makes every part worth 0.
    fn eval_within(&mut self, part: &Piece, within: &Piece) -> Result<Scalar> {
        let w = self.eval(within)?;
        if w.is_zero() {
            return Ok(Scalar::zero());
        }
        Ok(self.eval(part)? / w)
    }

    /// Position `x` with `b·μ(f(x)) = a·μ(I ∖ f(x))`.
    fn proportional_cut(&mut self, knife: &Knife, a: &BigInt, b: &BigInt) -> Result<Scalar> {
        let whole = self.eval(knife.domain())?;
        let alpha = whole * Scalar::from_bigint(a.clone()) / Scalar::from_bigint(a + b);
        self.cut(knife, &alpha)?
            .ok_or_else(|| Error::Protocol("proportional cut has no solution".into()))
    }

    /// True when answers depend on the query alone, so repeated queries
    /// may be served from a cache.
    fn is_pure(&self) -> bool {
        false
    }
}

/// Answers truthfully from a fixed measure.
#[derive(Clone, Debug)]
pub struct MeasureRespondent {
    measure: Arc<PlayerMeasure>,
}

impl MeasureRespondent {
    pub fn new(measure: Arc<PlayerMeasure>) -> Self {
        MeasureRespondent { measure }
    }
}

impl Respondent for MeasureRespondent {
    fn eval(&mut self, piece: &Piece) -> Result<Scalar> {
        self.measure.eval(piece)
    }

    fn cut(&mut self, knife: &Knife, alpha: &Scalar) -> Result<Option<Scalar>> {
        self.measure.cut(knife, alpha)
    }

    fn is_pure(&self) -> bool {
        true
    }
}

/// Routes, counts and logs queries. Several player ids may share one
/// respondent (clones of one player).
pub struct Oracle {
    respondents: Vec<Box<dyn Respondent>>,
    route: HashMap<usize, usize>,
    ledger: Ledger,
    transcript: Transcript,
    cache: HashMap<(usize, QueryKind, String), Option<Scalar>>,
    recording: bool,
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle::new()
    }
}

impl Oracle {
    pub fn new() -> Self {
        Oracle {
            respondents: Vec::new(),
            route: HashMap::new(),
            ledger: Ledger::new(),
            transcript: Transcript::new(),
            cache: HashMap::new(),
            recording: true,
        }
    }

    /// Switches the transcript and answer cache off or on. Counting is
    /// unaffected; long benchmark runs use this to save memory.
    pub fn set_recording(&mut self, on: bool) {
        self.recording = on;
    }

    /// Every player answers from its own measure.
    pub fn for_instance(instance: &Instance) -> Self {
        let mut o = Oracle::new();
        for p in instance.players() {
            o.add_player(p.id, Box::new(MeasureRespondent::new(p.measure.clone())));
        }
        o
    }

    /// Registers a player and returns its respondent slot.
    pub fn add_player(&mut self, id: usize, respondent: Box<dyn Respondent>) -> usize {
        self.respondents.push(respondent);
        let slot = self.respondents.len() - 1;
        self.route.insert(id, slot);
        slot
    }

    pub fn slot_of(&self, id: usize) -> Result<usize> {
        self.route.get(&id).copied().ok_or(Error::UnknownPlayer(id))
    }

    /// Registers `id` as another player answering from `slot`.
    pub fn add_alias(&mut self, id: usize, slot: usize) -> Result<()> {
        if slot >= self.respondents.len() {
            return Err(Error::domain(format!("no respondent slot {slot}")));
        }
        self.route.insert(id, slot);
        Ok(())
    }

    pub fn ledger(&self) -> &Ledger {
        &self.ledger
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn ledger_report(&self) -> LedgerReport {
        self.ledger.report()
    }

    pub fn into_parts(self) -> (Ledger, Transcript) {
        (self.ledger, self.transcript)
    }

    fn ask(&mut self, player: usize, query: Query) -> Result<Option<Scalar>> {
        let slot = *self.route.get(&player).ok_or(Error::UnknownPlayer(player))?;
        let kind = query.kind();
        let respondent = &mut self.respondents[slot];
        let key = (self.recording && respondent.is_pure()).then(|| (slot, kind, query.args()));
        let cached = key.as_ref().and_then(|k| self.cache.get(k).cloned());
        let answer = match cached {
            Some(a) => a,
            None => {
                let a = match &query {
                    Query::Eval { piece, within: None } => Some(respondent.eval(piece)?),
                    Query::Eval {
                        piece,
                        within: Some(w),
                    } => Some(respondent.eval_within(piece, w)?),
                    Query::Cut { knife, alpha } => respondent.cut(knife, alpha)?,
                    Query::Pcut { knife, a, b } => Some(respondent.proportional_cut(knife, a, b)?),
                };
                if let Some(k) = key {
                    self.cache.insert(k, a.clone());
                }
                a
            }
        };
        let counts = self.ledger.entry(player);
        match kind {
            QueryKind::Eval => counts.eval += 1,
            QueryKind::Cut => counts.cut += 1,
            QueryKind::Pcut => counts.pcut += 1,
        }
        if self.recording {
            self.transcript.push(Entry {
                player,
                query,
                answer: answer.clone(),
            });
        }
        Ok(answer)
    }

    /// `μ_i(piece)`.
    pub fn eval(&mut self, player: usize, piece: &Piece) -> Result<Scalar> {
        let a = self.ask(
            player,
            Query::Eval {
                piece: piece.clone(),
                within: None,
            },
        )?;
        Ok(a.unwrap_or_else(Scalar::zero))
    }

    /// `μ_i(part) / μ_i(within)`, one eval on the reindexed piece `within`.
    pub fn eval_within(&mut self, player: usize, part: &Piece, within: &Piece) -> Result<Scalar> {
        if !part.is_subset_of(within) {
            return Err(Error::domain(format!("{part} is not inside {within}")));
        }
        let a = self.ask(
            player,
            Query::Eval {
                piece: part.clone(),
                within: Some(within.clone()),
            },
        )?;
        Ok(a.unwrap_or_else(Scalar::zero))
    }

    /// Leftmost `x` with `μ_i(f(x)) = alpha`, or `None` when `alpha`
    /// exceeds `μ_i(I)`.
    pub fn cut(&mut self, player: usize, knife: &Knife, alpha: &Scalar) -> Result<Option<Scalar>> {
        if alpha.is_negative() {
            return Err(Error::domain(format!("cut value {alpha} is negative")));
        }
        self.ask(
            player,
            Query::Cut {
                knife: knife.clone(),
                alpha: alpha.clone(),
            },
        )
    }

    /// Cuts the knife's domain in ratio `a:b` by the player's own measure.
    pub fn proportional_cut(&mut self, player: usize, knife: &Knife, a: &BigInt, b: &BigInt) -> Result<Scalar> {
        if a < &BigInt::zero() || b < &BigInt::zero() || (a + b).is_zero() {
            return Err(Error::domain(format!("invalid ratio {a}:{b}")));
        }
        let x = self.ask(
            player,
            Query::Pcut {
                knife: knife.clone(),
                a: a.clone(),
                b: b.clone(),
            },
        )?;
        x.ok_or_else(|| Error::Protocol("proportional cut has no solution".into()))
    }

    /// Re-issues every query of `transcript` through this oracle and checks
    /// that each answer matches the recorded one exactly.
    pub fn replay(&mut self, transcript: &Transcript) -> Result<()> {
        for (line, e) in transcript.entries().iter().enumerate() {
            let got = self.ask(e.player, e.query.clone())?;
            if got != e.answer {
                return Err(Error::Protocol(format!(
                    "replay diverges at line {}: recorded {:?}, got {:?}",
                    line + 1,
                    e.answer.as_ref().map(ToString::to_string),
                    got.as_ref().map(ToString::to_string)
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cake::{Cake, Measure};

    fn uniform_instance(demands: &[i64]) -> Instance {
        let total: i64 = demands.iter().sum();
        let players = demands
            .iter()
            .map(|&d| {
                (
                    Scalar::int(d),
                    PlayerMeasure::Line(Measure::uniform(Scalar::one(), &Scalar::int(total))),
                )
            })
            .collect();
        Instance::new(Cake::unit(), ScalarKind::Rational, players).unwrap()
    }

    fn iv(a: (i64, i64), b: (i64, i64)) -> Piece {
        Piece::interval(Scalar::ratio(a.0, a.1), Scalar::ratio(b.0, b.1))
    }

    #[test]
    fn eval_examples() {
        let inst = uniform_instance(&[1, 2]);
        let mut o = Oracle::for_instance(&inst);
        assert_eq!(o.eval(1, &iv((0, 1), (1, 3))).unwrap(), Scalar::one());
        assert_eq!(o.eval(1, &Piece::empty()).unwrap(), Scalar::zero());
        assert_eq!(o.eval(2, &iv((0, 1), (1, 1))).unwrap(), Scalar::int(3));
        assert_eq!(o.ledger().player(1).eval, 2);
        assert_eq!(o.ledger().player(2).eval, 1);
    }

    #[test]
    fn cut_examples() {
        let inst = uniform_instance(&[2, 3]);
        let mut o = Oracle::for_instance(&inst);
        let k = Knife::prefix(iv((0, 1), (1, 1)));
        assert_eq!(o.cut(1, &k, &Scalar::int(2)).unwrap(), Some(Scalar::ratio(2, 5)));
        assert_eq!(o.cut(1, &k, &Scalar::zero()).unwrap(), Some(Scalar::zero()));
        assert_eq!(o.cut(1, &k, &Scalar::int(6)).unwrap(), None);
        assert_eq!(o.ledger().player(1).cut, 3);
    }

    #[test]
    fn proportional_cut_examples() {
        let inst = uniform_instance(&[2, 3]);
        let mut o = Oracle::for_instance(&inst);
        let whole = Knife::prefix(iv((0, 1), (1, 1)));
        let two = BigInt::from(2);
        let three = BigInt::from(3);
        assert_eq!(o.proportional_cut(1, &whole, &two, &three).unwrap(), Scalar::ratio(2, 5));
        assert_eq!(
            o.proportional_cut(1, &whole, &BigInt::zero(), &BigInt::from(1)).unwrap(),
            Scalar::zero()
        );
        let right = Knife::prefix(iv((1, 2), (1, 1)));
        let one = BigInt::from(1);
        assert_eq!(o.proportional_cut(1, &right, &one, &one).unwrap(), Scalar::ratio(1, 4));
        assert!(o.proportional_cut(1, &right, &BigInt::zero(), &BigInt::zero()).is_err());
        let c = o.ledger().totals();
        assert_eq!((c.pcut, c.highlevel(), c.ws_equivalent()), (3, 3, 15));
    }

    #[test]
    fn proportional_cut_equals_cut_at_scaled_value() {
        let m = Measure::new(vec![
            crate::cake::Cell {
                to: Scalar::ratio(1, 3),
                density: Scalar::int(6),
            },
            crate::cake::Cell {
                to: Scalar::one(),
                density: Scalar::ratio(3, 2),
            },
        ])
        .unwrap();
        let inst = Instance::new(
            Cake::unit(),
            ScalarKind::Rational,
            vec![(Scalar::int(3), PlayerMeasure::Line(m))],
        )
        .unwrap();
        let mut o = Oracle::for_instance(&inst);
        let k = Knife::prefix(iv((1, 4), (1, 1)));
        let whole = o.eval(1, k.domain()).unwrap();
        let (a, b) = (BigInt::from(2), BigInt::from(5));
        let x = o.proportional_cut(1, &k, &a, &b).unwrap();
        let y = o.cut(1, &k, &(whole * Scalar::ratio(2, 7))).unwrap().unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn fresh_ledger_is_empty() {
        let o = Oracle::new();
        assert_eq!(o.ledger().totals(), QueryCounts::default());
        assert!(o.ledger_report().players.is_empty());
    }

    #[test]
    fn transcript_round_trip_and_replay() {
        let inst = uniform_instance(&[1, 2]);
        let mut o = Oracle::for_instance(&inst);
        let k = Knife::prefix(iv((0, 1), (1, 1)));
        o.eval(1, &iv((0, 1), (1, 2))).unwrap();
        o.eval_within(2, &iv((0, 1), (1, 4)), &iv((0, 1), (1, 2))).unwrap();
        o.cut(2, &k, &Scalar::int(9)).unwrap();
        o.proportional_cut(1, &k, &BigInt::from(1), &BigInt::from(2)).unwrap();
        let text = o.transcript().to_string();
        assert!(text.contains("player=2 kind=cut args=prefix@[0,1)#9 ans=none"));
        let parsed: Transcript = text.parse().unwrap();
        assert_eq!(&parsed, o.transcript());
        let mut fresh = Oracle::for_instance(&inst);
        fresh.replay(&parsed).unwrap();
        assert_eq!(fresh.ledger(), o.ledger());
        for kind in [QueryKind::Eval, QueryKind::Cut, QueryKind::Pcut] {
            let from_ledger = o.ledger().players().map(|(_, c)| match kind {
                QueryKind::Eval => c.eval,
                QueryKind::Cut => c.cut,
                QueryKind::Pcut => c.pcut,
            });
            assert_eq!(from_ledger.sum::<u64>() as usize, o.transcript().count(None, kind));
        }
    }

    #[test]
    fn replay_detects_a_different_measure() {
        let inst = uniform_instance(&[1, 1]);
        let mut o = Oracle::for_instance(&inst);
        o.eval(1, &iv((0, 1), (1, 2))).unwrap();
        let skewed = Measure::new(vec![
            crate::cake::Cell {
                to: Scalar::ratio(1, 2),
                density: Scalar::int(4),
            },
            crate::cake::Cell {
                to: Scalar::one(),
                density: Scalar::zero(),
            },
        ])
        .unwrap();
        let mut other = Oracle::new();
        other.add_player(1, Box::new(MeasureRespondent::new(Arc::new(PlayerMeasure::Line(skewed)))));
        assert!(other.replay(o.transcript()).is_err());
    }
}
