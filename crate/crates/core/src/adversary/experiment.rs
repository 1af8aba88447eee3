use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::bound::{lower_bound_value, LowerBound};
use super::crumbles::{check_witness, pow3, CrumbleSet, SharedAdversary};
use crate::arith::{ceil_log2, Rational, Scalar};
use crate::cake::{Cake, KnifeStyle, Measure, Piece, PlayerMeasure};
use crate::error::{Error, Result};
use crate::oracle::{Instance, LedgerReport, MeasureRespondent, Oracle, Player, ScalarKind};
use crate::protocols::{Division, DivisionProtocol, DivisionRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Humble,
    Greedy,
}

/// The lower-bound instance: `c₁n` adversary-backed humble players with
/// demands summing to `c₂n`, the rest greedy with the uniform measure on
/// `[0, D)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HumbleGreedy {
    pub cake: Cake,
    pub total: BigInt,
    /// `(id, role, demand)`, humble players first.
    pub players: Vec<(usize, Role, BigInt)>,
}

impl HumbleGreedy {
    pub fn humble(&self) -> impl Iterator<Item = &(usize, Role, BigInt)> {
        self.players.iter().filter(|p| p.1 == Role::Humble)
    }

    pub fn greedy(&self) -> impl Iterator<Item = &(usize, Role, BigInt)> {
        self.players.iter().filter(|p| p.1 == Role::Greedy)
    }

    pub fn greedy_measure(&self) -> Measure {
        let d = Scalar::from_bigint(self.total.clone());
        Measure::uniform(d.clone(), &d)
    }
}

/// `total` split into `k` parts differing by at most one, larger first.
fn spread(total: &BigInt, k: usize) -> Vec<BigInt> {
    let kk = BigInt::from(k);
    let (base, extra) = (total / &kk, (total % &kk).to_usize().unwrap_or(0));
    (0..k).map(|i| if i < extra { &base + 1 } else { base.clone() }).collect()
}

fn integral(c: &Rational, n: u64, name: &str) -> Result<BigInt> {
    let v = c * Rational::from_integer(BigInt::from(n));
    if !v.is_integer() {
        return Err(Error::domain(format!("{name}·n = {v} is not an integer")));
    }
    Ok(v.to_integer())
}

pub fn gen_humble_greedy(n: u64, c1: &Rational, c2: &Rational, d: &BigInt) -> Result<HumbleGreedy> {
    let humble = integral(c1, n, "c1")?;
    let humble_total = integral(c2, n, "c2")?;
    if humble < BigInt::from(1) || humble_total < humble {
        return Err(Error::domain(format!("need c2·n ≥ c1·n ≥ 1, got {humble_total} and {humble}")));
    }
    if d <= &BigInt::from(n) {
        return Err(Error::domain(format!("D = {d} must exceed n = {n}")));
    }
    let h = humble.to_usize().ok_or_else(|| Error::domain("too many humble players"))?;
    let g = n as usize - h.min(n as usize);
    let greedy_total = d - &humble_total;
    if g == 0 || greedy_total < BigInt::from(g) {
        return Err(Error::domain(format!(
            "{g} greedy players cannot share the remaining demand {greedy_total}"
        )));
    }
    let mut players = Vec::with_capacity(n as usize);
    for dem in spread(&humble_total, h) {
        players.push((players.len() + 1, Role::Humble, dem));
    }
    for dem in spread(&greedy_total, g) {
        players.push((players.len() + 1, Role::Greedy, dem));
    }
    Ok(HumbleGreedy {
        cake: Cake::interval(Scalar::from_bigint(d.clone()))?,
        total: d.clone(),
        players,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PlayerOutcome {
    pub id: usize,
    pub role: Role,
    pub demand: String,
    /// Queries answered: adversary steps for humble players, high-level
    /// oracle queries for greedy ones.
    pub queries: u64,
    pub piece: Piece,
    pub volume: String,
    /// Value under the materialized measure.
    pub value: String,
    /// Value counting whole crumbles only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crumble_value: Option<String>,
}

/// Evidence that a protocol failed: its output valued under measures
/// consistent with every answer it received.
#[derive(Clone, Debug, Serialize)]
pub struct ViolationCertificate {
    pub reason: String,
    pub instance: serde_json::Value,
    pub division: Vec<DivisionRecord>,
    pub measures: Vec<(usize, Measure)>,
    pub values: Vec<PlayerOutcome>,
    pub ledger: LedgerReport,
}

impl ViolationCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HumbleReport {
    pub protocol: String,
    pub n: u64,
    pub c1: String,
    pub c2: String,
    pub total: String,
    pub seed: u64,
    pub players: Vec<PlayerOutcome>,
    /// `Σ q_i` over humble players.
    pub humble_queries: u64,
    pub lower_bound: LowerBound,
    pub lower_bound_met: bool,
    /// `humble_queries − c₁n·log₃(D·c₁/c₂)`.
    pub slack: f64,
    /// `2(n−1)⌈log₂D⌉`.
    pub upper_bound: u64,
    pub within_upper_bound: bool,
    /// `Σ D/3^{q_i}` over humble players, and their total volume.
    pub volume_floor: String,
    pub humble_volume: String,
    pub volume_check: bool,
    pub proportional: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<ViolationCertificate>,
}

impl HumbleReport {
    /// Proportional under the witnesses, every humble piece holding whole
    /// crumbles worth its demand, and both counting checks passed.
    pub fn certified(&self) -> bool {
        self.violation.is_none() && self.proportional && self.volume_check && self.lower_bound_met
    }
}

/// Runs `protocol` against the humble/greedy instance. The seed permutes
/// which ids the humble players get, through ChaCha8.
pub fn humble_greedy_experiment(
    protocol: &dyn DivisionProtocol,
    n: u64,
    c1: &Rational,
    c2: &Rational,
    d: &BigInt,
    seed: u64,
) -> Result<HumbleReport> {
    let mut setup = gen_humble_greedy(n, c1, c2, d)?;
    let bound = lower_bound_value(n, c1, c2, d)?;
    let mut ids: Vec<usize> = (1..=n as usize).collect();
    ids.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    for (p, id) in setup.players.iter_mut().zip(&ids) {
        p.0 = *id;
    }
    setup.players.sort_by_key(|p| p.0);

    let greedy = Arc::new(PlayerMeasure::Line(setup.greedy_measure()));
    let mut oracle = Oracle::new();
    let mut adversaries = Vec::new();
    for (id, role, _) in &setup.players {
        match role {
            Role::Humble => {
                let adv = SharedAdversary::new(CrumbleSet::new(setup.cake.clone())?);
                adversaries.push((*id, adv.clone()));
                oracle.add_player(*id, Box::new(adv));
            }
            Role::Greedy => {
                oracle.add_player(*id, Box::new(MeasureRespondent::new(greedy.clone())));
            }
        }
    }
    let demands: Vec<(usize, BigInt)> = setup.players.iter().map(|(id, _, dem)| (*id, dem.clone())).collect();
    let whole = setup.cake.whole();
    let outcome = protocol.divide(&mut oracle, &demands, &whole, &KnifeStyle::Prefix);
    let (ledger, transcript) = oracle.into_parts();

    // witnesses
    let mut measures = Vec::new();
    let mut states = Vec::new();
    let mut players = Vec::new();
    for (id, adv) in &adversaries {
        let state = adv.snapshot();
        state.check_invariants()?;
        let m = state.materialize();
        check_witness(
            &PlayerMeasure::Line(m.clone()),
            transcript.entries().iter().filter(|e| e.player == *id),
        )?;
        measures.push((*id, m));
        states.push((*id, state));
    }
    let witness_of = |id: usize| measures.iter().find(|(i, _)| *i == id).map(|(_, m)| m.clone());
    for (id, role, dem) in &setup.players {
        let measure = witness_of(*id).unwrap_or_else(|| setup.greedy_measure());
        players.push(Player {
            id: *id,
            demand: Scalar::from_bigint(dem.clone()),
            measure: Arc::new(PlayerMeasure::Line(measure)),
        });
        let _ = role;
    }
    let instance = Instance::from_players(setup.cake.clone(), ScalarKind::Rational, players)?;

    let division = match &outcome {
        Ok(div) => div.clone(),
        Err(_) => Division::new(),
    };
    let mut reason: Option<String> = outcome.as_ref().err().map(|e| format!("protocol failed: {e}"));
    if reason.is_none() {
        if let Err(e) = division.check_partition(&whole) {
            reason = Some(format!("not a partition: {e}"));
        }
    }

    let mut rows = Vec::new();
    let mut humble_queries = 0;
    let mut volume_floor = Scalar::zero();
    let mut humble_volume = Scalar::zero();
    for p in instance.players() {
        let piece = division.piece(p.id);
        let volume = setup.cake.volume(&piece);
        let value = p.measure.eval(&piece)?;
        let role = setup.players.iter().find(|q| q.0 == p.id).map(|q| q.1).unwrap_or(Role::Greedy);
        let (queries, crumble_value) = match states.iter().find(|(i, _)| *i == p.id) {
            Some((_, state)) => {
                let cv = state.adv_value(&piece);
                humble_queries += state.q();
                volume_floor = volume_floor + &setup.cake.total_volume() / pow3(state.q());
                humble_volume = humble_volume + &volume;
                if reason.is_none() && cv < p.demand {
                    reason = Some(format!(
                        "humble player {} holds whole crumbles worth {cv} < demand {}",
                        p.id, p.demand
                    ));
                }
                (state.q(), Some(cv.to_string()))
            }
            None => (ledger.player(p.id).highlevel(), None),
        };
        if reason.is_none() && value < p.demand {
            reason = Some(format!("player {} receives {value} < demand {}", p.id, p.demand));
        }
        rows.push(PlayerOutcome {
            id: p.id,
            role,
            demand: p.demand.to_string(),
            queries,
            piece,
            volume: volume.to_string(),
            value: value.to_string(),
            crumble_value,
        });
    }
    let proportional = reason.is_none();
    let upper_bound = 2 * (n - 1) * ceil_log2(d)?;
    let violation = reason.map(|reason| ViolationCertificate {
        reason,
        instance: instance.to_json_value(),
        division: division.records(&instance).unwrap_or_default(),
        measures: measures.clone(),
        values: rows.clone(),
        ledger: ledger.report(),
    });
    Ok(HumbleReport {
        protocol: protocol.name(),
        n,
        c1: c1.to_string(),
        c2: c2.to_string(),
        total: d.to_string(),
        seed,
        players: rows,
        humble_queries,
        lower_bound_met: bound.met_by(humble_queries),
        slack: humble_queries as f64 - bound.decimal,
        lower_bound: bound,
        upper_bound,
        within_upper_bound: humble_queries <= upper_bound,
        volume_check: proportional && volume_floor <= humble_volume,
        volume_floor: volume_floor.to_string(),
        humble_volume: humble_volume.to_string(),
        proportional,
        violation,
    })
}
