use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::arith::Scalar;
use crate::cake::{Cake, GridMeasure, Measure, PlayerMeasure};
use crate::error::{Error, Result};

/// Which numbers an instance is written in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ScalarKind {
    Rational,
    Quad { m: u64 },
}

impl ScalarKind {
    fn admits(&self, s: &Scalar) -> bool {
        match (self, s.field()) {
            (_, None) => true,
            (ScalarKind::Quad { m }, Some(f)) => *m == f,
            (ScalarKind::Rational, Some(_)) => s.is_rational(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Player {
    pub id: usize,
    pub demand: Scalar,
    pub measure: Arc<PlayerMeasure>,
}

/// A validated problem: every player values the whole cake at exactly
/// `D = Σ d_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    cake: Cake,
    kind: ScalarKind,
    players: Vec<Player>,
    total: Scalar,
}

impl Instance {
    /// Players get ids `1..=n` in the given order.
    pub fn new(cake: Cake, kind: ScalarKind, players: Vec<(Scalar, PlayerMeasure)>) -> Result<Self> {
        let players = players
            .into_iter()
            .enumerate()
            .map(|(i, (demand, measure))| Player {
                id: i + 1,
                demand,
                measure: Arc::new(measure),
            })
            .collect();
        Instance::from_players(cake, kind, players)
    }

    pub fn from_players(cake: Cake, kind: ScalarKind, players: Vec<Player>) -> Result<Self> {
        cake.validate()?;
        if players.is_empty() {
            return Err(Error::domain("an instance needs at least one player"));
        }
        let mut total = Scalar::zero();
        for p in &players {
            if !kind.admits(&p.demand) {
                return Err(Error::Schema(format!(
                    "player {}: demand {} is not in the declared scalar field",
                    p.id, p.demand
                )));
            }
            if !p.demand.is_positive() {
                return Err(Error::domain(format!("player {}: demand {} is not positive", p.id, p.demand)));
            }
            total = total + &p.demand;
        }
        for p in &players {
            p.measure
                .fits(&cake)
                .map_err(|e| Error::Schema(format!("player {}: {e}", p.id)))?;
            let t = p.measure.total();
            if t != total {
                return Err(Error::Normalization {
                    player: p.id,
                    total: t.to_string(),
                    expected: total.to_string(),
                });
            }
        }
        let mut ids: Vec<usize> = players.iter().map(|p| p.id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Schema("duplicate player id".into()));
        }
        Ok(Instance {
            cake,
            kind,
            players,
            total,
        })
    }

    pub fn cake(&self) -> &Cake {
        &self.cake
    }

    pub fn kind(&self) -> ScalarKind {
        self.kind
    }

    pub fn players(&self) -> &[Player] {
        &self.players
    }

    pub fn n(&self) -> usize {
        self.players.len()
    }

    /// `D`.
    pub fn total(&self) -> &Scalar {
        &self.total
    }

    pub fn player(&self, id: usize) -> Result<&Player> {
        self.players
            .iter()
            .find(|p| p.id == id)
            .ok_or(Error::UnknownPlayer(id))
    }

    /// `(id, demand)` pairs when every demand is a positive integer.
    pub fn integer_demands(&self) -> Result<Vec<(usize, BigInt)>> {
        self.players
            .iter()
            .map(|p| {
                p.demand
                    .to_integer()
                    .map(|d| (p.id, d))
                    .ok_or_else(|| Error::domain(format!("player {}: demand {} is not an integer", p.id, p.demand)))
            })
            .collect()
    }

    pub fn total_integer(&self) -> Result<BigInt> {
        self.total
            .to_integer()
            .ok_or_else(|| Error::domain(format!("D = {} is not an integer", self.total)))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum MeasureDoc {
    Density(Measure),
    Grid(GridMeasure),
}

#[derive(Serialize, Deserialize)]
struct PlayerDoc {
    demand: Scalar,
    #[serde(flatten)]
    measure: MeasureDoc,
}

#[derive(Serialize, Deserialize)]
struct InstanceDoc {
    cake: Cake,
    scalar: ScalarKind,
    players: Vec<PlayerDoc>,
}

impl Instance {
    /// Reads the JSON instance format; players get ids `1..=n`.
    pub fn from_json(text: &str) -> Result<Instance> {
        let doc: InstanceDoc = serde_json::from_str(text)?;
        let players = doc
            .players
            .into_iter()
            .map(|p| {
                let m = match p.measure {
                    MeasureDoc::Density(m) => PlayerMeasure::Line(m),
                    MeasureDoc::Grid(g) => PlayerMeasure::Grid(g),
                };
                (p.demand, m)
            })
            .collect();
        Instance::new(doc.cake, doc.scalar, players)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let doc = InstanceDoc {
            cake: self.cake.clone(),
            scalar: self.kind,
            players: self
                .players
                .iter()
                .map(|p| PlayerDoc {
                    demand: p.demand.clone(),
                    measure: match p.measure.as_ref() {
                        PlayerMeasure::Line(m) => MeasureDoc::Density(m.clone()),
                        PlayerMeasure::Grid(g) => MeasureDoc::Grid(g.clone()),
                    },
                })
                .collect(),
        };
        serde_json::to_value(doc).expect("instances always serialize")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("instances always serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_UNIFORM: &str = r#"{
        "cake": {"kind": "interval", "length": "1"},
        "scalar": {"kind": "rational"},
        "players": [
            {"demand": "1", "density": [{"to": "1", "density": "2"}]},
            {"demand": "1", "density": [{"to": "1/2", "density": "3"}, {"to": "1", "density": "1"}]}
        ]
    }"#;

    #[test]
    fn parses_two_uniform_players() {
        let inst = Instance::from_json(TWO_UNIFORM).unwrap();
        assert_eq!(inst.total(), &Scalar::int(2));
        assert_eq!(inst.n(), 2);
        assert_eq!(Instance::from_json(&inst.to_json()).unwrap(), inst);
    }

    #[test]
    fn normalization_error_names_the_player() {
        let text = TWO_UNIFORM.replace(r#"{"to": "1", "density": "1"}"#, r#"{"to": "1", "density": "3"}"#);
        match Instance::from_json(&text) {
            Err(Error::Normalization { player, total, expected }) => {
                assert_eq!((player, total.as_str(), expected.as_str()), (2, "3", "2"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn quadratic_instance_round_trips() {
        let text = r#"{
            "cake": {"kind": "interval", "length": "1"},
            "scalar": {"kind": "quad", "m": 2},
            "players": [
                {"demand": {"a": "0", "b": "1", "m": 2}, "density": [{"to": "1", "density": "4"}]},
                {"demand": "4-sqrt(2)", "density": [{"to": "1/2", "density": "6"}, {"to": "1", "density": "2"}]}
            ]
        }"#;
        let inst = Instance::from_json(text).unwrap();
        assert_eq!(inst.kind(), ScalarKind::Quad { m: 2 });
        assert_eq!(Instance::from_json(&inst.to_json()).unwrap(), inst);
    }

    #[test]
    fn rectangle_with_grid_measure() {
        let text = r#"{
            "cake": {"kind": "rect", "width": "2", "height": "1"},
            "scalar": {"kind": "rational"},
            "players": [
                {"demand": "1", "grid": {"x": ["1", "2"], "y": ["1"], "density": [["1", "1"]]}},
                {"demand": "1", "density": [{"to": "2", "density": "1"}]}
            ]
        }"#;
        let inst = Instance::from_json(text).unwrap();
        assert_eq!(Instance::from_json(&inst.to_json()).unwrap(), inst);
    }

    #[test]
    fn rejects_schema_violations() {
        assert!(matches!(Instance::from_json("{}"), Err(Error::Schema(_))));
        let text = TWO_UNIFORM.replace("\"demand\": \"1\"", "\"demand\": \"0\"");
        assert!(Instance::from_json(&text).is_err());
    }
}
