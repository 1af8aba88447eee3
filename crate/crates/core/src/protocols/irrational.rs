use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{batch_near_half, Division};
use crate::arith::{Rational, Scalar};
use crate::cake::{KnifeStyle, Piece};
use crate::error::{Error, Result};
use crate::oracle::{Instance, Oracle};

/// Upper limit on the decimal exponent tried when rounding demands up.
const MAX_DIGITS: u32 = 4096;

/// How a decomposition node came about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SubInstanceTag {
    /// The marker kept its piece; the others continue on the rest.
    I1,
    /// The marked piece, shared without the marker.
    I2a,
    /// The rest of the cake with rounded-up rational demands.
    I2bRationalized,
    /// A node whose demands were all rational to begin with.
    Rational,
}

/// One node of the irrational-demand decomposition. Demands are in the
/// node's own units: every player values the node's piece at the sum of the
/// demands (`capacity` for rationalized nodes), after multiplying its true
/// measure by its scale factor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubInstanceSpec {
    pub tag: SubInstanceTag,
    pub piece: Piece,
    pub demands: Vec<(usize, Scalar)>,
    pub scales: Vec<(usize, Scalar)>,
    pub capacity: Scalar,
    /// `capacity − Σ demands` before rounding.
    pub slack: Option<Scalar>,
    /// Integer demands handed to the batch protocol.
    #[serde(serialize_with = "integers_as_text")]
    pub integer_demands: Vec<(usize, BigInt)>,
}

fn integers_as_text<S: serde::Serializer>(v: &[(usize, BigInt)], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|(id, d)| (id, d.to_string())))
}

#[derive(Clone, Debug)]
pub struct IrrationalOutcome {
    pub division: Division,
    pub nodes: Vec<SubInstanceSpec>,
}

impl IrrationalOutcome {
    /// Nodes solved as rational-demand problems.
    pub fn rational_subinstances(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n.tag, SubInstanceTag::I2bRationalized | SubInstanceTag::Rational))
            .count()
    }
}

#[derive(Clone, Debug)]
struct Part {
    id: usize,
    demand: Scalar,
    scale: Scalar,
}

/// Proportional division for demands that may be irrational.
///
/// The player with the smallest demand marks a piece `A` worth its demand;
/// everyone evaluates `A`. If nobody values `A` above the mark, the marker
/// takes `A` and the rest continue without it. Otherwise the highest
/// evaluator shares `A` with the others (without the marker), and the rest of
/// the cake is shared by everyone under adjusted demands that leave a strict
/// slack, which allows rounding them up to rationals. Rational nodes are
/// solved by [`batch_near_half`] after scaling to integers.
pub fn irrational_divide(oracle: &mut Oracle, instance: &Instance, style: &KnifeStyle) -> Result<IrrationalOutcome> {
    let style = instance.cake().knife_style(style);
    let mut parts: Vec<Part> = instance
        .players()
        .iter()
        .map(|p| Part {
            id: p.id,
            demand: p.demand.clone(),
            scale: Scalar::one(),
        })
        .collect();
    let mut piece = instance.cake().whole();
    let mut out = IrrationalOutcome {
        division: Division::new(),
        nodes: Vec::new(),
    };
    for p in instance.players() {
        out.division.give(p.id, Piece::empty());
    }
    loop {
        parts.retain(|p| p.demand.is_positive());
        if parts.len() == 1 {
            out.division.give(parts[0].id, piece);
            return Ok(out);
        }
        let total: Scalar = parts.iter().map(|p| &p.demand).sum();
        if parts.iter().all(|p| p.demand.is_rational()) {
            let demands: Vec<(usize, Rational)> = parts
                .iter()
                .map(|p| (p.id, p.demand.to_rational().expect("rational")))
                .collect();
            let node = solve_rational(oracle, SubInstanceTag::Rational, &piece, &demands, &parts, total, None, &style)?;
            out.division.absorb(node.1);
            out.nodes.push(node.0);
            return Ok(out);
        }
        parts.sort_by(|a, b| a.demand.cmp(&b.demand).then(a.id.cmp(&b.id)));
        let marker = parts[0].clone();
        let knife = style.on(piece.clone());
        let x = oracle
            .cut(marker.id, &knife, &(&marker.demand / &marker.scale))?
            .ok_or_else(|| Error::Protocol(format!("player {} cannot mark its demand", marker.id)))?;
        let a = knife.piece(&x)?;
        let rest = piece.subtract(&a);
        let mut values = Vec::with_capacity(parts.len());
        values.push(marker.demand.clone());
        for p in &parts[1..] {
            values.push(&p.scale * oracle.eval(p.id, &a)?);
        }
        let mut j = 1;
        for i in 2..parts.len() {
            if values[i] > values[j] {
                j = i;
            }
        }
        let d1 = marker.demand.clone();
        let eps = &values[j] - &d1;
        if !eps.is_positive() {
            // case 1: the marker keeps A
            out.division.give(marker.id, a);
            let remaining = &total - &d1;
            let mut next = Vec::with_capacity(parts.len() - 1);
            for (p, v) in parts.iter().zip(&values).skip(1) {
                next.push(Part {
                    id: p.id,
                    demand: p.demand.clone(),
                    scale: &p.scale * &remaining / (&total - v),
                });
            }
            out.nodes.push(node_spec(SubInstanceTag::I1, &rest, &next, remaining, None, Vec::new()));
            parts = next;
            piece = rest;
            continue;
        }

        // I2b: the rest of the cake, everyone, adjusted demands
        let vj = values[j].clone();
        let mut second: Vec<Part> = Vec::with_capacity(parts.len());
        for (i, (p, v)) in parts.iter().zip(&values).enumerate() {
            if i > 0 && *v == total {
                continue;
            }
            let demand = if i == 0 {
                &d1 + &d1 * &d1 / (&total - &d1)
            } else if i == j {
                &p.demand - &d1 * &vj / (&total - &vj)
            } else {
                p.demand.clone()
            };
            if !demand.is_positive() {
                continue;
            }
            second.push(Part {
                id: p.id,
                demand,
                scale: &p.scale * &total / (&total - v),
            });
        }
        let requested: Scalar = second.iter().map(|p| &p.demand).sum();
        let slack = &total - &requested;
        if !slack.is_positive() {
            return Err(Error::Protocol(format!("no slack in the rest-of-cake demands ({slack})")));
        }
        let rounded = round_up_demands(&second.iter().map(|p| p.demand.clone()).collect::<Vec<_>>(), &total)?;
        let demands: Vec<(usize, Rational)> = second.iter().map(|p| p.id).zip(rounded).collect();
        let (spec, div) = solve_rational(
            oracle,
            SubInstanceTag::I2bRationalized,
            &rest,
            &demands,
            &second,
            total.clone(),
            Some(slack),
            &style,
        )?;
        out.division.absorb(div);
        out.nodes.push(spec);

        // I2a: the marked piece, without the marker
        let mut first: Vec<Part> = Vec::with_capacity(parts.len() - 1);
        let mut orphaned = Scalar::zero();
        for (i, (p, v)) in parts.iter().zip(&values).enumerate().skip(1) {
            if v.is_zero() {
                orphaned = orphaned + &p.demand;
                continue;
            }
            let demand = if i == j { &p.demand + &d1 } else { p.demand.clone() };
            first.push(Part {
                id: p.id,
                demand,
                scale: &p.scale * &total / v,
            });
        }
        if let Some(pj) = first.iter_mut().find(|p| p.id == parts[j].id) {
            pj.demand = &pj.demand + &orphaned;
        }
        out.nodes.push(node_spec(SubInstanceTag::I2a, &a, &first, total, None, Vec::new()));
        parts = first;
        piece = a;
    }
}

fn node_spec(
    tag: SubInstanceTag,
    piece: &Piece,
    parts: &[Part],
    capacity: Scalar,
    slack: Option<Scalar>,
    integer_demands: Vec<(usize, BigInt)>,
) -> SubInstanceSpec {
    SubInstanceSpec {
        tag,
        piece: piece.clone(),
        demands: parts.iter().map(|p| (p.id, p.demand.clone())).collect(),
        scales: parts.iter().map(|p| (p.id, p.scale.clone())).collect(),
        capacity,
        slack,
        integer_demands,
    }
}

#[allow(clippy::too_many_arguments)]
fn solve_rational(
    oracle: &mut Oracle,
    tag: SubInstanceTag,
    piece: &Piece,
    demands: &[(usize, Rational)],
    parts: &[Part],
    capacity: Scalar,
    slack: Option<Scalar>,
    style: &KnifeStyle,
) -> Result<(SubInstanceSpec, Division)> {
    let integers = to_integers(demands);
    let division = batch_near_half(oracle, &integers, piece, style)?;
    Ok((node_spec(tag, piece, parts, capacity, slack, integers), division))
}

/// Scales positive rationals by the lcm of their denominators and divides
/// out the common factor; zero entries are dropped.
fn to_integers(demands: &[(usize, Rational)]) -> Vec<(usize, BigInt)> {
    let lcm = demands
        .iter()
        .fold(BigInt::one(), |acc, (_, r)| acc.lcm(r.denom()));
    let mut ints: Vec<(usize, BigInt)> = demands
        .iter()
        .filter(|(_, r)| r.is_positive())
        .map(|(id, r)| (*id, (r * Rational::from_integer(lcm.clone())).to_integer()))
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, (_, d)| acc.gcd(d));
    if g > BigInt::one() {
        for (_, d) in &mut ints {
            *d = &*d / &g;
        }
    }
    ints
}

/// Rounds irrational demands up to rationals while keeping their sum below
/// `capacity`.
///
/// Irrational entries become `⌈d·10^t⌉ / 10^t` for the smallest `t ≥ 1` that
/// leaves the rounded sum strictly below `capacity`; rational entries are
/// returned unchanged. Needs a strict slack to start with unless every entry
/// is already rational.
pub fn round_up_demands(demands: &[Scalar], capacity: &Scalar) -> Result<Vec<Rational>> {
    let sum: Scalar = demands.iter().sum();
    if demands.iter().all(Scalar::is_rational) {
        if sum > *capacity {
            return Err(Error::domain(format!("demands sum to {sum}, above capacity {capacity}")));
        }
        return Ok(demands.iter().map(|d| d.to_rational().expect("rational")).collect());
    }
    if sum >= *capacity {
        return Err(Error::domain(format!(
            "no slack: demands sum to {sum}, capacity is {capacity}"
        )));
    }
    let mut scale = BigInt::one();
    for _ in 1..=MAX_DIGITS {
        scale *= 10;
        let p = Scalar::from_bigint(scale.clone());
        let rounded: Vec<Rational> = demands
            .iter()
            .map(|d| {
                d.to_rational()
                    .unwrap_or_else(|| Rational::new((d * &p).ceil(), scale.clone()))
            })
            .collect();
        let total: Rational = rounded.iter().sum();
        if Scalar::Rational(total) < *capacity {
            return Ok(rounded);
        }
    }
    Err(Error::domain(format!("slack below 10^-{MAX_DIGITS}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::parse_rational;

    fn s(t: &str) -> Scalar {
        t.parse().unwrap()
    }

    fn r(t: &str) -> Rational {
        parse_rational(t).unwrap()
    }

    #[test]
    fn rounding_examples() {
        assert_eq!(round_up_demands(&[s("sqrt(2)")], &s("3/2")).unwrap(), vec![r("71/50")]);
        assert_eq!(
            round_up_demands(&[s("1/3"), s("2")], &s("7/3")).unwrap(),
            vec![r("1/3"), r("2")]
        );
        // sums exactly to the capacity: no slack to round into
        assert!(round_up_demands(&[s("sqrt(2)"), s("21/10-sqrt(2)")], &s("21/10")).is_err());
    }

    #[test]
    fn rounding_respects_every_bound() {
        let demands = [s("sqrt(2)"), s("1/7"), s("3-sqrt(2)")];
        let cap = s("3/1") + s("1/7") + s("1/1000000");
        let out = round_up_demands(&demands, &cap).unwrap();
        let sum: Rational = out.iter().sum();
        assert!(Scalar::Rational(sum) < cap);
        for (d, o) in demands.iter().zip(&out) {
            assert!(Scalar::Rational(o.clone()) >= *d);
        }
        assert_eq!(out[1], r("1/7"));
    }

    #[test]
    fn integer_scaling_divides_out_common_factors() {
        let ints = to_integers(&[(1, r("1/2")), (2, r("3/4")), (3, r("0"))]);
        assert_eq!(ints, vec![(1, BigInt::from(2)), (2, BigInt::from(3))]);
        let ints = to_integers(&[(1, r("4")), (2, r("6"))]);
        assert_eq!(ints, vec![(1, BigInt::from(2)), (2, BigInt::from(3))]);
    }

    use crate::cake::{Cake, Cell, Measure, PlayerMeasure};
    use crate::oracle::ScalarKind;

    fn line(cells: &[(&str, &str)]) -> PlayerMeasure {
        PlayerMeasure::Line(
            Measure::new(
                cells
                    .iter()
                    .map(|(to, rho)| Cell {
                        to: s(to),
                        density: s(rho),
                    })
                    .collect(),
            )
            .unwrap(),
        )
    }

    fn pair(second: PlayerMeasure) -> Instance {
        Instance::new(
            Cake::unit(),
            ScalarKind::Quad { m: 2 },
            vec![(s("sqrt(2)"), line(&[("1", "4")])), (s("4-sqrt(2)"), second)],
        )
        .unwrap()
    }

    fn divide(inst: &Instance) -> (IrrationalOutcome, Oracle) {
        let mut o = Oracle::for_instance(inst);
        let out = irrational_divide(&mut o, inst, &KnifeStyle::Prefix).unwrap();
        out.division.check(inst).unwrap();
        (out, o)
    }

    #[test]
    fn uniform_pair_stops_at_the_first_mark() {
        let inst = pair(line(&[("1", "4")]));
        let (out, _) = divide(&inst);
        assert_eq!(out.rational_subinstances(), 0);
        assert_eq!(out.division.piece(1), Piece::interval(Scalar::zero(), s("1/4*sqrt(2)")));
        assert_eq!(out.division.piece(2), Piece::interval(s("1/4*sqrt(2)"), Scalar::one()));
    }

    #[test]
    fn skewed_pair_builds_a_rationalized_rest() {
        let inst = pair(line(&[("1/2", "6"), ("1", "2")]));
        let (out, _) = divide(&inst);
        assert_eq!(out.rational_subinstances(), 1);
        let rest = out
            .nodes
            .iter()
            .find(|n| n.tag == SubInstanceTag::I2bRationalized)
            .unwrap();
        assert_eq!(rest.demands[0], (1, s("4/7+8/7*sqrt(2)")));
        assert_eq!(rest.demands[1], (2, s("4-sqrt(2)") - s("24/23+9/23*sqrt(2)")));
        let sum = &rest.demands[0].1 + &rest.demands[1].1;
        assert!(sum < Scalar::int(4));
        assert_eq!(rest.slack, Some(Scalar::int(4) - sum));
    }

    #[test]
    fn degenerate_chain_uses_no_rational_nodes() {
        let uniform = || line(&[("1", "6")]);
        let inst = Instance::new(
            Cake::unit(),
            ScalarKind::Quad { m: 2 },
            vec![
                (s("sqrt(2)"), uniform()),
                (s("3/2"), uniform()),
                (s("9/2-sqrt(2)"), uniform()),
            ],
        )
        .unwrap();
        let (out, _) = divide(&inst);
        assert_eq!(out.rational_subinstances(), 0);
        assert_eq!(out.nodes.iter().filter(|n| n.tag == SubInstanceTag::I1).count(), 2);
    }
}

