mod common;

use cakecut::arith::Scalar;
use cakecut::cake::{measure_cut, measure_eval, Cake, Cell, Knife, KnifeStyle, Measure, Piece, PlayerMeasure};
use common::{integrate, iv, q, random_knife, random_piece};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn measure(weights: &[u8]) -> Measure {
    let n = weights.len() as i64;
    Measure::new(
        weights
            .iter()
            .enumerate()
            .map(|(i, w)| Cell {
                to: q(i as i64 + 1, n),
                density: Scalar::int(i64::from(*w)),
            })
            .collect(),
    )
    .unwrap()
}

#[test]
fn piece_text_round_trip() {
    let p = iv(q(0, 1), q(1, 3)).union(&iv(q(1, 2), q(1, 1)));
    assert_eq!(p.to_string(), "[0,1/3)|[1/2,1)");
    assert_eq!(p.to_string().parse::<Piece>().unwrap(), p);
    assert_eq!("empty".parse::<Piece>().unwrap(), Piece::empty());
}

#[test]
fn adjacent_intervals_merge() {
    let p = iv(q(0, 1), q(1, 2)).union(&iv(q(1, 2), q(1, 1)));
    assert_eq!(p.intervals().len(), 1);
}

#[test]
fn rect_cake_volume() {
    let cake = Cake::rect(q(3, 1), q(2, 1)).unwrap();
    assert_eq!(cake.total_volume(), Scalar::int(6));
    assert_eq!(cake.volume(&iv(q(0, 1), q(1, 1))), Scalar::int(2));
}

proptest! {
    #[test]
    fn set_algebra(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let one = Scalar::one();
        let a = random_piece(&mut rng, &one, 24, 4);
        let b = random_piece(&mut rng, &one, 24, 4);
        prop_assert_eq!(a.union(&b).length() + a.intersect(&b).length(), a.length() + b.length());
        prop_assert!(a.subtract(&b).is_disjoint_from(&b));
        prop_assert_eq!(a.intersect(&b).union(&a.subtract(&b)), a.clone());
        prop_assert!(a.intersect(&b).is_subset_of(&a));
        prop_assert_eq!(a.union(&b), b.union(&a));
    }

    #[test]
    fn knives_have_exact_volume_and_nest(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cake = Cake::interval(q(5, 1)).unwrap();
        let domain = random_piece(&mut rng, &q(5, 1), 40, 3);
        let k = random_knife(&mut rng, &cake, domain.clone());
        let top = k.volume();
        prop_assert_eq!(&top, &domain.length());
        let mut prev = Piece::empty();
        for j in 0..=10 {
            let x = &top * &q(j, 10);
            let p = k.piece(&x).unwrap();
            prop_assert_eq!(p.length(), x);
            prop_assert!(p.is_subset_of(&domain));
            prop_assert!(prev.is_subset_of(&p));
            prev = p;
        }
        prop_assert!(k.piece(&(&top + &q(1, 100))).is_err());
    }

    #[test]
    fn eval_matches_direct_integration(weights in proptest::collection::vec(0u8..9, 1..10), seed in any::<u64>()) {
        prop_assume!(weights.iter().any(|w| *w > 0));
        let m = measure(&weights);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let piece = random_piece(&mut rng, &Scalar::one(), 36, 4);
        let mu = PlayerMeasure::Line(m.clone());
        prop_assert_eq!(measure_eval(&mu, &piece).unwrap(), integrate(m.cells(), &piece));
    }

    #[test]
    fn cut_hits_the_target_and_is_leftmost(weights in proptest::collection::vec(0u8..9, 1..10), seed in any::<u64>(), frac in 0i64..=12) {
        prop_assume!(weights.iter().any(|w| *w > 0));
        let m = measure(&weights);
        let mu = PlayerMeasure::Line(m.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cake = Cake::unit();
        let domain = random_piece(&mut rng, &Scalar::one(), 36, 3);
        let k = random_knife(&mut rng, &cake, domain.clone());
        let whole = integrate(m.cells(), &domain);
        let alpha = &whole * &q(frac, 10);
        match measure_cut(&mu, &k, &alpha).unwrap() {
            None => prop_assert!(alpha > whole),
            Some(x) => {
                prop_assert!(alpha <= whole);
                prop_assert_eq!(integrate(m.cells(), &k.piece(&x).unwrap()), alpha.clone());
                // nothing strictly to the left reaches alpha
                if x.is_positive() {
                    let before = &x - &(&x * &q(1, 1000));
                    prop_assert!(integrate(m.cells(), &k.piece(&before).unwrap()) < alpha);
                }
            }
        }
    }
}

#[test]
fn sweep_knife_on_a_rectangle() {
    let cake = Cake::rect(q(2, 1), q(3, 1)).unwrap();
    let k = KnifeStyle::Sweep(q(3, 1)).on(cake.whole());
    let p = k.piece(&q(3, 1)).unwrap();
    assert_eq!(p, iv(q(0, 1), q(1, 1)));
    assert_eq!(cake.volume(&p), q(3, 1));
    assert!(Knife::prefix(cake.whole()).piece(&q(5, 2)).is_err());
}
