mod common;

use isosplit::isotonic::{
    find_turn_index, fit_downup, fit_monotone, fit_updown, pava_prefix_mse, Direction,
    WeightedSeries,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{monotone_sse_dp, updown_sse_exhaustive};

fn unit(x: &[f64]) -> WeightedSeries {
    WeightedSeries::unit(x.to_vec()).unwrap()
}

fn is_nondecreasing(y: &[f64]) -> bool {
    y.windows(2).all(|p| p[0] <= p[1] + 1e-12)
}

fn is_updown(y: &[f64], turn: usize) -> bool {
    is_nondecreasing(&y[..=turn]) && y[turn..].windows(2).all(|p| p[0] + 1e-12 >= p[1])
}

#[test]
fn monotone_matches_partition_dp_on_all_small_integer_sequences() {
    let mut checked = 0;
    for len in 1..=8u32 {
        for code in 0..5usize.pow(len) {
            let mut c = code;
            let x: Vec<f64> = (0..len)
                .map(|_| {
                    let v = (c % 5) as f64;
                    c /= 5;
                    v
                })
                .collect();
            let fit = fit_monotone(&unit(&x), Direction::Increasing);
            let oracle = monotone_sse_dp(&x, &vec![1.0; x.len()]);
            assert!(
                (fit.sse - oracle).abs() <= 1e-9,
                "{x:?}: pava {} vs dp {oracle}",
                fit.sse
            );
            assert!(is_nondecreasing(&fit.fitted));
            checked += 1;
        }
    }
    assert_eq!(checked, (1..=8).map(|l| 5usize.pow(l)).sum::<usize>());
}

#[test]
fn weighted_monotone_matches_partition_dp() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..2000 {
        let n = rng.random_range(1..=9);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..4.0)).collect();
        let fit = fit_monotone(
            &WeightedSeries::new(x.clone(), w.clone()).unwrap(),
            Direction::Increasing,
        );
        let oracle = monotone_sse_dp(&x, &w);
        assert!((fit.sse - oracle).abs() <= 1e-9 * (1.0 + oracle));
    }
}

#[test]
fn prefix_errors_match_dp_on_every_prefix() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..500 {
        let n = rng.random_range(1..=10);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(0..5) as f64).collect();
        let mu = pava_prefix_mse(&unit(&x));
        for j in 0..n {
            let oracle = monotone_sse_dp(&x[..=j], &vec![1.0; j + 1]);
            assert!((mu[j] - oracle).abs() <= 1e-9, "{x:?} prefix {j}");
        }
    }
}

#[test]
fn updown_matches_exhaustive_turn_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..1000 {
        let n = rng.random_range(1..=12);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let w: Vec<f64> = if trial % 2 == 0 {
            vec![1.0; n]
        } else {
            (0..n).map(|_| rng.random_range(0.2..3.0)).collect()
        };
        let fit = fit_updown(&WeightedSeries::new(x.clone(), w.clone()).unwrap());
        let oracle = updown_sse_exhaustive(&x, &w);
        assert!(
            (fit.sse - oracle).abs() <= 1e-9 * oracle.max(1.0),
            "{x:?}: fit {} vs oracle {oracle}",
            fit.sse
        );
        assert!(is_updown(&fit.fitted, fit.turn_index.unwrap()));
    }
}

#[test]
fn turn_index_examples() {
    assert_eq!(find_turn_index(&unit(&[1.0, 3.0, 2.0])), 1);
    assert_eq!(find_turn_index(&unit(&[1.0, 2.0, 3.0])), 2);
    assert_eq!(find_turn_index(&unit(&[3.0, 2.0, 1.0])), 0);
}

#[test]
fn updown_of_valley_pays_oracle_error() {
    let fit = fit_updown(&unit(&[3.0, 1.0, 1.0, 3.0]));
    let oracle = updown_sse_exhaustive(&[3.0, 1.0, 1.0, 3.0], &[1.0; 4]);
    assert!((fit.sse - oracle).abs() < 1e-12);
    assert!((oracle - 8.0 / 3.0).abs() < 1e-12);
}

fn series() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1usize..40).prop_flat_map(|n| {
        (
            prop::collection::vec(-100.0f64..100.0, n),
            prop::collection::vec(0.01f64..10.0, n),
        )
    })
}

proptest! {
    #[test]
    fn monotone_fit_is_idempotent((x, w) in series()) {
        let s = WeightedSeries::new(x, w.clone()).unwrap();
        let once = fit_monotone(&s, Direction::Increasing);
        let twice = fit_monotone(&WeightedSeries::new(once.fitted.clone(), w).unwrap(), Direction::Increasing);
        for (a, b) in once.fitted.iter().zip(&twice.fitted) {
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
        }
        prop_assert!(twice.sse <= 1e-9 * (1.0 + once.sse));
    }

    #[test]
    fn monotone_fit_preserves_weighted_mean((x, w) in series()) {
        let s = WeightedSeries::new(x.clone(), w.clone()).unwrap();
        let fit = fit_monotone(&s, Direction::Increasing);
        let before: f64 = x.iter().zip(&w).map(|(a, b)| a * b).sum();
        let after: f64 = fit.fitted.iter().zip(&w).map(|(a, b)| a * b).sum();
        prop_assert!((before - after).abs() <= 1e-8 * (1.0 + before.abs()));
        prop_assert!(is_nondecreasing(&fit.fitted));
    }

    #[test]
    fn updown_never_worse_than_either_monotone_fit((x, w) in series()) {
        let s = WeightedSeries::new(x, w).unwrap();
        let ud = fit_updown(&s);
        let inc = fit_monotone(&s, Direction::Increasing);
        let dec = fit_monotone(&s, Direction::Decreasing);
        prop_assert!(ud.sse <= inc.sse.min(dec.sse) + 1e-9 * (1.0 + ud.sse));
        prop_assert!(is_updown(&ud.fitted, ud.turn_index.unwrap()));
    }

    #[test]
    fn downup_mirrors_updown((x, w) in series()) {
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let du = fit_downup(&WeightedSeries::new(x, w.clone()).unwrap());
        let ud = fit_updown(&WeightedSeries::new(neg, w).unwrap());
        prop_assert_eq!(du.turn_index, ud.turn_index);
        for (a, b) in du.fitted.iter().zip(&ud.fitted) {
            prop_assert!((a + b).abs() <= 1e-12 * (1.0 + a.abs()));
        }
    }
}
