mod common;

use isosplit::metrics::{accuracy, confusion, confusion_raw, labeling_accuracy, ConfusionMatrix};
use isosplit::Labeling;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::f_measure;

fn random_matrix(rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let rows = rng.random_range(1..8);
    let cols = rng.random_range(1..8);
    (0..rows)
        .map(|_| {
            let mut r: Vec<usize> = (0..cols).map(|_| rng.random_range(0..50)).collect();
            r[rng.random_range(0..cols)] += 1;
            r
        })
        .collect()
}

fn has_unique_row_maxima(m: &[Vec<usize>]) -> bool {
    m.iter().all(|r| {
        let max = r.iter().max().unwrap();
        r.iter().filter(|v| *v == max).count() == 1
    })
}

#[test]
fn confusion_matches_direct_recount() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let n = rng.random_range(1..300);
        let truth: Vec<usize> = (0..n).map(|_| rng.random_range(1..6)).collect();
        let found: Vec<usize> = (0..n).map(|_| rng.random_range(10..15)).collect();
        let cm = confusion_raw(&truth, &found).unwrap();
        let mut t_vals = truth.clone();
        t_vals.sort_unstable();
        t_vals.dedup();
        let mut f_vals = found.clone();
        f_vals.sort_unstable();
        f_vals.dedup();
        for (i, tv) in t_vals.iter().enumerate() {
            for (j, fv) in f_vals.iter().enumerate() {
                let direct = truth
                    .iter()
                    .zip(&found)
                    .filter(|(a, b)| *a == tv && *b == fv)
                    .count();
                assert_eq!(cm.counts()[i][j], direct);
            }
        }
        assert_eq!(cm.total(), n);
    }
}

#[test]
fn perfect_and_merged_labelings() {
    let truth = Labeling::from_contiguous(vec![1, 1, 2, 2, 2, 3]).unwrap();
    let relabelled = Labeling::remap([7, 7, 3, 3, 3, 5]);
    assert_eq!(labeling_accuracy(&truth, &relabelled).unwrap(), 1.0);
    let pairs = Labeling::from_contiguous(vec![1, 1, 2, 2]).unwrap();
    let merged = Labeling::from_contiguous(vec![1; 4]).unwrap();
    assert_eq!(labeling_accuracy(&pairs, &merged).unwrap(), 0.5);
    assert!(confusion(&pairs, &Labeling::from_contiguous(vec![1; 3]).unwrap()).is_err());
}

#[test]
fn accuracy_is_invariant_to_relabelling_found_clusters() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut checked = 0;
    while checked < 1000 {
        let m = random_matrix(&mut rng);
        // with tied row maxima the smallest-index rule depends on the labelling
        if !has_unique_row_maxima(&m) {
            continue;
        }
        let mut perm: Vec<usize> = (0..m[0].len()).collect();
        perm.shuffle(&mut rng);
        let permuted: Vec<Vec<usize>> = m
            .iter()
            .map(|r| perm.iter().map(|&j| r[j]).collect())
            .collect();
        let a = accuracy(&ConfusionMatrix::from_counts(m).unwrap()).unwrap();
        let b = accuracy(&ConfusionMatrix::from_counts(permuted).unwrap()).unwrap();
        assert!((a - b).abs() < 1e-15);
        checked += 1;
    }
}

#[test]
fn each_term_is_bounded_by_the_f_measure() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1000 {
        let m = random_matrix(&mut rng);
        let k = m.len();
        let a = accuracy(&ConfusionMatrix::from_counts(m.clone()).unwrap()).unwrap();
        let bound: f64 = (0..k)
            .map(|i| {
                let row = &m[i];
                let max = *row.iter().max().unwrap();
                let j = row.iter().position(|v| *v == max).unwrap();
                f_measure(&m, i, j)
            })
            .sum::<f64>()
            / k as f64;
        assert!(a <= bound + 1e-12);
        assert!((0.0..=1.0).contains(&a));
    }
}

#[test]
fn accuracy_is_one_exactly_on_permuted_diagonals() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..200 {
        let k = rng.random_range(1..7);
        let mut perm: Vec<usize> = (0..k).collect();
        perm.shuffle(&mut rng);
        let mut m = vec![vec![0; k]; k];
        for i in 0..k {
            m[i][perm[i]] = rng.random_range(1..30);
        }
        assert_eq!(
            accuracy(&ConfusionMatrix::from_counts(m.clone()).unwrap()).unwrap(),
            1.0
        );
        if k > 1 {
            m[0][perm[1]] += 1;
            assert!(accuracy(&ConfusionMatrix::from_counts(m).unwrap()).unwrap() < 1.0);
        }
    }
}
