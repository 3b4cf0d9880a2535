//! Brute-force reference implementations shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

/// Weighted squared error of fitting `x[i..j]` by its weighted mean, and that mean.
fn block(x: &[f64], w: &[f64], i: usize, j: usize) -> (f64, f64) {
    let wsum: f64 = w[i..j].iter().sum();
    let mean = x[i..j]
        .iter()
        .zip(&w[i..j])
        .map(|(a, b)| a * b)
        .sum::<f64>()
        / wsum;
    let sse = x[i..j]
        .iter()
        .zip(&w[i..j])
        .map(|(a, b)| b * (a - mean) * (a - mean))
        .sum();
    (sse, mean)
}

/// Optimal nondecreasing fit error by dynamic programming over block partitions.
///
/// `best[j][i]` is the least error over partitions of `x[..j]` whose last block
/// is `x[i..j]`, subject to nondecreasing block means.
pub fn monotone_sse_dp(x: &[f64], w: &[f64]) -> f64 {
    let n = x.len();
    if n == 0 {
        return 0.0;
    }
    let mut stats = vec![vec![(0.0, 0.0); n + 1]; n + 1];
    for i in 0..n {
        for j in i + 1..=n {
            stats[i][j] = block(x, w, i, j);
        }
    }
    let mut best = vec![vec![f64::INFINITY; n]; n + 1];
    for j in 1..=n {
        for i in 0..j {
            let (sse, mean) = stats[i][j];
            let prev = if i == 0 {
                0.0
            } else {
                (0..i)
                    .filter(|&h| stats[h][i].1 <= mean + 1e-12)
                    .map(|h| best[i][h])
                    .fold(f64::INFINITY, f64::min)
            };
            best[j][i] = prev + sse;
        }
    }
    best[n].iter().copied().fold(f64::INFINITY, f64::min)
}

/// Optimal increasing-then-decreasing fit error: every split into a
/// nondecreasing prefix and a nonincreasing suffix.
pub fn updown_sse_exhaustive(x: &[f64], w: &[f64]) -> f64 {
    let neg: Vec<f64> = x.iter().map(|v| -v).collect();
    (0..=x.len())
        .map(|m| monotone_sse_dp(&x[..m], &w[..m]) + monotone_sse_dp(&neg[m..], &w[m..]))
        .fold(f64::INFINITY, f64::min)
}

/// Whether the `z0` ellipsoids around `(c1, s1)` and `(c2, s2)` share a point,
/// judged by sampling `samples` boundary points of each and testing them, and
/// both centres, for containment in the other.
pub fn ellipsoids_meet_by_sampling(
    c1: &DVector<f64>,
    s1: &DMatrix<f64>,
    c2: &DVector<f64>,
    s2: &DMatrix<f64>,
    z0: f64,
    samples: usize,
    directions: &mut dyn FnMut() -> DVector<f64>,
) -> bool {
    let inv1 = s1.clone().try_inverse().expect("invertible");
    let inv2 = s2.clone().try_inverse().expect("invertible");
    let inside = |c: &DVector<f64>, inv: &DMatrix<f64>, x: &DVector<f64>| {
        let d = x - c;
        d.dot(&(inv * &d)) <= z0 * z0
    };
    if inside(c2, &inv2, c1) || inside(c1, &inv1, c2) {
        return true;
    }
    let l1 = s1.clone().cholesky().expect("spd").l();
    let l2 = s2.clone().cholesky().expect("spd").l();
    for _ in 0..samples {
        let u = directions();
        if inside(c2, &inv2, &(c1 + &l1 * &u * z0)) || inside(c1, &inv1, &(c2 + &l2 * &u * z0)) {
            return true;
        }
    }
    false
}

/// Contact function of two ellipsoids: the solids are disjoint iff its maximum
/// over `lambda` in [0, 1] exceeds `z0^2`.
pub fn contact_max(
    c1: &DVector<f64>,
    s1: &DMatrix<f64>,
    c2: &DVector<f64>,
    s2: &DMatrix<f64>,
) -> f64 {
    let d = c2 - c1;
    let f = |l: f64| {
        let m = s1 * (1.0 - l) + s2 * l;
        let inv = m.try_inverse().expect("invertible");
        l * (1.0 - l) * d.dot(&(inv * &d))
    };
    // the function is concave in lambda; golden-section search
    let (mut a, mut b) = (0.0f64, 1.0f64);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let m1 = b - g * (b - a);
        let m2 = a + g * (b - a);
        if f(m1) < f(m2) {
            a = m1;
        } else {
            b = m2;
        }
    }
    f(0.5 * (a + b))
}

/// F-measure of true class `i` against found cluster `j`.
pub fn f_measure(counts: &[Vec<usize>], i: usize, j: usize) -> f64 {
    let hits = counts[i][j] as f64;
    let row: usize = counts[i].iter().sum();
    let col: usize = counts.iter().map(|r| r[j]).sum();
    if hits == 0.0 {
        return 0.0;
    }
    let (p, r) = (hits / col as f64, hits / row as f64);
    2.0 * p * r / (p + r)
}
