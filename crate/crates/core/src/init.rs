//! k-means++ seeding and Lloyd refinement.
//!
//! Used to over-segment the data before the split/merge loop, and as the
//! true-K baseline in benchmarks.

use rand::Rng;

use crate::data::{DataMatrix, Labeling};
use crate::error::{Error, Result};

/// Iteration budget for Lloyd refinement during initialisation.
pub const INIT_MAX_ITER: usize = 100;

/// Cluster centres, one row per centre.
#[derive(Debug, Clone, PartialEq)]
pub struct Centroids {
    p: usize,
    centers: Vec<f64>,
}

impl Centroids {
    pub fn new(centers: Vec<Vec<f64>>) -> Result<Self> {
        let p = centers.first().map_or(0, Vec::len);
        if p == 0 {
            return Err(Error::invalid("at least one non-empty centre is required"));
        }
        if centers.iter().any(|c| c.len() != p) {
            return Err(Error::invalid("centres have differing dimensions"));
        }
        if centers.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::invalid("centre coordinates must be finite"));
        }
        Ok(Self {
            p,
            centers: centers.concat(),
        })
    }

    pub fn len(&self) -> usize {
        self.centers.len() / self.p
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn center(&self, k: usize) -> &[f64] {
        &self.centers[k * self.p..(k + 1) * self.p]
    }

    fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.centers.chunks_exact(self.p)
    }

    /// Index of the closest centre and the squared distance to it.
    fn nearest(&self, x: &[f64]) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for (k, c) in self.iter().enumerate() {
            let d = sq_dist(x, c);
            if d < best.1 {
                best = (k, d);
            }
        }
        best
    }
}

/// Outcome of a Lloyd run. Label `k` belongs to centroid `k - 1`.
#[derive(Debug, Clone)]
pub struct LloydFit {
    pub labels: Labeling,
    pub centroids: Centroids,
    /// Sum of squared distances to the assigned centroid after each update.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
}

impl LloydFit {
    pub fn inertia(&self) -> f64 {
        self.objective_trace.last().copied().unwrap_or(0.0)
    }
}

/// D²-weighted seeding: the first centre is uniform over the points, each later
/// centre is drawn with probability proportional to the squared distance to the
/// nearest centre already chosen.
pub fn kmeanspp_seed<R: Rng + ?Sized>(
    data: &DataMatrix,
    k: usize,
    rng: &mut R,
) -> Result<Centroids> {
    let n = data.n();
    if k == 0 || k > n {
        return Err(Error::invalid(format!(
            "number of centres must be in 1..={n}, got {k}"
        )));
    }
    let mut chosen = Vec::with_capacity(k);
    let mut is_chosen = vec![false; n];
    let first = rng.random_range(0..n);
    chosen.push(first);
    is_chosen[first] = true;

    let mut d2: Vec<f64> = data.rows().map(|x| sq_dist(x, data.row(first))).collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, w) in d2.iter().enumerate() {
                acc += w;
                if *w > 0.0 && acc > target {
                    pick = Some(i);
                    break;
                }
            }
            // rounding can leave `target` just above the final partial sum
            pick.unwrap_or_else(|| d2.iter().rposition(|w| *w > 0.0).expect("positive total"))
        } else {
            // every remaining point coincides with a centre
            let free: Vec<usize> = (0..n).filter(|i| !is_chosen[*i]).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen.push(next);
        is_chosen[next] = true;
        let c = data.row(next);
        for (x, d) in data.rows().zip(d2.iter_mut()) {
            *d = d.min(sq_dist(x, c));
        }
    }
    Centroids::new(chosen.iter().map(|&i| data.row(i).to_vec()).collect())
}

/// Lloyd refinement from `init`, returning compacted labels.
pub fn lloyd(data: &DataMatrix, init: &Centroids, max_iter: usize) -> Labeling {
    lloyd_fit(data, init, max_iter).labels
}

/// Lloyd refinement with its objective history.
///
/// Alternates nearest-centre assignment and centroid recomputation until the
/// assignment is stable or `max_iter` updates have run. Centres that lose all
/// their points are dropped.
pub fn lloyd_fit(data: &DataMatrix, init: &Centroids, max_iter: usize) -> LloydFit {
    let p = data.p();
    let mut centroids = init.clone();
    let mut assignment = vec![usize::MAX; data.n()];
    let mut trace = Vec::new();
    let mut iterations = 0;

    loop {
        let mut changed = false;
        for (x, a) in data.rows().zip(assignment.iter_mut()) {
            let (k, _) = centroids.nearest(x);
            if *a != k {
                *a = k;
                changed = true;
            }
        }
        if !changed || iterations >= max_iter.max(1) {
            break;
        }
        iterations += 1;

        let k = centroids.len();
        let mut sums = vec![0.0; k * p];
        let mut counts = vec![0usize; k];
        for (x, &a) in data.rows().zip(&assignment) {
            counts[a] += 1;
            for (s, v) in sums[a * p..(a + 1) * p].iter_mut().zip(x) {
                *s += v;
            }
        }
        let mut remap = vec![usize::MAX; k];
        let mut centers = Vec::with_capacity(k * p);
        for c in 0..k {
            if counts[c] > 0 {
                remap[c] = centers.len() / p;
                centers.extend(
                    sums[c * p..(c + 1) * p]
                        .iter()
                        .map(|s| s / counts[c] as f64),
                );
            }
        }
        for a in &mut assignment {
            *a = remap[*a];
        }
        centroids = Centroids { p, centers };
        trace.push(
            data.rows()
                .zip(&assignment)
                .map(|(x, &a)| sq_dist(x, centroids.center(a)))
                .sum(),
        );
    }

    // the final assignment may leave a centre unused when the budget runs out
    let mut used = vec![false; centroids.len()];
    for &a in &assignment {
        used[a] = true;
    }
    let mut remap = vec![0; centroids.len()];
    let mut centers = Vec::new();
    for (c, _) in used.iter().enumerate().filter(|(_, u)| **u) {
        remap[c] = centers.len() / p + 1;
        centers.extend_from_slice(centroids.center(c));
    }
    let centroids = Centroids { p, centers };
    let labels: Vec<usize> = assignment.iter().map(|&a| remap[a]).collect();
    if trace.is_empty() {
        trace.push(
            data.rows()
                .zip(&labels)
                .map(|(x, &l)| sq_dist(x, centroids.center(l - 1)))
                .sum(),
        );
    }
    LloydFit {
        labels: Labeling::from_contiguous(labels).expect("compacted labels"),
        centroids,
        objective_trace: trace,
        iterations,
    }
}

/// Over-segmentation used to start the split/merge loop: one k-means++ seeding
/// followed by Lloyd refinement. At most `k_initial` clusters, all non-empty.
pub fn initialize_labels<R: Rng + ?Sized>(
    data: &DataMatrix,
    k_initial: usize,
    rng: &mut R,
) -> Result<Labeling> {
    let seeds = kmeanspp_seed(data, k_initial, rng)?;
    Ok(lloyd(data, &seeds, INIT_MAX_ITER))
}

/// Best-of-`restarts` k-means++ (lowest inertia), the true-K baseline.
pub fn kmeans_restarts<R: Rng + ?Sized>(
    data: &DataMatrix,
    k: usize,
    restarts: usize,
    max_iter: usize,
    rng: &mut R,
) -> Result<LloydFit> {
    let mut best: Option<LloydFit> = None;
    for _ in 0..restarts.max(1) {
        let seeds = kmeanspp_seed(data, k, rng)?;
        let fit = lloyd_fit(data, &seeds, max_iter);
        if best.as_ref().is_none_or(|b| fit.inertia() < b.inertia()) {
            best = Some(fit);
        }
    }
    Ok(best.expect("at least one restart"))
}

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
