//! The pairwise split/merge clustering loop.
//!
//! Starting from a k-means over-segmentation, the closest pair of clusters that
//! has not been tried yet is projected onto a line, the 1D projection is tested
//! for unimodality, and the pair is either merged (unimodal) or its points are
//! redistributed at the detected cut point. The loop stops once every remaining
//! pair has been tried in its current form.

use std::collections::HashSet;
use std::hash::{DefaultHasher, Hash, Hasher};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::{DataMatrix, Labeling};
use crate::dip1d::{self, SplitDecision};
use crate::error::{Error, Result};
use crate::init::{self, sq_dist};

/// Relative ridge added to the pooled covariance before whitening.
const WHITEN_RIDGE: f64 = 1e-6;

/// Attempts allowed per squared initial cluster count before the loop gives up.
const ITERATIONS_PER_PAIR: usize = 500;

#[derive(Debug, Clone, PartialEq)]
pub struct IsosplitParams {
    /// Rejection constant of the 1D test (threshold `alpha / sqrt(k)`).
    pub alpha: f64,
    /// Number of clusters in the initial over-segmentation.
    pub k_initial: usize,
    /// Project along the whitened centroid difference rather than the raw one.
    pub whiten: bool,
    /// Jitter added to tied projections, relative to their spread.
    pub jitter_scale: f64,
    pub seed: u64,
}

impl Default for IsosplitParams {
    fn default() -> Self {
        Self {
            alpha: dip1d::DEFAULT_ALPHA,
            k_initial: 20,
            whiten: true,
            jitter_scale: 1e-9,
            seed: 0,
        }
    }
}

impl IsosplitParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::invalid(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        if self.k_initial == 0 {
            return Err(Error::invalid("k_initial must be at least 1"));
        }
        if !(self.jitter_scale.is_finite() && self.jitter_scale > 0.0) {
            return Err(Error::invalid("jitter_scale must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsosplitOutput {
    pub labels: Labeling,
    /// Pair attempts performed.
    pub iterations: usize,
    /// Set when the loop was cut off by the iteration cap instead of converging.
    pub hit_iteration_cap: bool,
}

/// Clusters `data`, returning contiguous labels `1..=K`.
pub fn isosplit(data: &DataMatrix, params: &IsosplitParams) -> Result<Labeling> {
    isosplit_detailed(data, params).map(|out| out.labels)
}

pub fn isosplit_detailed(data: &DataMatrix, params: &IsosplitParams) -> Result<IsosplitOutput> {
    params.validate()?;
    if data.n() == 0 {
        return Err(Error::invalid("cannot cluster an empty data set"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let k_initial = params.k_initial.min(data.n());
    let initial = init::initialize_labels(data, k_initial, &mut rng)?;
    let mut state = ClusterState::new(data, &initial);

    let cap = ITERATIONS_PER_PAIR * k_initial * k_initial;
    let mut iterations = 0;
    let mut hit_iteration_cap = false;
    while let Some((k1, k2)) = state.find_closest_pair() {
        if iterations >= cap {
            log::warn!(
                "clustering stopped after {iterations} pair attempts without converging \
                 ({} clusters remain)",
                state.num_clusters()
            );
            hit_iteration_cap = true;
            break;
        }
        state.attempt_pair(k1, k2, params, &mut rng)?;
        iterations += 1;
    }
    Ok(IsosplitOutput {
        labels: state.labeling(),
        iterations,
        hit_iteration_cap,
    })
}

/// Result of testing one cluster pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairOutcome {
    Merged,
    Redistributed {
        moved: usize,
    },
    /// The cut point reproduced the current partition.
    Unchanged,
}

#[derive(Debug, Clone)]
struct Cluster {
    /// Sorted point indices.
    members: Vec<usize>,
    centroid: Vec<f64>,
    signature: u64,
}

impl Cluster {
    fn new(data: &DataMatrix, members: Vec<usize>) -> Self {
        let mut centroid = vec![0.0; data.p()];
        for &i in &members {
            for (c, v) in centroid.iter_mut().zip(data.row(i)) {
                *c += v;
            }
        }
        let inv = 1.0 / members.len() as f64;
        for c in &mut centroid {
            *c *= inv;
        }
        let mut hasher = DefaultHasher::new();
        members.hash(&mut hasher);
        Self {
            signature: hasher.finish(),
            members,
            centroid,
        }
    }
}

/// Labels, centroids and the record of attempted pairs.
///
/// A pair is identified by the membership hashes of its two clusters, so a
/// record goes stale as soon as either cluster changes.
#[derive(Debug, Clone)]
pub struct ClusterState<'a> {
    data: &'a DataMatrix,
    clusters: Vec<Option<Cluster>>,
    attempted: HashSet<(u64, u64)>,
}

impl<'a> ClusterState<'a> {
    pub fn new(data: &'a DataMatrix, labels: &Labeling) -> Self {
        assert_eq!(labels.len(), data.n(), "one label per observation");
        let mut members = vec![Vec::new(); labels.num_clusters()];
        for (i, &l) in labels.as_slice().iter().enumerate() {
            members[l - 1].push(i);
        }
        let clusters = members
            .into_iter()
            .map(|m| (!m.is_empty()).then(|| Cluster::new(data, m)))
            .collect();
        Self {
            data,
            clusters,
            attempted: HashSet::new(),
        }
    }

    pub fn num_clusters(&self) -> usize {
        self.clusters.iter().flatten().count()
    }

    /// Cluster slot ids currently in use.
    pub fn active(&self) -> Vec<usize> {
        (0..self.clusters.len())
            .filter(|&k| self.clusters[k].is_some())
            .collect()
    }

    pub fn members(&self, k: usize) -> &[usize] {
        &self.cluster(k).members
    }

    pub fn centroid(&self, k: usize) -> &[f64] {
        &self.cluster(k).centroid
    }

    fn cluster(&self, k: usize) -> &Cluster {
        self.clusters[k].as_ref().expect("active cluster")
    }

    fn pair_key(&self, k1: usize, k2: usize) -> (u64, u64) {
        let (a, b) = (self.cluster(k1).signature, self.cluster(k2).signature);
        (a.min(b), a.max(b))
    }

    pub fn was_attempted(&self, k1: usize, k2: usize) -> bool {
        self.attempted.contains(&self.pair_key(k1, k2))
    }

    /// The untried pair with the closest centroids, lower slot id first.
    pub fn find_closest_pair(&self) -> Option<(usize, usize)> {
        let active = self.active();
        let mut best: Option<((usize, usize), f64)> = None;
        for (i, &a) in active.iter().enumerate() {
            for &b in &active[i + 1..] {
                if self.was_attempted(a, b) {
                    continue;
                }
                let d = sq_dist(self.centroid(a), self.centroid(b));
                if best.is_none_or(|(_, bd)| d < bd) {
                    best = Some(((a, b), d));
                }
            }
        }
        best.map(|(pair, _)| pair)
    }

    /// Tests the pair `(k1, k2)` and merges or redistributes it.
    ///
    /// Points projecting at or below the cut point go to `k1`, the rest to `k2`.
    /// A merge keeps `k1`.
    pub fn attempt_pair<R: Rng + ?Sized>(
        &mut self,
        k1: usize,
        k2: usize,
        params: &IsosplitParams,
        rng: &mut R,
    ) -> Result<PairOutcome> {
        if k1 == k2
            || self.clusters.get(k1).is_none_or(Option::is_none)
            || self.clusters.get(k2).is_none_or(Option::is_none)
        {
            return Err(Error::invalid(format!(
                "({k1}, {k2}) is not a pair of active clusters"
            )));
        }
        let key = self.pair_key(k1, k2);
        let s1 = &self.cluster(k1).members;
        let s2 = &self.cluster(k2).members;
        let direction = projection_direction(self.data, s1, s2, params.whiten)?;
        let union = merge_sorted(s1, s2);
        let mut values = project(&direction, self.data, &union);
        let order = strictly_ordered(&mut values, params.jitter_scale, rng);
        let sorted: Vec<f64> = order.iter().map(|&i| values[i]).collect();

        let decision = dip1d::split_sorted(&sorted, params.alpha);
        self.attempted.insert(key);

        let (left, right) = match decision {
            SplitDecision::Unimodal { .. } => (union, Vec::new()),
            SplitDecision::Split { cut_point, .. } => {
                let (mut left, mut right) = (Vec::new(), Vec::new());
                for (&i, &v) in union.iter().zip(&values) {
                    if v <= cut_point {
                        left.push(i);
                    } else {
                        right.push(i);
                    }
                }
                (left, right)
            }
        };
        if right.is_empty() || left.is_empty() {
            let merged = if right.is_empty() { left } else { right };
            self.clusters[k1] = Some(Cluster::new(self.data, merged));
            self.clusters[k2] = None;
            return Ok(PairOutcome::Merged);
        }
        if left == self.cluster(k1).members {
            return Ok(PairOutcome::Unchanged);
        }
        let moved = left
            .iter()
            .filter(|i| self.cluster(k1).members.binary_search(i).is_err())
            .count()
            + right
                .iter()
                .filter(|i| self.cluster(k2).members.binary_search(i).is_err())
                .count();
        self.clusters[k1] = Some(Cluster::new(self.data, left));
        self.clusters[k2] = Some(Cluster::new(self.data, right));
        Ok(PairOutcome::Redistributed { moved })
    }

    /// Current labels, renumbered `1..=K` by first appearance.
    pub fn labeling(&self) -> Labeling {
        let mut raw = vec![0; self.data.n()];
        for (k, c) in self.clusters.iter().enumerate() {
            if let Some(c) = c {
                for &i in &c.members {
                    raw[i] = k;
                }
            }
        }
        Labeling::remap(raw)
    }
}

/// Unit vector along which the pair is tested.
///
/// Without whitening this is the centroid difference `mu2 - mu1`. With
/// whitening it is `Sigma^-1 (mu2 - mu1)` for the pooled within-cluster
/// covariance `Sigma`, ridge-regularised by `1e-6 * trace / p`. Coincident
/// centroids fall back to the leading principal axis of `Sigma`, then to the
/// first coordinate axis.
pub fn projection_direction(
    data: &DataMatrix,
    s1: &[usize],
    s2: &[usize],
    whiten: bool,
) -> Result<Vec<f64>> {
    if s1.is_empty() || s2.is_empty() {
        return Err(Error::invalid("both index sets must be non-empty"));
    }
    let p = data.p();
    let mu1 = mean(data, s1);
    let mu2 = mean(data, s2);
    let diff = DVector::from_iterator(p, mu2.iter().zip(&mu1).map(|(a, b)| a - b));

    let needs_cov = whiten || diff.norm() == 0.0;
    let cov = needs_cov.then(|| pooled_covariance(data, s1, &mu1, s2, &mu2));

    let mut v = if diff.norm() == 0.0 {
        principal_axis(cov.as_ref().expect("computed"))
    } else if let Some(cov) = cov.filter(|_| whiten) {
        whitened(cov, &diff).unwrap_or_else(|| diff.clone())
    } else {
        diff
    };
    let norm = v.norm();
    if !(norm.is_finite() && norm > 0.0) {
        v = DVector::zeros(p);
        v[0] = 1.0;
    } else {
        v /= norm;
    }
    Ok(v.iter().copied().collect())
}

/// Inner products of `direction` with the rows listed in `indices`.
pub fn project(direction: &[f64], data: &DataMatrix, indices: &[usize]) -> Vec<f64> {
    indices
        .iter()
        .map(|&i| data.row(i).iter().zip(direction).map(|(x, v)| x * v).sum())
        .collect()
}

fn mean(data: &DataMatrix, idx: &[usize]) -> Vec<f64> {
    let mut m = vec![0.0; data.p()];
    for &i in idx {
        for (a, v) in m.iter_mut().zip(data.row(i)) {
            *a += v;
        }
    }
    for a in &mut m {
        *a /= idx.len() as f64;
    }
    m
}

fn pooled_covariance(
    data: &DataMatrix,
    s1: &[usize],
    mu1: &[f64],
    s2: &[usize],
    mu2: &[f64],
) -> DMatrix<f64> {
    let p = data.p();
    let mut cov = DMatrix::zeros(p, p);
    let mut centered = vec![0.0; p];
    for (set, mu) in [(s1, mu1), (s2, mu2)] {
        for &i in set {
            for ((c, x), m) in centered.iter_mut().zip(data.row(i)).zip(mu) {
                *c = x - m;
            }
            for a in 0..p {
                for b in 0..=a {
                    cov[(a, b)] += centered[a] * centered[b];
                }
            }
        }
    }
    let total = (s1.len() + s2.len()) as f64;
    for a in 0..p {
        for b in 0..=a {
            let v = cov[(a, b)] / total;
            cov[(a, b)] = v;
            cov[(b, a)] = v;
        }
    }
    cov
}

fn whitened(mut cov: DMatrix<f64>, diff: &DVector<f64>) -> Option<DVector<f64>> {
    let p = cov.nrows();
    let ridge = WHITEN_RIDGE * cov.trace() / p as f64;
    if !(ridge > 0.0) {
        return None;
    }
    for a in 0..p {
        cov[(a, a)] += ridge;
    }
    cov.cholesky().map(|c| c.solve(diff))
}

fn principal_axis(cov: &DMatrix<f64>) -> DVector<f64> {
    let eig = SymmetricEigen::new(cov.clone());
    let (k, &lambda) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("p >= 1");
    if lambda > 0.0 {
        eig.eigenvectors.column(k).into_owned()
    } else {
        DVector::zeros(cov.nrows())
    }
}

fn merge_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Returns the permutation sorting `values`, jittering them in place until no
/// two are equal.
fn strictly_ordered<R: Rng + ?Sized>(
    values: &mut [f64],
    jitter_scale: f64,
    rng: &mut R,
) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    let mut scale = jitter_scale;
    loop {
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        if order.windows(2).all(|w| values[w[0]] < values[w[1]]) {
            return order;
        }
        let (lo, hi) = (values[order[0]], values[order[values.len() - 1]]);
        let spread = if hi > lo { hi - lo } else { lo.abs().max(1.0) };
        for v in values.iter_mut() {
            *v += (2.0 * rng.random::<f64>() - 1.0) * scale * spread;
        }
        scale *= 10.0;
    }
}
