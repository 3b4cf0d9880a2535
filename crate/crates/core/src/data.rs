//! Point matrices and cluster labelings.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// `n` observations in `p` dimensions stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    n: usize,
    p: usize,
    values: Vec<f64>,
}

impl DataMatrix {
    /// Builds a matrix from row-major values. Every entry must be finite.
    pub fn new(n: usize, p: usize, values: Vec<f64>) -> Result<Self> {
        if p == 0 {
            return Err(Error::invalid("dimension p must be at least 1"));
        }
        if values.len() != n * p {
            return Err(Error::invalid(format!(
                "expected {} values for a {n}x{p} matrix, got {}",
                n * p,
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite entry at row {}, column {}",
                pos / p,
                pos % p
            )));
        }
        Ok(Self { n, p, values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let p = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != p) {
            return Err(Error::invalid(format!(
                "row {i} has {} columns, expected {p}",
                rows[i].len()
            )));
        }
        Self::new(rows.len(), p, rows.concat())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.p..(i + 1) * self.p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.p)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// Applies `f` to every row, producing a matrix with `p_out` columns.
    pub fn map_rows(&self, p_out: usize, mut f: impl FnMut(&[f64], &mut [f64])) -> Result<Self> {
        let mut out = vec![0.0; self.n * p_out];
        for (src, dst) in self.rows().zip(out.chunks_exact_mut(p_out)) {
            f(src, dst);
        }
        Self::new(self.n, p_out, out)
    }
}

/// One cluster label per observation, using contiguous labels `1..=K`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Labeling(Vec<usize>);

impl Labeling {
    /// Relabels arbitrary identifiers to `1..=K` in order of first appearance.
    pub fn remap<I: IntoIterator<Item = usize>>(raw: I) -> Self {
        let mut map = HashMap::new();
        let labels = raw
            .into_iter()
            .map(|l| {
                let next = map.len() + 1;
                *map.entry(l).or_insert(next)
            })
            .collect();
        Labeling(labels)
    }

    /// Wraps labels that are already contiguous `1..=K` with every label used.
    pub fn from_contiguous(labels: Vec<usize>) -> Result<Self> {
        let k = labels.iter().copied().max().unwrap_or(0);
        let mut used = vec![false; k + 1];
        for &l in &labels {
            if l == 0 {
                return Err(Error::invalid("labels must be 1-based"));
            }
            used[l] = true;
        }
        if used[1..].iter().any(|u| !u) {
            return Err(Error::invalid("labels are not contiguous"));
        }
        Ok(Labeling(labels))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of distinct clusters.
    pub fn num_clusters(&self) -> usize {
        self.0.iter().copied().max().unwrap_or(0)
    }

    /// Cluster sizes indexed by `label - 1`.
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_clusters()];
        for &l in &self.0 {
            sizes[l - 1] += 1;
        }
        sizes
    }
}
