//! Weighted isotonic regression: monotone, up-down and down-up least-squares fits.
//!
//! All fits minimise `sum_i w_i (y_i - x_i)^2`. Monotone fits use the pool adjacent
//! violators algorithm. The up-down fit locates its turning index in linear time by
//! running a prefix-error variant of PAVA from both ends.

use crate::error::{Error, Result};

/// Values with strictly positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSeries {
    values: Vec<f64>,
    weights: Vec<f64>,
}

impl WeightedSeries {
    pub fn new(values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("series is empty"));
        }
        if values.len() != weights.len() {
            return Err(Error::invalid(format!(
                "{} values but {} weights",
                values.len(),
                weights.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("value {i} is not finite")));
        }
        if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::invalid(format!(
                "weight {i} must be positive and finite, got {}",
                weights[i]
            )));
        }
        Ok(Self { values, weights })
    }

    /// Series with every weight equal to one.
    pub fn unit(values: Vec<f64>) -> Result<Self> {
        let weights = vec![1.0; values.len()];
        Self::new(values, weights)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Increasing,
    Decreasing,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsotonicFit {
    pub fitted: Vec<f64>,
    /// Zero-based index of the turning point for up-down and down-up fits.
    /// The fit is monotone on `0..=turn` and monotone the other way on `turn..`.
    pub turn_index: Option<usize>,
    /// Weighted sum of squared residuals.
    pub sse: f64,
}

/// Least-squares monotone fit.
pub fn fit_monotone(series: &WeightedSeries, direction: Direction) -> IsotonicFit {
    let fitted = match direction {
        Direction::Increasing => pava(&series.values, &series.weights),
        Direction::Decreasing => negated(&pava(&negated(&series.values), &series.weights)),
    };
    IsotonicFit {
        sse: weighted_sse(&series.values, &series.weights, &fitted),
        fitted,
        turn_index: None,
    }
}

/// Minimal weighted squared error of the best increasing fit to every prefix.
///
/// Entry `j` is the error of the optimal increasing fit to `x[0..=j]`.
pub fn pava_prefix_mse(series: &WeightedSeries) -> Vec<f64> {
    prefix_sse(&series.values, &series.weights)
}

/// Zero-based index at which the optimal up-down fit switches direction.
pub fn find_turn_index(series: &WeightedSeries) -> usize {
    turn_index(&series.values, &series.weights)
}

/// Least-squares fit that increases up to its turn index and decreases after it.
pub fn fit_updown(series: &WeightedSeries) -> IsotonicFit {
    let (fitted, turn) = updown(&series.values, &series.weights);
    IsotonicFit {
        sse: weighted_sse(&series.values, &series.weights, &fitted),
        fitted,
        turn_index: Some(turn),
    }
}

/// Least-squares fit that decreases up to its turn index and increases after it.
pub fn fit_downup(series: &WeightedSeries) -> IsotonicFit {
    let (fitted, turn) = downup(&series.values, &series.weights);
    IsotonicFit {
        sse: weighted_sse(&series.values, &series.weights, &fitted),
        fitted,
        turn_index: Some(turn),
    }
}

/// A pooled run of consecutive inputs.
#[derive(Debug, Clone, Copy)]
struct Block {
    count: usize,
    wcount: f64,
    wsum: f64,
}

impl Block {
    fn mean(&self) -> f64 {
        self.wsum / self.wcount
    }

    /// Absorbs `other`, returning the increase in squared error caused by pooling.
    fn absorb(&mut self, other: Block) -> f64 {
        let gap = self.mean() - other.mean();
        let increase = self.wcount * other.wcount / (self.wcount + other.wcount) * gap * gap;
        self.count += other.count;
        self.wcount += other.wcount;
        self.wsum += other.wsum;
        increase
    }
}

/// Runs PAVA over `x`, calling `on_step(j, sse)` after every input is absorbed.
fn pava_blocks(x: &[f64], w: &[f64], mut on_step: impl FnMut(usize, f64)) -> Vec<Block> {
    let mut blocks: Vec<Block> = Vec::with_capacity(x.len());
    let mut sse = 0.0;
    for (j, (&xj, &wj)) in x.iter().zip(w).enumerate() {
        let mut current = Block {
            count: 1,
            wcount: wj,
            wsum: wj * xj,
        };
        while let Some(prev) = blocks.last_mut() {
            if prev.mean() < current.mean() {
                break;
            }
            sse += prev.absorb(current);
            current = blocks.pop().expect("non-empty");
        }
        blocks.push(current);
        on_step(j, sse);
    }
    blocks
}

pub(crate) fn pava(x: &[f64], w: &[f64]) -> Vec<f64> {
    let blocks = pava_blocks(x, w, |_, _| {});
    let mut fitted = Vec::with_capacity(x.len());
    for b in blocks {
        fitted.extend(std::iter::repeat_n(b.mean(), b.count));
    }
    fitted
}

pub(crate) fn prefix_sse(x: &[f64], w: &[f64]) -> Vec<f64> {
    let mut mu = vec![0.0; x.len()];
    pava_blocks(x, w, |j, sse| mu[j] = sse);
    mu
}

pub(crate) fn turn_index(x: &[f64], w: &[f64]) -> usize {
    let forward = prefix_sse(x, w);
    // a decreasing fit of a suffix is an increasing fit of the reversed suffix
    let rev: Vec<f64> = x.iter().rev().copied().collect();
    let rev_w: Vec<f64> = w.iter().rev().copied().collect();
    let mut backward = prefix_sse(&rev, &rev_w);
    backward.reverse();

    let mut best = 0;
    let mut best_err = f64::INFINITY;
    for (b, (f, r)) in forward.iter().zip(&backward).enumerate() {
        let err = f + r;
        if err < best_err {
            best_err = err;
            best = b;
        }
    }
    best
}

pub(crate) fn updown(x: &[f64], w: &[f64]) -> (Vec<f64>, usize) {
    let b = turn_index(x, w);
    let mut fitted = pava(&x[..=b], &w[..=b]);
    let tail = pava(&negated(&x[b..]), &w[b..]);
    fitted.extend(tail.iter().skip(1).map(|v| -v));
    (fitted, b)
}

pub(crate) fn downup(x: &[f64], w: &[f64]) -> (Vec<f64>, usize) {
    let (fitted, b) = updown(&negated(x), w);
    (negated(&fitted), b)
}

fn negated(x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| -v).collect()
}

pub(crate) fn weighted_sse(x: &[f64], w: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(w)
        .zip(y)
        .map(|((xi, wi), yi)| wi * (yi - xi) * (yi - xi))
        .sum()
}
