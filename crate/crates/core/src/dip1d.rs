//! One-dimensional unimodality test and cut-point selection.
//!
//! The spacings between adjacent sorted samples are proportional to reciprocal
//! density. A down-up isotonic fit of the spacings gives the closest unimodal
//! density, whose CDF is compared with the empirical CDF (Kolmogorov-Smirnov
//! distance). When unimodality is rejected, the spacings are normalised by the
//! unimodal fit and the cut point is placed at the peak of an up-down fit to the
//! normalised spacings, i.e. at the deepest density dip.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::isotonic;

/// Default rejection constant: a segment of `k` points is bimodal when its dip
/// exceeds `DEFAULT_ALPHA / sqrt(k)`.
pub const DEFAULT_ALPHA: f64 = 1.2;

/// Smallest segment size of the multi-scale test.
const MIN_SEGMENT: usize = 4;

/// Fitted spacings are clamped below at this fraction of the sample range.
const SPACING_FLOOR: f64 = 1e-12;

/// Strictly increasing finite values.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedSample(Vec<f64>);

impl SortedSample {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("sample is empty"));
        }
        if let Some(i) = points.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("point {i} is not finite")));
        }
        if let Some(i) = points.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::invalid(format!(
                "points must be strictly increasing (index {} -> {})",
                i,
                i + 1
            )));
        }
        Ok(Self(points))
    }

    /// Sorts `points`, failing if any value repeats.
    pub fn from_unsorted(mut points: Vec<f64>) -> Result<Self> {
        points.sort_by(f64::total_cmp);
        Self::new(points)
    }

    pub fn points(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn require_pair(&self) -> Result<&[f64]> {
        if self.0.len() < 2 {
            return Err(Error::invalid("at least two points are required"));
        }
        Ok(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnimodalFit {
    /// Down-up fit of the adjacent spacings, clamped to a positive floor.
    pub fitted_spacings: Vec<f64>,
    /// Unimodal CDF evaluated at every sample point.
    pub cdf: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutPoint {
    pub value: f64,
    /// Zero-based spacing index: the cut lies between points `index` and `index + 1`.
    pub index: usize,
    /// Set when the normalised spacings carry no peak and the middle gap was used.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SplitDecision {
    Unimodal {
        dip_score: f64,
    },
    Split {
        cut_point: f64,
        dip_score: f64,
        /// Index range of the segment whose test rejected unimodality.
        segment: Range<usize>,
    },
}

impl SplitDecision {
    pub fn is_split(&self) -> bool {
        matches!(self, SplitDecision::Split { .. })
    }

    pub fn cut_point(&self) -> Option<f64> {
        match self {
            SplitDecision::Split { cut_point, .. } => Some(*cut_point),
            SplitDecision::Unimodal { .. } => None,
        }
    }

    pub fn dip_score(&self) -> f64 {
        match self {
            SplitDecision::Split { dip_score, .. } | SplitDecision::Unimodal { dip_score } => {
                *dip_score
            }
        }
    }
}

pub fn adjacent_spacings(sample: &SortedSample) -> Result<Vec<f64>> {
    Ok(spacings(sample.require_pair()?))
}

pub fn unimodal_fit(sample: &SortedSample) -> Result<UnimodalFit> {
    let x = sample.require_pair()?;
    let s = spacings(x);
    let t = fitted_spacings(x, &s);
    let cdf = unimodal_cdf(&s, &t);
    Ok(UnimodalFit {
        fitted_spacings: t,
        cdf,
    })
}

/// Kolmogorov-Smirnov distance between the empirical CDF and the unimodal fit.
pub fn dip_statistic(sample: &SortedSample) -> Result<f64> {
    Ok(dip(sample.require_pair()?))
}

pub fn optimal_cutpoint(sample: &SortedSample) -> Result<CutPoint> {
    Ok(cutpoint(sample.require_pair()?))
}

/// Multi-scale unimodality test.
///
/// Segments of 4, 8, 16, ... points are taken from the left and right ends of the
/// sample, followed by the whole sample. The first segment whose dip exceeds
/// `alpha / sqrt(k)` is split at its own optimal cut point.
pub fn split_test(sample: &SortedSample, alpha: f64) -> Result<SplitDecision> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::invalid(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    let x = sample.require_pair()?;
    Ok(split_sorted(x, alpha))
}

pub(crate) fn split_sorted(x: &[f64], alpha: f64) -> SplitDecision {
    let n = x.len();
    if n < MIN_SEGMENT {
        let dip_score = if n >= 2 { dip(x) } else { 0.0 };
        return SplitDecision::Unimodal { dip_score };
    }
    for k in segment_sizes(n) {
        let threshold = alpha / (k as f64).sqrt();
        let mut segments = vec![0..k];
        if k < n {
            segments.push(n - k..n);
        }
        for segment in segments {
            let seg = &x[segment.clone()];
            let d = dip(seg);
            if d > threshold {
                return SplitDecision::Split {
                    cut_point: cutpoint(seg).value,
                    dip_score: d,
                    segment,
                };
            }
            if k == n {
                return SplitDecision::Unimodal { dip_score: d };
            }
        }
    }
    unreachable!("segment sizes always end with the full sample")
}

/// 4, 8, 16, ... up to `n`, then `n` itself.
fn segment_sizes(n: usize) -> Vec<usize> {
    let mut sizes = Vec::new();
    let mut k = MIN_SEGMENT;
    while k < n {
        sizes.push(k);
        k *= 2;
    }
    sizes.push(n);
    sizes
}

fn spacings(x: &[f64]) -> Vec<f64> {
    x.windows(2).map(|w| w[1] - w[0]).collect()
}

fn fitted_spacings(x: &[f64], s: &[f64]) -> Vec<f64> {
    let floor = SPACING_FLOOR * (x[x.len() - 1] - x[0]);
    let (mut t, _) = isotonic::downup(s, &vec![1.0; s.len()]);
    for v in &mut t {
        *v = v.max(floor);
    }
    t
}

/// CDF of the density that is `1 / t_j` on the `j`-th gap, at each sample point.
fn unimodal_cdf(s: &[f64], t: &[f64]) -> Vec<f64> {
    let mut cdf = Vec::with_capacity(s.len() + 1);
    let mut acc = 0.0;
    cdf.push(0.0);
    for (sj, tj) in s.iter().zip(t) {
        acc += sj / tj;
        cdf.push(acc);
    }
    for v in &mut cdf {
        *v /= acc;
    }
    cdf
}

fn dip(x: &[f64]) -> f64 {
    let s = spacings(x);
    let t = fitted_spacings(x, &s);
    let n = x.len() as f64;
    unimodal_cdf(&s, &t)
        .iter()
        .enumerate()
        .map(|(j, f)| (f - (j + 1) as f64 / n).abs())
        .fold(0.0, f64::max)
}

fn cutpoint(x: &[f64]) -> CutPoint {
    let s = spacings(x);
    let t = fitted_spacings(x, &s);
    let normalized: Vec<f64> = s.iter().zip(&t).map(|(sj, tj)| sj / tj).collect();
    let (fit, turn) = isotonic::updown(&normalized, &vec![1.0; normalized.len()]);

    let max = fit.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = fit.iter().copied().fold(f64::INFINITY, f64::min);
    let (index, degenerate) = if max - min <= 1e-12 * max.abs() {
        ((s.len() - 1) / 2, true)
    } else {
        let best = fit
            .iter()
            .enumerate()
            .filter(|(_, v)| **v == max)
            .map(|(j, _)| j)
            .min_by_key(|&j| (j.abs_diff(turn), j))
            .expect("maximum is attained");
        (best, false)
    };
    CutPoint {
        value: 0.5 * (x[index] + x[index + 1]),
        index,
        degenerate,
    }
}
