//! Agreement between a found labelling and the ground truth.

use std::collections::BTreeMap;

use crate::data::Labeling;
use crate::error::{Error, Result};

/// Counts `n[i][j]` of points in true class `i` given found label `j`.
///
/// Rows and columns follow the sorted order of the distinct label values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    counts: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    pub fn from_counts(counts: Vec<Vec<usize>>) -> Result<Self> {
        let cols = counts.first().map_or(0, Vec::len);
        if counts.iter().any(|r| r.len() != cols) {
            return Err(Error::invalid("confusion rows have differing lengths"));
        }
        Ok(Self { counts })
    }

    pub fn counts(&self) -> &[Vec<usize>] {
        &self.counts
    }

    pub fn num_true(&self) -> usize {
        self.counts.len()
    }

    pub fn num_found(&self) -> usize {
        self.counts.first().map_or(0, Vec::len)
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    /// True class sizes `n_i`.
    pub fn row_sums(&self) -> Vec<usize> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    /// Found cluster sizes `n'_j`.
    pub fn col_sums(&self) -> Vec<usize> {
        let mut sums = vec![0; self.num_found()];
        for row in &self.counts {
            for (s, c) in sums.iter_mut().zip(row) {
                *s += c;
            }
        }
        sums
    }
}

pub fn confusion(truth: &Labeling, found: &Labeling) -> Result<ConfusionMatrix> {
    confusion_raw(truth.as_slice(), found.as_slice())
}

/// Confusion matrix over arbitrary label values.
pub fn confusion_raw(truth: &[usize], found: &[usize]) -> Result<ConfusionMatrix> {
    if truth.len() != found.len() {
        return Err(Error::invalid(format!(
            "label lengths differ: {} true vs {} found",
            truth.len(),
            found.len()
        )));
    }
    let index = |labels: &[usize]| -> BTreeMap<usize, usize> {
        let mut map: BTreeMap<usize, usize> = labels.iter().map(|&l| (l, 0)).collect();
        for (i, v) in map.values_mut().enumerate() {
            *v = i;
        }
        map
    };
    let rows = index(truth);
    let cols = index(found);
    let mut counts = vec![vec![0; cols.len()]; rows.len()];
    for (t, f) in truth.iter().zip(found) {
        counts[rows[t]][cols[f]] += 1;
    }
    Ok(ConfusionMatrix { counts })
}

/// Mean over true classes of `min(precision, recall)` against the best-matching
/// found cluster.
///
/// Each true class `c` is matched to the found cluster `j` with the most points
/// from `c` (smallest `j` on ties). Several classes may match the same cluster.
pub fn accuracy(cm: &ConfusionMatrix) -> Result<f64> {
    if cm.num_true() == 0 {
        return Err(Error::invalid("no true classes"));
    }
    let row_sums = cm.row_sums();
    let col_sums = cm.col_sums();
    let mut total = 0.0;
    for (c, (row, &n_c)) in cm.counts.iter().zip(&row_sums).enumerate() {
        if n_c == 0 {
            return Err(Error::invalid(format!("true class {c} is empty")));
        }
        let (best, &hits) = row
            .iter()
            .enumerate()
            .rev()
            .max_by_key(|(_, n)| **n)
            .expect("non-empty row");
        let recall = hits as f64 / n_c as f64;
        let precision = hits as f64 / col_sums[best] as f64;
        total += recall.min(precision);
    }
    Ok(total / cm.num_true() as f64)
}

/// Accuracy of `found` against `truth`.
pub fn labeling_accuracy(truth: &Labeling, found: &Labeling) -> Result<f64> {
    accuracy(&confusion(truth, found)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(v: &[usize]) -> Labeling {
        Labeling::remap(v.iter().copied())
    }

    #[test]
    fn identical_labelings_are_diagonal() {
        let l = labels(&[1, 1, 2, 2, 2]);
        let cm = confusion(&l, &l).unwrap();
        assert_eq!(cm.counts(), &[vec![2, 0], vec![0, 3]]);
        assert_eq!(accuracy(&cm).unwrap(), 1.0);
    }

    #[test]
    fn constant_found_labels() {
        let cm = confusion(&labels(&[1, 1, 2, 2, 2]), &labels(&[4; 5])).unwrap();
        assert_eq!(cm.counts(), &[vec![2], vec![3]]);
        assert_eq!(cm.col_sums(), vec![5]);
    }

    #[test]
    fn merged_equal_clusters_score_half() {
        let cm = confusion(&labels(&[1, 1, 2, 2]), &labels(&[1; 4])).unwrap();
        assert_eq!(accuracy(&cm).unwrap(), 0.5);
    }

    #[test]
    fn even_split_contributes_half() {
        let cm = ConfusionMatrix::from_counts(vec![vec![50, 50]]).unwrap();
        assert_eq!(accuracy(&cm).unwrap(), 0.5);
    }

    #[test]
    fn ties_pick_smallest_found_label() {
        // class 0 ties between columns 0 and 1; column 0 is shared with class 1
        let cm = ConfusionMatrix::from_counts(vec![vec![5, 5], vec![10, 0]]).unwrap();
        let a = accuracy(&cm).unwrap();
        assert!((a - 0.5 * (5.0 / 15.0 + 10.0 / 15.0)).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        assert!(confusion(&labels(&[1, 2]), &labels(&[1])).is_err());
        let cm = ConfusionMatrix::from_counts(vec![vec![3, 1], vec![0, 0]]).unwrap();
        assert!(accuracy(&cm).is_err());
        assert!(ConfusionMatrix::from_counts(vec![vec![1], vec![1, 2]]).is_err());
    }
}
