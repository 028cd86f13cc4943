use serde::{Deserialize, Serialize};

use super::{argmax, check_training_set};
use crate::error::{Error, Result};

/// Brute-force k-nearest-neighbour classifier (Euclidean distance).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    k: usize,
    rows: Vec<Vec<f64>>,
    labels: Vec<usize>,
    n_classes: usize,
}

impl KnnModel {
    pub fn fit(rows: &[Vec<f64>], labels: &[usize], n_classes: usize, k: usize) -> Result<Self> {
        check_training_set(rows, labels, n_classes)?;
        if k < 1 || k > rows.len() {
            return Err(Error::config(
                "model.k",
                format!("must lie in 1..={} (stored rows)", rows.len()),
            ));
        }
        Ok(KnnModel {
            k,
            rows: rows.to_vec(),
            labels: labels.to_vec(),
            n_classes,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_features(&self) -> usize {
        self.rows[0].len()
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    /// Indices of the `k` nearest stored rows; equal distances keep storage order.
    pub fn neighbours(&self, x: &[f64]) -> Result<Vec<usize>> {
        if x.len() != self.n_features() {
            return Err(Error::WidthMismatch {
                expected: self.n_features(),
                found: x.len(),
            });
        }
        let mut dist: Vec<(f64, usize)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| (r.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum(), i))
            .collect();
        dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        Ok(dist.into_iter().take(self.k).map(|(_, i)| i).collect())
    }

    fn votes(&self, x: &[f64]) -> Result<Vec<usize>> {
        let mut votes = vec![0usize; self.n_classes];
        for i in self.neighbours(x)? {
            votes[self.labels[i]] += 1;
        }
        Ok(votes)
    }

    /// Majority class among the neighbours; ties go to the lowest class index.
    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        Ok(argmax(&self.votes(x)?))
    }

    pub fn vote_distribution(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self
            .votes(x)?
            .iter()
            .map(|&v| v as f64 / self.k as f64)
            .collect())
    }
}
