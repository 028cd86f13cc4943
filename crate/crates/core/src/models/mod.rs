//! Classifiers over feature rows: CART decision tree, random forest and
//! brute-force k-nearest neighbours.
//!
//! Class labels are dense indices `0..n_classes`. Every vote tie resolves to
//! the lowest index; with [`crate::dataset::PolymerType::index`] that is the
//! lexicographically smallest class name.

mod forest;
mod knn;
mod tree;

use serde::{Deserialize, Serialize};

pub use forest::{train_forest, ForestParams, RandomForest};
pub use knn::KnnModel;
pub use tree::{impurity, train_tree, DecisionTree, Node, TreeParams};

use crate::error::{Error, Result};
use crate::seed::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitCriterion {
    /// Information gain (Shannon entropy, bits).
    #[default]
    #[serde(alias = "information-gain")]
    Entropy,
    Gini,
}

/// Index of the largest count; the first one wins ties.
pub(crate) fn argmax(counts: &[usize]) -> usize {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = i;
        }
    }
    best
}

pub(crate) fn check_training_set(rows: &[Vec<f64>], labels: &[usize], n_classes: usize) -> Result<()> {
    let Some(first) = rows.first() else {
        return Err(Error::invalid("empty training matrix"));
    };
    if first.is_empty() {
        return Err(Error::invalid("training rows have no features"));
    }
    if rows.len() != labels.len() {
        return Err(Error::invalid(format!(
            "{} rows but {} labels",
            rows.len(),
            labels.len()
        )));
    }
    if let Some(i) = rows.iter().position(|r| r.len() != first.len()) {
        return Err(Error::WidthMismatch {
            expected: first.len(),
            found: rows[i].len(),
        });
    }
    if let Some(&l) = labels.iter().find(|&&l| l >= n_classes) {
        return Err(Error::invalid(format!("label {l} outside 0..{n_classes}")));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::invalid("training matrix has non-finite values"));
    }
    Ok(())
}

fn default_k() -> usize {
    3
}

/// Which classifier to train, with its hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelConfig {
    RandomForest(ForestParams),
    DecisionTree {
        #[serde(default)]
        criterion: SplitCriterion,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_depth: Option<usize>,
    },
    Knn {
        #[serde(default = "default_k")]
        k: usize,
    },
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig::RandomForest(ForestParams::default())
    }
}

impl ModelConfig {
    pub fn name(&self) -> &'static str {
        match self {
            ModelConfig::RandomForest(_) => "random-forest",
            ModelConfig::DecisionTree { .. } => "decision-tree",
            ModelConfig::Knn { .. } => "knn",
        }
    }

    pub fn fit(&self, rows: &[Vec<f64>], labels: &[usize], n_classes: usize, seed: u64) -> Result<Model> {
        Ok(match self {
            ModelConfig::RandomForest(p) => Model::RandomForest(train_forest(rows, labels, n_classes, p, seed)?),
            ModelConfig::DecisionTree { criterion, max_depth } => Model::DecisionTree(train_tree(
                rows,
                labels,
                n_classes,
                *criterion,
                &TreeParams {
                    max_depth: *max_depth,
                    ..Default::default()
                },
                &mut rng_from_seed(seed),
                None,
            )?),
            ModelConfig::Knn { k } => Model::Knn(KnnModel::fit(rows, labels, n_classes, *k)?),
        })
    }
}

/// A trained classifier of any supported kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Model {
    RandomForest(RandomForest),
    DecisionTree(DecisionTree),
    Knn(KnnModel),
}

impl Model {
    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        match self {
            Model::RandomForest(m) => m.predict(x),
            Model::DecisionTree(m) => m.predict(x),
            Model::Knn(m) => m.predict(x),
        }
    }

    pub fn predict_all(&self, rows: &[Vec<f64>]) -> Result<Vec<usize>> {
        rows.iter().map(|r| self.predict(r)).collect()
    }

    pub fn vote_distribution(&self, x: &[f64]) -> Result<Vec<f64>> {
        match self {
            Model::RandomForest(m) => m.vote_distribution(x),
            Model::DecisionTree(m) => m.vote_distribution(x),
            Model::Knn(m) => m.vote_distribution(x),
        }
    }

    pub fn n_features(&self) -> usize {
        match self {
            Model::RandomForest(m) => m.n_features(),
            Model::DecisionTree(m) => m.n_features(),
            Model::Knn(m) => m.n_features(),
        }
    }

    pub fn n_classes(&self) -> usize {
        match self {
            Model::RandomForest(m) => m.n_classes(),
            Model::DecisionTree(m) => m.n_classes(),
            Model::Knn(m) => m.n_classes(),
        }
    }
}
