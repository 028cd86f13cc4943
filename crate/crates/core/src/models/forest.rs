use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{grow, DecisionTree, TreeParams};
use super::{argmax, check_training_set, SplitCriterion};
use crate::error::{Error, Result};
use crate::seed::{derive_seed, rng_from_seed};

fn default_n_trees() -> usize {
    100
}
fn default_true() -> bool {
    true
}
fn default_min_samples_split() -> usize {
    2
}
fn default_min_samples_leaf() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForestParams {
    #[serde(default = "default_n_trees")]
    pub n_trees: usize,
    #[serde(default)]
    pub criterion: SplitCriterion,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_depth: Option<usize>,
    #[serde(default = "default_min_samples_split")]
    pub min_samples_split: usize,
    #[serde(default = "default_min_samples_leaf")]
    pub min_samples_leaf: usize,
    /// Train each tree on a same-size resample drawn with replacement.
    #[serde(default = "default_true")]
    pub bootstrap: bool,
    /// Features examined per node; `None` means `floor(sqrt(width))`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_features: Option<usize>,
}

impl ForestParams {
    pub fn tree_params(&self) -> TreeParams {
        TreeParams {
            max_depth: self.max_depth,
            min_samples_split: self.min_samples_split,
            min_samples_leaf: self.min_samples_leaf,
        }
    }
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: default_n_trees(),
            criterion: SplitCriterion::Entropy,
            max_depth: None,
            min_samples_split: default_min_samples_split(),
            min_samples_leaf: default_min_samples_leaf(),
            bootstrap: true,
            max_features: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    trees: Vec<DecisionTree>,
    criterion: SplitCriterion,
    seed: u64,
    n_classes: usize,
    n_features: usize,
}

/// Bagged CART ensemble. Tree `t` draws from the stream
/// `derive_seed(seed, t)`, so the result does not depend on thread count.
pub fn train_forest(
    rows: &[Vec<f64>],
    labels: &[usize],
    n_classes: usize,
    params: &ForestParams,
    seed: u64,
) -> Result<RandomForest> {
    check_training_set(rows, labels, n_classes)?;
    if params.n_trees < 1 {
        return Err(Error::config("model.n_trees", "must be at least 1"));
    }
    let n_features = rows[0].len();
    let subsample = params
        .max_features
        .unwrap_or_else(|| ((n_features as f64).sqrt().floor() as usize).max(1));

    let tree_params = params.tree_params();
    let trees = (0..params.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_from_seed(derive_seed(seed, t as u64));
            let n = rows.len();
            let mut sample: Vec<usize> = if params.bootstrap {
                (0..n).map(|_| rng.gen_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            grow(
                rows,
                labels,
                n_classes,
                &mut sample,
                params.criterion,
                &tree_params,
                &mut rng,
                Some(subsample),
            )
        })
        .collect();

    Ok(RandomForest {
        trees,
        criterion: params.criterion,
        seed,
        n_classes,
        n_features,
    })
}

impl RandomForest {
    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    pub fn criterion(&self) -> SplitCriterion {
        self.criterion
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    /// Per-class fraction of tree votes.
    pub fn vote_distribution(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut votes = vec![0usize; self.n_classes];
        for t in &self.trees {
            votes[t.predict(x)?] += 1;
        }
        Ok(votes
            .iter()
            .map(|&v| v as f64 / self.trees.len() as f64)
            .collect())
    }

    /// Majority vote; ties go to the lowest class index.
    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        let mut votes = vec![0usize; self.n_classes];
        for t in &self.trees {
            votes[t.predict(x)?] += 1;
        }
        Ok(argmax(&votes))
    }

    pub fn validate(&self) -> Result<()> {
        if self.trees.is_empty() {
            return Err(Error::invalid("forest has no trees"));
        }
        for t in &self.trees {
            t.validate()?;
            if t.n_classes() != self.n_classes || t.n_features() != self.n_features {
                return Err(Error::invalid("forest trees disagree on shape"));
            }
        }
        Ok(())
    }
}
