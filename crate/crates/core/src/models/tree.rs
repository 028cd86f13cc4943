use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{argmax, check_training_set, SplitCriterion};
use crate::error::{Error, Result};

/// Impurity of a class-count vector: entropy in bits, or gini.
pub fn impurity(counts: &[usize], criterion: SplitCriterion) -> Result<f64> {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return Err(Error::invalid("impurity of an empty count vector"));
    }
    Ok(impurity_of(counts.iter().map(|&c| c as f64), total as f64, criterion))
}

fn impurity_of(counts: impl Iterator<Item = f64>, total: f64, criterion: SplitCriterion) -> f64 {
    match criterion {
        SplitCriterion::Entropy => {
            let h: f64 = counts
                .filter(|&c| c > 0.0)
                .map(|c| {
                    let p = c / total;
                    -p * p.log2()
                })
                .sum();
            h.max(0.0)
        }
        SplitCriterion::Gini => 1.0 - counts.map(|c| (c / total).powi(2)).sum::<f64>(),
    }
}

fn default_min_samples_split() -> usize {
    2
}
fn default_min_samples_leaf() -> usize {
    1
}

/// Growth limits. Defaults grow each tree until its leaves are pure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_depth: Option<usize>,
    #[serde(default = "default_min_samples_split")]
    pub min_samples_split: usize,
    #[serde(default = "default_min_samples_leaf")]
    pub min_samples_leaf: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: None,
            min_samples_split: default_min_samples_split(),
            min_samples_leaf: default_min_samples_leaf(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Node {
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    /// Training-sample count per class that reached this leaf.
    Leaf { counts: Vec<usize> },
}

/// Binary CART classifier stored as a node arena; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    nodes: Vec<Node>,
    n_features: usize,
    n_classes: usize,
}

#[derive(Debug, Clone, Copy)]
struct SplitCandidate {
    feature: usize,
    threshold: f64,
    impurity: f64,
}

impl SplitCandidate {
    /// Lower weighted impurity wins; ties go to the lower feature index, then the lower threshold.
    fn beats(&self, other: &SplitCandidate) -> bool {
        self.impurity < other.impurity
            || (self.impurity == other.impurity
                && (self.feature, self.threshold) < (other.feature, other.threshold))
    }
}

struct Builder<'a, R: ?Sized> {
    rows: &'a [Vec<f64>],
    labels: &'a [usize],
    n_classes: usize,
    criterion: SplitCriterion,
    params: &'a TreeParams,
    feature_subsample: Option<usize>,
    rng: &'a mut R,
    nodes: Vec<Node>,
    features: Vec<usize>,
    scratch: Vec<(f64, usize)>,
}

impl<R: Rng + ?Sized> Builder<'_, R> {
    fn counts(&self, idx: &[usize]) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes];
        for &i in idx {
            counts[self.labels[i]] += 1;
        }
        counts
    }

    fn build(&mut self, idx: &mut [usize], depth: usize) -> usize {
        let counts = self.counts(idx);
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        let depth_reached = self.params.max_depth.is_some_and(|d| depth >= d);
        if pure || depth_reached || idx.len() < self.params.min_samples_split.max(2) {
            return self.leaf(counts);
        }
        let Some(split) = self.best_split(idx) else {
            return self.leaf(counts);
        };

        let mut boundary = 0;
        for k in 0..idx.len() {
            if self.rows[idx[k]][split.feature] <= split.threshold {
                idx.swap(k, boundary);
                boundary += 1;
            }
        }
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { counts: Vec::new() });
        let (left_idx, right_idx) = idx.split_at_mut(boundary);
        let left = self.build(left_idx, depth + 1);
        let right = self.build(right_idx, depth + 1);
        self.nodes[id] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        id
    }

    fn leaf(&mut self, counts: Vec<usize>) -> usize {
        self.nodes.push(Node::Leaf { counts });
        self.nodes.len() - 1
    }

    fn best_split(&mut self, idx: &[usize]) -> Option<SplitCandidate> {
        let n_features = self.features.len();
        let wanted = match self.feature_subsample {
            Some(k) if k < n_features => {
                self.features.shuffle(self.rng);
                k.max(1)
            }
            _ => {
                self.features.sort_unstable();
                n_features
            }
        };

        let mut best: Option<SplitCandidate> = None;
        let mut informative = 0;
        for pos in 0..n_features {
            // Constant features do not count toward the subsample, as long as a
            // split has not been found yet.
            if informative >= wanted && best.is_some() {
                break;
            }
            let feature = self.features[pos];
            match self.best_split_on(idx, feature) {
                FeatureScan::Constant => {}
                FeatureScan::NoValidSplit => informative += 1,
                FeatureScan::Found(c) => {
                    informative += 1;
                    if best.as_ref().is_none_or(|b| c.beats(b)) {
                        best = Some(c);
                    }
                }
            }
        }
        best
    }

    fn best_split_on(&mut self, idx: &[usize], feature: usize) -> FeatureScan {
        self.scratch.clear();
        self.scratch
            .extend(idx.iter().map(|&i| (self.rows[i][feature], self.labels[i])));
        self.scratch.sort_by(|a, b| a.0.total_cmp(&b.0));
        let n = self.scratch.len();
        if self.scratch[0].0 == self.scratch[n - 1].0 {
            return FeatureScan::Constant;
        }

        let mut total = vec![0usize; self.n_classes];
        for &(_, c) in &self.scratch {
            total[c] += 1;
        }
        let mut left = vec![0usize; self.n_classes];
        let min_leaf = self.params.min_samples_leaf.max(1);
        let mut best: Option<SplitCandidate> = None;
        for k in 0..n - 1 {
            left[self.scratch[k].1] += 1;
            let (a, b) = (self.scratch[k].0, self.scratch[k + 1].0);
            if a == b {
                continue;
            }
            let nl = k + 1;
            let nr = n - nl;
            if nl < min_leaf || nr < min_leaf {
                continue;
            }
            let il = impurity_of(left.iter().map(|&c| c as f64), nl as f64, self.criterion);
            let ir = impurity_of(
                total.iter().zip(&left).map(|(&t, &l)| (t - l) as f64),
                nr as f64,
                self.criterion,
            );
            let weighted = (nl as f64 * il + nr as f64 * ir) / n as f64;
            let mid = a + (b - a) / 2.0;
            let threshold = if mid >= a && mid < b { mid } else { a };
            let cand = SplitCandidate {
                feature,
                threshold,
                impurity: weighted,
            };
            if best.as_ref().is_none_or(|b| cand.beats(b)) {
                best = Some(cand);
            }
        }
        match best {
            Some(c) => FeatureScan::Found(c),
            None => FeatureScan::NoValidSplit,
        }
    }
}

enum FeatureScan {
    Constant,
    NoValidSplit,
    Found(SplitCandidate),
}

/// Grow a tree over the rows listed in `sample` (duplicates allowed, as in a
/// bootstrap draw).
pub(crate) fn grow<R: Rng + ?Sized>(
    rows: &[Vec<f64>],
    labels: &[usize],
    n_classes: usize,
    sample: &mut [usize],
    criterion: SplitCriterion,
    params: &TreeParams,
    rng: &mut R,
    feature_subsample: Option<usize>,
) -> DecisionTree {
    let n_features = rows[0].len();
    let mut builder = Builder {
        rows,
        labels,
        n_classes,
        criterion,
        params,
        feature_subsample,
        rng,
        nodes: Vec::new(),
        features: (0..n_features).collect(),
        scratch: Vec::with_capacity(sample.len()),
    };
    builder.build(sample, 0);
    DecisionTree {
        nodes: builder.nodes,
        n_features,
        n_classes,
    }
}

/// Greedy CART on `rows` with midpoint thresholds. With `feature_subsample`,
/// every node looks at that many randomly chosen non-constant features.
pub fn train_tree<R: Rng + ?Sized>(
    rows: &[Vec<f64>],
    labels: &[usize],
    n_classes: usize,
    criterion: SplitCriterion,
    params: &TreeParams,
    rng: &mut R,
    feature_subsample: Option<usize>,
) -> Result<DecisionTree> {
    check_training_set(rows, labels, n_classes)?;
    let mut sample: Vec<usize> = (0..rows.len()).collect();
    Ok(grow(
        rows,
        labels,
        n_classes,
        &mut sample,
        criterion,
        params,
        rng,
        feature_subsample,
    ))
}

impl DecisionTree {
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], id: usize) -> usize {
            match &nodes[id] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    /// Class counts of the leaf that `x` lands in.
    pub fn leaf_counts(&self, x: &[f64]) -> Result<&[usize]> {
        if x.len() != self.n_features {
            return Err(Error::WidthMismatch {
                expected: self.n_features,
                found: x.len(),
            });
        }
        let mut id = 0;
        loop {
            match &self.nodes[id] {
                Node::Leaf { counts } => return Ok(counts),
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => id = if x[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        Ok(argmax(self.leaf_counts(x)?))
    }

    /// Leaf class distribution, normalized.
    pub fn vote_distribution(&self, x: &[f64]) -> Result<Vec<f64>> {
        let counts = self.leaf_counts(x)?;
        let total: usize = counts.iter().sum();
        Ok(counts.iter().map(|&c| c as f64 / total as f64).collect())
    }

    /// Structural checks: two children per split, children after parents,
    /// non-empty leaves of the right width.
    pub fn validate(&self) -> Result<()> {
        if self.nodes.is_empty() {
            return Err(Error::invalid("tree has no nodes"));
        }
        for (id, node) in self.nodes.iter().enumerate() {
            match node {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    if *feature >= self.n_features
                        || !threshold.is_finite()
                        || *left <= id
                        || *right <= id
                        || *left >= self.nodes.len()
                        || *right >= self.nodes.len()
                    {
                        return Err(Error::invalid(format!("malformed split node {id}")));
                    }
                }
                Node::Leaf { counts } => {
                    if counts.len() != self.n_classes || counts.iter().all(|&c| c == 0) {
                        return Err(Error::invalid(format!("malformed leaf node {id}")));
                    }
                }
            }
        }
        Ok(())
    }
}
