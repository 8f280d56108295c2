//! Single regression tree grown by exact greedy splitting.
//!
//! Split search scans every feature in presorted order and evaluates the
//! squared-error gain of every boundary between distinct feature values:
//!
//!   gain = GL^2/(nL + lambda) + GR^2/(nR + lambda) - G^2/(n + lambda)
//!
//! where G sums the residuals on each side. Thresholds are midpoints of
//! adjacent distinct values, so samples with equal feature values can never
//! be separated. A node becomes a leaf holding G/(n + lambda) when no split
//! has positive gain, the depth limit is reached, or a child would fall
//! under the minimum leaf size.

use serde::{Deserialize, Serialize};

use crate::dataset::{Sample, N_FEATURES};

/// Tree node; children index into the owning tree's node vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf {
        value: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// Regression tree with nodes stored in a flat vector, root at index 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    pub nodes: Vec<Node>,
}

impl RegressionTree {
    pub fn predict(&self, features: &[f64; N_FEATURES]) -> f64 {
        let mut idx = 0;
        loop {
            match &self.nodes[idx] {
                Node::Leaf { value } => return *value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    idx = if features[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }

    /// Multiply every leaf value by a constant (used to fold the learning
    /// rate into the stored tree).
    pub fn scale_leaves(&mut self, factor: f64) {
        for node in &mut self.nodes {
            if let Node::Leaf { value } = node {
                *value *= factor;
            }
        }
    }
}

/// Growth limits and regularization for one tree.
#[derive(Debug, Clone, Copy)]
pub struct TreeParams {
    pub max_depth: usize,
    pub lambda: f64,
    pub min_samples_leaf: usize,
}

/// Per-node working set: sample indices sorted by each feature. All four
/// lists hold the same index set; keeping them presorted lets a split
/// partition them in linear time without re-sorting.
struct NodeSet {
    by_feature: [Vec<u32>; N_FEATURES],
}

impl NodeSet {
    fn len(&self) -> usize {
        self.by_feature[0].len()
    }
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    gain: f64,
}

/// Grow a tree on the residuals. `samples` supplies the feature matrix;
/// `residuals[i]` is the regression target for `samples[i]`.
pub fn grow_tree(samples: &[Sample], residuals: &[f64], params: &TreeParams) -> RegressionTree {
    debug_assert_eq!(samples.len(), residuals.len());
    let mut root = NodeSet {
        by_feature: std::array::from_fn(|_| Vec::new()),
    };
    for (j, list) in root.by_feature.iter_mut().enumerate() {
        let mut idx: Vec<u32> = (0..samples.len() as u32).collect();
        idx.sort_by(|&a, &b| {
            samples[a as usize].features[j]
                .partial_cmp(&samples[b as usize].features[j])
                .unwrap()
        });
        *list = idx;
    }

    let mut tree = RegressionTree { nodes: Vec::new() };
    build_node(&mut tree, samples, residuals, root, 0, params);
    tree
}

fn leaf_value(indices: &[u32], residuals: &[f64], lambda: f64) -> f64 {
    let sum: f64 = indices.iter().map(|&i| residuals[i as usize]).sum();
    sum / (indices.len() as f64 + lambda)
}

fn build_node(
    tree: &mut RegressionTree,
    samples: &[Sample],
    residuals: &[f64],
    set: NodeSet,
    depth: usize,
    params: &TreeParams,
) -> usize {
    let n = set.len();
    let make_leaf = |tree: &mut RegressionTree| {
        let value = leaf_value(&set.by_feature[0], residuals, params.lambda);
        tree.nodes.push(Node::Leaf { value });
        tree.nodes.len() - 1
    };

    if depth >= params.max_depth || n < 2 * params.min_samples_leaf || n < 2 {
        return make_leaf(tree);
    }

    let best = find_best_split(samples, residuals, &set, params);
    let Some(best) = best else {
        return make_leaf(tree);
    };

    // Partition every presorted list by the chosen predicate, preserving
    // order so children stay presorted.
    let goes_left =
        |i: u32| -> bool { samples[i as usize].features[best.feature] <= best.threshold };
    let mut left = NodeSet {
        by_feature: std::array::from_fn(|_| Vec::new()),
    };
    let mut right = NodeSet {
        by_feature: std::array::from_fn(|_| Vec::new()),
    };
    for j in 0..N_FEATURES {
        for &i in &set.by_feature[j] {
            if goes_left(i) {
                left.by_feature[j].push(i);
            } else {
                right.by_feature[j].push(i);
            }
        }
    }

    let slot = tree.nodes.len();
    tree.nodes.push(Node::Leaf { value: 0.0 }); // placeholder, patched below
    let left_idx = build_node(tree, samples, residuals, left, depth + 1, params);
    let right_idx = build_node(tree, samples, residuals, right, depth + 1, params);
    tree.nodes[slot] = Node::Split {
        feature: best.feature,
        threshold: best.threshold,
        left: left_idx,
        right: right_idx,
    };
    slot
}

fn find_best_split(
    samples: &[Sample],
    residuals: &[f64],
    set: &NodeSet,
    params: &TreeParams,
) -> Option<BestSplit> {
    let n = set.len();
    let lambda = params.lambda;
    let total: f64 = set.by_feature[0]
        .iter()
        .map(|&i| residuals[i as usize])
        .sum();
    let parent_score = total * total / (n as f64 + lambda);

    let mut best: Option<BestSplit> = None;
    for (j, order) in set.by_feature.iter().enumerate() {
        let mut left_sum = 0.0;
        for pos in 0..n - 1 {
            let i = order[pos] as usize;
            left_sum += residuals[i];
            let here = samples[i].features[j];
            let next = samples[order[pos + 1] as usize].features[j];
            // Only boundaries between distinct values are real splits;
            // equal values must stay together.
            if here == next {
                continue;
            }
            let n_left = pos + 1;
            let n_right = n - n_left;
            if n_left < params.min_samples_leaf || n_right < params.min_samples_leaf {
                continue;
            }
            let right_sum = total - left_sum;
            let gain = left_sum * left_sum / (n_left as f64 + lambda)
                + right_sum * right_sum / (n_right as f64 + lambda)
                - parent_score;
            if gain > 0.0 && best.as_ref().is_none_or(|b| gain > b.gain) {
                best = Some(BestSplit {
                    feature: j,
                    threshold: 0.5 * (here + next),
                    gain,
                });
            }
        }
    }
    best
}
