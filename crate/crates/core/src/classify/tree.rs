//! CART classification tree with Gini impurity.

use rand::seq::SliceRandom;

use super::{ClassifyError, Classifier};
use crate::dataset::LabeledFeatureSet;
use crate::rng::{rng_from_seed, Rng};

#[derive(Debug, Clone, PartialEq)]
pub struct TreeParams {
    /// `None` grows until leaves are pure or too small; `Some(0)` is a stump
    /// with a single leaf.
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    /// Features examined per node; `None` means all.
    pub features_per_split: Option<usize>,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self {
            max_depth: None,
            min_samples_split: 2,
            features_per_split: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeKind {
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        counts: Vec<u32>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub kind: NodeKind,
    /// Training rows (with bootstrap multiplicity) reaching the node.
    pub n_samples: u32,
    pub impurity: f64,
}

/// Nodes in pre-order; node 0 is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
    pub n_classes: usize,
    pub n_features: usize,
}

fn gini(counts: &[u32], n: u32) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let n = f64::from(n);
    1.0 - counts.iter().map(|&c| (f64::from(c) / n).powi(2)).sum::<f64>()
}

/// `sum_c count_c^2 / n`; larger is purer.
fn purity(counts: &[u32], n: u32) -> f64 {
    counts.iter().map(|&c| f64::from(c) * f64::from(c)).sum::<f64>() / f64::from(n)
}

struct Candidate {
    feature: usize,
    threshold: f64,
    score: f64,
}

impl Candidate {
    fn beats(&self, other: &Candidate) -> bool {
        self.score > other.score
            || (self.score == other.score
                && (self.feature < other.feature
                    || (self.feature == other.feature && self.threshold < other.threshold)))
    }
}

pub(crate) struct TreeBuilder<'a> {
    values: &'a [f64],
    width: usize,
    classes: &'a [usize],
    n_classes: usize,
    params: &'a TreeParams,
    rng: Rng,
    nodes: Vec<Node>,
    feature_order: Vec<usize>,
}

impl<'a> TreeBuilder<'a> {
    pub(crate) fn new(
        values: &'a [f64],
        width: usize,
        classes: &'a [usize],
        n_classes: usize,
        params: &'a TreeParams,
        rng: Rng,
    ) -> Self {
        Self {
            values,
            width,
            classes,
            n_classes,
            params,
            rng,
            nodes: Vec::new(),
            feature_order: (0..width).collect(),
        }
    }

    pub(crate) fn build(mut self, rows: Vec<usize>) -> DecisionTree {
        self.grow(rows, 0);
        DecisionTree {
            nodes: self.nodes,
            n_classes: self.n_classes,
            n_features: self.width,
        }
    }

    fn value(&self, row: usize, feature: usize) -> f64 {
        self.values[row * self.width + feature]
    }

    fn grow(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let mut counts = vec![0u32; self.n_classes];
        for &r in &rows {
            counts[self.classes[r]] += 1;
        }
        let n = rows.len() as u32;
        let impurity = gini(&counts, n);
        let id = self.nodes.len();
        self.nodes.push(Node {
            kind: NodeKind::Leaf {
                counts: counts.clone(),
            },
            n_samples: n,
            impurity,
        });

        let depth_ok = self.params.max_depth.map_or(true, |d| depth < d);
        if !depth_ok || rows.len() < self.params.min_samples_split.max(2) || impurity == 0.0 {
            return id;
        }
        let Some(best) = self.best_split(&rows, &counts) else {
            return id;
        };

        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
            .into_iter()
            .partition(|&r| self.value(r, best.feature) <= best.threshold);
        let left = self.grow(left_rows, depth + 1);
        let right = self.grow(right_rows, depth + 1);
        self.nodes[id].kind = NodeKind::Split {
            feature: best.feature,
            threshold: best.threshold,
            left,
            right,
        };
        id
    }

    fn best_split(&mut self, rows: &[usize], counts: &[u32]) -> Option<Candidate> {
        let mtry = self
            .params
            .features_per_split
            .unwrap_or(self.width)
            .clamp(1, self.width);
        if mtry < self.width {
            self.feature_order.shuffle(&mut self.rng);
        }
        let order = self.feature_order.clone();

        let mut best: Option<Candidate> = None;
        let mut evaluated = 0;
        let mut pairs: Vec<(f64, usize)> = Vec::with_capacity(rows.len());
        let mut left = vec![0u32; self.n_classes];
        let mut right = vec![0u32; self.n_classes];
        for feature in order {
            if evaluated == mtry {
                break;
            }
            pairs.clear();
            pairs.extend(rows.iter().map(|&r| (self.value(r, feature), self.classes[r])));
            pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
            if pairs[0].0 == pairs[pairs.len() - 1].0 {
                continue;
            }
            evaluated += 1;

            left.iter_mut().for_each(|c| *c = 0);
            right.copy_from_slice(counts);
            let total = pairs.len() as u32;
            for i in 0..pairs.len() - 1 {
                let (v, c) = pairs[i];
                left[c] += 1;
                right[c] -= 1;
                let next = pairs[i + 1].0;
                if v == next {
                    continue;
                }
                let n_left = i as u32 + 1;
                let score = purity(&left, n_left) + purity(&right, total - n_left);
                let mut threshold = v + (next - v) / 2.0;
                if threshold >= next {
                    threshold = v;
                }
                let cand = Candidate {
                    feature,
                    threshold,
                    score,
                };
                if best.as_ref().map_or(true, |b| cand.beats(b)) {
                    best = Some(cand);
                }
            }
        }
        best
    }
}

impl DecisionTree {
    pub fn leaf_counts(&self, x: &[f64]) -> &[u32] {
        let mut id = 0;
        loop {
            match &self.nodes[id].kind {
                NodeKind::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => id = if x[*feature] <= *threshold { *left } else { *right },
                NodeKind::Leaf { counts } => return counts,
            }
        }
    }

    /// Class frequencies of the leaf reached by `x`.
    pub fn leaf_proba(&self, x: &[f64]) -> Vec<f64> {
        let counts = self.leaf_counts(x);
        let total: u32 = counts.iter().sum();
        counts.iter().map(|&c| f64::from(c) / f64::from(total)).collect()
    }

    pub fn split_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n.kind, NodeKind::Split { .. }))
            .count()
    }

    pub fn depth(&self) -> usize {
        fn walk(t: &DecisionTree, id: usize) -> usize {
            match &t.nodes[id].kind {
                NodeKind::Split { left, right, .. } => 1 + walk(t, *left).max(walk(t, *right)),
                NodeKind::Leaf { .. } => 0,
            }
        }
        walk(self, 0)
    }

    /// Fraction of the root's training rows that reach node `id`.
    pub fn node_sample_fraction(&self, id: usize) -> f64 {
        f64::from(self.nodes[id].n_samples) / f64::from(self.nodes[0].n_samples)
    }

    /// Sample-weighted impurity decrease per feature, not normalised.
    pub fn impurity_decrease(&self) -> Vec<f64> {
        let mut acc = vec![0.0; self.n_features];
        for (id, node) in self.nodes.iter().enumerate() {
            if let NodeKind::Split {
                feature, left, right, ..
            } = node.kind
            {
                let n = f64::from(node.n_samples);
                let (l, r) = (&self.nodes[left], &self.nodes[right]);
                let child = (f64::from(l.n_samples) * l.impurity + f64::from(r.n_samples) * r.impurity) / n;
                acc[feature] += self.node_sample_fraction(id) * (node.impurity - child).max(0.0);
            }
        }
        acc
    }
}

/// Maps labels onto class indices `0..classes.len()`.
pub(crate) fn encode_labels(set: &LabeledFeatureSet) -> (Vec<u32>, Vec<usize>) {
    let classes = set.classes();
    let encoded = set
        .labels()
        .iter()
        .map(|l| classes.binary_search(l).expect("label in classes"))
        .collect();
    (classes, encoded)
}

pub(crate) fn flat_values(set: &LabeledFeatureSet) -> Vec<f64> {
    set.rows().flat_map(|r| r.iter().copied()).collect()
}

/// A single tree with its class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTreeModel {
    pub classes: Vec<u32>,
    pub tree: DecisionTree,
}

/// Trains one tree on every row of `set`. `seed` drives feature sampling.
pub fn train_tree(set: &LabeledFeatureSet, params: &TreeParams, seed: u64) -> Result<DecisionTreeModel, ClassifyError> {
    if set.is_empty() {
        return Err(ClassifyError::EmptyDataset);
    }
    let (classes, encoded) = encode_labels(set);
    let values = flat_values(set);
    let tree = TreeBuilder::new(
        &values,
        set.n_features(),
        &encoded,
        classes.len(),
        params,
        rng_from_seed(seed),
    )
    .build((0..set.len()).collect());
    Ok(DecisionTreeModel { classes, tree })
}

impl Classifier for DecisionTreeModel {
    fn classes(&self) -> &[u32] {
        &self.classes
    }

    fn n_features(&self) -> usize {
        self.tree.n_features
    }

    fn predict_proba(&self, x: &[f64]) -> Vec<f64> {
        self.tree.leaf_proba(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::accuracy;

    fn one_d() -> LabeledFeatureSet {
        let xs: Vec<f64> = (-10..10).map(|i| i as f64 + 0.5).collect();
        let labels = xs.iter().map(|&x| u32::from(x > 0.0)).collect();
        LabeledFeatureSet::new(vec!["x".into()], xs.iter().map(|&x| vec![x]).collect(), labels).unwrap()
    }

    fn xor() -> LabeledFeatureSet {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for _ in 0..25 {
            for (a, b) in [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)] {
                rows.push(vec![a, b]);
                labels.push(u32::from((a == 1.0) != (b == 1.0)));
            }
        }
        LabeledFeatureSet::new(vec!["a".into(), "b".into()], rows, labels).unwrap()
    }

    #[test]
    fn single_perfect_split() {
        let m = train_tree(&one_d(), &TreeParams::default(), 0).unwrap();
        assert_eq!(m.tree.depth(), 1);
        assert_eq!(accuracy(&m, &one_d()), 1.0);
        match &m.tree.nodes[0].kind {
            NodeKind::Split { threshold, .. } => assert_eq!(*threshold, 0.0),
            _ => panic!("root should split"),
        }
    }

    #[test]
    fn single_class_is_a_leaf() {
        let set = LabeledFeatureSet::new(vec!["x".into()], vec![vec![1.0], vec![2.0]], vec![4, 4]).unwrap();
        let m = train_tree(&set, &TreeParams::default(), 0).unwrap();
        assert_eq!(m.tree.nodes.len(), 1);
        assert_eq!(m.predict(&[10.0]), 4);
    }

    #[test]
    fn xor_needs_depth_two() {
        let params = TreeParams {
            max_depth: Some(2),
            ..Default::default()
        };
        let m = train_tree(&xor(), &params, 0).unwrap();
        assert_eq!(accuracy(&m, &xor()), 1.0);
        let stump = train_tree(
            &xor(),
            &TreeParams {
                max_depth: Some(1),
                ..Default::default()
            },
            0,
        )
        .unwrap();
        assert_eq!(accuracy(&stump, &xor()), 0.5);
    }

    #[test]
    fn depth_zero_is_a_stump_leaf() {
        let m = train_tree(
            &one_d(),
            &TreeParams {
                max_depth: Some(0),
                ..Default::default()
            },
            0,
        )
        .unwrap();
        assert_eq!(m.tree.nodes.len(), 1);
        assert_eq!(m.predict_proba(&[0.0]), vec![0.5, 0.5]);
        assert_eq!(m.predict(&[0.0]), 0);
    }

    #[test]
    fn ties_prefer_lowest_feature() {
        // both columns separate the classes identically
        let rows = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0], vec![3.0, 3.0]];
        let set = LabeledFeatureSet::new(vec!["a".into(), "b".into()], rows, vec![0, 0, 1, 1]).unwrap();
        let m = train_tree(&set, &TreeParams::default(), 0).unwrap();
        match &m.tree.nodes[0].kind {
            NodeKind::Split { feature, threshold, .. } => {
                assert_eq!(*feature, 0);
                assert_eq!(*threshold, 1.5);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn unrestricted_tree_fits_conflict_free_data() {
        let rows: Vec<Vec<f64>> = (0..60).map(|i| vec![((i * 7919) % 61) as f64, ((i * 31) % 17) as f64]).collect();
        let labels: Vec<u32> = (0..60).map(|i| ((i * 13) % 3) as u32).collect();
        let set = LabeledFeatureSet::new(vec!["a".into(), "b".into()], rows, labels).unwrap();
        let m = train_tree(&set, &TreeParams::default(), 1).unwrap();
        assert_eq!(accuracy(&m, &set), 1.0);
    }

    #[test]
    fn adjacent_floats_split_correctly() {
        let a = 1.0f64;
        let b = f64::from_bits(a.to_bits() + 1);
        let set = LabeledFeatureSet::new(vec!["x".into()], vec![vec![a], vec![b]], vec![0, 1]).unwrap();
        let m = train_tree(&set, &TreeParams::default(), 0).unwrap();
        assert_eq!(accuracy(&m, &set), 1.0);
    }

    #[test]
    fn empty_dataset_rejected() {
        let set = LabeledFeatureSet::new(vec!["x".into()], vec![], vec![]).unwrap();
        assert_eq!(train_tree(&set, &TreeParams::default(), 0), Err(ClassifyError::EmptyDataset));
    }
}
