//! Bagged random forest with mean-decrease-in-impurity importances.

use rand::Rng as _;

use super::tree::{encode_labels, flat_values, DecisionTree, TreeBuilder, TreeParams};
use super::{argmax_first, ClassifyError, Classifier};
use crate::dataset::LabeledFeatureSet;
use crate::rng::{derive_seed, rng_from_seed};

#[derive(Debug, Clone, PartialEq)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    /// `None` means `ceil(sqrt(n_features))`.
    pub features_per_split: Option<usize>,
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_depth: None,
            min_samples_split: 2,
            features_per_split: None,
            bootstrap: true,
        }
    }
}

impl ForestParams {
    pub fn resolved_features_per_split(&self, n_features: usize) -> usize {
        self.features_per_split
            .unwrap_or_else(|| (n_features as f64).sqrt().ceil() as usize)
            .clamp(1, n_features.max(1))
    }

    fn tree_params(&self, n_features: usize) -> TreeParams {
        TreeParams {
            max_depth: self.max_depth,
            min_samples_split: self.min_samples_split,
            features_per_split: Some(self.resolved_features_per_split(n_features)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomForestModel {
    pub classes: Vec<u32>,
    pub feature_names: Vec<String>,
    pub params: ForestParams,
    pub seed: u64,
    pub trees: Vec<DecisionTree>,
    /// Normalised importances; all zero when no tree has an informative split.
    pub importances: Vec<f64>,
}

/// Trains `params.n_trees` trees. Tree `i` uses the seed
/// `derive_seed(seed, i)` for its bootstrap draw and feature sampling.
pub fn train_forest(set: &LabeledFeatureSet, params: &ForestParams, seed: u64) -> Result<RandomForestModel, ClassifyError> {
    if set.is_empty() {
        return Err(ClassifyError::EmptyDataset);
    }
    if params.n_trees == 0 {
        return Err(ClassifyError::InvalidParameter("n_trees must be at least 1".into()));
    }
    let (classes, encoded) = encode_labels(set);
    let values = flat_values(set);
    let width = set.n_features();
    let tree_params = params.tree_params(width);
    let n = set.len();

    let trees: Vec<DecisionTree> = (0..params.n_trees)
        .map(|i| {
            let mut rng = rng_from_seed(derive_seed(seed, i as u64));
            let rows: Vec<usize> = if params.bootstrap {
                (0..n).map(|_| rng.gen_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            TreeBuilder::new(&values, width, &encoded, classes.len(), &tree_params, rng).build(rows)
        })
        .collect();

    let mut model = RandomForestModel {
        classes,
        feature_names: set.feature_names().to_vec(),
        params: params.clone(),
        seed,
        trees,
        importances: vec![0.0; width],
    };
    if let Ok(imp) = feature_importances(&model) {
        model.importances = imp;
    }
    Ok(model)
}

/// Impurity decrease per feature, weighted by the fraction of samples
/// reaching each split, averaged over trees and normalised to sum to 1.
pub fn feature_importances(model: &RandomForestModel) -> Result<Vec<f64>, ClassifyError> {
    if model.trees.is_empty() {
        return Err(ClassifyError::UntrainedModel);
    }
    let width = model.feature_names.len();
    let mut total = vec![0.0; width];
    for tree in &model.trees {
        for (t, d) in total.iter_mut().zip(tree.impurity_decrease()) {
            *t += d;
        }
    }
    let n_trees = model.trees.len() as f64;
    total.iter_mut().for_each(|t| *t /= n_trees);
    let sum: f64 = total.iter().sum();
    if !(sum > 0.0) {
        return Err(ClassifyError::NoSplits);
    }
    Ok(total.into_iter().map(|t| t / sum).collect())
}

impl RandomForestModel {
    /// Mean of the per-tree leaf class frequencies.
    pub fn try_predict_proba(&self, x: &[f64]) -> Result<Vec<f64>, ClassifyError> {
        if self.trees.is_empty() {
            return Err(ClassifyError::UntrainedModel);
        }
        if x.len() != self.feature_names.len() {
            return Err(ClassifyError::DimensionMismatch {
                found: x.len(),
                expected: self.feature_names.len(),
            });
        }
        let mut acc = vec![0.0; self.classes.len()];
        for tree in &self.trees {
            for (a, p) in acc.iter_mut().zip(tree.leaf_proba(x)) {
                *a += p;
            }
        }
        let n = self.trees.len() as f64;
        Ok(acc.into_iter().map(|a| a / n).collect())
    }

    pub fn try_predict(&self, x: &[f64]) -> Result<u32, ClassifyError> {
        Ok(self.classes[argmax_first(&self.try_predict_proba(x)?)])
    }
}

impl Classifier for RandomForestModel {
    fn classes(&self) -> &[u32] {
        &self.classes
    }

    fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    fn predict_proba(&self, x: &[f64]) -> Vec<f64> {
        self.try_predict_proba(x).expect("forest prediction")
    }
}
