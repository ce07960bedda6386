//! Classifiers and their evaluation: CART tree, bagged random forest with
//! impurity importances, k-nearest neighbours, logistic regression, a
//! majority baseline, stratified k-fold cross-validation and random search.

mod cv;
mod forest;
mod knn;
mod logistic;
pub mod model_io;
mod search;
mod tree;

use thiserror::Error;

use crate::dataset::LabeledFeatureSet;

pub use cv::{evaluate, stratified_kfold, CVResult};
pub use forest::{feature_importances, train_forest, ForestParams, RandomForestModel};
pub use knn::{knn_classify, train_knn, KnnModel};
pub use logistic::{
    logistic_gradient, logistic_loss, logistic_regression_train, LogisticModel, LogisticParams,
};
pub use search::{random_grid_search, HyperparamGrid, SearchResult, SearchTrial};
pub use tree::{train_tree, DecisionTree, DecisionTreeModel, Node, NodeKind, TreeParams};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("class {label} has {count} rows, fewer than the {folds} folds")]
    TooFewSamples { label: u32, count: usize, folds: usize },
    #[error("only one class present")]
    SingleClass,
    #[error("binary classifier given {0} classes")]
    NotBinary(usize),
    #[error("model has no trees")]
    UntrainedModel,
    #[error("forest contains no informative split")]
    NoSplits,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("query has {found} features, model expects {expected}")]
    DimensionMismatch { found: usize, expected: usize },
}

/// Any trained model that scores a feature row.
pub trait Classifier {
    /// Class labels in ascending order; `predict_proba` follows this order.
    fn classes(&self) -> &[u32];

    fn n_features(&self) -> usize;

    fn predict_proba(&self, x: &[f64]) -> Vec<f64>;

    /// Highest-probability label; ties go to the smallest label.
    fn predict(&self, x: &[f64]) -> u32 {
        let proba = self.predict_proba(x);
        self.classes()[argmax_first(&proba)]
    }
}

/// Index of the first maximum.
pub(crate) fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Per-feature z-scoring fitted on training rows. Zero-variance columns map
/// to 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Standardizer {
    pub fn fit(set: &LabeledFeatureSet) -> Self {
        let n = set.len().max(1) as f64;
        let f = set.n_features();
        let mut means = vec![0.0; f];
        for row in set.rows() {
            for (m, v) in means.iter_mut().zip(row) {
                *m += v;
            }
        }
        means.iter_mut().for_each(|m| *m /= n);
        let mut vars = vec![0.0; f];
        for row in set.rows() {
            for ((s, v), m) in vars.iter_mut().zip(row).zip(&means) {
                *s += (v - m).powi(2);
            }
        }
        let stds = vars.into_iter().map(|s| (s / n).sqrt()).collect();
        Self { means, stds }
    }

    pub fn transform(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.means.iter().zip(&self.stds))
            .map(|(v, (m, s))| if *s > 0.0 { (v - m) / s } else { 0.0 })
            .collect()
    }
}

/// Predicts the most frequent training class.
#[derive(Debug, Clone, PartialEq)]
pub struct MajorityModel {
    classes: Vec<u32>,
    proba: Vec<f64>,
    n_features: usize,
}

impl MajorityModel {
    pub fn train(set: &LabeledFeatureSet) -> Result<Self, ClassifyError> {
        if set.is_empty() {
            return Err(ClassifyError::EmptyDataset);
        }
        let classes = set.classes();
        let mut counts = vec![0usize; classes.len()];
        for l in set.labels() {
            counts[classes.binary_search(l).expect("label in classes")] += 1;
        }
        let proba = counts.iter().map(|&c| c as f64 / set.len() as f64).collect();
        Ok(Self {
            classes,
            proba,
            n_features: set.n_features(),
        })
    }
}

impl Classifier for MajorityModel {
    fn classes(&self) -> &[u32] {
        &self.classes
    }

    fn n_features(&self) -> usize {
        self.n_features
    }

    fn predict_proba(&self, _x: &[f64]) -> Vec<f64> {
        self.proba.clone()
    }
}

/// What to train inside cross-validation.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    Forest(ForestParams),
    Tree(TreeParams),
    Knn { k: usize },
    Logistic(LogisticParams),
    Majority,
}

impl ModelSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::Forest(_) => "random_forest",
            ModelSpec::Tree(_) => "decision_tree",
            ModelSpec::Knn { .. } => "knn",
            ModelSpec::Logistic(_) => "logistic_regression",
            ModelSpec::Majority => "majority",
        }
    }

    pub fn fit(&self, set: &LabeledFeatureSet, seed: u64) -> Result<Box<dyn Classifier + Send + Sync>, ClassifyError> {
        Ok(match self {
            ModelSpec::Forest(p) => Box::new(train_forest(set, p, seed)?),
            ModelSpec::Tree(p) => Box::new(train_tree(set, p, seed)?),
            ModelSpec::Knn { k } => Box::new(train_knn(set, *k)?),
            ModelSpec::Logistic(p) => Box::new(logistic_regression_train(set, &LogisticParams { seed, ..p.clone() })?),
            ModelSpec::Majority => Box::new(MajorityModel::train(set)?),
        })
    }
}

/// Fraction of rows whose prediction equals the label.
pub fn accuracy(model: &dyn Classifier, set: &LabeledFeatureSet) -> f64 {
    if set.is_empty() {
        return 0.0;
    }
    let hits = set
        .rows()
        .zip(set.labels())
        .filter(|(row, &label)| model.predict(row) == label)
        .count();
    hits as f64 / set.len() as f64
}
