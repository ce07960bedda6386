//! k-nearest neighbours on z-scored features.

use super::{ClassifyError, Classifier, Standardizer};
use crate::dataset::LabeledFeatureSet;

#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    k: usize,
    scaler: Standardizer,
    classes: Vec<u32>,
    /// Standardised training rows, row-major.
    points: Vec<f64>,
    /// Class index of each training row.
    targets: Vec<usize>,
    width: usize,
}

pub fn train_knn(set: &LabeledFeatureSet, k: usize) -> Result<KnnModel, ClassifyError> {
    if set.is_empty() {
        return Err(ClassifyError::EmptyDataset);
    }
    if k == 0 || k > set.len() {
        return Err(ClassifyError::InvalidParameter(format!(
            "k = {k} must lie in 1..={}",
            set.len()
        )));
    }
    let scaler = Standardizer::fit(set);
    let classes = set.classes();
    let points = set.rows().flat_map(|r| scaler.transform(r)).collect();
    let targets = set
        .labels()
        .iter()
        .map(|l| classes.binary_search(l).expect("label in classes"))
        .collect();
    Ok(KnnModel {
        k,
        scaler,
        classes,
        points,
        targets,
        width: set.n_features(),
    })
}

/// Majority label among the `k` nearest training rows; ties go to the
/// smaller label. Equidistant neighbours are ordered by training index.
pub fn knn_classify(train: &LabeledFeatureSet, query: &[f64], k: usize) -> Result<u32, ClassifyError> {
    Ok(train_knn(train, k)?.predict(query))
}

impl KnnModel {
    fn votes(&self, x: &[f64]) -> Vec<usize> {
        let q = self.scaler.transform(x);
        let mut dist: Vec<(f64, usize)> = self
            .points
            .chunks_exact(self.width)
            .enumerate()
            .map(|(i, p)| (p.iter().zip(&q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>(), i))
            .collect();
        let by_distance = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if self.k < dist.len() {
            dist.select_nth_unstable_by(self.k - 1, by_distance);
        }
        let mut votes = vec![0usize; self.classes.len()];
        for &(_, i) in &dist[..self.k] {
            votes[self.targets[i]] += 1;
        }
        votes
    }
}

impl Classifier for KnnModel {
    fn classes(&self) -> &[u32] {
        &self.classes
    }

    fn n_features(&self) -> usize {
        self.width
    }

    /// Vote fractions among the neighbours.
    fn predict_proba(&self, x: &[f64]) -> Vec<f64> {
        self.votes(x)
            .into_iter()
            .map(|v| v as f64 / self.k as f64)
            .collect()
    }
}
