//! Stratified k-fold cross-validation.

use rand::seq::SliceRandom;

use super::{ClassifyError, ModelSpec};
use crate::dataset::LabeledFeatureSet;
use crate::rng::{derive_seed, rng_from_seed};

#[derive(Debug, Clone, PartialEq)]
pub struct CVResult {
    /// Labels indexing the confusion matrix rows (true) and columns (predicted).
    pub classes: Vec<u32>,
    pub fold_accuracies: Vec<f64>,
    pub mean_accuracy: f64,
    pub confusion: Vec<Vec<u64>>,
}

impl CVResult {
    pub fn total(&self) -> u64 {
        self.confusion.iter().flatten().sum()
    }
}

/// Splits row indices into `k` disjoint folds preserving class proportions.
///
/// Each class is shuffled and dealt round-robin; the dealing position carries
/// over between classes so fold sizes also stay within one of each other.
pub fn stratified_kfold(labels: &[u32], k: usize, seed: u64) -> Result<Vec<Vec<usize>>, ClassifyError> {
    if k < 2 {
        return Err(ClassifyError::InvalidParameter("at least 2 folds are required".into()));
    }
    if labels.is_empty() {
        return Err(ClassifyError::EmptyDataset);
    }
    let mut classes = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();

    let mut rng = rng_from_seed(seed);
    let mut folds = vec![Vec::new(); k];
    let mut next = 0;
    for label in classes {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == label).collect();
        if members.len() < k {
            return Err(ClassifyError::TooFewSamples {
                label,
                count: members.len(),
                folds: k,
            });
        }
        members.shuffle(&mut rng);
        for idx in members {
            folds[next].push(idx);
            next = (next + 1) % k;
        }
    }
    for f in folds.iter_mut() {
        f.sort_unstable();
    }
    Ok(folds)
}

/// Trains on `k - 1` folds and tests on the held-out one, for every fold.
/// Fold `i` trains with seed `derive_seed(seed, i)`.
pub fn evaluate(set: &LabeledFeatureSet, spec: &ModelSpec, k: usize, seed: u64) -> Result<CVResult, ClassifyError> {
    let folds = stratified_kfold(set.labels(), k, seed)?;
    let classes = set.classes();
    let mut confusion = vec![vec![0u64; classes.len()]; classes.len()];
    let mut fold_accuracies = Vec::with_capacity(k);

    for (i, test_idx) in folds.iter().enumerate() {
        let train_idx: Vec<usize> = folds
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .flat_map(|(_, f)| f.iter().copied())
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        let model = spec.fit(&set.subset(&train_idx), derive_seed(seed, i as u64))?;
        let mut hits = 0usize;
        for &t in test_idx {
            let truth = set.labels()[t];
            let predicted = model.predict(set.row(t));
            if predicted == truth {
                hits += 1;
            }
            let r = classes.binary_search(&truth).expect("label present");
            let c = classes.binary_search(&predicted).expect("model predicts known labels");
            confusion[r][c] += 1;
        }
        fold_accuracies.push(hits as f64 / test_idx.len() as f64);
    }
    let mean_accuracy = fold_accuracies.iter().sum::<f64>() / fold_accuracies.len() as f64;
    Ok(CVResult {
        classes,
        fold_accuracies,
        mean_accuracy,
        confusion,
    })
}
