//! Random search over a discrete forest hyperparameter grid.

use rand::seq::index::sample;

use super::{evaluate, CVResult, ClassifyError, ForestParams, ModelSpec};
use crate::dataset::LabeledFeatureSet;
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, PartialEq)]
pub struct HyperparamGrid {
    pub n_trees: Vec<usize>,
    pub max_depth: Vec<Option<usize>>,
    pub min_samples_split: Vec<usize>,
    pub features_per_split: Vec<usize>,
    /// Number of distinct grid points to evaluate.
    pub iterations: usize,
}

impl Default for HyperparamGrid {
    fn default() -> Self {
        Self {
            n_trees: vec![50, 100, 200],
            max_depth: vec![Some(4), Some(8), Some(16), None],
            min_samples_split: vec![2, 5, 10],
            features_per_split: vec![2, 3, 4],
            iterations: 40,
        }
    }
}

impl HyperparamGrid {
    pub fn size(&self) -> usize {
        self.n_trees.len() * self.max_depth.len() * self.min_samples_split.len() * self.features_per_split.len()
    }

    /// Grid point `index` in row-major order (features_per_split fastest).
    pub fn point(&self, index: usize) -> ForestParams {
        let mut i = index;
        let fps = self.features_per_split[i % self.features_per_split.len()];
        i /= self.features_per_split.len();
        let mss = self.min_samples_split[i % self.min_samples_split.len()];
        i /= self.min_samples_split.len();
        let depth = self.max_depth[i % self.max_depth.len()];
        i /= self.max_depth.len();
        let trees = self.n_trees[i];
        ForestParams {
            n_trees: trees,
            max_depth: depth,
            min_samples_split: mss,
            features_per_split: Some(fps),
            bootstrap: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchTrial {
    pub params: ForestParams,
    pub mean_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub best: ForestParams,
    pub best_cv: CVResult,
    /// Every evaluated point, in sampling order.
    pub trials: Vec<SearchTrial>,
}

/// Samples `min(iterations, size)` distinct grid points uniformly, scores each
/// by stratified k-fold mean accuracy and keeps the first best.
pub fn random_grid_search(
    set: &LabeledFeatureSet,
    grid: &HyperparamGrid,
    k: usize,
    seed: u64,
) -> Result<SearchResult, ClassifyError> {
    if grid.size() == 0 || grid.iterations == 0 {
        return Err(ClassifyError::InvalidParameter("empty hyperparameter grid".into()));
    }
    let mut rng = rng_from_seed(seed);
    let picks = sample(&mut rng, grid.size(), grid.iterations.min(grid.size()));

    let mut best: Option<(ForestParams, CVResult)> = None;
    let mut trials = Vec::with_capacity(picks.len());
    for index in picks.iter() {
        let params = grid.point(index);
        let cv = evaluate(set, &ModelSpec::Forest(params.clone()), k, seed)?;
        trials.push(SearchTrial {
            params: params.clone(),
            mean_accuracy: cv.mean_accuracy,
        });
        if best.as_ref().map_or(true, |(_, b)| cv.mean_accuracy > b.mean_accuracy) {
            best = Some((params, cv));
        }
    }
    let (best, best_cv) = best.expect("at least one trial");
    Ok(SearchResult { best, best_cv, trials })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data() -> LabeledFeatureSet {
        let rows = (0..48).map(|i| vec![i as f64, ((i * 5) % 11) as f64]).collect();
        let labels = (0..48).map(|i| u32::from(i >= 24)).collect();
        LabeledFeatureSet::new(vec!["a".into(), "b".into()], rows, labels).unwrap()
    }

    #[test]
    fn default_grid_shape() {
        let g = HyperparamGrid::default();
        assert_eq!(g.size(), 108);
        let all: std::collections::HashSet<String> = (0..g.size()).map(|i| format!("{:?}", g.point(i))).collect();
        assert_eq!(all.len(), 108);
    }

    #[test]
    fn singleton_grid() {
        let g = HyperparamGrid {
            n_trees: vec![3],
            max_depth: vec![Some(2)],
            min_samples_split: vec![2],
            features_per_split: vec![1],
            iterations: 40,
        };
        let r = random_grid_search(&data(), &g, 4, 0).unwrap();
        assert_eq!(r.trials.len(), 1);
        assert_eq!(r.best, g.point(0));
    }

    #[test]
    fn dominant_configuration_wins() {
        let g = HyperparamGrid {
            n_trees: vec![5],
            max_depth: vec![Some(0), Some(0), None, Some(0)],
            min_samples_split: vec![2],
            features_per_split: vec![2],
            iterations: 40,
        };
        let r = random_grid_search(&data(), &g, 4, 7).unwrap();
        assert_eq!(r.best.max_depth, None);
        assert_eq!(r.trials.len(), 4);
        for t in &r.trials {
            assert!(r.best_cv.mean_accuracy >= t.mean_accuracy);
        }
    }

    #[test]
    fn samples_distinct_points_deterministically() {
        let g = HyperparamGrid {
            n_trees: vec![2, 3],
            max_depth: vec![Some(1), Some(2), None],
            min_samples_split: vec![2, 4],
            features_per_split: vec![1, 2],
            iterations: 5,
        };
        let a = random_grid_search(&data(), &g, 4, 11).unwrap();
        let b = random_grid_search(&data(), &g, 4, 11).unwrap();
        assert_eq!(a, b);
        let distinct: std::collections::HashSet<String> = a.trials.iter().map(|t| format!("{:?}", t.params)).collect();
        assert_eq!(distinct.len(), 5);
    }
}
