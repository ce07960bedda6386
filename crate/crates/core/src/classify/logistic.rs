//! Binary logistic regression on z-scored features.
//!
//! Minimises mean cross-entropy plus `l2 / 2 * |w|^2` (bias unpenalised) by
//! full-batch proximal gradient descent: a gradient step on the data term
//! followed by the closed-form shrinkage `w / (1 + lr * l2)`, which stays
//! stable for any penalty strength.

use rand_distr::{Distribution, Normal};

use super::{ClassifyError, Classifier, Standardizer};
use crate::dataset::LabeledFeatureSet;
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticParams {
    pub l2: f64,
    pub epochs: usize,
    pub learning_rate: f64,
    /// Seeds the small random initial weights.
    pub seed: u64,
}

impl Default for LogisticParams {
    fn default() -> Self {
        Self {
            l2: 1e-3,
            epochs: 300,
            learning_rate: 0.5,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    pub classes: Vec<u32>,
    pub scaler: Standardizer,
    pub weights: Vec<f64>,
    pub bias: f64,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn margin(weights: &[f64], bias: f64, x: &[f64]) -> f64 {
    bias + weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
}

/// Regularised mean cross-entropy; `params` is `[w_1 .. w_d, bias]`,
/// `rows` are already standardised and `targets` are 0/1.
pub fn logistic_loss(params: &[f64], rows: &[Vec<f64>], targets: &[f64], l2: f64) -> f64 {
    let (w, b) = params.split_at(params.len() - 1);
    let n = rows.len() as f64;
    let data: f64 = rows
        .iter()
        .zip(targets)
        .map(|(x, &y)| {
            let z = margin(w, b[0], x);
            // log(1 + e^z) - y z, evaluated without overflow
            z.max(0.0) + (-z.abs()).exp().ln_1p() - y * z
        })
        .sum::<f64>()
        / n;
    data + 0.5 * l2 * w.iter().map(|v| v * v).sum::<f64>()
}

/// Gradient of [`logistic_loss`] with the same parameter layout.
pub fn logistic_gradient(params: &[f64], rows: &[Vec<f64>], targets: &[f64], l2: f64) -> Vec<f64> {
    let (w, b) = params.split_at(params.len() - 1);
    let n = rows.len() as f64;
    let mut grad = vec![0.0; params.len()];
    for (x, &y) in rows.iter().zip(targets) {
        let r = sigmoid(margin(w, b[0], x)) - y;
        for (g, v) in grad.iter_mut().zip(x) {
            *g += r * v;
        }
        grad[w.len()] += r;
    }
    grad.iter_mut().for_each(|g| *g /= n);
    for (g, v) in grad.iter_mut().zip(w) {
        *g += l2 * v;
    }
    grad
}

pub fn logistic_regression_train(set: &LabeledFeatureSet, params: &LogisticParams) -> Result<LogisticModel, ClassifyError> {
    if set.is_empty() {
        return Err(ClassifyError::EmptyDataset);
    }
    let classes = set.classes();
    match classes.len() {
        1 => return Err(ClassifyError::SingleClass),
        2 => {}
        k => return Err(ClassifyError::NotBinary(k)),
    }
    if !(params.l2 >= 0.0 && params.learning_rate > 0.0) {
        return Err(ClassifyError::InvalidParameter("l2 must be >= 0 and learning_rate > 0".into()));
    }
    let scaler = Standardizer::fit(set);
    let rows: Vec<Vec<f64>> = set.rows().map(|r| scaler.transform(r)).collect();
    let targets: Vec<f64> = set.labels().iter().map(|&l| f64::from(u8::from(l == classes[1]))).collect();

    let d = set.n_features();
    let mut rng = rng_from_seed(params.seed);
    let init = Normal::new(0.0, 0.01).expect("valid std");
    let mut theta: Vec<f64> = (0..d).map(|_| init.sample(&mut rng)).collect();
    theta.push(0.0);

    let shrink = 1.0 / (1.0 + params.learning_rate * params.l2);
    for _ in 0..params.epochs {
        let grad = logistic_gradient(&theta, &rows, &targets, 0.0);
        for (t, g) in theta.iter_mut().zip(&grad).take(d) {
            *t = (*t - params.learning_rate * g) * shrink;
        }
        theta[d] -= params.learning_rate * grad[d];
    }
    let bias = theta.pop().expect("bias");
    Ok(LogisticModel {
        classes,
        scaler,
        weights: theta,
        bias,
    })
}

impl Classifier for LogisticModel {
    fn classes(&self) -> &[u32] {
        &self.classes
    }

    fn n_features(&self) -> usize {
        self.weights.len()
    }

    fn predict_proba(&self, x: &[f64]) -> Vec<f64> {
        let p = sigmoid(margin(&self.weights, self.bias, &self.scaler.transform(x)));
        vec![1.0 - p, p]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::accuracy;
    use crate::rng::rng_from_seed;
    use rand::Rng;

    fn separable() -> LabeledFeatureSet {
        let xs: Vec<f64> = (0..40).map(|i| i as f64 - 19.5).collect();
        LabeledFeatureSet::new(
            vec!["x".into()],
            xs.iter().map(|&x| vec![x]).collect(),
            xs.iter().map(|&x| u32::from(x > 0.0)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn separates_one_dimension() {
        let m = logistic_regression_train(&separable(), &LogisticParams::default()).unwrap();
        assert_eq!(accuracy(&m, &separable()), 1.0);
    }

    #[test]
    fn heavy_penalty_gives_prior() {
        let base = separable();
        let labels: Vec<u32> = (0..40).map(|i| u32::from(i % 4 == 0)).collect();
        let set = base.with_labels(labels).unwrap();
        let params = LogisticParams {
            l2: 1e6,
            epochs: 3000,
            ..Default::default()
        };
        let m = logistic_regression_train(&set, &params).unwrap();
        assert!(m.weights.iter().all(|w| w.abs() < 1e-6));
        let p = m.predict_proba(&[3.0]);
        assert!((p[1] - 0.25).abs() < 1e-3, "{p:?}");
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = rng_from_seed(21);
        let rows: Vec<Vec<f64>> = (0..30).map(|_| (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
        let targets: Vec<f64> = (0..30).map(|_| f64::from(rng.gen_range(0..2u8))).collect();
        for _ in 0..20 {
            let theta: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.5..1.5)).collect();
            let grad = logistic_gradient(&theta, &rows, &targets, 0.3);
            for i in 0..theta.len() {
                let h = 1e-5;
                let mut plus = theta.clone();
                let mut minus = theta.clone();
                plus[i] += h;
                minus[i] -= h;
                let fd = (logistic_loss(&plus, &rows, &targets, 0.3) - logistic_loss(&minus, &rows, &targets, 0.3)) / (2.0 * h);
                let rel = (fd - grad[i]).abs() / grad[i].abs().max(1e-8);
                assert!(rel < 1e-5, "component {i}: fd {fd} vs {}", grad[i]);
            }
        }
    }

    #[test]
    fn class_errors() {
        let set = separable().with_labels(vec![1; 40]).unwrap();
        assert_eq!(logistic_regression_train(&set, &LogisticParams::default()), Err(ClassifyError::SingleClass));
        let set = separable().with_labels((0..40).map(|i| i % 3).collect()).unwrap();
        assert_eq!(logistic_regression_train(&set, &LogisticParams::default()), Err(ClassifyError::NotBinary(3)));
    }

    #[test]
    fn deterministic() {
        let p = LogisticParams { seed: 4, ..Default::default() };
        assert_eq!(
            logistic_regression_train(&separable(), &p).unwrap(),
            logistic_regression_train(&separable(), &p).unwrap()
        );
    }
}
