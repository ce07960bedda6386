//! Local surrogate explanations: Gaussian perturbations around one instance,
//! proximity weights, and a weighted ridge fit of the model's probability for
//! its predicted class in standardised feature space.

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::classify::Classifier;
use crate::dataset::LabeledFeatureSet;
use crate::rng::rng_from_seed;

pub const MIN_PERTURBATIONS: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExplainError {
    #[error("invalid explainer configuration: {0}")]
    InvalidConfig(String),
    #[error("instance has {found} features, expected {expected}")]
    DimensionMismatch { found: usize, expected: usize },
    #[error("non-finite value in the surrogate inputs")]
    NonFinite,
    #[error("surrogate normal equations are singular")]
    SingularFit,
}

/// Training-set column means and population standard deviations.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureStats {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl FeatureStats {
    pub fn from_dataset(set: &LabeledFeatureSet) -> Self {
        let n = set.len().max(1) as f64;
        let (means, stds) = (0..set.n_features())
            .map(|j| {
                let col = set.column(j);
                let m = col.iter().sum::<f64>() / n;
                let v = col.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
                (m, v.sqrt())
            })
            .unzip();
        Self { means, stds }
    }

    pub fn len(&self) -> usize {
        self.means.len()
    }

    pub fn is_empty(&self) -> bool {
        self.means.is_empty()
    }

    /// z-scores `x`; zero-variance features map to 0.
    pub fn standardize(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.means.iter().zip(&self.stds))
            .map(|(v, (m, s))| if *s > 0.0 { (v - m) / s } else { 0.0 })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExplainConfig {
    pub n_perturbations: usize,
    /// `None` means `0.75 * sqrt(n_features)`, in standardised units.
    pub kernel_width: Option<f64>,
    pub ridge_lambda: f64,
}

impl Default for ExplainConfig {
    fn default() -> Self {
        Self {
            n_perturbations: 5000,
            kernel_width: None,
            ridge_lambda: 1e-3,
        }
    }
}

impl ExplainConfig {
    pub fn resolved_kernel_width(&self, n_features: usize) -> f64 {
        self.kernel_width.unwrap_or(0.75 * (n_features as f64).sqrt())
    }

    pub fn validate(&self, n_features: usize) -> Result<(), ExplainError> {
        if self.n_perturbations < MIN_PERTURBATIONS {
            return Err(ExplainError::InvalidConfig(format!(
                "n_perturbations must be at least {MIN_PERTURBATIONS}"
            )));
        }
        let w = self.resolved_kernel_width(n_features);
        if !(w > 0.0 && w.is_finite()) {
            return Err(ExplainError::InvalidConfig("kernel_width must be positive".into()));
        }
        if !(self.ridge_lambda >= 0.0 && self.ridge_lambda.is_finite()) {
            return Err(ExplainError::InvalidConfig("ridge_lambda must be non-negative".into()));
        }
        Ok(())
    }
}

/// `n` samples drawn from N(instance_j, std_j^2) per feature. Sample 0 is the
/// instance itself and features with zero spread stay fixed.
pub fn perturb(instance: &[f64], stats: &FeatureStats, n: usize, seed: u64) -> Result<Vec<Vec<f64>>, ExplainError> {
    if instance.len() != stats.len() {
        return Err(ExplainError::DimensionMismatch {
            found: instance.len(),
            expected: stats.len(),
        });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut rng = rng_from_seed(seed);
    let mut out = Vec::with_capacity(n);
    out.push(instance.to_vec());
    for _ in 1..n {
        out.push(
            instance
                .iter()
                .zip(&stats.stds)
                .map(|(x, s)| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    x + s * z
                })
                .collect(),
        );
    }
    Ok(out)
}

/// Weighted ridge fit `y ~ intercept + z . weights`; the intercept is not
/// penalised.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSurrogate {
    pub weights: Vec<f64>,
    pub intercept: f64,
    /// Weighted R^2; 0 when the target has no weighted variance.
    pub fidelity: f64,
}

pub fn fit_surrogate(z: &[Vec<f64>], y: &[f64], w: &[f64], lambda: f64) -> Result<LinearSurrogate, ExplainError> {
    let n = z.len();
    if n == 0 || y.len() != n || w.len() != n {
        return Err(ExplainError::InvalidConfig("surrogate inputs must be non-empty and equally long".into()));
    }
    let p = z[0].len();
    if z.iter().any(|r| r.len() != p) {
        return Err(ExplainError::DimensionMismatch {
            found: z.iter().map(Vec::len).find(|&l| l != p).unwrap_or(p),
            expected: p,
        });
    }
    if z.iter().flatten().chain(y).chain(w).any(|v| !v.is_finite()) || !lambda.is_finite() {
        return Err(ExplainError::NonFinite);
    }
    let w_sum: f64 = w.iter().sum();
    if !(w_sum > 0.0) {
        return Err(ExplainError::SingularFit);
    }

    let mut z_mean = vec![0.0; p];
    let mut y_mean = 0.0;
    for ((row, &yi), &wi) in z.iter().zip(y).zip(w) {
        for (m, v) in z_mean.iter_mut().zip(row) {
            *m += wi * v;
        }
        y_mean += wi * yi;
    }
    z_mean.iter_mut().for_each(|m| *m /= w_sum);
    y_mean /= w_sum;

    let mut gram = DMatrix::<f64>::zeros(p, p);
    let mut rhs = DVector::<f64>::zeros(p);
    let mut ss_tot = 0.0;
    let mut c = vec![0.0; p];
    for ((row, &yi), &wi) in z.iter().zip(y).zip(w) {
        for (cj, (v, m)) in c.iter_mut().zip(row.iter().zip(&z_mean)) {
            *cj = v - m;
        }
        let dy = yi - y_mean;
        ss_tot += wi * dy * dy;
        for a in 0..p {
            rhs[a] += wi * c[a] * dy;
            for b in a..p {
                gram[(a, b)] += wi * c[a] * c[b];
            }
        }
    }
    for a in 0..p {
        for b in 0..a {
            gram[(a, b)] = gram[(b, a)];
        }
        gram[(a, a)] += lambda;
    }

    let weights: Vec<f64> = if p == 0 {
        Vec::new()
    } else {
        let chol = gram.cholesky().ok_or(ExplainError::SingularFit)?;
        chol.solve(&rhs).iter().copied().collect()
    };
    let intercept = y_mean - weights.iter().zip(&z_mean).map(|(a, b)| a * b).sum::<f64>();

    let fidelity = if ss_tot > 0.0 {
        let ss_res: f64 = z
            .iter()
            .zip(y)
            .zip(w)
            .map(|((row, &yi), &wi)| {
                let pred = intercept + weights.iter().zip(row).map(|(a, b)| a * b).sum::<f64>();
                wi * (yi - pred).powi(2)
            })
            .sum();
        1.0 - ss_res / ss_tot
    } else {
        0.0
    };
    if weights.iter().any(|v| !v.is_finite()) {
        return Err(ExplainError::SingularFit);
    }
    Ok(LinearSurrogate {
        weights,
        intercept,
        fidelity,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Explanation {
    pub feature_names: Vec<String>,
    /// Signed weights per feature in standardised units; positive pushes
    /// toward the predicted class.
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub local_fidelity: f64,
    pub predicted_class: u32,
    /// Model probability of the predicted class at the instance.
    pub predicted_proba: f64,
    pub n_perturbations: usize,
    pub seed: u64,
}

impl Explanation {
    /// `(name, weight)` sorted by |weight| descending, ties by feature order.
    pub fn ranked(&self) -> Vec<(&str, f64)> {
        let mut r: Vec<(usize, f64)> = self.weights.iter().copied().enumerate().collect();
        r.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()).then(a.0.cmp(&b.0)));
        r.into_iter().map(|(i, w)| (self.feature_names[i].as_str(), w)).collect()
    }
}

pub fn explain_instance(
    model: &dyn Classifier,
    instance: &[f64],
    feature_names: &[String],
    stats: &FeatureStats,
    config: &ExplainConfig,
    seed: u64,
) -> Result<Explanation, ExplainError> {
    let f = stats.len();
    for found in [instance.len(), feature_names.len(), model.n_features(), stats.stds.len()] {
        if found != f {
            return Err(ExplainError::DimensionMismatch { found, expected: f });
        }
    }
    if instance.iter().any(|v| !v.is_finite()) {
        return Err(ExplainError::NonFinite);
    }
    config.validate(f)?;

    let base = model.predict_proba(instance);
    let target = crate::classify::argmax_first(&base);
    let predicted_class = model.classes()[target];

    let samples = perturb(instance, stats, config.n_perturbations, seed)?;
    let origin = stats.standardize(instance);
    let width = config.resolved_kernel_width(f);
    let mut z = Vec::with_capacity(samples.len());
    let mut y = Vec::with_capacity(samples.len());
    let mut w = Vec::with_capacity(samples.len());
    for s in &samples {
        let zs = stats.standardize(s);
        let d2: f64 = zs.iter().zip(&origin).map(|(a, b)| (a - b).powi(2)).sum();
        w.push((-d2 / (width * width)).exp());
        y.push(model.predict_proba(s)[target]);
        z.push(zs);
    }
    let fit = fit_surrogate(&z, &y, &w, config.ridge_lambda)?;
    Ok(Explanation {
        feature_names: feature_names.to_vec(),
        weights: fit.weights,
        intercept: fit.intercept,
        local_fidelity: fit.fidelity,
        predicted_class,
        predicted_proba: base[target],
        n_perturbations: config.n_perturbations,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;

    /// Two-class model whose class-1 score is a fixed linear function of the
    /// standardised features.
    struct LinearProbe {
        stats: FeatureStats,
        coef: Vec<f64>,
        offset: f64,
    }

    impl Classifier for LinearProbe {
        fn classes(&self) -> &[u32] {
            &[0, 1]
        }
        fn n_features(&self) -> usize {
            self.coef.len()
        }
        fn predict_proba(&self, x: &[f64]) -> Vec<f64> {
            let s: f64 = self.offset + self.stats.standardize(x).iter().zip(&self.coef).map(|(a, b)| a * b).sum::<f64>();
            vec![-s, s]
        }
    }

    fn stats10() -> FeatureStats {
        FeatureStats {
            means: (0..10).map(|i| i as f64).collect(),
            stds: (0..10).map(|i| 0.5 + i as f64).collect(),
        }
    }

    fn names(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("P{i}")).collect()
    }

    #[test]
    fn single_sample_is_instance() {
        let s = stats10();
        let x: Vec<f64> = (0..10).map(|i| i as f64 * 0.3).collect();
        assert_eq!(perturb(&x, &s, 1, 4).unwrap(), vec![x.clone()]);
        assert_eq!(perturb(&x, &s, 50, 4).unwrap(), perturb(&x, &s, 50, 4).unwrap());
    }

    #[test]
    fn perturbation_spread_matches_training_std() {
        let mut s = stats10();
        s.stds[4] = 0.0;
        let x = vec![1.0; 10];
        let p = perturb(&x, &s, 5000, 9).unwrap();
        for j in 0..10 {
            let col: Vec<f64> = p.iter().map(|r| r[j]).collect();
            let m = col.iter().sum::<f64>() / col.len() as f64;
            let sd = (col.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (col.len() - 1) as f64).sqrt();
            if j == 4 {
                assert!(col.iter().all(|&v| v == 1.0));
            } else {
                assert!((sd / s.stds[j] - 1.0).abs() < 0.05, "feature {j}: {sd}");
            }
        }
    }

    #[test]
    fn constant_model_gives_zero_weights() {
        let s = stats10();
        let m = LinearProbe {
            stats: s.clone(),
            coef: vec![0.0; 10],
            offset: 0.7,
        };
        let e = explain_instance(&m, &[2.0; 10], &names(10), &s, &ExplainConfig::default(), 1).unwrap();
        assert!(e.weights.iter().all(|w| w.abs() < 1e-9));
        assert_eq!(e.local_fidelity, 0.0);
        assert_eq!(e.predicted_class, 1);
        assert!((e.intercept - 0.7).abs() < 1e-12);
    }

    #[test]
    fn linear_model_recovers_its_feature() {
        let s = stats10();
        let mut coef = vec![0.0; 10];
        coef[1] = 1.0;
        let m = LinearProbe {
            stats: s.clone(),
            coef,
            offset: 5.0,
        };
        let x: Vec<f64> = s.means.iter().map(|v| v + 0.2).collect();
        let e = explain_instance(&m, &x, &names(10), &s, &ExplainConfig::default(), 3).unwrap();
        assert!((e.weights[1] - 1.0).abs() < 1e-3);
        for (j, w) in e.weights.iter().enumerate() {
            if j != 1 {
                assert!(w.abs() < 0.05 * e.weights[1].abs());
            }
        }
        assert!(e.local_fidelity > 0.99);
        assert_eq!(e.ranked()[0].0, "P2");
    }

    #[test]
    fn weights_read_toward_predicted_class() {
        let s = stats10();
        let mut coef = vec![0.0; 10];
        coef[0] = 1.0;
        let m = LinearProbe {
            stats: s.clone(),
            coef,
            offset: -5.0,
        };
        // class 0 wins, its score is -s, so the weight flips sign
        let e = explain_instance(&m, &s.means.clone(), &names(10), &s, &ExplainConfig::default(), 3).unwrap();
        assert_eq!(e.predicted_class, 0);
        assert!((e.weights[0] + 1.0).abs() < 1e-3);
    }

    #[test]
    fn ignored_feature_weight_is_small() {
        let s = stats10();
        let mut coef = vec![0.3, -0.5, 0.8, 0.2, 0.0, 0.4, -0.1, 0.6, 0.25, -0.35];
        coef[4] = 0.0;
        let m = LinearProbe {
            stats: s.clone(),
            coef,
            offset: 3.0,
        };
        let cfg = ExplainConfig::default();
        let mut ratio = 0.0;
        for seed in 0..10 {
            let e = explain_instance(&m, &s.means.clone(), &names(10), &s, &cfg, seed).unwrap();
            let max = e.weights.iter().fold(0.0f64, |a, w| a.max(w.abs()));
            ratio += e.weights[4].abs() / max;
        }
        assert!(ratio / 10.0 < 0.02, "{}", ratio / 10.0);
    }

    #[test]
    fn reordering_samples_does_not_change_fit() {
        let mut rng = rng_from_seed(2);
        let z: Vec<Vec<f64>> = (0..400)
            .map(|_| (0..4).map(|_| StandardNormal.sample(&mut rng)).collect())
            .collect();
        let y: Vec<f64> = z.iter().map(|r: &Vec<f64>| r[0] - 2.0 * r[3] + r[1] * r[2]).collect();
        let w: Vec<f64> = z.iter().map(|r| (-r.iter().map(|v| v * v).sum::<f64>() / 3.0).exp()).collect();
        let a = fit_surrogate(&z, &y, &w, 1e-3).unwrap();
        let mut order: Vec<usize> = (0..400).collect();
        order.shuffle(&mut rng);
        let pick = |v: &[f64]| order.iter().map(|&i| v[i]).collect::<Vec<_>>();
        let z2: Vec<Vec<f64>> = order.iter().map(|&i| z[i].clone()).collect();
        let b = fit_surrogate(&z2, &pick(&y), &pick(&w), 1e-3).unwrap();
        for (p, q) in a.weights.iter().zip(&b.weights) {
            assert!((p - q).abs() < 1e-9);
        }
    }

    #[test]
    fn ridge_shrinks_weights() {
        let mut rng = rng_from_seed(6);
        let z: Vec<Vec<f64>> = (0..300)
            .map(|_| (0..3).map(|_| StandardNormal.sample(&mut rng)).collect())
            .collect();
        let y: Vec<f64> = z.iter().map(|r: &Vec<f64>| 2.0 * r[0] - r[1] + 0.5 * r[2]).collect();
        let w = vec![1.0; 300];
        let mut last = f64::INFINITY;
        for lambda in [1e-3, 1e-1, 1e1, 1e3, 1e6, 1e9] {
            let fit = fit_surrogate(&z, &y, &w, lambda).unwrap();
            let norm = fit.weights.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(norm < last);
            last = norm;
        }
        assert!(last < 1e-3);
    }

    #[test]
    fn rejects_bad_inputs() {
        let s = stats10();
        let cfg = ExplainConfig {
            n_perturbations: 99,
            ..Default::default()
        };
        let m = LinearProbe {
            stats: s.clone(),
            coef: vec![0.0; 10],
            offset: 1.0,
        };
        assert!(matches!(
            explain_instance(&m, &[0.0; 10], &names(10), &s, &cfg, 0),
            Err(ExplainError::InvalidConfig(_))
        ));
        assert!(matches!(
            explain_instance(&m, &[0.0; 9], &names(10), &s, &ExplainConfig::default(), 0),
            Err(ExplainError::DimensionMismatch { .. })
        ));
        assert_eq!(
            fit_surrogate(&[vec![1.0]], &[f64::NAN], &[1.0], 1e-3),
            Err(ExplainError::NonFinite)
        );
    }
}
