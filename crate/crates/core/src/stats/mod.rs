//! Feature statistics: Pearson and point-biserial correlation, two-sided
//! p-values, histograms and the per-feature significance report.

mod special;

use std::cmp::Ordering;

use thiserror::Error;

use crate::dataset::LabeledFeatureSet;

pub use special::student_t_two_sided;

/// Significance level.
pub const ALPHA: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("inputs have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("input is constant; correlation undefined")]
    ConstantInput,
    #[error("only one class present")]
    SingleClass,
    #[error("expected two classes, found {0}")]
    NotBinary(usize),
    #[error("|r| = 1; p-value is exactly 0")]
    DegenerateCorrelation,
    #[error("empty input")]
    EmptyInput,
    #[error("bin count must be at least 1")]
    InvalidBins,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample Pearson correlation coefficient, clamped to [-1, 1].
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64, StatsError> {
    if xs.len() != ys.len() {
        return Err(StatsError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(StatsError::TooFewSamples {
            needed: 2,
            got: xs.len(),
        });
    }
    let (mx, my) = (mean(xs), mean(ys));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::ConstantInput);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Pairwise Pearson matrix over the columns; `None` marks an undefined entry
/// (a constant column).
pub fn pearson_matrix(set: &LabeledFeatureSet) -> Result<Vec<Vec<Option<f64>>>, StatsError> {
    if set.len() < 2 {
        return Err(StatsError::TooFewSamples {
            needed: 2,
            got: set.len(),
        });
    }
    let f = set.n_features();
    let columns: Vec<Vec<f64>> = (0..f).map(|j| set.column(j)).collect();
    let mut m = vec![vec![None; f]; f];
    for i in 0..f {
        for j in i..f {
            let r = match pearson(&columns[i], &columns[j]) {
                Ok(_) if i == j => Some(1.0),
                Ok(r) => Some(r),
                Err(StatsError::ConstantInput) => None,
                Err(e) => return Err(e),
            };
            m[i][j] = r;
            m[j][i] = r;
        }
    }
    Ok(m)
}

/// Point-biserial correlation of `xs` against a two-class indicator
/// (`true` is class 1), using the population standard deviation.
pub fn point_biserial(xs: &[f64], labels: &[bool]) -> Result<f64, StatsError> {
    if xs.len() != labels.len() {
        return Err(StatsError::LengthMismatch(xs.len(), labels.len()));
    }
    let n = xs.len();
    let n1 = labels.iter().filter(|&&l| l).count();
    let n0 = n - n1;
    if n1 == 0 || n0 == 0 {
        return Err(StatsError::SingleClass);
    }
    let m = mean(xs);
    let s_pop = (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n as f64).sqrt();
    if s_pop == 0.0 {
        return Err(StatsError::ConstantInput);
    }
    let (mut sum1, mut sum0) = (0.0, 0.0);
    for (x, &l) in xs.iter().zip(labels) {
        if l {
            sum1 += x;
        } else {
            sum0 += x;
        }
    }
    let (m1, m0) = (sum1 / n1 as f64, sum0 / n0 as f64);
    let (n, n1, n0) = (n as f64, n1 as f64, n0 as f64);
    Ok(((m1 - m0) / s_pop * (n1 * n0 / (n * n)).sqrt()).clamp(-1.0, 1.0))
}

/// Two-sided p-value for a correlation `r` over `n` samples via Student's t
/// with `n - 2` degrees of freedom.
pub fn p_value_two_sided(r: f64, n: usize) -> Result<f64, StatsError> {
    if n < 3 {
        return Err(StatsError::TooFewSamples { needed: 3, got: n });
    }
    if r.abs() >= 1.0 {
        return Err(StatsError::DegenerateCorrelation);
    }
    if r == 0.0 {
        return Ok(1.0);
    }
    let df = (n - 2) as f64;
    let t = r * (df / (1.0 - r * r)).sqrt();
    Ok(student_t_two_sided(t, df))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    /// `bins + 1` monotone edges.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

/// Equal-width histogram over `[min, max]`; the last bin is closed on the
/// right. A constant input gets unit-width bins starting at its value.
pub fn histogram(xs: &[f64], bins: usize) -> Result<Histogram, StatsError> {
    if bins == 0 {
        return Err(StatsError::InvalidBins);
    }
    if xs.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut edges: Vec<f64> = (0..=bins).map(|i| lo + width * i as f64).collect();
    if hi > lo {
        edges[bins] = hi;
    }
    let mut counts = vec![0usize; bins];
    for &x in xs {
        let idx = (((x - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    Ok(Histogram { edges, counts })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSignificance {
    pub feature: String,
    /// `None` when the column is constant.
    pub pbcc: Option<f64>,
    pub p_value: Option<f64>,
    pub significant: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignificanceReport {
    /// Label treated as class 1 (the larger of the two).
    pub positive_label: u32,
    /// Sorted by descending |pbcc|; undefined entries last.
    pub rows: Vec<FeatureSignificance>,
}

impl SignificanceReport {
    pub fn get(&self, feature: &str) -> Option<&FeatureSignificance> {
        self.rows.iter().find(|r| r.feature == feature)
    }
}

/// Point-biserial coefficient, p-value and significance flag for every
/// column against a binary label.
pub fn significance_report(set: &LabeledFeatureSet) -> Result<SignificanceReport, StatsError> {
    let classes = set.classes();
    match classes.len() {
        0 => return Err(StatsError::EmptyInput),
        1 => return Err(StatsError::SingleClass),
        2 => {}
        k => return Err(StatsError::NotBinary(k)),
    }
    let positive_label = classes[1];
    let indicator: Vec<bool> = set.labels().iter().map(|&l| l == positive_label).collect();
    let n = set.len();

    let mut rows = Vec::with_capacity(set.n_features());
    for (j, name) in set.feature_names().iter().enumerate() {
        let row = match point_biserial(&set.column(j), &indicator) {
            Ok(r) => {
                let p = match p_value_two_sided(r, n) {
                    Ok(p) => p,
                    Err(StatsError::DegenerateCorrelation) => 0.0,
                    Err(e) => return Err(e),
                };
                FeatureSignificance {
                    feature: name.clone(),
                    pbcc: Some(r),
                    p_value: Some(p),
                    significant: p < ALPHA,
                }
            }
            Err(StatsError::ConstantInput) => FeatureSignificance {
                feature: name.clone(),
                pbcc: None,
                p_value: None,
                significant: false,
            },
            Err(e) => return Err(e),
        };
        rows.push(row);
    }
    rows.sort_by(|a, b| match (a.pbcc, b.pbcc) {
        (Some(x), Some(y)) => y.abs().total_cmp(&x.abs()),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    });
    Ok(SignificanceReport {
        positive_label,
        rows,
    })
}
