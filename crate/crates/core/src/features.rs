//! The ten positive/negative fluctuation parameters of a trendless sequence.
//!
//! Every parameter is computed on a single column of samples. Deviations
//! `Dy_j = y_j - mean(y)` are the common working quantity: positive and
//! negative fluctuations are the positive and negative deviations, and
//! "integrals" are cumulative sums with unit spacing prefixed by zero.
//!
//! | name | quantity |
//! |------|----------|
//! | P1   | arithmetic mean |
//! | P2   | `max(Dy) - min(Dy)` |
//! | P3   | `max(Dy) - |min(Dy)|` |
//! | P4   | range of the cumulative sum of `Dy` |
//! | P5   | `(max - mean) / (mean - min)` |
//! | P6   | last positive index minus last negative index (1-based) |
//! | P7   | peak of the cumulative sum of descending-sorted `Dy` |
//! | P8   | range of the cumulative sum of `Dy / Range(y)` |
//! | P9   | mean oscillation frequency from the zero-crossing line |
//! | P10  | oscillation phase from the zero-crossing line, in `[0, pi)` |

use std::f64::consts::PI;
use std::fmt;

use thiserror::Error;

/// Number of parameters in a [`FeatureVector`].
pub const FEATURE_COUNT: usize = 10;

/// Column names used in every CSV file.
pub const FEATURE_NAMES: [&str; FEATURE_COUNT] =
    ["P1", "P2", "P3", "P4", "P5", "P6", "P7", "P8", "P9", "P10"];

/// Shortest sequence accepted by [`extract_features`].
pub const MIN_SEQUENCE_LEN: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FeatureError {
    #[error("non-finite sample at index {index}")]
    NonFiniteInput { index: usize },
    #[error("sequence of {len} samples is too short for {param} (need {min})")]
    TooShort {
        param: &'static str,
        len: usize,
        min: usize,
    },
    #[error("{param}: sequence has zero range")]
    DegenerateSequence { param: &'static str },
    #[error("{param}: deviations do not take both signs")]
    OneSidedSequence { param: &'static str },
    #[error("P5: mean equals minimum, asymmetry undefined")]
    DegenerateAsymmetry,
    #[error("{found} zero crossings found, at least 2 are needed for the root line")]
    InsufficientRoots { found: usize },
    #[error("root line slope {slope} is not positive")]
    DegenerateFit { slope: f64 },
}

impl FeatureError {
    /// The parameter whose computation failed.
    pub fn parameter(&self) -> &'static str {
        match self {
            FeatureError::NonFiniteInput { .. } => "input",
            FeatureError::TooShort { param, .. }
            | FeatureError::DegenerateSequence { param }
            | FeatureError::OneSidedSequence { param } => param,
            FeatureError::DegenerateAsymmetry => "P5",
            FeatureError::InsufficientRoots { .. } | FeatureError::DegenerateFit { .. } => "P9/P10",
        }
    }
}

/// One column of real samples (radians for phase-error input).
#[derive(Debug, Clone, PartialEq)]
pub struct TrendlessSequence {
    samples: Vec<f64>,
}

impl TrendlessSequence {
    pub fn new(samples: Vec<f64>) -> Result<Self, FeatureError> {
        if let Some(index) = samples.iter().position(|v| !v.is_finite()) {
            return Err(FeatureError::NonFiniteInput { index });
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.samples
    }

    fn require(&self, param: &'static str, min: usize) -> Result<(), FeatureError> {
        if self.samples.len() < min {
            return Err(FeatureError::TooShort {
                param,
                len: self.samples.len(),
                min,
            });
        }
        Ok(())
    }
}

impl TryFrom<Vec<f64>> for TrendlessSequence {
    type Error = FeatureError;

    fn try_from(samples: Vec<f64>) -> Result<Self, Self::Error> {
        Self::new(samples)
    }
}

/// The ten parameters P1..P10 of one sequence, stored in order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector {
    values: [f64; FEATURE_COUNT],
}

impl FeatureVector {
    pub fn from_array(values: [f64; FEATURE_COUNT]) -> Self {
        Self { values }
    }

    pub fn as_array(&self) -> &[f64; FEATURE_COUNT] {
        &self.values
    }

    /// Parameter by its 1-based number, `get(9)` is P9.
    pub fn get(&self, param: usize) -> f64 {
        self.values[param - 1]
    }
}

impl fmt::Display for FeatureVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (name, v)) in FEATURE_NAMES.iter().zip(self.values.iter()).enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{name}={v}")?;
        }
        Ok(())
    }
}

/// Fractional positions of the zero crossings, in samples (0-based).
#[derive(Debug, Clone, PartialEq)]
pub struct RootSequence {
    pub roots: Vec<f64>,
}

impl RootSequence {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }
}

/// Least-squares line `R_k = slope * k + intercept` for `k = 1..=K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootLineFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual_rms: f64,
}

fn mean_of(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn deviations(samples: &[f64]) -> Vec<f64> {
    let mean = mean_of(samples);
    samples.iter().map(|v| v - mean).collect()
}

fn min_max(values: &[f64]) -> (f64, f64) {
    values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

/// Range of the running sum `J_0 = 0, J_j = J_{j-1} + v_j`.
fn cumulative_range(values: &[f64]) -> f64 {
    let mut acc = 0.0;
    let (mut lo, mut hi) = (0.0f64, 0.0f64);
    for v in values {
        acc += v;
        lo = lo.min(acc);
        hi = hi.max(acc);
    }
    hi - lo
}

/// Subtracts the arithmetic mean.
pub fn center(seq: &TrendlessSequence) -> Result<TrendlessSequence, FeatureError> {
    seq.require("center", 1)?;
    Ok(TrendlessSequence {
        samples: deviations(&seq.samples),
    })
}

pub fn p1_mean(seq: &TrendlessSequence) -> Result<f64, FeatureError> {
    seq.require("P1", 1)?;
    Ok(mean_of(&seq.samples))
}

/// Range between the largest positive and most negative deviation.
/// A constant sequence yields 0.
pub fn p2_range(seq: &TrendlessSequence) -> Result<f64, FeatureError> {
    seq.require("P2", 2)?;
    let (lo, hi) = min_max(&deviations(&seq.samples));
    Ok(hi - lo)
}

pub fn p3_relative_intensity(seq: &TrendlessSequence) -> Result<f64, FeatureError> {
    seq.require("P3", 2)?;
    relative_intensity(&deviations(&seq.samples))
}

fn relative_intensity(dy: &[f64]) -> Result<f64, FeatureError> {
    let (lo, hi) = min_max(dy);
    if !(hi > 0.0 && lo < 0.0) {
        return Err(FeatureError::OneSidedSequence { param: "P3" });
    }
    Ok(hi - lo.abs())
}

pub fn p4_cumulative_range(seq: &TrendlessSequence) -> Result<f64, FeatureError> {
    seq.require("P4", 2)?;
    Ok(cumulative_range(&deviations(&seq.samples)))
}

pub fn p5_asymmetry(seq: &TrendlessSequence) -> Result<f64, FeatureError> {
    seq.require("P5", 2)?;
    asymmetry(&seq.samples)
}

fn asymmetry(samples: &[f64]) -> Result<f64, FeatureError> {
    let mean = mean_of(samples);
    let (lo, hi) = min_max(samples);
    let below = mean - lo;
    if below <= 0.0 {
        return Err(FeatureError::DegenerateAsymmetry);
    }
    Ok((hi - mean) / below)
}

pub fn p6_horizontal_asymmetry(seq: &TrendlessSequence) -> Result<f64, FeatureError> {
    seq.require("P6", 2)?;
    horizontal_asymmetry(&deviations(&seq.samples))
}

fn horizontal_asymmetry(dy: &[f64]) -> Result<f64, FeatureError> {
    let last_up = dy.iter().rposition(|&v| v > 0.0);
    let last_dn = dy.iter().rposition(|&v| v < 0.0);
    match (last_up, last_dn) {
        // 1-based indices; the +1 cancels in the difference.
        (Some(up), Some(dn)) => Ok(up as f64 - dn as f64),
        _ => Err(FeatureError::OneSidedSequence { param: "P6" }),
    }
}

pub fn p7_bell_max(seq: &TrendlessSequence) -> Result<f64, FeatureError> {
    seq.require("P7", 2)?;
    Ok(bell_max(deviations(&seq.samples)))
}

/// Peak of the cumulative sum over deviations ordered from largest to smallest.
fn bell_max(mut dy: Vec<f64>) -> f64 {
    dy.sort_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    let mut peak = 0.0f64;
    for v in dy {
        acc += v;
        peak = peak.max(acc);
    }
    peak
}

pub fn p8_normalized_integral_range(seq: &TrendlessSequence) -> Result<f64, FeatureError> {
    seq.require("P8", 2)?;
    normalized_integral_range(&deviations(&seq.samples))
}

fn normalized_integral_range(dy: &[f64]) -> Result<f64, FeatureError> {
    let (lo, hi) = min_max(dy);
    let range = hi - lo;
    if range <= 0.0 {
        return Err(FeatureError::DegenerateSequence { param: "P8" });
    }
    let normalized: Vec<f64> = dy.iter().map(|v| v / range).collect();
    Ok(cumulative_range(&normalized))
}

/// Zero crossings of `values`, which are used as given (pass deviations).
///
/// Opposite-sign neighbours give a linearly interpolated root; an exact zero
/// sample is a root at its own index, and a run of zeros counts once.
pub fn find_roots(values: &[f64]) -> RootSequence {
    let mut roots = Vec::new();
    for (j, &v) in values.iter().enumerate() {
        if v == 0.0 {
            if j == 0 || values[j - 1] != 0.0 {
                roots.push(j as f64);
            }
            continue;
        }
        if let Some(&next) = values.get(j + 1) {
            if next != 0.0 && (v > 0.0) != (next > 0.0) {
                roots.push(j as f64 + v / (v - next));
            }
        }
    }
    RootSequence { roots }
}

/// Ordinary least squares of the roots against their 1-based index.
pub fn fit_root_line(roots: &RootSequence) -> Result<RootLineFit, FeatureError> {
    let k_count = roots.len();
    if k_count < 2 {
        return Err(FeatureError::InsufficientRoots { found: k_count });
    }
    let n = k_count as f64;
    let k_mean = (n + 1.0) / 2.0;
    let r_mean = mean_of(&roots.roots);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (i, r) in roots.roots.iter().enumerate() {
        let dk = (i + 1) as f64 - k_mean;
        sxy += dk * (r - r_mean);
        sxx += dk * dk;
    }
    let slope = sxy / sxx;
    if !(slope > 0.0) {
        return Err(FeatureError::DegenerateFit { slope });
    }
    let intercept = r_mean - slope * k_mean;
    let sse: f64 = roots
        .roots
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let e = r - (slope * (i + 1) as f64 + intercept);
            e * e
        })
        .sum();
    Ok(RootLineFit {
        slope,
        intercept,
        residual_rms: (sse / n).sqrt(),
    })
}

/// Mean frequency `pi / slope` and phase `(pi * intercept / slope - pi/2) mod pi`.
///
/// Consecutive roots of `cos(w t - phi)` are half a period apart, so the
/// slope is `pi / w`; matching the intercept gives the phase, which is only
/// defined up to a multiple of pi.
pub fn p9_p10_from_fit(fit: &RootLineFit) -> Result<(f64, f64), FeatureError> {
    if !(fit.slope > 0.0) {
        return Err(FeatureError::DegenerateFit { slope: fit.slope });
    }
    let omega = PI / fit.slope;
    let mut phase = (PI * fit.intercept / fit.slope - PI / 2.0).rem_euclid(PI);
    if phase >= PI {
        phase = 0.0;
    }
    Ok((omega, phase))
}

/// All ten parameters of one sequence.
pub fn extract_features(seq: &TrendlessSequence) -> Result<FeatureVector, FeatureError> {
    seq.require("extract", MIN_SEQUENCE_LEN)?;
    let y = seq.samples();
    let mean = mean_of(y);
    let dy: Vec<f64> = y.iter().map(|v| v - mean).collect();
    let (lo, hi) = min_max(&dy);
    let range = hi - lo;
    if range <= 0.0 {
        return Err(FeatureError::DegenerateSequence { param: "P8" });
    }

    let p3 = relative_intensity(&dy)?;
    let p4 = cumulative_range(&dy);
    let p5 = asymmetry(y)?;
    let p6 = horizontal_asymmetry(&dy)?;
    let p7 = bell_max(dy.clone());
    let p8 = normalized_integral_range(&dy)?;
    let fit = fit_root_line(&find_roots(&dy))?;
    let (p9, p10) = p9_p10_from_fit(&fit)?;

    Ok(FeatureVector {
        values: [mean, range, p3, p4, p5, p6, p7, p8, p9, p10],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(v: &[f64]) -> TrendlessSequence {
        TrendlessSequence::new(v.to_vec()).unwrap()
    }

    fn sinusoid(n: usize) -> TrendlessSequence {
        seq(&(0..n)
            .map(|j| (PI * (j as f64 + 0.5) / 8.0).sin())
            .collect::<Vec<_>>())
    }

    #[test]
    fn rejects_non_finite() {
        assert_eq!(
            TrendlessSequence::new(vec![1.0, f64::NAN]),
            Err(FeatureError::NonFiniteInput { index: 1 })
        );
        assert!(TrendlessSequence::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn center_examples() {
        assert_eq!(center(&seq(&[1.0, 3.0, 2.0, 0.0])).unwrap().samples(), &[-0.5, 1.5, 0.5, -1.5]);
        assert_eq!(center(&seq(&[5.0; 4])).unwrap().samples(), &[0.0; 4]);
        assert_eq!(
            center(&seq(&[0.0, 0.0, 0.0, 1.0])).unwrap().samples(),
            &[-0.25, -0.25, -0.25, 0.75]
        );
    }

    #[test]
    fn p1_examples() {
        assert_eq!(p1_mean(&seq(&[1.0, 3.0, 2.0, 0.0])).unwrap(), 1.5);
        assert_eq!(p1_mean(&seq(&[0.0, 0.0, 0.0])).unwrap(), 0.0);
        assert_eq!(p1_mean(&seq(&[-2.0, 2.0])).unwrap(), 0.0);
        assert!(matches!(p1_mean(&seq(&[])), Err(FeatureError::TooShort { .. })));
    }

    #[test]
    fn p2_examples() {
        assert_eq!(p2_range(&seq(&[1.0, 3.0, 2.0, 0.0])).unwrap(), 3.0);
        assert_eq!(p2_range(&seq(&[0.7, 0.7, 0.7])).unwrap(), 0.0);
        assert_eq!(p2_range(&seq(&[-1.0, 1.0, -1.0, 1.0])).unwrap(), 2.0);
    }

    #[test]
    fn p3_examples() {
        assert_eq!(p3_relative_intensity(&seq(&[1.0, 3.0, 2.0, 0.0])).unwrap(), 0.0);
        assert_eq!(p3_relative_intensity(&seq(&[0.0, 4.0, 1.0, 1.0])).unwrap(), 1.0);
        let y = [0.3, -1.2, 2.5, 0.1, -0.4];
        let neg: Vec<f64> = y.iter().map(|v| -v).collect();
        let a = p3_relative_intensity(&seq(&y)).unwrap();
        let b = p3_relative_intensity(&seq(&neg)).unwrap();
        assert!((a + b).abs() < 1e-12);
        assert_eq!(
            p3_relative_intensity(&seq(&[2.0, 2.0, 2.0])),
            Err(FeatureError::OneSidedSequence { param: "P3" })
        );
    }

    #[test]
    fn p4_examples() {
        assert_eq!(p4_cumulative_range(&seq(&[1.0, 3.0, 2.0, 0.0])).unwrap(), 2.0);
        assert_eq!(p4_cumulative_range(&seq(&[4.0; 6])).unwrap(), 0.0);
        let y = [0.3, -1.2, 2.5, 0.1, -0.4];
        let scaled: Vec<f64> = y.iter().map(|v| 2.5 * v).collect();
        let a = p4_cumulative_range(&seq(&y)).unwrap();
        let b = p4_cumulative_range(&seq(&scaled)).unwrap();
        assert!((b - 2.5 * a).abs() < 1e-12);
    }

    #[test]
    fn p5_examples() {
        assert_eq!(p5_asymmetry(&seq(&[1.0, 3.0, 2.0, 0.0])).unwrap(), 1.0);
        assert_eq!(p5_asymmetry(&seq(&[0.0, 0.0, 0.0, 4.0])).unwrap(), 3.0);
        let y = [0.3, -1.2, 2.5, 0.1, -0.4];
        let mapped: Vec<f64> = y.iter().map(|v| 3.0 * v - 7.0).collect();
        let a = p5_asymmetry(&seq(&y)).unwrap();
        let b = p5_asymmetry(&seq(&mapped)).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert_eq!(p5_asymmetry(&seq(&[1.0; 5])), Err(FeatureError::DegenerateAsymmetry));
    }

    #[test]
    fn p6_examples() {
        assert_eq!(p6_horizontal_asymmetry(&seq(&[1.0, 3.0, 2.0, 0.0])).unwrap(), -1.0);
        assert_eq!(p6_horizontal_asymmetry(&seq(&[0.0, 3.0, 1.0, 1.0])).unwrap(), -2.0);
        // sign pattern [+,-,-,+] mirrors to itself, [+,+,-,-] mirrors to [-,-,+,+]
        let y = [2.0, 1.0, -1.0, -2.0];
        let rev: Vec<f64> = y.iter().rev().copied().collect();
        assert_eq!(
            p6_horizontal_asymmetry(&seq(&rev)).unwrap(),
            -p6_horizontal_asymmetry(&seq(&y)).unwrap()
        );
        assert!(p6_horizontal_asymmetry(&seq(&[1.0, 1.0])).is_err());
    }

    #[test]
    fn p7_examples() {
        assert_eq!(p7_bell_max(&seq(&[1.0, 3.0, 2.0, 0.0])).unwrap(), 2.0);
        assert_eq!(p7_bell_max(&seq(&[-3.0; 4])).unwrap(), 0.0);
        assert_eq!(
            p7_bell_max(&seq(&[0.0, 2.0, 3.0, 1.0])).unwrap(),
            p7_bell_max(&seq(&[1.0, 3.0, 2.0, 0.0])).unwrap()
        );
    }

    #[test]
    fn p8_examples() {
        let v = p8_normalized_integral_range(&seq(&[1.0, 3.0, 2.0, 0.0])).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-15);
        let y = [0.3, -1.2, 2.5, 0.1, -0.4];
        let mapped: Vec<f64> = y.iter().map(|v| 0.01 * v + 100.0).collect();
        let a = p8_normalized_integral_range(&seq(&y)).unwrap();
        let b = p8_normalized_integral_range(&seq(&mapped)).unwrap();
        assert!((a - b).abs() < 1e-9);
        assert_eq!(
            p8_normalized_integral_range(&seq(&[1.0; 4])),
            Err(FeatureError::DegenerateSequence { param: "P8" })
        );
    }

    #[test]
    fn root_examples() {
        assert_eq!(find_roots(&[-1.0, 1.0]).roots, vec![0.5]);
        assert_eq!(find_roots(&[1.0, -1.0, 1.0]).roots, vec![0.5, 1.5]);
        assert_eq!(find_roots(&[2.0, 0.0, -2.0]).roots, vec![1.0]);
        assert_eq!(find_roots(&[1.0, 0.0, 0.0, 0.0, -1.0]).roots, vec![1.0]);
        assert!(find_roots(&[1.0, 2.0, 3.0]).is_empty());
        assert!(find_roots(&[]).is_empty());
    }

    #[test]
    fn root_line_examples() {
        let fit = fit_root_line(&RootSequence { roots: vec![8.0, 16.0, 24.0] }).unwrap();
        assert!((fit.slope - 8.0).abs() < 1e-12 && fit.intercept.abs() < 1e-12);
        let fit = fit_root_line(&RootSequence { roots: vec![3.0, 5.0] }).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12 && (fit.intercept - 1.0).abs() < 1e-12);
        // k = 1..4, kbar = 2.5, Rbar = 2.5, Sxy = 4.9, Sxx = 5
        let fit = fit_root_line(&RootSequence { roots: vec![1.0, 2.1, 2.9, 4.0] }).unwrap();
        assert!((fit.slope - 0.98).abs() < 1e-10, "{}", fit.slope);
        assert!((fit.intercept - 0.05).abs() < 1e-10, "{}", fit.intercept);
        assert_eq!(
            fit_root_line(&RootSequence { roots: vec![1.0] }),
            Err(FeatureError::InsufficientRoots { found: 1 })
        );
    }

    #[test]
    fn frequency_and_phase_examples() {
        let fit = RootLineFit { slope: 8.0, intercept: 0.0, residual_rms: 0.0 };
        let (w, phi) = p9_p10_from_fit(&fit).unwrap();
        assert!((w - PI / 8.0).abs() < 1e-15);
        assert!((phi - PI / 2.0).abs() < 1e-15);

        let fit = RootLineFit { slope: PI, intercept: PI / 2.0, residual_rms: 0.0 };
        let (w, phi) = p9_p10_from_fit(&fit).unwrap();
        assert!((w - 1.0).abs() < 1e-15);
        assert!(phi.abs() < 1e-12 || (PI - phi).abs() < 1e-12);

        let fit = RootLineFit { slope: -1.0, intercept: 0.0, residual_rms: 0.0 };
        assert!(p9_p10_from_fit(&fit).is_err());
    }

    #[test]
    fn sinusoid_extraction() {
        let fv = extract_features(&sinusoid(256)).unwrap();
        let max_abs = sinusoid(256).samples().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(fv.get(1).abs() < 1e-12);
        assert!((fv.get(2) - 2.0 * max_abs).abs() < 1e-12);
        assert!((fv.get(5) - 1.0).abs() < 1e-9);
        assert!(((fv.get(9) - PI / 8.0) / (PI / 8.0)).abs() < 1e-6);
    }

    #[test]
    fn extraction_errors_name_the_parameter() {
        let err = extract_features(&seq(&[1.0; 16])).unwrap_err();
        assert_eq!(err, FeatureError::DegenerateSequence { param: "P8" });
        assert_eq!(err.parameter(), "P8");
        let short = extract_features(&seq(&[1.0, 2.0, 3.0])).unwrap_err();
        assert!(matches!(short, FeatureError::TooShort { min: 8, .. }));
        // monotone ramp crosses its mean once
        let ramp: Vec<f64> = (0..16).map(|v| v as f64).collect();
        let err = extract_features(&seq(&ramp)).unwrap_err();
        assert_eq!(err, FeatureError::InsufficientRoots { found: 1 });
        assert_eq!(err.parameter(), "P9/P10");
    }

    #[test]
    fn extraction_is_deterministic() {
        let s = seq(&(0..100).map(|j| ((j * 37 % 11) as f64).sin()).collect::<Vec<_>>());
        let a = extract_features(&s).unwrap();
        let b = extract_features(&s).unwrap();
        for (x, y) in a.as_array().iter().zip(b.as_array()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }
}
