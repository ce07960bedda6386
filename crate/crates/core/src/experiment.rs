//! Synthetic captures: simulated devices transmitting the etalon back to
//! back through a random channel gain, and the capture-to-features path.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::dataset::{DatasetError, LabeledFeatureSet};
use crate::features::{extract_features, FeatureVector};
use crate::rng::{derive_seed, rng_from_seed};
use crate::signal::{
    run_capture_pipeline, simulate_device, EtalonSignal, IQFrame, ImpairmentProfile, SignalError, SyncConfig,
};

/// Built-in device profiles. Devices differ mainly in DC offset, amplifier
/// compression and phase jitter; IQ imbalance of a real etalon collapses to
/// a complex gain and is normalised away.
pub fn builtin_profiles() -> Vec<ImpairmentProfile> {
    vec![
        ImpairmentProfile {
            gain_imbalance: 0.02,
            quadrature_error: 0.01,
            phase_noise_rms: 0.01,
            cubic_nonlinearity: 0.05,
            dc_offset: Complex64::new(0.05, 0.02),
            snr_db: None,
        },
        ImpairmentProfile {
            gain_imbalance: -0.01,
            quadrature_error: 0.03,
            phase_noise_rms: 0.015,
            cubic_nonlinearity: 0.035,
            dc_offset: Complex64::new(0.042, 0.028),
            snr_db: None,
        },
        ImpairmentProfile {
            gain_imbalance: 0.04,
            quadrature_error: -0.02,
            phase_noise_rms: 0.005,
            cubic_nonlinearity: 0.08,
            dc_offset: Complex64::new(0.01, -0.05),
            snr_db: None,
        },
        ImpairmentProfile {
            gain_imbalance: 0.0,
            quadrature_error: 0.0,
            phase_noise_rms: 0.03,
            cubic_nonlinearity: 0.0,
            dc_offset: Complex64::new(-0.04, -0.03),
            snr_db: None,
        },
    ]
}

/// Simulated capture of one device.
#[derive(Debug, Clone, PartialEq)]
pub struct Capture {
    pub samples: Vec<Complex64>,
    /// Stream offset of frame 0.
    pub first_start: usize,
    /// Channel gain applied to each frame.
    pub gains: Vec<Complex64>,
}

/// `n_frames` impaired etalon repetitions after a noise-only prefix shorter
/// than one frame. Each frame gets its own channel gain with magnitude in
/// `[0.5, 2)` and uniform phase. AWGN follows `snr_db` relative to each
/// frame's received power; the prefix noise matches the unit-gain level.
pub fn simulate_capture(
    etalon: &EtalonSignal,
    profile: &ImpairmentProfile,
    snr_db: Option<f64>,
    n_frames: usize,
    seed: u64,
) -> Result<Capture, SignalError> {
    profile.validate()?;
    let device = profile.with_snr_db(None);
    let channel_noise = ImpairmentProfile::default().with_snr_db(snr_db);
    let l = etalon.len();
    let mut rng = rng_from_seed(derive_seed(seed, u64::MAX));
    let first_start = rng.gen_range(0..l);

    let mut samples = Vec::with_capacity(first_start + n_frames * l);
    let mean_power = etalon.energy() / l as f64;
    match snr_db {
        Some(snr) => {
            let sigma = (mean_power / 10f64.powf(snr / 10.0) / 2.0).sqrt();
            let noise = Normal::new(0.0, sigma).expect("finite sigma");
            samples.extend((0..first_start).map(|_| Complex64::new(noise.sample(&mut rng), noise.sample(&mut rng))));
        }
        None => samples.resize(first_start, Complex64::new(0.0, 0.0)),
    }

    let clean = IQFrame::new(etalon.samples().to_vec());
    let mut gains = Vec::with_capacity(n_frames);
    for i in 0..n_frames {
        let gain = Complex64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI));
        let frame_seed = derive_seed(seed, i as u64);
        let mut tx = simulate_device(&clean, &device, derive_seed(frame_seed, 0))?;
        tx.samples.iter_mut().for_each(|s| *s *= gain);
        let rx = simulate_device(&tx, &channel_noise, derive_seed(frame_seed, 1))?;
        samples.extend_from_slice(&rx.samples);
        gains.push(gain);
    }
    Ok(Capture {
        samples,
        first_start,
        gains,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    pub features: Vec<FeatureVector>,
    pub frames: usize,
    /// Frames whose error phase or features were degenerate.
    pub skipped: usize,
}

/// Synchronises a stream and extracts the ten features of every frame,
/// skipping frames that fail individually.
pub fn extract_capture(stream: &[Complex64], etalon: &EtalonSignal, config: &SyncConfig) -> Result<Extraction, SignalError> {
    let phases = run_capture_pipeline(stream, etalon, config)?;
    let frames = phases.len();
    let features: Vec<FeatureVector> = phases
        .into_iter()
        .filter_map(|p| p.ok())
        .filter_map(|p| extract_features(p.sequence()).ok())
        .collect();
    Ok(Extraction {
        skipped: frames - features.len(),
        frames,
        features,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticExperiment {
    pub set: LabeledFeatureSet,
    pub frames: usize,
    pub skipped: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

/// Simulates every profile (label = position), extracts features and
/// collects them in one labelled set. Device `d` uses `derive_seed(seed, d)`.
pub fn synthetic_feature_set(
    etalon: &EtalonSignal,
    profiles: &[ImpairmentProfile],
    snr_db: Option<f64>,
    frames_per_device: usize,
    seed: u64,
) -> Result<SyntheticExperiment, ExperimentError> {
    let mut labels = Vec::new();
    let mut features = Vec::new();
    let (mut frames, mut skipped) = (0, 0);
    for (d, profile) in profiles.iter().enumerate() {
        let capture = simulate_capture(etalon, profile, snr_db, frames_per_device, derive_seed(seed, d as u64))?;
        let ex = extract_capture(&capture.samples, etalon, &SyncConfig::default())?;
        frames += ex.frames;
        skipped += ex.skipped;
        labels.extend(std::iter::repeat(d as u32).take(ex.features.len()));
        features.extend(ex.features);
    }
    Ok(SyntheticExperiment {
        set: LabeledFeatureSet::from_features(labels, &features)?,
        frames,
        skipped,
    })
}
