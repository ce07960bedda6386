//! Software stand-in for an imperfect transmitter.

use num_complex::Complex64;
use rand_distr::{Distribution, Normal};

use super::{IQFrame, SignalError};
use crate::rng::rng_from_seed;

/// Analog imperfections of one simulated device. The all-zero profile with
/// `snr_db: None` is the identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpairmentProfile {
    /// Fractional gain mismatch of the Q branch; 0 is balanced.
    pub gain_imbalance: f64,
    /// Quadrature skew between the I and Q branches, radians.
    pub quadrature_error: f64,
    /// Standard deviation of per-sample Gaussian phase jitter, radians.
    pub phase_noise_rms: f64,
    /// Coefficient `c` of the memoryless `x + c x |x|^2` amplifier term.
    pub cubic_nonlinearity: f64,
    pub dc_offset: Complex64,
    /// Additive white Gaussian noise relative to the impaired signal power;
    /// `None` disables noise.
    pub snr_db: Option<f64>,
}

impl Default for ImpairmentProfile {
    fn default() -> Self {
        Self {
            gain_imbalance: 0.0,
            quadrature_error: 0.0,
            phase_noise_rms: 0.0,
            cubic_nonlinearity: 0.0,
            dc_offset: Complex64::new(0.0, 0.0),
            snr_db: None,
        }
    }
}

impl ImpairmentProfile {
    pub fn validate(&self) -> Result<(), SignalError> {
        let finite = [
            self.gain_imbalance,
            self.quadrature_error,
            self.phase_noise_rms,
            self.cubic_nonlinearity,
            self.dc_offset.re,
            self.dc_offset.im,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(SignalError::InvalidProfile("non-finite parameter".into()));
        }
        if self.phase_noise_rms < 0.0 {
            return Err(SignalError::InvalidProfile("phase_noise_rms must be >= 0".into()));
        }
        if self.gain_imbalance <= -1.0 {
            return Err(SignalError::InvalidProfile("gain_imbalance must exceed -1".into()));
        }
        if let Some(snr) = self.snr_db {
            if !snr.is_finite() {
                return Err(SignalError::InvalidProfile("snr_db must be finite".into()));
            }
        }
        Ok(())
    }

    pub fn with_snr_db(mut self, snr_db: Option<f64>) -> Self {
        self.snr_db = snr_db;
        self
    }
}

/// Applies, in order: cubic nonlinearity, IQ gain/quadrature imbalance,
/// DC offset, per-sample phase noise and AWGN. Deterministic given `seed`.
pub fn simulate_device(
    clean: &IQFrame,
    profile: &ImpairmentProfile,
    seed: u64,
) -> Result<IQFrame, SignalError> {
    profile.validate()?;
    let mut rng = rng_from_seed(seed);
    let q_gain = 1.0 + profile.gain_imbalance;
    let (skew_sin, skew_cos) = profile.quadrature_error.sin_cos();

    let mut out: Vec<Complex64> = clean
        .samples
        .iter()
        .map(|&x| {
            let x = x + profile.cubic_nonlinearity * x * x.norm_sqr();
            let q = q_gain * (skew_sin * x.re + skew_cos * x.im);
            Complex64::new(x.re, q) + profile.dc_offset
        })
        .collect();

    if profile.phase_noise_rms > 0.0 {
        let jitter = Normal::new(0.0, profile.phase_noise_rms).expect("validated std");
        for s in out.iter_mut() {
            *s *= Complex64::from_polar(1.0, jitter.sample(&mut rng));
        }
    }

    if let Some(snr_db) = profile.snr_db {
        let power = out.iter().map(|s| s.norm_sqr()).sum::<f64>() / out.len().max(1) as f64;
        let sigma = (power / 10f64.powf(snr_db / 10.0) / 2.0).sqrt();
        if sigma > 0.0 {
            let noise = Normal::new(0.0, sigma).expect("finite sigma");
            for s in out.iter_mut() {
                *s += Complex64::new(noise.sample(&mut rng), noise.sample(&mut rng));
            }
        }
    }

    Ok(IQFrame {
        samples: out,
        source_label: clean.source_label,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::transnoise_etalon;

    fn unit_power_frame(len: usize) -> IQFrame {
        IQFrame::new(
            (0..len)
                .map(|j| Complex64::from_polar(1.0, 0.37 * j as f64))
                .collect(),
        )
    }

    #[test]
    fn identity_profile() {
        let clean = IQFrame::new(transnoise_etalon(0, 256).unwrap().samples().to_vec());
        let out = simulate_device(&clean, &ImpairmentProfile::default(), 1).unwrap();
        assert_eq!(out, clean);
    }

    #[test]
    fn snr_calibration() {
        let clean = unit_power_frame(1024);
        let profile = ImpairmentProfile::default().with_snr_db(Some(20.0));
        let mut total = 0.0;
        for seed in 0..100 {
            let out = simulate_device(&clean, &profile, seed).unwrap();
            total += out
                .samples
                .iter()
                .zip(&clean.samples)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                / 1024.0;
        }
        let measured = total / 100.0;
        assert!((measured - 0.01).abs() < 0.001, "noise power {measured}");
    }

    #[test]
    fn distinct_profiles_give_distinct_outputs() {
        let clean = unit_power_frame(128);
        let a = ImpairmentProfile {
            cubic_nonlinearity: 0.05,
            ..Default::default()
        };
        let b = ImpairmentProfile {
            dc_offset: Complex64::new(0.02, -0.01),
            ..Default::default()
        };
        assert_ne!(simulate_device(&clean, &a, 3).unwrap(), simulate_device(&clean, &b, 3).unwrap());
    }

    #[test]
    fn seeded_determinism() {
        let clean = unit_power_frame(64);
        let p = ImpairmentProfile {
            phase_noise_rms: 0.01,
            snr_db: Some(15.0),
            ..Default::default()
        };
        assert_eq!(simulate_device(&clean, &p, 9).unwrap(), simulate_device(&clean, &p, 9).unwrap());
        assert_ne!(simulate_device(&clean, &p, 9).unwrap(), simulate_device(&clean, &p, 10).unwrap());
    }

    #[test]
    fn rejects_invalid_profile() {
        let clean = unit_power_frame(64);
        let p = ImpairmentProfile {
            phase_noise_rms: -1.0,
            ..Default::default()
        };
        assert!(matches!(simulate_device(&clean, &p, 0), Err(SignalError::InvalidProfile(_))));
        let p = ImpairmentProfile::default().with_snr_db(Some(f64::INFINITY));
        assert!(simulate_device(&clean, &p, 0).is_err());
    }
}
