//! Baseband side of the toolkit: trans-noise etalons, a transmitter
//! impairment simulator, frame synchronisation and error-phase extraction.

mod impair;
pub mod iq;
mod phase;
mod pi_digits;
mod sync;
mod transnoise;

use num_complex::Complex64;
use thiserror::Error;

use crate::features::TrendlessSequence;

pub use impair::{simulate_device, ImpairmentProfile};
pub use phase::{error_phase, least_squares_gain, run_capture_pipeline};
pub use sync::{synchronize, SyncConfig, SyncedFrame};
pub use transnoise::{gen_transnoise, pi_digit_count, transnoise_etalon};

/// Frame length used by default.
pub const DEFAULT_FRAME_LEN: usize = 1024;

/// Shortest etalon accepted.
pub const MIN_FRAME_LEN: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SignalError {
    #[error("pi digit table exhausted: need {needed} digits, table has {available}")]
    DigitTableExhausted { needed: usize, available: usize },
    #[error("etalon length {len} is below the minimum of {min}")]
    EtalonTooShort { len: usize, min: usize },
    #[error("etalon has zero energy")]
    ZeroEnergyEtalon,
    #[error("etalon contains non-finite samples")]
    NonFiniteEtalon,
    #[error("invalid impairment profile: {0}")]
    InvalidProfile(String),
    #[error("stream of {len} samples is shorter than one frame of {frame_len}")]
    StreamTooShort { len: usize, frame_len: usize },
    #[error("synchronisation lost at frame {frame}: peak-to-mean ratio {ratio:.3} below {threshold}")]
    SyncNotFound {
        frame: usize,
        ratio: f64,
        threshold: f64,
    },
    #[error("frame length {frame} does not match etalon length {etalon}")]
    LengthMismatch { frame: usize, etalon: usize },
    #[error("least-squares gain {gain:e} is too small to normalise the frame")]
    ZeroGain { gain: f64 },
}

/// Known reference waveform of length L.
#[derive(Debug, Clone, PartialEq)]
pub struct EtalonSignal {
    samples: Vec<Complex64>,
}

impl EtalonSignal {
    pub fn new(samples: Vec<Complex64>) -> Result<Self, SignalError> {
        if samples.len() < MIN_FRAME_LEN {
            return Err(SignalError::EtalonTooShort {
                len: samples.len(),
                min: MIN_FRAME_LEN,
            });
        }
        if samples.iter().any(|s| !s.re.is_finite() || !s.im.is_finite()) {
            return Err(SignalError::NonFiniteEtalon);
        }
        if samples.iter().all(|s| s.norm_sqr() == 0.0) {
            return Err(SignalError::ZeroEnergyEtalon);
        }
        Ok(Self { samples })
    }

    pub fn from_real(values: &[f64]) -> Result<Self, SignalError> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum()
    }

    pub fn rms(&self) -> f64 {
        (self.energy() / self.len() as f64).sqrt()
    }
}

/// One block of complex baseband samples.
#[derive(Debug, Clone, PartialEq)]
pub struct IQFrame {
    pub samples: Vec<Complex64>,
    pub source_label: Option<u32>,
}

impl IQFrame {
    pub fn new(samples: Vec<Complex64>) -> Self {
        Self {
            samples,
            source_label: None,
        }
    }

    pub fn with_label(mut self, label: u32) -> Self {
        self.source_label = Some(label);
        self
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn mean_power(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / self.samples.len() as f64
    }
}

/// Wrapped per-sample phase of an error signal, radians in (-pi, pi].
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseErrorSequence(TrendlessSequence);

impl PhaseErrorSequence {
    pub fn sequence(&self) -> &TrendlessSequence {
        &self.0
    }

    pub fn phases(&self) -> &[f64] {
        self.0.samples()
    }

    pub fn into_sequence(self) -> TrendlessSequence {
        self.0
    }
}
