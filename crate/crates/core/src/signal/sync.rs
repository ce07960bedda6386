//! Frame synchronisation by cross-correlation against the etalon.
//!
//! The first frame is acquired by searching every lag in `[0, L)`; each later
//! frame is tracked in a small window around `previous + L`. Sampling clock
//! offset is absorbed by this per-frame re-alignment; no resampling is done.

use num_complex::Complex64;

use super::{EtalonSignal, IQFrame, SignalError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyncConfig {
    /// Minimum ratio of the correlation peak to the mean correlation
    /// magnitude over the searched lags.
    pub threshold: f64,
    /// Half-width, in samples, of the tracking window.
    pub track_window: usize,
}

impl Default for SyncConfig {
    fn default() -> Self {
        Self {
            threshold: 3.0,
            track_window: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyncedFrame {
    pub frame: IQFrame,
    /// Integer start of the frame in the stream.
    pub start: usize,
    /// Sub-sample peak position relative to `start`, in (-0.5, 0.5).
    pub fractional_offset: f64,
    pub peak_ratio: f64,
}

/// |sum_j stream[lag + j] * conj(etalon[j])|, zero-padded past the stream end.
fn correlation_magnitude(stream: &[Complex64], etalon: &[Complex64], lag: usize) -> f64 {
    let tail = &stream[lag.min(stream.len())..];
    tail.iter()
        .zip(etalon)
        .fold(Complex64::new(0.0, 0.0), |acc, (s, e)| acc + s * e.conj())
        .norm()
}

struct Peak {
    lag: usize,
    fractional: f64,
    ratio: f64,
}

fn find_peak(stream: &[Complex64], etalon: &[Complex64], lags: std::ops::RangeInclusive<usize>) -> Peak {
    let first = *lags.start();
    let mags: Vec<f64> = lags.map(|lag| correlation_magnitude(stream, etalon, lag)).collect();
    let mut best = 0;
    for (i, &m) in mags.iter().enumerate() {
        if m > mags[best] {
            best = i;
        }
    }
    let mean = mags.iter().sum::<f64>() / mags.len() as f64;
    let ratio = if mean > 0.0 { mags[best] / mean } else { 0.0 };

    let fractional = if best > 0 && best + 1 < mags.len() {
        let (l, c, r) = (mags[best - 1], mags[best], mags[best + 1]);
        let denom = l - 2.0 * c + r;
        if denom < 0.0 {
            (0.5 * (l - r) / denom).clamp(-0.5, 0.5)
        } else {
            0.0
        }
    } else {
        0.0
    };

    Peak {
        lag: first + best,
        fractional,
        ratio,
    }
}

/// Splits a captured stream into etalon-aligned frames in stream order.
pub fn synchronize(
    stream: &[Complex64],
    etalon: &EtalonSignal,
    config: &SyncConfig,
) -> Result<Vec<SyncedFrame>, SignalError> {
    let frame_len = etalon.len();
    if stream.len() < frame_len {
        return Err(SignalError::StreamTooShort {
            len: stream.len(),
            frame_len,
        });
    }
    let reference = etalon.samples();
    let last_start = stream.len() - frame_len;

    let acquired = find_peak(stream, reference, 0..=(frame_len - 1).min(stream.len() - 1));
    if acquired.ratio < config.threshold || acquired.lag > last_start {
        return Err(SignalError::SyncNotFound {
            frame: 0,
            ratio: acquired.ratio,
            threshold: config.threshold,
        });
    }

    let mut frames = Vec::new();
    let mut peak = acquired;
    loop {
        frames.push(SyncedFrame {
            frame: IQFrame::new(stream[peak.lag..peak.lag + frame_len].to_vec()),
            start: peak.lag,
            fractional_offset: peak.fractional,
            peak_ratio: peak.ratio,
        });

        let expected = peak.lag + frame_len;
        if expected > last_start {
            break;
        }
        let lo = expected.saturating_sub(config.track_window);
        let hi = (expected + config.track_window).min(last_start);
        let next = find_peak(stream, reference, lo..=hi);
        if next.ratio < config.threshold {
            return Err(SignalError::SyncNotFound {
                frame: frames.len(),
                ratio: next.ratio,
                threshold: config.threshold,
            });
        }
        peak = next;
    }
    Ok(frames)
}
