//! Error signal extraction: normalise a synchronised frame to the etalon,
//! subtract the etalon and keep the wrapped phase of what is left.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{sync::synchronize, EtalonSignal, IQFrame, PhaseErrorSequence, SignalError, SyncConfig};
use crate::features::TrendlessSequence;

/// Gains below this magnitude cannot be divided out.
const MIN_GAIN: f64 = 1e-12;

/// Error magnitudes at or below this fraction of the etalon RMS are rounding
/// residue of an exactly absorbed gain and are treated as zero.
const ZERO_ERROR: f64 = 1e-12;

/// Complex least-squares gain `<frame, etalon> / <etalon, etalon>`.
pub fn least_squares_gain(frame: &[Complex64], etalon: &EtalonSignal) -> Complex64 {
    let cross = frame
        .iter()
        .zip(etalon.samples())
        .fold(Complex64::new(0.0, 0.0), |acc, (f, e)| acc + f * e.conj());
    cross / etalon.energy()
}

/// Per-sample phase of `frame / g - etalon`, in (-pi, pi], not unwrapped.
pub fn error_phase(frame: &IQFrame, etalon: &EtalonSignal) -> Result<PhaseErrorSequence, SignalError> {
    if frame.len() != etalon.len() {
        return Err(SignalError::LengthMismatch {
            frame: frame.len(),
            etalon: etalon.len(),
        });
    }
    let gain = least_squares_gain(&frame.samples, etalon);
    if !(gain.norm() >= MIN_GAIN) {
        return Err(SignalError::ZeroGain { gain: gain.norm() });
    }
    let floor = ZERO_ERROR * etalon.rms();
    let phases = frame
        .samples
        .iter()
        .zip(etalon.samples())
        .map(|(f, e)| {
            let err = f / gain - e;
            if err.norm() <= floor {
                0.0
            } else {
                let p = err.im.atan2(err.re);
                if p <= -PI {
                    PI
                } else {
                    p
                }
            }
        })
        .collect();
    let seq = TrendlessSequence::new(phases).map_err(|_| SignalError::ZeroGain { gain: gain.norm() })?;
    Ok(PhaseErrorSequence(seq))
}

/// Synchronise, then extract the error phase of every frame in stream order.
/// Per-frame failures are returned in place rather than dropped.
pub fn run_capture_pipeline(
    stream: &[Complex64],
    etalon: &EtalonSignal,
    config: &SyncConfig,
) -> Result<Vec<Result<PhaseErrorSequence, SignalError>>, SignalError> {
    Ok(synchronize(stream, etalon, config)?
        .iter()
        .map(|synced| error_phase(&synced.frame, etalon))
        .collect())
}
