//! "Trans-noise": a deterministic noise-like waveform built from the decimal
//! digits of pi. Digit `d` maps to the DAC level `-1 + 2d/9`, so 0 is the
//! minimum and 9 the maximum.

use super::pi_digits::PI_DIGITS;
use super::{EtalonSignal, SignalError};

/// Number of embedded digits.
pub fn pi_digit_count() -> usize {
    PI_DIGITS.len()
}

fn digit_level(d: u8) -> f64 {
    -1.0 + 2.0 * f64::from(d) / 9.0
}

/// Levels for digits `[frame_index * len, (frame_index + 1) * len)`.
pub fn gen_transnoise(frame_index: usize, len: usize) -> Result<Vec<f64>, SignalError> {
    let start = frame_index * len;
    let end = start + len;
    if end > PI_DIGITS.len() {
        return Err(SignalError::DigitTableExhausted {
            needed: end,
            available: PI_DIGITS.len(),
        });
    }
    Ok(PI_DIGITS.as_bytes()[start..end]
        .iter()
        .map(|b| digit_level(b - b'0'))
        .collect())
}

/// Real-valued trans-noise etalon (imaginary part zero).
pub fn transnoise_etalon(frame_index: usize, len: usize) -> Result<EtalonSignal, SignalError> {
    EtalonSignal::from_real(&gen_transnoise(frame_index, len)?)
}
