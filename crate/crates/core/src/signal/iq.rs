//! Raw IQ files: little-endian `f32` pairs `I, Q, I, Q, ...`, no header.

use std::fs;
use std::io;
use std::path::Path;

use num_complex::Complex64;

use super::{EtalonSignal, SignalError};

/// Bytes per complex sample.
pub const BYTES_PER_SAMPLE: usize = 8;

pub fn decode_iq(bytes: &[u8]) -> io::Result<Vec<Complex64>> {
    if bytes.len() % BYTES_PER_SAMPLE != 0 {
        return Err(io::Error::new(
            io::ErrorKind::InvalidData,
            format!(
                "IQ data of {} bytes is not a whole number of interleaved f32 pairs",
                bytes.len()
            ),
        ));
    }
    Ok(bytes
        .chunks_exact(BYTES_PER_SAMPLE)
        .map(|c| {
            let i = f32::from_le_bytes([c[0], c[1], c[2], c[3]]);
            let q = f32::from_le_bytes([c[4], c[5], c[6], c[7]]);
            Complex64::new(f64::from(i), f64::from(q))
        })
        .collect())
}

pub fn encode_iq(samples: &[Complex64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(samples.len() * BYTES_PER_SAMPLE);
    for s in samples {
        out.extend_from_slice(&(s.re as f32).to_le_bytes());
        out.extend_from_slice(&(s.im as f32).to_le_bytes());
    }
    out
}

pub fn read_iq(path: &Path) -> io::Result<Vec<Complex64>> {
    decode_iq(&fs::read(path)?)
}

/// Reads an etalon file, which must hold exactly `frame_len` samples.
pub fn read_etalon(path: &Path, frame_len: usize) -> io::Result<EtalonSignal> {
    let samples = read_iq(path)?;
    if samples.len() != frame_len {
        return Err(io::Error::new(
            io::ErrorKind::InvalidData,
            format!(
                "etalon {} holds {} samples, expected {frame_len}",
                path.display(),
                samples.len()
            ),
        ));
    }
    EtalonSignal::new(samples).map_err(|e: SignalError| io::Error::new(io::ErrorKind::InvalidData, e))
}

/// Rounds every sample through `f32`, as a write/read cycle would.
pub fn quantize(samples: &[Complex64]) -> Vec<Complex64> {
    samples
        .iter()
        .map(|s| Complex64::new(f64::from(s.re as f32), f64::from(s.im as f32)))
        .collect()
}
