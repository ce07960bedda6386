//! Radio device fingerprinting from the phase of the error between received
//! training frames and a known etalon: trans-noise etalons, a transmitter
//! impairment simulator, frame synchronisation, ten trendless-sequence
//! features, significance tests, classifiers and a local surrogate explainer.

pub mod classify;
pub mod cli;
pub mod dataset;
pub mod experiment;
pub mod explain;
pub mod features;
pub mod io;
pub mod rng;
pub mod signal;
pub mod stats;
