//! Time-delay-of-arrival estimation between sensor pairs.
//!
//! The crate covers the full estimation chain for a narrowband source
//! received by a small array in broadband white noise:
//!
//! * [`sigmodel`] — synthesis of rectangular-spectrum sources, fractional
//!   sensor delays and calibrated noise,
//! * [`spectral`] — Welch-averaged auto/cross power spectra and coherence,
//! * [`gcc`] — weighted cross-correlation (CC, SCOT, PHAT, ML, MSIF) with
//!   Hilbert zero-crossing subsample refinement,
//! * [`crlb`] — the Cramér–Rao lower bound used as the benchmark curve,
//! * [`fft`] — the mixed-radix transform the rest of the crate is built on.
//!
//! The crate is `no_std` (with `alloc`); everything is pure and
//! deterministic given a seed, so callers can fan trials out across
//! threads freely.

#![no_std]

extern crate alloc;

pub mod crlb;
pub mod error;
pub mod fft;
pub mod gcc;
pub mod sigmodel;
pub mod spectral;

pub use crlb::{crlb, crlb_general, CrlbInput, CrlbResult};
pub use error::{Error, Result};
pub use gcc::{
    compute_weight, estimate_delay, estimate_from_spectra, estimate_pair, hilbert_shift,
    mean_signal, weighted_correlation, CorrelationFunction, DelayEstimate, Method, WeightSpectrum,
};
pub use sigmodel::{
    apply_fractional_delay, mix_seed, snr_inband_to_broadband, synth_recording, synth_source,
    ArrayConfig, SensorRecording, SourceConfig,
};
pub use spectral::{
    coherence_sq, frame_signal, welch_auto, welch_cross, SpectrumSet, WelchConfig, WindowKind,
};
