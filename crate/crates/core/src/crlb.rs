//! Cramér–Rao lower bound for delay estimation between two noisy channels.
//!
//! Two routes are implemented deliberately: [`crlb`] is the closed form for
//! a rectangular-spectrum source with constant in-band SNR, and
//! [`crlb_general`] numerically integrates the coherence form the closed
//! form is derived from. Each serves as the oracle for the other in tests.

use alloc::string::ToString;
use core::f64::consts::TAU;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::sigmodel::SourceConfig;

/// Scenario parameters entering the closed-form bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrlbInput {
    pub snr_inband_db: f64,
    pub duration_s: f64,
    pub center_hz: f64,
    pub bandwidth_hz: f64,
}

impl CrlbInput {
    pub fn from_source(cfg: &SourceConfig) -> Self {
        Self {
            snr_inband_db: cfg.snr_inband_db,
            duration_s: cfg.duration_s,
            center_hz: cfg.center_hz,
            bandwidth_hz: cfg.bandwidth_hz,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.duration_s > 0.0) {
            return Err(Error::Argument("duration_s must be positive".to_string()));
        }
        if !(self.bandwidth_hz > 0.0) {
            return Err(Error::Argument("bandwidth_hz must be positive".to_string()));
        }
        if !(self.center_hz > self.bandwidth_hz / 2.0) {
            return Err(Error::Argument("center_hz must exceed bandwidth_hz/2".to_string()));
        }
        Ok(())
    }
}

/// Closed-form bound with all intermediate quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrlbResult {
    /// Linear in-band SNR, `10^(dB/10)`.
    pub eta_in: f64,
    /// `η² / (1 + 2η)`.
    pub coherence_term: f64,
    /// `(2π)²·[(f_c + BW/2)³ − (f_c − BW/2)³]/3`.
    pub integral_w2: f64,
    pub variance_s2: f64,
    pub std_s: f64,
}

/// Closed-form bound for a rectangular-spectrum source:
/// `σ² = 1 / (2T · η²/(1+2η) · I_ω²)`.
pub fn crlb(input: &CrlbInput) -> Result<CrlbResult> {
    input.validate()?;
    let eta_in = 10.0f64.powf(input.snr_inband_db / 10.0);
    let coherence_term = eta_in * eta_in / (1.0 + 2.0 * eta_in);
    let f_hi = input.center_hz + input.bandwidth_hz / 2.0;
    let f_lo = input.center_hz - input.bandwidth_hz / 2.0;
    let integral_w2 = TAU * TAU * (f_hi.powi(3) - f_lo.powi(3)) / 3.0;
    let variance_s2 = 1.0 / (2.0 * input.duration_s * coherence_term * integral_w2);
    Ok(CrlbResult {
        eta_in,
        coherence_term,
        integral_w2,
        variance_s2,
        std_s: variance_s2.sqrt(),
    })
}

/// General bound from a magnitude-squared coherence spectrum:
/// trapezoidal integration of `(2πf)²·γ²/(1−γ²)` over the grid, then
/// `σ = sqrt(1/(2T·I))`. Returns the standard deviation in seconds.
///
/// Coherence values must lie in `[0, 1)`; a grid carrying no information
/// (zero integral) is rejected.
pub fn crlb_general(coherence_sq: &[f64], freq_hz: &[f64], duration_s: f64) -> Result<f64> {
    if coherence_sq.len() != freq_hz.len() {
        return Err(Error::Argument("coherence and frequency grids differ in length".to_string()));
    }
    if coherence_sq.len() < 2 {
        return Err(Error::Argument("need at least 2 grid points".to_string()));
    }
    if !(duration_s > 0.0) {
        return Err(Error::Argument("duration_s must be positive".to_string()));
    }
    if freq_hz.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Argument("frequency grid must be strictly increasing".to_string()));
    }
    if coherence_sq.iter().any(|&g| !(0.0..1.0).contains(&g)) {
        return Err(Error::Argument("coherence values must lie in [0, 1)".to_string()));
    }

    let integrand = |g: f64, f: f64| (TAU * f) * (TAU * f) * g / (1.0 - g);
    let mut integral = 0.0f64;
    for k in 0..freq_hz.len() - 1 {
        let df = freq_hz[k + 1] - freq_hz[k];
        let a = integrand(coherence_sq[k], freq_hz[k]);
        let b = integrand(coherence_sq[k + 1], freq_hz[k + 1]);
        integral += 0.5 * (a + b) * df;
    }
    if !(integral > 0.0) {
        return Err(Error::Argument("coherence grid carries no delay information".to_string()));
    }
    Ok((1.0 / (2.0 * duration_s * integral)).sqrt())
}
