//! Weighted cross-correlation delay estimation.
//!
//! The estimation chain is: Welch spectra for the sensor pair (plus the
//! array mean signal for MSIF) → per-frequency weighting → inverse
//! transform to a lag-domain correlation → coarse argmax → subsample
//! refinement at the zero crossing of the Hilbert-shifted correlation.
//!
//! Five weightings are provided:
//!
//! | method | weight ψ(ω) |
//! |--------|-------------|
//! | CC     | 1 |
//! | SCOT   | 1/√(G₁₁·G₂₂) |
//! | PHAT   | 1/|G₁₂| |
//! | ML     | (1/|G₁₂|) · γ²/(1−γ²) |
//! | MSIF   | min(P_mean/P₁₁, 1) |
//!
//! MSIF treats the channel mean as a virtual transmitted signal: the power
//! ratio of the mean over the reference channel is the squared magnitude of
//! the inverse filter mapping the channel back to that virtual signal, and
//! clipping at 1 keeps near-zero-denominator bins from being amplified.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fft::FftPlan;
use crate::sigmodel::SensorRecording;
use crate::spectral::{SpectrumSet, WelchConfig};

/// Relative denominator guard: `1e-12 ×` the maximum of the respective
/// denominator spectrum is added before division, which preserves scale
/// invariance of every weighting.
pub const DENOMINATOR_GUARD_REL: f64 = 1e-12;

/// The compared weighting functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Cc,
    Scot,
    Phat,
    Ml,
    Msif,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Cc, Method::Scot, Method::Phat, Method::Ml, Method::Msif];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Cc => "cc",
            Method::Scot => "scot",
            Method::Phat => "phat",
            Method::Ml => "ml",
            Method::Msif => "msif",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        for method in Method::ALL {
            if s.eq_ignore_ascii_case(method.name()) {
                return Ok(method);
            }
        }
        Err(Error::Argument("unknown method (expected cc, scot, phat, ml or msif)".to_string()))
    }
}

/// A per-frequency weighting, finite and nonnegative at every bin.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSpectrum {
    pub values: Vec<f64>,
    pub method: Method,
}

/// Weighted cross-correlation over a centered lag grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationFunction {
    pub values: Vec<f64>,
    /// Lag of each entry in seconds; spans `[-fft_len/2, fft_len/2)` samples.
    pub lag_axis_s: Vec<f64>,
    pub sample_rate_hz: f64,
}

/// A delay estimate: coarse argmax lag plus the refined subsample position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayEstimate {
    pub delay_s: f64,
    pub coarse_lag_samples: i64,
    /// True when the Hilbert zero-crossing refinement succeeded; false when
    /// the estimate fell back to the coarse lag.
    pub refined: bool,
}

/// Pointwise arithmetic mean across all channels of a recording.
pub fn mean_signal(rec: &SensorRecording) -> Result<Vec<f64>> {
    if rec.channels.is_empty() {
        return Err(Error::Argument("recording has no channels".to_string()));
    }
    let n = rec.channels[0].len();
    if rec.channels.iter().any(|c| c.len() != n) {
        return Err(Error::Argument("all channels must have equal length".to_string()));
    }
    let scale = 1.0 / rec.channels.len() as f64;
    let mut mean = vec![0.0f64; n];
    for ch in &rec.channels {
        for (m, v) in mean.iter_mut().zip(ch) {
            *m += v;
        }
    }
    for m in mean.iter_mut() {
        *m *= scale;
    }
    Ok(mean)
}

fn guard_for(values: impl Iterator<Item = f64>) -> f64 {
    DENOMINATOR_GUARD_REL * values.fold(0.0f64, f64::max)
}

fn inverse_or_zero(den: f64) -> f64 {
    if den > 0.0 {
        1.0 / den
    } else {
        0.0
    }
}

/// Build the weighting for one method from the spectra it needs.
pub fn compute_weight(method: Method, s: &SpectrumSet) -> Result<WeightSpectrum> {
    let bins = s.g12.len();
    if s.g11.len() != bins || s.g22.len() != bins || s.coherence_sq.len() != bins {
        return Err(Error::Argument("spectrum grids differ".to_string()));
    }
    let values = match method {
        Method::Cc => vec![1.0; bins],
        Method::Scot => {
            let den: Vec<f64> = s.g11.iter().zip(&s.g22).map(|(a, b)| (a * b).sqrt()).collect();
            let guard = guard_for(den.iter().copied());
            den.iter().map(|d| inverse_or_zero(d + guard)).collect()
        }
        Method::Phat => {
            let guard = guard_for(s.g12.iter().map(|c| c.norm()));
            s.g12.iter().map(|c| inverse_or_zero(c.norm() + guard)).collect()
        }
        Method::Ml => {
            let guard = guard_for(s.g12.iter().map(|c| c.norm()));
            s.g12
                .iter()
                .zip(&s.coherence_sq)
                .map(|(c, &coh)| inverse_or_zero(c.norm() + guard) * coh / (1.0 - coh))
                .collect()
        }
        Method::Msif => {
            let p_mean = s
                .p_mean
                .as_ref()
                .ok_or_else(|| Error::Argument("MSIF needs the mean-signal spectrum".to_string()))?;
            if p_mean.len() != bins {
                return Err(Error::Argument("spectrum grids differ".to_string()));
            }
            // The clip at 1 already bounds near-zero-denominator bins, so no
            // additive guard: identical channels give a weight of exactly 1.
            p_mean
                .iter()
                .zip(&s.g11)
                .map(|(&pm, &p11)| if p11 > 0.0 { (pm / p11).min(1.0) } else { 0.0 })
                .collect()
        }
    };
    Ok(WeightSpectrum { values, method })
}

/// Inverse-transform the weighted cross-spectrum to a real correlation over
/// a zero-centered lag grid.
pub fn weighted_correlation(
    g12: &[Complex64],
    weight: &WeightSpectrum,
    sample_rate_hz: f64,
) -> Result<CorrelationFunction> {
    let bins = g12.len();
    if weight.values.len() != bins {
        return Err(Error::Argument("weight grid does not match the spectrum".to_string()));
    }
    if bins < 2 {
        return Err(Error::Argument("spectrum needs at least 2 bins".to_string()));
    }
    if !(sample_rate_hz > 0.0) {
        return Err(Error::Argument("sample_rate_hz must be positive".to_string()));
    }
    let fft_len = 2 * (bins - 1);

    // Hermitian full spectrum; DC and Nyquist forced real so the inverse
    // transform is real up to rounding.
    let mut full = vec![Complex64::ZERO; fft_len];
    full[0] = Complex64::new(g12[0].re * weight.values[0], 0.0);
    full[bins - 1] = Complex64::new(g12[bins - 1].re * weight.values[bins - 1], 0.0);
    for k in 1..bins - 1 {
        let v = g12[k] * weight.values[k];
        full[k] = v;
        full[fft_len - k] = v.conj();
    }

    let plan = FftPlan::new(fft_len);
    let raw = plan.inverse(&full);
    let half = fft_len / 2;
    let values: Vec<f64> = (0..fft_len)
        .map(|m| raw[(m + fft_len - half) % fft_len].re)
        .collect();
    let lag_axis_s = (0..fft_len)
        .map(|m| (m as f64 - half as f64) / sample_rate_hz)
        .collect();

    Ok(CorrelationFunction {
        values,
        lag_axis_s,
        sample_rate_hz,
    })
}

/// Discrete Hilbert transform (90° phase shift): multiply positive
/// frequencies by −j and negative ones by +j; DC and Nyquist are zeroed.
pub fn hilbert_shift(r: &[f64]) -> Vec<f64> {
    let n = r.len();
    if n < 2 {
        return vec![0.0; n];
    }
    let plan = FftPlan::new(n);
    let mut spec = plan.forward_real(r);
    spec[0] = Complex64::ZERO;
    for (k, v) in spec.iter_mut().enumerate().skip(1) {
        if 2 * k < n {
            // -j · v
            *v = Complex64::new(v.im, -v.re);
        } else if 2 * k == n {
            *v = Complex64::ZERO;
        } else {
            // +j · v
            *v = Complex64::new(-v.im, v.re);
        }
    }
    plan.inverse(&spec).iter().map(|c| c.re).collect()
}

/// Coarse argmax of the correlation restricted to `|lag| <= max_lag_s`,
/// refined to the zero crossing of the Hilbert-shifted correlation nearest
/// the peak (linear interpolation between the bracketing samples). Falls
/// back to the coarse lag when no sign change occurs within one sample of
/// the peak.
pub fn estimate_delay(r: &CorrelationFunction, max_lag_s: f64) -> Result<DelayEstimate> {
    let n = r.values.len();
    if n == 0 || r.lag_axis_s.len() != n {
        return Err(Error::Argument("correlation and lag axis lengths differ".to_string()));
    }
    if !(max_lag_s >= 0.0) {
        return Err(Error::Argument("max_lag_s must be nonnegative".to_string()));
    }

    let mut peak: Option<(usize, f64)> = None;
    for (idx, (&v, &lag)) in r.values.iter().zip(&r.lag_axis_s).enumerate() {
        if lag.abs() <= max_lag_s {
            match peak {
                Some((_, best)) if v <= best => {}
                _ => peak = Some((idx, v)),
            }
        }
    }
    let (peak_idx, _) = peak.ok_or_else(|| Error::Argument("empty search window".to_string()))?;

    let half = n / 2;
    let coarse_lag_samples = peak_idx as i64 - half as i64;
    let coarse_delay_s = r.lag_axis_s[peak_idx];

    let shifted = hilbert_shift(&r.values);
    let mut best: Option<f64> = None;
    for a in [peak_idx.wrapping_sub(1), peak_idx] {
        let b = a + 1;
        if a >= n || b >= n {
            continue;
        }
        let (ha, hb) = (shifted[a], shifted[b]);
        let t = if ha == 0.0 {
            Some(a as f64)
        } else if hb == 0.0 {
            Some(b as f64)
        } else if (ha > 0.0) != (hb > 0.0) {
            Some(a as f64 + ha / (ha - hb))
        } else {
            None
        };
        if let Some(t) = t {
            let better = match best {
                None => true,
                Some(prev) => (t - peak_idx as f64).abs() < (prev - peak_idx as f64).abs(),
            };
            if better {
                best = Some(t);
            }
        }
    }

    match best {
        Some(t) => Ok(DelayEstimate {
            delay_s: (t - half as f64) / r.sample_rate_hz,
            coarse_lag_samples,
            refined: true,
        }),
        None => Ok(DelayEstimate {
            delay_s: coarse_delay_s,
            coarse_lag_samples,
            refined: false,
        }),
    }
}

/// Run one method end to end on the spectra of a sensor pair.
pub fn estimate_from_spectra(
    s: &SpectrumSet,
    method: Method,
    sample_rate_hz: f64,
    max_lag_s: f64,
) -> Result<DelayEstimate> {
    let weight = compute_weight(method, s)?;
    let corr = weighted_correlation(&s.g12, &weight, sample_rate_hz)?;
    estimate_delay(&corr, max_lag_s)
}

/// Estimate the delay of channel `pair.1` relative to channel `pair.0`.
///
/// # Example
///
/// ```
/// use tdoa_core::{estimate_pair, synth_recording, ArrayConfig, Method, SourceConfig, WelchConfig};
///
/// let mut src = SourceConfig::default();
/// src.snr_inband_db = 20.0;
/// let rec = synth_recording(&src, &ArrayConfig::new(4), 1).unwrap();
/// let est = estimate_pair(&rec, Method::Msif, &WelchConfig::default(), 0.005).unwrap();
/// let truth = 5.0 / src.sample_rate_hz;
/// assert!((est.delay_s - truth).abs() < 0.5 / src.sample_rate_hz);
/// ```
pub fn estimate_pair(
    rec: &SensorRecording,
    method: Method,
    wcfg: &WelchConfig,
    max_lag_s: f64,
) -> Result<DelayEstimate> {
    rec.validate()?;
    let (i, j) = rec.pair;
    let mean = if method == Method::Msif {
        Some(mean_signal(rec)?)
    } else {
        None
    };
    let set = SpectrumSet::compute(
        &rec.channels[i],
        &rec.channels[j],
        mean.as_deref(),
        wcfg,
        rec.sample_rate_hz,
    )?;
    estimate_from_spectra(&set, method, rec.sample_rate_hz, max_lag_s)
}
