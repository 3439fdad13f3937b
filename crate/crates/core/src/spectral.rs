//! Welch-averaged spectral estimation: framing, windowing, one-sided
//! auto/cross power spectra and magnitude-squared coherence.
//!
//! All spectra share one normalization constant — the sum of squared
//! window values times the frame count — so ratios between them (the only
//! thing the correlation weightings consume) are convention-free while
//! still being exactly reproducible in tests.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fft::FftPlan;

/// Upper guard on magnitude-squared coherence; keeps the ML weighting
/// `coh/(1-coh)` finite when channels are identical.
pub const COHERENCE_GUARD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowKind {
    Hamming,
    /// All-ones window, used by oracle tests.
    Rectangular,
}

/// Framing and windowing parameters for Welch averaging.
#[derive(Debug, Clone, PartialEq)]
pub struct WelchConfig {
    pub window_len: usize,
    pub overlap_fraction: f64,
    pub window_kind: WindowKind,
    /// Transform length; must equal `window_len` (no zero padding).
    pub fft_len: usize,
}

impl Default for WelchConfig {
    /// 480-sample Hamming window with 75% overlap.
    fn default() -> Self {
        Self {
            window_len: 480,
            overlap_fraction: 0.75,
            window_kind: WindowKind::Hamming,
            fft_len: 480,
        }
    }
}

impl WelchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window_len < 8 {
            return Err(Error::Config("window_len must be at least 8".to_string()));
        }
        if self.window_len % 2 != 0 {
            return Err(Error::Config("window_len must be even".to_string()));
        }
        if !(0.0..1.0).contains(&self.overlap_fraction) {
            return Err(Error::Config("overlap_fraction must be in [0, 1)".to_string()));
        }
        if self.fft_len != self.window_len {
            return Err(Error::Config("fft_len must equal window_len (no zero padding)".to_string()));
        }
        if self.hop() == 0 {
            return Err(Error::Config("overlap too large: hop rounds to zero".to_string()));
        }
        Ok(())
    }

    /// Frame advance in samples.
    pub fn hop(&self) -> usize {
        (self.window_len as f64 * (1.0 - self.overlap_fraction)).round() as usize
    }

    /// Number of frames for a signal of `n` samples.
    pub fn num_frames(&self, n: usize) -> usize {
        if n < self.window_len {
            return 0;
        }
        (n - self.window_len) / self.hop() + 1
    }

    /// Window taps. Hamming uses the periodic form (denominator `len`,
    /// not `len - 1`): its transform is an exact 3-tap kernel on the
    /// analysis grid, which keeps grid-aligned tones confined to adjacent
    /// bins.
    pub fn window(&self) -> Vec<f64> {
        let len = self.window_len;
        match self.window_kind {
            WindowKind::Rectangular => vec![1.0; len],
            WindowKind::Hamming => (0..len)
                .map(|i| 0.54 - 0.46 * (TAU * i as f64 / len as f64).cos())
                .collect(),
        }
    }

    /// Sum of squared window values.
    pub fn window_power(&self) -> f64 {
        self.window().iter().map(|w| w * w).sum()
    }
}

/// One-sided Welch spectra for a signal pair, plus the mean-signal power
/// spectrum when a mean signal is supplied.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSet {
    /// Bin centers over `[0, f_s/2]`, length `fft_len/2 + 1`.
    pub freq_hz: Vec<f64>,
    pub g11: Vec<f64>,
    pub g22: Vec<f64>,
    pub g12: Vec<Complex64>,
    pub p_mean: Option<Vec<f64>>,
    /// `|g12|²/(g11·g22)`, clamped to `[0, 1 - COHERENCE_GUARD]`.
    pub coherence_sq: Vec<f64>,
}

impl SpectrumSet {
    /// Welch spectra for channels `x1`, `x2` (and optionally the array mean
    /// signal, needed by the MSIF weighting).
    pub fn compute(
        x1: &[f64],
        x2: &[f64],
        mean: Option<&[f64]>,
        cfg: &WelchConfig,
        sample_rate_hz: f64,
    ) -> Result<Self> {
        cfg.validate()?;
        if x1.len() != x2.len() {
            return Err(Error::Argument("channel lengths differ".to_string()));
        }
        if let Some(m) = mean {
            if m.len() != x1.len() {
                return Err(Error::Argument("mean signal length differs".to_string()));
            }
        }
        if !(sample_rate_hz > 0.0) {
            return Err(Error::Argument("sample_rate_hz must be positive".to_string()));
        }

        let plan = FftPlan::new(cfg.fft_len);
        let spectra1 = frame_spectra(x1, cfg, &plan)?;
        let spectra2 = frame_spectra(x2, cfg, &plan)?;
        let norm = cfg.window_power() * spectra1.len() as f64;

        let g11 = auto_from_spectra(&spectra1, norm);
        let g22 = auto_from_spectra(&spectra2, norm);
        let g12 = cross_from_spectra(&spectra1, &spectra2, norm);
        let p_mean = match mean {
            Some(m) => {
                let spectra_m = frame_spectra(m, cfg, &plan)?;
                Some(auto_from_spectra(&spectra_m, norm))
            }
            None => None,
        };
        let coherence = coherence_sq(&g11, &g22, &g12);
        let bins = cfg.fft_len / 2 + 1;
        let freq_hz = (0..bins)
            .map(|k| k as f64 * sample_rate_hz / cfg.fft_len as f64)
            .collect();

        Ok(Self {
            freq_hz,
            g11,
            g22,
            g12,
            p_mean,
            coherence_sq: coherence,
        })
    }
}

/// Split a signal into windowed frames.
pub fn frame_signal(x: &[f64], cfg: &WelchConfig) -> Result<Vec<Vec<f64>>> {
    cfg.validate()?;
    if x.len() < cfg.window_len {
        return Err(Error::Argument("signal shorter than the analysis window".to_string()));
    }
    let window = cfg.window();
    let hop = cfg.hop();
    Ok((0..cfg.num_frames(x.len()))
        .map(|f| {
            let start = f * hop;
            x[start..start + cfg.window_len]
                .iter()
                .zip(&window)
                .map(|(v, w)| v * w)
                .collect()
        })
        .collect())
}

/// One-sided frame spectra (bins `0..=fft_len/2`), shared by all the Welch
/// estimators so auto- and cross-spectra of the same signal agree bit for
/// bit.
fn frame_spectra(x: &[f64], cfg: &WelchConfig, plan: &FftPlan) -> Result<Vec<Vec<Complex64>>> {
    let frames = frame_signal(x, cfg)?;
    let bins = cfg.fft_len / 2 + 1;
    Ok(frames
        .iter()
        .map(|frame| {
            let mut spec = plan.forward_real(frame);
            spec.truncate(bins);
            spec
        })
        .collect())
}

fn auto_from_spectra(spectra: &[Vec<Complex64>], norm: f64) -> Vec<f64> {
    let bins = spectra[0].len();
    let mut acc = vec![0.0f64; bins];
    for spec in spectra {
        for (a, v) in acc.iter_mut().zip(spec) {
            *a += v.norm_sqr();
        }
    }
    for a in acc.iter_mut() {
        *a /= norm;
    }
    acc
}

fn cross_from_spectra(s1: &[Vec<Complex64>], s2: &[Vec<Complex64>], norm: f64) -> Vec<Complex64> {
    let bins = s1[0].len();
    let mut acc = vec![Complex64::ZERO; bins];
    for (f1, f2) in s1.iter().zip(s2) {
        for ((a, v1), v2) in acc.iter_mut().zip(f1).zip(f2) {
            *a += v1.conj() * v2;
        }
    }
    for a in acc.iter_mut() {
        *a /= norm;
    }
    acc
}

/// Welch auto-power spectrum: frame-averaged `|X|²` divided by
/// (window power × frame count). One-sided, nonnegative.
pub fn welch_auto(x: &[f64], cfg: &WelchConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let plan = FftPlan::new(cfg.fft_len);
    let spectra = frame_spectra(x, cfg, &plan)?;
    let norm = cfg.window_power() * spectra.len() as f64;
    Ok(auto_from_spectra(&spectra, norm))
}

/// Welch cross-spectrum: frame-averaged `conj(X1)·X2`, same normalization
/// as [`welch_auto`].
pub fn welch_cross(x1: &[f64], x2: &[f64], cfg: &WelchConfig) -> Result<Vec<Complex64>> {
    cfg.validate()?;
    if x1.len() != x2.len() {
        return Err(Error::Argument("channel lengths differ".to_string()));
    }
    let plan = FftPlan::new(cfg.fft_len);
    let spectra1 = frame_spectra(x1, cfg, &plan)?;
    let spectra2 = frame_spectra(x2, cfg, &plan)?;
    let norm = cfg.window_power() * spectra1.len() as f64;
    Ok(cross_from_spectra(&spectra1, &spectra2, norm))
}

/// Magnitude-squared coherence `|g12|²/(g11·g22)`, clamped to
/// `[0, 1 - COHERENCE_GUARD]`. Zero denominators yield zero coherence.
pub fn coherence_sq(g11: &[f64], g22: &[f64], g12: &[Complex64]) -> Vec<f64> {
    assert!(g11.len() == g22.len() && g11.len() == g12.len(), "spectrum grids differ");
    g11.iter()
        .zip(g22)
        .zip(g12)
        .map(|((&a, &b), c)| {
            let den = a * b;
            if den > 0.0 {
                (c.norm_sqr() / den).clamp(0.0, 1.0 - COHERENCE_GUARD)
            } else {
                0.0
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_cfg(window_len: usize, overlap: f64, kind: WindowKind) -> WelchConfig {
        WelchConfig {
            window_len,
            overlap_fraction: overlap,
            window_kind: kind,
            fft_len: window_len,
        }
    }

    fn noise(n: usize, seed: u64) -> Vec<f64> {
        // Small LCG; plenty for spectral shape tests.
        let mut state = seed.wrapping_mul(2862933555777941757).wrapping_add(3037000493);
        (0..n)
            .map(|_| {
                state = state.wrapping_mul(2862933555777941757).wrapping_add(3037000493);
                (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
            })
            .collect()
    }

    #[test]
    fn frame_count_matches_formula() {
        let cfg = WelchConfig::default();
        assert_eq!(cfg.hop(), 120);
        assert_eq!(cfg.num_frames(4800), 37);
        let frames = frame_signal(&vec![0.0; 4800], &cfg).unwrap();
        assert_eq!(frames.len(), 37);
    }

    #[test]
    fn single_frame_when_signal_equals_window() {
        for overlap in [0.0, 0.5, 0.75] {
            let cfg = toy_cfg(480, overlap, WindowKind::Hamming);
            assert_eq!(cfg.num_frames(480), 1);
        }
    }

    #[test]
    fn rectangular_window_passes_ones_through() {
        let cfg = toy_cfg(16, 0.5, WindowKind::Rectangular);
        let frames = frame_signal(&vec![1.0; 64], &cfg).unwrap();
        for frame in frames {
            assert!(frame.iter().all(|&v| v == 1.0));
        }
    }

    #[test]
    fn short_signal_is_rejected() {
        let cfg = WelchConfig::default();
        assert!(matches!(
            frame_signal(&vec![0.0; 100], &cfg),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn config_validation() {
        let mut cfg = WelchConfig::default();
        cfg.fft_len = 512;
        assert!(cfg.validate().is_err());
        let mut cfg = WelchConfig::default();
        cfg.overlap_fraction = 1.0;
        assert!(cfg.validate().is_err());
        let mut cfg = WelchConfig::default();
        cfg.window_len = 4;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn zero_input_gives_zero_spectrum() {
        let cfg = WelchConfig::default();
        let spec = welch_auto(&vec![0.0; 4800], &cfg).unwrap();
        assert_eq!(spec.len(), 241);
        assert!(spec.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn self_cross_equals_auto() {
        let cfg = toy_cfg(64, 0.75, WindowKind::Hamming);
        let x = noise(512, 1);
        let auto = welch_auto(&x, &cfg).unwrap();
        let cross = welch_cross(&x, &x, &cfg).unwrap();
        for (a, c) in auto.iter().zip(&cross) {
            assert_eq!(c.im, 0.0);
            assert_eq!(c.re, *a);
        }
    }

    #[test]
    fn cross_is_hermitian_in_argument_order() {
        let cfg = toy_cfg(64, 0.5, WindowKind::Hamming);
        let x1 = noise(512, 2);
        let x2 = noise(512, 3);
        let ab = welch_cross(&x1, &x2, &cfg).unwrap();
        let ba = welch_cross(&x2, &x1, &cfg).unwrap();
        for (f, r) in ab.iter().zip(&ba) {
            assert_eq!(*f, r.conj());
        }
    }

    #[test]
    fn dyadic_scaling_is_exact() {
        let cfg = toy_cfg(64, 0.75, WindowKind::Hamming);
        let x = noise(512, 4);
        let scaled: Vec<f64> = x.iter().map(|v| 4.0 * v).collect();
        let a = welch_auto(&x, &cfg).unwrap();
        let b = welch_auto(&scaled, &cfg).unwrap();
        for (u, v) in a.iter().zip(&b) {
            assert_eq!(*v, 16.0 * u);
        }
    }

    #[test]
    fn self_coherence_is_clamped_to_guard() {
        let cfg = toy_cfg(64, 0.75, WindowKind::Hamming);
        let x = noise(512, 5);
        let g11 = welch_auto(&x, &cfg).unwrap();
        let g12 = welch_cross(&x, &x, &cfg).unwrap();
        // Pre-clamp ratio is identically 1 wherever the spectrum is nonzero.
        for (a, c) in g11.iter().zip(&g12) {
            if *a > 0.0 {
                assert_eq!(c.norm_sqr() / (a * a), 1.0);
            }
        }
        let coh = coherence_sq(&g11, &g11, &g12);
        for (v, a) in coh.iter().zip(&g11) {
            if *a > 0.0 {
                assert_eq!(*v, 1.0 - COHERENCE_GUARD);
            }
        }
    }

    #[test]
    fn spectrum_set_matches_standalone_estimators() {
        let cfg = toy_cfg(64, 0.75, WindowKind::Hamming);
        let x1 = noise(512, 6);
        let x2 = noise(512, 7);
        let mean: Vec<f64> = x1.iter().zip(&x2).map(|(a, b)| 0.5 * (a + b)).collect();
        let set = SpectrumSet::compute(&x1, &x2, Some(&mean), &cfg, 48_000.0).unwrap();
        assert_eq!(set.g11, welch_auto(&x1, &cfg).unwrap());
        assert_eq!(set.g22, welch_auto(&x2, &cfg).unwrap());
        assert_eq!(set.g12, welch_cross(&x1, &x2, &cfg).unwrap());
        assert_eq!(set.p_mean.as_deref().unwrap(), &welch_auto(&mean, &cfg).unwrap()[..]);
        assert_eq!(set.freq_hz.len(), 33);
        assert_eq!(set.freq_hz[32], 24_000.0);
    }
}
