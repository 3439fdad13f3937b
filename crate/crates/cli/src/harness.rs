//! Monte Carlo RMSE benchmark over (method, element count, SNR) grids.
//!
//! Two standard sweeps are provided: a method comparison at a fixed
//! element count, and an element-count sweep for the mean-signal
//! inverse-filter weighting. Each grid cell runs `trials` independent
//! recordings; the recording seed depends on `(base_seed, snr, M, trial)`
//! but never on the method, so method comparisons are paired on identical
//! noise and signal realizations.
//!
//! Trials are independent work units executed on the current rayon pool.
//! Results are collected in job order and reduced sequentially, so the
//! output is bit-identical for any worker count.

use rayon::prelude::*;
use tdoa_core::{
    crlb, estimate_from_spectra, estimate_pair, mean_signal, mix_seed, snr_inband_to_broadband,
    synth_recording, ArrayConfig, CrlbInput, Error, Method, Result, SourceConfig, SpectrumSet,
    WelchConfig,
};

/// The two standard evaluation sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// All weightings compared at a fixed element count.
    MethodComparison,
    /// MSIF alone across element counts.
    ElementSweep,
}

/// Full description of one Monte Carlo sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    /// In-band SNR grid in dB, ascending.
    pub snr_inband_grid_db: Vec<f64>,
    pub methods: Vec<Method>,
    pub element_counts: Vec<usize>,
    pub trials: usize,
    pub base_seed: u64,
    /// Source parameters; `snr_inband_db` is overridden per grid point.
    pub src: SourceConfig,
    pub welch: WelchConfig,
    /// Half-width of the coarse peak search, in seconds.
    pub max_lag_s: f64,
}

/// Default search range: half the analysis window (240 samples at 48 kHz).
pub fn default_max_lag_s(src: &SourceConfig, welch: &WelchConfig) -> f64 {
    welch.window_len as f64 / 2.0 / src.sample_rate_hz
}

/// 1 dB grid from -14 dB to +20 dB.
pub fn default_snr_grid() -> Vec<f64> {
    snr_grid(-14.0, 20.0, 1.0)
}

/// Ascending grid `min, min+step, …` up to `max` (inclusive within half a
/// step of rounding).
pub fn snr_grid(min_db: f64, max_db: f64, step_db: f64) -> Vec<f64> {
    assert!(step_db > 0.0, "snr step must be positive");
    let count = ((max_db - min_db) / step_db + 0.5).floor() as usize + 1;
    (0..count).map(|k| min_db + k as f64 * step_db).collect()
}

impl ScenarioConfig {
    /// Method comparison at M = 16, desk scale (2000 trials).
    pub fn scenario1() -> Self {
        let src = SourceConfig::default();
        let welch = WelchConfig::default();
        let max_lag_s = default_max_lag_s(&src, &welch);
        Self {
            scenario: Scenario::MethodComparison,
            snr_inband_grid_db: default_snr_grid(),
            methods: Method::ALL.to_vec(),
            element_counts: vec![16],
            trials: 2000,
            base_seed: 1,
            src,
            welch,
            max_lag_s,
        }
    }

    /// MSIF element sweep over M in {2, 4, 8, 16}, desk scale.
    pub fn scenario2() -> Self {
        Self {
            scenario: Scenario::ElementSweep,
            methods: vec![Method::Msif],
            element_counts: vec![2, 4, 8, 16],
            ..Self::scenario1()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.snr_inband_grid_db.is_empty() {
            return Err(Error::Config("SNR grid must be nonempty".into()));
        }
        if self.methods.is_empty() || self.element_counts.is_empty() {
            return Err(Error::Config("methods and element counts must be nonempty".into()));
        }
        match self.scenario {
            Scenario::MethodComparison => {
                if self.element_counts != [16] {
                    return Err(Error::Config(
                        "the method-comparison scenario fixes the element count at 16".into(),
                    ));
                }
            }
            Scenario::ElementSweep => {
                if self.methods != [Method::Msif] {
                    return Err(Error::Config("the element sweep runs MSIF only".into()));
                }
            }
        }
        if self.element_counts.iter().any(|&m| m < 2) {
            return Err(Error::Config("element counts must be at least 2".into()));
        }
        self.src.validate()?;
        self.welch.validate()?;
        if self.src.num_samples() < self.welch.window_len {
            return Err(Error::Config("observation shorter than the analysis window".into()));
        }
        if !(self.max_lag_s > 0.0) {
            return Err(Error::Config("max_lag_s must be positive".into()));
        }
        Ok(())
    }
}

/// One cell of the RMSE table.
#[derive(Debug, Clone, PartialEq)]
pub struct RmseRow {
    pub method: Method,
    pub num_elements: usize,
    pub snr_in_db: f64,
    pub snr_broadband_db: f64,
    pub trials: usize,
    pub rmse_s: f64,
    pub crlb_std_s: f64,
    pub mean_error_s: f64,
}

/// RMSE results over the full grid, sorted by (method, M, SNR).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RmseTable {
    pub rows: Vec<RmseRow>,
}

impl RmseTable {
    /// Rows of one (method, element count) curve, ascending in SNR.
    pub fn curve(&self, method: Method, num_elements: usize) -> Vec<&RmseRow> {
        self.rows
            .iter()
            .filter(|r| r.method == method && r.num_elements == num_elements)
            .collect()
    }

    /// All (method, element count) combinations present, in row order.
    pub fn curve_keys(&self) -> Vec<(Method, usize)> {
        let mut keys = Vec::new();
        for row in &self.rows {
            if !keys.contains(&(row.method, row.num_elements)) {
                keys.push((row.method, row.num_elements));
            }
        }
        keys
    }
}

/// Deterministic per-trial recording seed. The method never enters, so all
/// methods at one grid point see the same realization.
pub fn trial_seed(base_seed: u64, snr_in_db: f64, num_elements: usize, trial_index: usize) -> u64 {
    let mut seed = mix_seed(base_seed, snr_in_db.to_bits());
    seed = mix_seed(seed, num_elements as u64);
    mix_seed(seed, trial_index as u64)
}

/// Root mean square of a nonempty error sample.
pub fn rmse(errors: &[f64]) -> Result<f64> {
    if errors.is_empty() {
        return Err(Error::Argument("cannot take the RMSE of an empty sample".into()));
    }
    Ok((errors.iter().map(|e| e * e).sum::<f64>() / errors.len() as f64).sqrt())
}

/// Run one trial for one method and return the signed delay error in
/// seconds. A refinement fallback still counts as a valid sample.
pub fn run_trial(
    cfg: &ScenarioConfig,
    snr_in_db: f64,
    num_elements: usize,
    method: Method,
    trial_index: usize,
) -> Result<f64> {
    let seed = trial_seed(cfg.base_seed, snr_in_db, num_elements, trial_index);
    let mut src = cfg.src.clone();
    src.snr_inband_db = snr_in_db;
    let arr = ArrayConfig::new(num_elements);
    let rec = synth_recording(&src, &arr, seed)?;
    let est = estimate_pair(&rec, method, &cfg.welch, cfg.max_lag_s)?;
    Ok(est.delay_s - arr.pair_delay_samples / src.sample_rate_hz)
}

/// One recording evaluated under every configured method; equals
/// `run_trial` per method bit for bit, but shares the synthesis and the
/// Welch spectra across methods.
fn batch_trial(
    cfg: &ScenarioConfig,
    snr_in_db: f64,
    num_elements: usize,
    trial_index: usize,
) -> Result<Vec<f64>> {
    let seed = trial_seed(cfg.base_seed, snr_in_db, num_elements, trial_index);
    let mut src = cfg.src.clone();
    src.snr_inband_db = snr_in_db;
    let arr = ArrayConfig::new(num_elements);
    let rec = synth_recording(&src, &arr, seed)?;
    let mean = if cfg.methods.contains(&Method::Msif) {
        Some(mean_signal(&rec)?)
    } else {
        None
    };
    let (i, j) = rec.pair;
    let set = SpectrumSet::compute(
        &rec.channels[i],
        &rec.channels[j],
        mean.as_deref(),
        &cfg.welch,
        rec.sample_rate_hz,
    )?;
    let truth = arr.pair_delay_samples / src.sample_rate_hz;
    cfg.methods
        .iter()
        .map(|&method| {
            estimate_from_spectra(&set, method, rec.sample_rate_hz, cfg.max_lag_s)
                .map(|est| est.delay_s - truth)
        })
        .collect()
}

/// Sweep the full grid and reduce to an [`RmseTable`].
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RmseTable> {
    cfg.validate()?;

    let cells: Vec<(usize, f64)> = cfg
        .element_counts
        .iter()
        .flat_map(|&m| cfg.snr_inband_grid_db.iter().map(move |&snr| (m, snr)))
        .collect();
    let jobs: Vec<(usize, f64, usize)> = cells
        .iter()
        .flat_map(|&(m, snr)| (0..cfg.trials).map(move |t| (m, snr, t)))
        .collect();

    let per_trial: Vec<Vec<f64>> = jobs
        .into_par_iter()
        .map(|(m, snr, t)| batch_trial(cfg, snr, m, t))
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(cells.len() * cfg.methods.len());
    for (cell_idx, &(m, snr)) in cells.iter().enumerate() {
        let base = cell_idx * cfg.trials;
        let bound = crlb(&CrlbInput {
            snr_inband_db: snr,
            duration_s: cfg.src.duration_s,
            center_hz: cfg.src.center_hz,
            bandwidth_hz: cfg.src.bandwidth_hz,
        })?;
        for (method_idx, &method) in cfg.methods.iter().enumerate() {
            let errors: Vec<f64> = (0..cfg.trials)
                .map(|t| per_trial[base + t][method_idx])
                .collect();
            let mean_error_s = errors.iter().sum::<f64>() / errors.len() as f64;
            rows.push(RmseRow {
                method,
                num_elements: m,
                snr_in_db: snr,
                snr_broadband_db: snr_inband_to_broadband(snr, &cfg.src),
                trials: cfg.trials,
                rmse_s: rmse(&errors)?,
                crlb_std_s: bound.std_s,
                mean_error_s,
            });
        }
    }
    rows.sort_by(|a, b| {
        (a.method, a.num_elements)
            .cmp(&(b.method, b.num_elements))
            .then(a.snr_in_db.partial_cmp(&b.snr_in_db).unwrap())
    });
    Ok(RmseTable { rows })
}

/// Threshold SNR under a lock-in rule: the smallest grid SNR whose RMSE,
/// and that of every higher grid SNR, stays within `factor ×` the CRLB
/// standard deviation. `None` when the curve never locks in.
pub fn threshold_snr(curve: &[&RmseRow], factor: f64) -> Option<f64> {
    debug_assert!(
        curve.windows(2).all(|w| w[0].snr_in_db <= w[1].snr_in_db),
        "curve must be sorted ascending in SNR"
    );
    let mut threshold = None;
    for row in curve.iter().rev() {
        if row.rmse_s <= factor * row.crlb_std_s {
            threshold = Some(row.snr_in_db);
        } else {
            break;
        }
    }
    threshold
}
