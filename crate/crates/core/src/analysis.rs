//! Closed-form SNR/SINR evaluation, the Monte Carlo design-quality harness
//! and the SINR-versus-input-SNR sweep.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::design::{design_pulse, DesignConfig};
use crate::error::{Error, Result};
use crate::scene::SwathScene;
use crate::spectral::{db_to_linear, linear_to_db, Autocorrelation};

/// Post-compression SNR of one range cell:
/// `N^2 |d_m|^2 / (sigma^2 sum |S_i|^-2)`.
pub fn snr_after_compression(
    d_m_power: f64,
    sigma_sq: f64,
    weights: &[Complex64],
) -> Result<f64> {
    if sigma_sq <= 0.0 {
        return Err(Error::InvalidArgument("require sigma_sq > 0".into()));
    }
    let n = weights.len();
    let mut inv_sum = 0.0;
    for (i, w) in weights.iter().enumerate() {
        let p = w.norm_sqr();
        if p == 0.0 {
            return Err(Error::UnusablePulse {
                bin: i,
                modulus: 0.0,
                floor: 0.0,
            });
        }
        inv_sum += 1.0 / p;
    }
    Ok((n * n) as f64 * d_m_power / (sigma_sq * inv_sum))
}

/// Summation bounds of the sidelobe interference for cell `m`:
/// lags `max(-m, -(N_t-1)) ..= min(M-m-1, N_t-1)`, excluding zero.
fn interference_lag_bounds(m: usize, swath: usize, n_t: usize) -> (isize, isize) {
    let lo = (-(m as isize)).max(-((n_t - 1) as isize));
    let hi = ((swath - m - 1) as isize).min((n_t - 1) as isize);
    (lo, hi)
}

/// Mean sidelobe interference power of cell `m`:
/// `sigma_d^2 * sum_{k in bounds, k != 0} |z(k)|^2`.
pub fn lfm_mean_interference(
    sigma_d_sq: f64,
    z: &Autocorrelation,
    m: usize,
    swath: usize,
    n_t: usize,
) -> f64 {
    let (lo, hi) = interference_lag_bounds(m, swath, n_t);
    let mut acc = 0.0;
    for k in lo..=hi {
        if k != 0 {
            acc += z.at(k).norm_sqr();
        }
    }
    sigma_d_sq * acc
}

/// Mean SINR after matched-filter reconstruction with an LFM pulse, with the
/// per-cell interference power averaged over the swath.
pub fn lfm_mean_sinr(
    sigma_d_sq: f64,
    sigma_sq: f64,
    z: &Autocorrelation,
    swath: usize,
    n_t: usize,
) -> f64 {
    let mean_interference = (0..swath)
        .map(|m| lfm_mean_interference(sigma_d_sq, z, m, swath, n_t))
        .sum::<f64>()
        / swath as f64;
    sigma_d_sq / (mean_interference + sigma_sq)
}

/// Lower bound on the OFDM SINR: `N S_min^2 sigma_d^2 / sigma^2`.
/// Independent of the swath width.
pub fn ofdm_sinr_bound(s_min: f64, n: usize, sigma_d_sq: f64, sigma_sq: f64) -> Result<f64> {
    if s_min <= 0.0 {
        return Err(Error::InvalidArgument("require s_min > 0".into()));
    }
    Ok(n as f64 * s_min * s_min * sigma_d_sq / sigma_sq)
}

/// True OFDM SINR: `N^2 sigma_d^2 / (sigma^2 sum |S_i|^-2)`, i.e. xi times
/// the input SNR.
pub fn ofdm_true_sinr(
    weights: &[Complex64],
    sigma_d_sq: f64,
    sigma_sq: f64,
) -> Result<f64> {
    snr_after_compression(sigma_d_sq, sigma_sq, weights)
}

/// Per-cell realized SINR for one scene: `|d_m|^2 / (|I_m|^2 + sigma^2)`
/// with the realized interference `I_m = sum_{k != 0} d_{m+k} z(k)`.
pub fn realized_sinr_per_cell(scene: &SwathScene, z: &Autocorrelation, sigma_sq: f64) -> Vec<f64> {
    let d = scene.coefficients();
    let swath = d.len();
    let n_t = z.max_lag() + 1;
    (0..swath)
        .map(|m| {
            let (lo, hi) = interference_lag_bounds(m, swath, n_t);
            let mut interference = Complex64::new(0.0, 0.0);
            for k in lo..=hi {
                if k != 0 {
                    interference += d[(m as isize + k) as usize] * z.at(k);
                }
            }
            d[m].norm_sqr() / (interference.norm_sqr() + sigma_sq)
        })
        .collect()
}

/// One pulse-design trial's quality record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignTrialRecord {
    pub seed: u64,
    pub papr_db: f64,
    pub xi_db: f64,
    pub s_min_norm: f64,
    /// Set when the trial produced a pulse unusable for reconstruction
    /// (a zero-modulus subcarrier).
    pub degenerate: bool,
}

pub const PAPR_THRESHOLDS_DB: [f64; 3] = [2.0, 2.5, 3.0];
pub const XI_THRESHOLDS_DB: [f64; 3] = [-0.1, -0.2, -0.4];
pub const S_MIN_THRESHOLDS: [f64; 4] = [0.88, 0.85, 0.8, 0.5];

/// Aggregate counts over the threshold grid plus sorted CDF samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSummary {
    pub trials: usize,
    /// Sorted PAPR values (dB), the empirical CDF support.
    pub papr_sorted_db: Vec<f64>,
    /// Sorted xi values (dB).
    pub xi_sorted_db: Vec<f64>,
    /// counts[p][x]: trials with PAPR <= PAPR_THRESHOLDS_DB[p]
    /// and xi >= XI_THRESHOLDS_DB[x].
    pub joint_counts: [[usize; 3]; 3],
    /// Trials with s_min_norm >= S_MIN_THRESHOLDS[i].
    pub s_min_counts: [usize; 4],
}

impl MonteCarloSummary {
    pub fn from_records(records: &[DesignTrialRecord]) -> Self {
        let mut papr_sorted_db: Vec<f64> = records.iter().map(|r| r.papr_db).collect();
        let mut xi_sorted_db: Vec<f64> = records.iter().map(|r| r.xi_db).collect();
        papr_sorted_db.sort_by(f64::total_cmp);
        xi_sorted_db.sort_by(f64::total_cmp);
        let mut joint_counts = [[0usize; 3]; 3];
        let mut s_min_counts = [0usize; 4];
        for r in records {
            for (p, &pt) in PAPR_THRESHOLDS_DB.iter().enumerate() {
                for (x, &xt) in XI_THRESHOLDS_DB.iter().enumerate() {
                    if r.papr_db <= pt && r.xi_db >= xt {
                        joint_counts[p][x] += 1;
                    }
                }
            }
            for (i, &st) in S_MIN_THRESHOLDS.iter().enumerate() {
                if r.s_min_norm >= st {
                    s_min_counts[i] += 1;
                }
            }
        }
        Self {
            trials: records.len(),
            papr_sorted_db,
            xi_sorted_db,
            joint_counts,
            s_min_counts,
        }
    }

    /// Fraction of trials with value <= x (empirical step CDF).
    pub fn papr_cdf_at(&self, x_db: f64) -> f64 {
        cdf_at(&self.papr_sorted_db, x_db)
    }

    pub fn xi_cdf_at(&self, x_db: f64) -> f64 {
        cdf_at(&self.xi_sorted_db, x_db)
    }
}

fn cdf_at(sorted: &[f64], x: f64) -> f64 {
    let idx = sorted.partition_point(|&v| v <= x);
    idx as f64 / sorted.len() as f64
}

/// Run `trials` independent design trials with seeds `base_seed + t`.
pub fn monte_carlo_designs(
    cfg: &DesignConfig,
    trials: usize,
    base_seed: u64,
) -> Result<(Vec<DesignTrialRecord>, MonteCarloSummary)> {
    if trials < 1 {
        return Err(Error::InvalidArgument("require trials >= 1".into()));
    }
    cfg.validate()?;
    let records: Vec<DesignTrialRecord> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let seed = base_seed.wrapping_add(t);
            let pulse = design_pulse(&DesignConfig { seed, ..*cfg })?;
            let q = pulse.quality();
            Ok(DesignTrialRecord {
                seed,
                papr_db: q.papr_db,
                xi_db: q.xi_db,
                s_min_norm: q.s_min_norm,
                degenerate: !q.xi_db.is_finite(),
            })
        })
        .collect::<Result<_>>()?;
    let summary = MonteCarloSummary::from_records(&records);
    Ok((records, summary))
}

/// Tabulated SINR curves over a shared input-SNR grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SinrCurve {
    pub snr_in_db: Vec<f64>,
    pub lfm_sinr_db: Vec<f64>,
    pub ofdm_bound_db: Vec<f64>,
    /// Present only when a designed pulse's weights were supplied.
    pub ofdm_true_db: Option<Vec<f64>>,
}

/// Sweep the three SINR curves over a grid of `sigma_d^2 / sigma^2` values
/// in dB. Noise power is normalized to one; every ratio involved is scale
/// invariant so this loses no generality.
pub fn sinr_sweep(
    s_min: f64,
    weights: Option<&[Complex64]>,
    n: usize,
    z: &Autocorrelation,
    swath: usize,
    grid_db: &[f64],
) -> Result<SinrCurve> {
    if grid_db.is_empty() {
        return Err(Error::InvalidArgument("empty input-SNR grid".into()));
    }
    let n_t = z.max_lag() + 1;
    let sigma_sq = 1.0;
    let mut lfm = Vec::with_capacity(grid_db.len());
    let mut bound = Vec::with_capacity(grid_db.len());
    let mut true_curve = weights.map(|_| Vec::with_capacity(grid_db.len()));
    for &g in grid_db {
        let sigma_d_sq = db_to_linear(g);
        lfm.push(linear_to_db(lfm_mean_sinr(sigma_d_sq, sigma_sq, z, swath, n_t)));
        bound.push(linear_to_db(ofdm_sinr_bound(s_min, n, sigma_d_sq, sigma_sq)?));
        if let (Some(w), Some(tc)) = (weights, true_curve.as_mut()) {
            tc.push(linear_to_db(ofdm_true_sinr(w, sigma_d_sq, sigma_sq)?));
        }
    }
    Ok(SinrCurve {
        snr_in_db: grid_db.to_vec(),
        lfm_sinr_db: lfm,
        ofdm_bound_db: bound,
        ofdm_true_db: true_curve,
    })
}
