//! Iterative clipping-and-filtering design of zero-headed OFDM pulses.
//!
//! One design iteration walks the loop: oversample to the time domain, zero
//! the head region, clip the time-domain peaks, transform back, band-limit,
//! and clamp the subcarrier moduli into a narrow ring. After a fixed number
//! of iterations the sequence is truncated to the base grid, the head is
//! forced to zero, and the energy is normalized to one.

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{
    dft_raw, idft_raw, linear_to_db, db_to_linear, oversampled_time, papr_raw, ComplexSequence,
};

/// All knobs of the iterative design loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignConfig {
    /// Subcarrier count N.
    pub n: usize,
    /// Range-cell count M (head zero length is M-1).
    pub m: usize,
    /// Oversampling factor L.
    pub l: usize,
    /// Maximum iteration count Q.
    pub q: usize,
    /// Desired PAPR lower-bound parameter, in dB.
    pub papr_d_db: f64,
    /// Frequency clipping factor, 0 < g_f < 1.
    pub g_f: f64,
    /// RNG seed for the initial random phases.
    pub seed: u64,
}

impl DesignConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m < 2 || self.n < self.m {
            return Err(Error::InvalidArgument(format!(
                "require N >= M >= 2, got N={}, M={}",
                self.n, self.m
            )));
        }
        if self.l < 1 {
            return Err(Error::InvalidArgument("require L >= 1".into()));
        }
        if self.q < 1 {
            return Err(Error::InvalidArgument("require Q >= 1".into()));
        }
        if !(self.g_f > 0.0 && self.g_f < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "require 0 < g_f < 1, got {}",
                self.g_f
            )));
        }
        if !(self.papr_d_db >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "require papr_d_db >= 0, got {}",
                self.papr_d_db
            )));
        }
        Ok(())
    }
}

impl Default for DesignConfig {
    fn default() -> Self {
        Self {
            n: 128,
            m: 96,
            l: 4,
            q: 40,
            papr_d_db: 1.0,
            g_f: 0.05,
            seed: 0,
        }
    }
}

/// Quality metrics of a designed pulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseMetrics {
    /// PAPR of the oversampled nonzero segment, dB.
    pub papr_db: f64,
    /// SNR degradation factor xi = N^2 / sum |S_i|^-2, dB (<= 0).
    pub xi_db: f64,
    /// min_i |S_i| normalized by 1/sqrt(N).
    pub s_min_norm: f64,
    /// Fraction of energy leaking outside the N in-band bins after time gating.
    pub oob_energy: f64,
}

/// A designed waveform bundle: zero-headed unit-energy time sequence, its
/// subcarrier weights and quality metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct OfdmPulse {
    n: usize,
    m: usize,
    s: Vec<Complex64>,
    weights: Vec<Complex64>,
    metrics: PulseMetrics,
}

impl OfdmPulse {
    /// Rebuild a pulse from its time sequence, recomputing weights and metrics.
    pub fn from_time_sequence(s: Vec<Complex64>, m: usize, l: usize) -> Result<Self> {
        let n = s.len();
        if m < 2 || n < m {
            return Err(Error::InvalidArgument(format!(
                "require N >= M >= 2, got N={n}, M={m}"
            )));
        }
        let metrics = compute_metrics(&s, m, l)?;
        let weights = dft_raw(&s);
        Ok(Self {
            n,
            m,
            s,
            weights,
            metrics,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Length-N zero-headed time sequence.
    pub fn time_sequence(&self) -> &[Complex64] {
        &self.s
    }

    /// The N subcarrier weights S = dft(s).
    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    /// The transmitted nonzero segment s_{M-1}..s_{N-1}.
    pub fn transmitted_segment(&self) -> &[Complex64] {
        &self.s[self.m - 1..]
    }

    pub fn quality(&self) -> &PulseMetrics {
        &self.metrics
    }
}

/// Random constant-modulus starting weights: S_i = exp(j 2 pi u_i).
pub fn init_weights(n: usize, seed: u64) -> ComplexSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = (0..n)
        .map(|_| {
            let phase = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
            Complex64::new(phase.cos(), phase.sin())
        })
        .collect();
    ComplexSequence::frequency(samples).expect("n >= 1")
}

/// Zero the head region: samples 0..L(M-1) forced to zero, the rest untouched.
pub fn time_zero_filter(x: &mut [Complex64], l: usize, m: usize) -> Result<()> {
    let head = l * (m - 1);
    if x.len() <= head {
        return Err(Error::InvalidArgument(format!(
            "time filter: length {} too short for head {}",
            x.len(),
            head
        )));
    }
    for c in &mut x[..head] {
        *c = Complex64::new(0.0, 0.0);
    }
    Ok(())
}

/// Clip time-domain peaks of the nonzero region at `T = sqrt(PAPR_d * P_tav)`
/// with phase preserved; head samples stay zero.
pub fn time_clip(x: &mut [Complex64], l: usize, m: usize, papr_d_db: f64) -> Result<()> {
    let head = l * (m - 1);
    if x.len() <= head {
        return Err(Error::InvalidArgument(format!(
            "time clip: length {} too short for head {}",
            x.len(),
            head
        )));
    }
    let body = &mut x[head..];
    let p_tav: f64 = body.iter().map(|c| c.norm_sqr()).sum::<f64>() / body.len() as f64;
    if p_tav == 0.0 {
        return Err(Error::DegenerateInput(
            "time clip: nonzero region is all-zero".into(),
        ));
    }
    let threshold = (db_to_linear(papr_d_db) * p_tav).sqrt();
    for c in body {
        let a = c.norm();
        if a > threshold {
            *c *= threshold / a;
        }
    }
    Ok(())
}

/// Zero the out-of-band bins N..LN-1; in-band bins untouched.
pub fn freq_band_filter(x: &mut [Complex64], n: usize) -> Result<()> {
    if x.len() < n || x.len() % n != 0 {
        return Err(Error::InvalidArgument(format!(
            "band filter: length {} is not a multiple of N={}",
            x.len(),
            n
        )));
    }
    for c in &mut x[n..] {
        *c = Complex64::new(0.0, 0.0);
    }
    Ok(())
}

/// Clamp bin moduli into `[sqrt(P_fav)(1-G_f), sqrt(P_fav)(1+G_f)]` with
/// phases preserved. A zero-modulus bin gets phase 0 and the lower clamp.
pub fn freq_modulus_clip(x: &mut [Complex64], g_f: f64) -> Result<()> {
    if !(g_f > 0.0 && g_f < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "require 0 < g_f < 1, got {g_f}"
        )));
    }
    let n = x.len();
    let p_fav: f64 = x.iter().map(|c| c.norm_sqr()).sum::<f64>() / n as f64;
    if p_fav == 0.0 {
        return Err(Error::DegenerateInput(
            "frequency clip: all bins are zero".into(),
        ));
    }
    let lo = p_fav.sqrt() * (1.0 - g_f);
    let hi = p_fav.sqrt() * (1.0 + g_f);
    for c in x.iter_mut() {
        let a = c.norm();
        if a == 0.0 {
            *c = Complex64::new(lo, 0.0);
        } else if a > hi {
            *c *= hi / a;
        } else if a < lo {
            *c *= lo / a;
        }
    }
    Ok(())
}

/// One full design iteration: S^(q) (length N) -> S^(q+1) (length N).
pub fn design_iteration(weights: &[Complex64], cfg: &DesignConfig) -> Result<Vec<Complex64>> {
    let seq = ComplexSequence::frequency(weights.to_vec())?;
    let mut t = oversampled_time(&seq, cfg.l)?.into_samples();
    time_zero_filter(&mut t, cfg.l, cfg.m)?;
    time_clip(&mut t, cfg.l, cfg.m, cfg.papr_d_db)?;
    let mut f = dft_raw(&t);
    freq_band_filter(&mut f, cfg.n)?;
    f.truncate(cfg.n);
    freq_modulus_clip(&mut f, cfg.g_f)?;
    Ok(f)
}

/// Run the full iterative design: Q iterations, final truncation to the base
/// grid, head zeroing and unit-energy normalization.
pub fn design_pulse(cfg: &DesignConfig) -> Result<OfdmPulse> {
    cfg.validate()?;
    let mut weights = init_weights(cfg.n, cfg.seed).into_samples();
    for _ in 0..cfg.q {
        weights = design_iteration(&weights, cfg)?;
    }
    // Finalization: back to the N grid, force the zero head, normalize.
    let mut s = idft_raw(&weights);
    for c in &mut s[..cfg.m - 1] {
        *c = Complex64::new(0.0, 0.0);
    }
    let energy: f64 = s.iter().map(|c| c.norm_sqr()).sum();
    if energy == 0.0 {
        return Err(Error::DegenerateInput(
            "design collapsed to the zero sequence".into(),
        ));
    }
    let scale = 1.0 / energy.sqrt();
    for c in &mut s {
        *c *= scale;
    }
    OfdmPulse::from_time_sequence(s, cfg.m, cfg.l)
}

/// Metrics of a zero-headed unit-energy time sequence.
pub fn compute_metrics(s: &[Complex64], m: usize, l: usize) -> Result<PulseMetrics> {
    let n = s.len();
    if n < m || m < 2 {
        return Err(Error::InvalidArgument(format!(
            "metrics: require N >= M >= 2, got N={n}, M={m}"
        )));
    }
    let weights = dft_raw(s);
    let sqrt_n = (n as f64).sqrt();
    let s_min = weights.iter().map(|c| c.norm()).fold(f64::INFINITY, f64::min);

    // xi = N^2 / sum |S_i|^-2; a zero bin drives it to -inf dB.
    let xi_db = if s_min == 0.0 {
        f64::NEG_INFINITY
    } else {
        let inv_sum: f64 = weights.iter().map(|c| 1.0 / c.norm_sqr()).sum();
        linear_to_db((n * n) as f64 / inv_sum)
    };

    // PAPR over the oversampled nonzero segment.
    let dense = oversampled_time(&ComplexSequence::frequency(weights.clone())?, l)?;
    let head = l * (m - 1);
    let papr_db = linear_to_db(papr_raw(&dense.samples()[head..])?);

    // Out-of-band leakage of the time-gated oversampled waveform.
    let mut gated = dense.into_samples();
    for c in &mut gated[..head] {
        *c = Complex64::new(0.0, 0.0);
    }
    let spec = dft_raw(&gated);
    let total: f64 = spec.iter().map(|c| c.norm_sqr()).sum();
    let oob: f64 = spec[n..].iter().map(|c| c.norm_sqr()).sum();
    let oob_energy = if total > 0.0 { oob / total } else { 0.0 };

    Ok(PulseMetrics {
        papr_db,
        xi_db,
        s_min_norm: s_min * sqrt_n,
        oob_energy,
    })
}

/// Off-line pulse search: run `trials` seeds starting at `base_seed` and keep
/// the pulse minimizing PAPR among those with xi above `xi_floor_db`.
/// Falls back to the best xi pulse if none meets the floor.
pub fn best_of_search(
    cfg: &DesignConfig,
    trials: usize,
    xi_floor_db: f64,
) -> Result<(u64, OfdmPulse)> {
    use rayon::prelude::*;
    if trials == 0 {
        return Err(Error::InvalidArgument("best-of search needs trials >= 1".into()));
    }
    let candidates: Vec<(u64, OfdmPulse)> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let seed = cfg.seed.wrapping_add(t);
            let pulse = design_pulse(&DesignConfig { seed, ..*cfg })?;
            Ok((seed, pulse))
        })
        .collect::<Result<_>>()?;
    let best = candidates
        .iter()
        .filter(|(_, p)| p.quality().xi_db >= xi_floor_db)
        .min_by(|a, b| a.1.quality().papr_db.total_cmp(&b.1.quality().papr_db));
    let chosen = match best {
        Some(p) => p,
        None => candidates
            .iter()
            .max_by(|a, b| a.1.quality().xi_db.total_cmp(&b.1.quality().xi_db))
            .expect("trials >= 1"),
    };
    Ok(chosen.clone())
}
