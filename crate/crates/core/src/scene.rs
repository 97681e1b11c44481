//! Range-line scenes and sampled received-signal synthesis.
//!
//! The noiseless received sample is `u_n = sum_m d_m s_{n-m+M-1}`,
//! `n = 0..N-1`, with the transmitted sequence zero-extended on both sides.
//! The same model in matrix form is `u = H s_t` with the banded Toeplitz
//! channel matrix built from the scene coefficients.

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::design::OfdmPulse;
use crate::error::{Error, Result};
use crate::spectral::ComplexSequence;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// The complex weighting RCS coefficients of one range line.
#[derive(Debug, Clone, PartialEq)]
pub struct SwathScene {
    d: Vec<Complex64>,
    sigma_d_sq: Option<f64>,
}

impl SwathScene {
    pub fn new(d: Vec<Complex64>, sigma_d_sq: Option<f64>) -> Result<Self> {
        if d.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "scene needs M >= 2 cells, got {}",
                d.len()
            )));
        }
        if d.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite RCS coefficient".into()));
        }
        Ok(Self { d, sigma_d_sq })
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.d
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn sigma_d_sq(&self) -> Option<f64> {
        self.sigma_d_sq
    }
}

/// One sampled received range line plus the noise parameters that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedSignal {
    pub u: ComplexSequence,
    pub sigma_sq: f64,
    pub seed: u64,
}

/// Draw one complex circular Gaussian sample with total variance `var`.
fn complex_gaussian(rng: &mut ChaCha8Rng, var: f64) -> Complex64 {
    let scale = (var / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * scale, im * scale)
}

/// Random scene: each cell is nonzero with probability `density`, drawn
/// i.i.d. complex Gaussian with per-cell variance `sigma_d_sq`.
pub fn random_scene(m: usize, sigma_d_sq: f64, density: f64, seed: u64) -> Result<SwathScene> {
    if m < 2 {
        return Err(Error::InvalidArgument("require M >= 2".into()));
    }
    if sigma_d_sq <= 0.0 {
        return Err(Error::InvalidArgument("require sigma_d_sq > 0".into()));
    }
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::InvalidArgument("require 0 <= density <= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = (0..m)
        .map(|_| {
            let occupied = rng.gen::<f64>() < density;
            let sample = complex_gaussian(&mut rng, sigma_d_sq);
            if occupied {
                sample
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    SwathScene::new(d, Some(sigma_d_sq))
}

/// Scene with explicitly placed point targets.
pub fn sparse_scene(m: usize, targets: &[(usize, Complex64)]) -> Result<SwathScene> {
    if m < 2 {
        return Err(Error::InvalidArgument("require M >= 2".into()));
    }
    let mut d = vec![Complex64::new(0.0, 0.0); m];
    let mut seen = vec![false; m];
    for &(cell, amp) in targets {
        if cell >= m {
            return Err(Error::InvalidArgument(format!(
                "target cell {cell} out of range 0..{m}"
            )));
        }
        if seen[cell] {
            return Err(Error::InvalidArgument(format!("duplicate target cell {cell}")));
        }
        seen[cell] = true;
        d[cell] = amp;
    }
    SwathScene::new(d, None)
}

/// Noiseless received sample `n` for a zero-extended length-N sequence.
fn convolved_sample(s: &[Complex64], d: &[Complex64], n: usize, m: usize) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (cell, &dm) in d.iter().enumerate() {
        let k = n as isize - cell as isize + m as isize - 1;
        if k >= 0 && (k as usize) < s.len() {
            acc += dm * s[k as usize];
        }
    }
    acc
}

/// Synthesize `u_n = sum_m d_m s_{n-m+M-1} + w_n`, `w_n ~ CN(0, sigma_sq)`.
pub fn synthesize_received(
    pulse: &OfdmPulse,
    scene: &SwathScene,
    sigma_sq: f64,
    seed: u64,
) -> Result<ReceivedSignal> {
    if pulse.m() != scene.len() {
        return Err(Error::InvalidArgument(format!(
            "pulse expects M={}, scene has {} cells",
            pulse.m(),
            scene.len()
        )));
    }
    if sigma_sq < 0.0 {
        return Err(Error::InvalidArgument("require sigma_sq >= 0".into()));
    }
    let n = pulse.n();
    let m = pulse.m();
    let s = pulse.time_sequence();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u: Vec<Complex64> = (0..n)
        .map(|i| {
            let noise = if sigma_sq > 0.0 {
                complex_gaussian(&mut rng, sigma_sq)
            } else {
                Complex64::new(0.0, 0.0)
            };
            convolved_sample(s, scene.coefficients(), i, m) + noise
        })
        .collect();
    Ok(ReceivedSignal {
        u: ComplexSequence::time(u)?,
        sigma_sq,
        seed,
    })
}

/// Banded Toeplitz channel matrix, N rows by N-M+1 columns, stored row-major.
/// Row `i`, column `j` holds `d_{i-j}` when `0 <= i-j <= M-1`, else zero.
pub fn channel_matrix(scene: &SwathScene, n: usize) -> Result<Vec<Vec<Complex64>>> {
    let m = scene.len();
    if n < m {
        return Err(Error::InvalidArgument(format!(
            "require N >= M, got N={n}, M={m}"
        )));
    }
    let cols = n - m + 1;
    let d = scene.coefficients();
    let mut h = vec![vec![Complex64::new(0.0, 0.0); cols]; n];
    for (i, row) in h.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            if i >= j && i - j <= m - 1 {
                *v = d[i - j];
            }
        }
    }
    Ok(h)
}

pub fn matrix_vector(h: &[Vec<Complex64>], x: &[Complex64]) -> Vec<Complex64> {
    h.iter()
        .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

/// Unit-energy baseband chirp of length `n_t` sweeping the full sampling
/// bandwidth over the pulse, centered at the pulse midpoint:
/// `l(n) = exp(j pi (n - n_t/2)^2 / n_t) / sqrt(n_t)`.
pub fn lfm_sequence(n_t: usize) -> Result<ComplexSequence> {
    if n_t < 2 {
        return Err(Error::InvalidArgument("require N_t >= 2".into()));
    }
    let amp = 1.0 / (n_t as f64).sqrt();
    let samples = (0..n_t)
        .map(|i| {
            let t = i as f64 - n_t as f64 / 2.0;
            let phase = std::f64::consts::PI * t * t / n_t as f64;
            Complex64::new(phase.cos(), phase.sin()) * amp
        })
        .collect();
    ComplexSequence::time(samples)
}

/// Pulse timing quantities derived from N, M and the sampling rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingConstraints {
    /// Transmitted pulse duration (N-M+1 samples), seconds.
    pub pulse_duration: f64,
    /// Minimum radar range c * duration / 2, meters.
    pub min_range: f64,
    /// Maximum pulse repetition frequency for the given swath, Hz.
    pub max_prf: f64,
}

pub fn timing_constraints(
    n: usize,
    m: usize,
    sample_rate: f64,
    swath_width: f64,
) -> Result<TimingConstraints> {
    if m < 2 || n <= m {
        return Err(Error::InvalidArgument(format!(
            "require N > M >= 2, got N={n}, M={m}"
        )));
    }
    if sample_rate <= 0.0 {
        return Err(Error::InvalidArgument("require sample_rate > 0".into()));
    }
    let pulse_duration = (n - m + 1) as f64 / sample_rate;
    let min_range = SPEED_OF_LIGHT * pulse_duration / 2.0;
    let max_prf = 1.0 / (2.0 * swath_width / SPEED_OF_LIGHT + pulse_duration);
    Ok(TimingConstraints {
        pulse_duration,
        min_range,
        max_prf,
    })
}
