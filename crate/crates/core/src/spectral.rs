//! Complex sequence primitives: unitary DFT/IDFT, oversampled time-domain
//! synthesis, PAPR and aperiodic autocorrelation.
//!
//! Both transform directions carry a `1/sqrt(size)` factor, so each one is
//! energy preserving and `idft(dft(x)) = x`.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Time,
    Frequency,
}

/// Ordered complex samples tagged with the domain they live in.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSequence {
    samples: Vec<Complex64>,
    domain: Domain,
}

impl ComplexSequence {
    pub fn new(samples: Vec<Complex64>, domain: Domain) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidArgument("sequence must be non-empty".into()));
        }
        if let Some(i) = samples.iter().position(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite sample at index {i}"
            )));
        }
        Ok(Self { samples, domain })
    }

    pub fn time(samples: Vec<Complex64>) -> Result<Self> {
        Self::new(samples, Domain::Time)
    }

    pub fn frequency(samples: Vec<Complex64>) -> Result<Self> {
        Self::new(samples, Domain::Frequency)
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|c| c.norm_sqr()).sum()
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan_forward(size: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(size))
}

fn plan_inverse(size: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(size))
}

/// Unitary forward transform on raw sample slices.
pub(crate) fn dft_raw(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    let mut buf = x.to_vec();
    plan_forward(n).process(&mut buf);
    let scale = 1.0 / (n as f64).sqrt();
    for c in &mut buf {
        *c *= scale;
    }
    buf
}

/// Unitary inverse transform on raw sample slices.
pub(crate) fn idft_raw(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    let mut buf = x.to_vec();
    plan_inverse(n).process(&mut buf);
    let scale = 1.0 / (n as f64).sqrt();
    for c in &mut buf {
        *c *= scale;
    }
    buf
}

/// Unitary DFT: `X_i = (1/sqrt(size)) * sum_n x_n exp(-j 2 pi i n / size)`.
pub fn dft(x: &ComplexSequence, size: usize) -> Result<ComplexSequence> {
    if size == 0 {
        return Err(Error::InvalidArgument("transform size must be positive".into()));
    }
    if x.len() != size {
        return Err(Error::InvalidArgument(format!(
            "dft: sequence length {} does not match transform size {}",
            x.len(),
            size
        )));
    }
    ComplexSequence::frequency(dft_raw(x.samples()))
}

/// Unitary IDFT, the exact inverse of [`dft`].
pub fn idft(x: &ComplexSequence, size: usize) -> Result<ComplexSequence> {
    if size == 0 {
        return Err(Error::InvalidArgument("transform size must be positive".into()));
    }
    if x.len() != size {
        return Err(Error::InvalidArgument(format!(
            "idft: sequence length {} does not match transform size {}",
            x.len(),
            size
        )));
    }
    ComplexSequence::time(idft_raw(x.samples()))
}

/// `L`-times oversampled time waveform of an `N`-bin weight vector:
/// the `LN`-point unitary IDFT of `S` zero-padded with `(L-1)N` trailing zeros.
pub fn oversampled_time(weights: &ComplexSequence, l: usize) -> Result<ComplexSequence> {
    if l == 0 {
        return Err(Error::InvalidArgument("oversampling factor must be >= 1".into()));
    }
    let n = weights.len();
    let mut padded = weights.samples().to_vec();
    padded.resize(l * n, Complex64::new(0.0, 0.0));
    ComplexSequence::time(idft_raw(&padded))
}

/// Peak-to-average power ratio, linear scale. Always >= 1.
pub fn papr(x: &ComplexSequence) -> Result<f64> {
    papr_raw(x.samples())
}

pub(crate) fn papr_raw(x: &[Complex64]) -> Result<f64> {
    let mut peak = 0.0f64;
    let mut sum = 0.0f64;
    for c in x {
        let p = c.norm_sqr();
        peak = peak.max(p);
        sum += p;
    }
    if sum == 0.0 {
        return Err(Error::DegenerateInput("papr of an all-zero sequence".into()));
    }
    Ok(peak / (sum / x.len() as f64))
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Aperiodic autocorrelation over all lags.
///
/// Returns `z(k)` for `k = -(N-1)..=(N-1)` laid out in lag order, so the
/// zero-lag term sits at index `N-1`.
#[derive(Debug, Clone)]
pub struct Autocorrelation {
    values: Vec<Complex64>,
    max_lag: usize,
}

impl Autocorrelation {
    pub fn at(&self, lag: isize) -> Complex64 {
        let k = lag + self.max_lag as isize;
        if k < 0 || k as usize >= self.values.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.values[k as usize]
        }
    }

    pub fn max_lag(&self) -> usize {
        self.max_lag
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}

/// `z(k) = sum_n l(n) l*(n-k)`, computed by direct lag summation.
pub fn autocorrelation(l: &ComplexSequence) -> Autocorrelation {
    let s = l.samples();
    let n = s.len() as isize;
    let mut values = Vec::with_capacity(2 * s.len() - 1);
    for k in -(n - 1)..n {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let j = i - k;
            if j >= 0 && j < n {
                acc += s[i as usize] * s[j as usize].conj();
            }
        }
        values.push(acc);
    }
    Autocorrelation {
        values,
        max_lag: s.len() - 1,
    }
}
