//! File formats: pulse, scene and received-signal documents.
//!
//! All three are JSON. Floats go through serde_json's shortest round-trip
//! encoding, which preserves every f64 bit-exactly.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::design::{DesignConfig, OfdmPulse, PulseMetrics};
use crate::error::{Error, Result};
use crate::scene::SwathScene;
use crate::spectral::ComplexSequence;

/// On-disk pulse document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PulseFile {
    pub n: usize,
    pub m: usize,
    pub l: usize,
    pub q: usize,
    pub papr_d_db: f64,
    pub g_f: f64,
    pub seed: u64,
    pub s_re: Vec<f64>,
    pub s_im: Vec<f64>,
    pub metrics: PulseMetrics,
}

impl PulseFile {
    pub fn from_pulse(pulse: &OfdmPulse, cfg: &DesignConfig) -> Self {
        Self {
            n: pulse.n(),
            m: pulse.m(),
            l: cfg.l,
            q: cfg.q,
            papr_d_db: cfg.papr_d_db,
            g_f: cfg.g_f,
            seed: cfg.seed,
            s_re: pulse.time_sequence().iter().map(|c| c.re).collect(),
            s_im: pulse.time_sequence().iter().map(|c| c.im).collect(),
            metrics: *pulse.quality(),
        }
    }

    /// Rebuild the pulse, revalidating invariants and metrics.
    pub fn to_pulse(&self) -> Result<OfdmPulse> {
        if self.s_re.len() != self.n || self.s_im.len() != self.n {
            return Err(Error::InvalidArgument(format!(
                "pulse file: sample arrays have lengths {}/{}, expected {}",
                self.s_re.len(),
                self.s_im.len(),
                self.n
            )));
        }
        let s: Vec<Complex64> = self
            .s_re
            .iter()
            .zip(&self.s_im)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect();
        OfdmPulse::from_time_sequence(s, self.m, self.l)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("pulse file serialization")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::InvalidArgument(format!("pulse file parse: {e}")))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SceneTarget {
    pub cell: usize,
    pub re: f64,
    pub im: f64,
}

/// On-disk scene document: swath size plus the nonzero cells.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SceneFile {
    pub m: usize,
    pub targets: Vec<SceneTarget>,
}

impl SceneFile {
    pub fn from_scene(scene: &SwathScene) -> Self {
        Self {
            m: scene.len(),
            targets: scene
                .coefficients()
                .iter()
                .enumerate()
                .filter(|(_, c)| c.norm() > 0.0)
                .map(|(cell, c)| SceneTarget {
                    cell,
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }

    pub fn to_scene(&self) -> Result<SwathScene> {
        let targets: Vec<(usize, Complex64)> = self
            .targets
            .iter()
            .map(|t| (t.cell, Complex64::new(t.re, t.im)))
            .collect();
        crate::scene::sparse_scene(self.m, &targets)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene file serialization")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::InvalidArgument(format!("scene file parse: {e}")))
    }
}

/// On-disk received range line.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReceivedFile {
    pub n: usize,
    pub sigma_sq: f64,
    pub seed: u64,
    pub u_re: Vec<f64>,
    pub u_im: Vec<f64>,
}

impl ReceivedFile {
    pub fn from_received(rx: &crate::scene::ReceivedSignal) -> Self {
        Self {
            n: rx.u.len(),
            sigma_sq: rx.sigma_sq,
            seed: rx.seed,
            u_re: rx.u.samples().iter().map(|c| c.re).collect(),
            u_im: rx.u.samples().iter().map(|c| c.im).collect(),
        }
    }

    pub fn to_received(&self) -> Result<crate::scene::ReceivedSignal> {
        if self.u_re.len() != self.n || self.u_im.len() != self.n {
            return Err(Error::InvalidArgument(
                "received file: sample arrays do not match n".into(),
            ));
        }
        let u: Vec<Complex64> = self
            .u_re
            .iter()
            .zip(&self.u_im)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect();
        Ok(crate::scene::ReceivedSignal {
            u: ComplexSequence::time(u)?,
            sigma_sq: self.sigma_sq,
            seed: self.seed,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("received file serialization")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::InvalidArgument(format!("received file parse: {e}")))
    }
}
