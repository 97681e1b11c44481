//! Cyclic-prefix OFDM radar pulse design and IRCI-free range reconstruction.
//!
//! The library designs arbitrary-length OFDM radar pulses whose sampled
//! sequence carries a zero head acting as a cyclic prefix, reconstructs
//! range lines exactly by per-subcarrier equalization, and compares the
//! result against a matched-filtered LFM chirp baseline in SNR/SINR terms.

pub mod analysis;
pub mod design;
pub mod error;
pub mod io;
pub mod reconstruct;
pub mod scene;
pub mod spectral;

pub use design::{DesignConfig, OfdmPulse, PulseMetrics};
pub use error::{Error, Result};
pub use reconstruct::RangeEstimate;
pub use scene::{ReceivedSignal, SwathScene};
pub use spectral::{ComplexSequence, Domain};
