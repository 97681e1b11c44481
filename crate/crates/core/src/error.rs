use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("unusable pulse: |S_{bin}| = {modulus:.3e} is at or below the floor {floor:.3e}")]
    UnusablePulse {
        bin: usize,
        modulus: f64,
        floor: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
