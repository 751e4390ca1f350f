use thiserror::Error;

/// Errors produced by the scattering, spectrum and EP routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("singular interface {index}: k_left + k_right vanishes")]
    SingularInterface { index: usize },

    #[error("resonant singularity in region {index}: |exp(-2ikd) - r'r| = {magnitude:e}")]
    ResonantSingularity { index: usize, magnitude: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no convergence after {iterations} iterations (relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("singular matching system (condition estimate {condition:e})")]
    SingularSystem { condition: f64 },

    #[error("energy window [{e_min}, {e_max}] leaves the open interval ({lower}, {upper})")]
    WindowViolation {
        e_min: f64,
        e_max: f64,
        lower: f64,
        upper: f64,
    },

    #[error("degenerate wavefunction: norm below 1e-30")]
    DegenerateWavefunction,

    #[error("zero eigenvalue has no eigenphase")]
    ZeroEigenvalue,

    #[error("no resonance in [{e_min}, {e_max}] eV at gamma = {gamma} eV")]
    NoResonance { gamma: f64, e_min: f64, e_max: f64 },

    #[error(
        "EP bracket needs (2, 1) peaks, found {lo_count} at gamma = {gamma_lo} and {hi_count} at gamma = {gamma_hi}"
    )]
    Bracket {
        gamma_lo: f64,
        gamma_hi: f64,
        lo_count: usize,
        hi_count: usize,
    },

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

impl Error {
    /// Re-tags interface/region indexed errors with their position in a cascade.
    pub(crate) fn at_index(self, at: usize) -> Self {
        match self {
            Error::SingularInterface { .. } => Error::SingularInterface { index: at },
            Error::ResonantSingularity { magnitude, .. } => Error::ResonantSingularity {
                index: at,
                magnitude,
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
