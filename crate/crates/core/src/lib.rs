//! Scattering-matrix toolkit for one-dimensional layered potentials with
//! balanced gain and loss.
//!
//! The reference system is a dimer of two quantum wells, one absorbing and
//! one amplifying, separated and bounded by thin barriers. The crate
//! computes its S-matrix by cascading interface matrices, reconstructs the
//! wavefunction by boundary matching, detects transmission resonances,
//! follows their coalescence as the gain/loss strength grows, and analyses
//! the S-matrix eigenphases.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod eptrace;
pub mod error;
pub mod optimize;
pub mod phases;
pub mod potential;
pub mod scatter;
pub mod spectrum;
pub mod wavefield;

pub use num_complex::Complex64;

pub use eptrace::{
    fit_log_log, fit_power_law, hermitian_reference_energy, locate_ep, trace, EpLocation, EpPoint,
    EpTrace, FitBand, PowerLawFit,
};
pub use error::{Error, Result};
pub use phases::{
    eigenphase_split, eigenvalues, phase_histogram, trace_argand, ArgandTrace, EigenphasePair,
    PhaseHistogram,
};
pub use potential::{
    big_gamma_to_gamma, build_dimer, gamma_to_big_gamma, wavenumber, BigGammaConvention,
    BigGammaMap, DimerFamily, DimerParams, LayeredPotential, Region, HBAR2_OVER_2M_ELECTRON,
};
pub use scatter::{
    cascade, interface_smatrix, star_combine, unitarity_defect, PhaseSegment, TwoPortScattering,
};
pub use spectrum::{
    count_peaks, find_peaks_in, resonance_pair, sweep, EnergyWindow, PeakSearch, Resonance,
    ResonancePair, SpectrumPoint, SpectrumSweep,
};
pub use wavefield::{
    continuity_residual, sample_wavefunction, sample_wavefunction_padded, solve_amplitudes,
    symmetry_score, RegionAmplitudes, SampledWavefunction, SymmetryLabel,
};
