//! Doublet tracking versus γ, location of the coalescence point and the
//! splitting power law.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::potential::{BigGammaMap, DimerFamily};
use crate::spectrum::{resonance_pair, PeakSearch, ResonancePair};

pub const DEFAULT_TOL_GAMMA: f64 = 1e-6;
const MAX_BISECTIONS: usize = 200;

/// Mean of the two γ = 0 resonance energies.
pub fn hermitian_reference_energy(family: &DimerFamily, search: &PeakSearch) -> Result<f64> {
    let pair = resonance_pair(family, 0.0, search)?;
    match pair.upper {
        Some(upper) => Ok(0.5 * (pair.lower.energy + upper.energy)),
        None => Err(Error::InsufficientData(
            "the Hermitian spectrum shows a single resonance in the window".into(),
        )),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpPoint {
    pub gamma: f64,
    /// Γ under the map's active convention.
    pub big_gamma: f64,
    /// Γ from the closed-form relation, for comparison.
    pub big_gamma_formula: f64,
    pub pair: ResonancePair,
}

impl EpPoint {
    pub fn splitting(&self) -> Option<f64> {
        self.pair.splitting()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpTrace {
    pub points: Vec<EpPoint>,
}

impl EpTrace {
    /// Index of the first single-resonance entry, if any.
    pub fn coalescence_index(&self) -> Option<usize> {
        self.points.iter().position(|p| p.pair.upper.is_none())
    }

    /// True when the single-resonance entries form a suffix of the trace.
    pub fn is_single_step(&self) -> bool {
        match self.coalescence_index() {
            Some(i) => self.points[i..].iter().all(|p| p.pair.upper.is_none()),
            None => true,
        }
    }

    pub fn pre_coalescence(&self) -> &[EpPoint] {
        &self.points[..self.coalescence_index().unwrap_or(self.points.len())]
    }
}

/// Runs [`resonance_pair`] at every γ of a grid that starts at 0 and
/// increases strictly.
pub fn trace(
    family: &DimerFamily,
    gammas: &[f64],
    search: &PeakSearch,
    map: &BigGammaMap,
) -> Result<EpTrace> {
    if gammas.first() != Some(&0.0) {
        return Err(Error::InvalidParameter(
            "the gamma grid must start at 0".into(),
        ));
    }
    if gammas.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter(
            "the gamma grid must be strictly increasing".into(),
        ));
    }
    let points = gammas
        .par_iter()
        .map(|&gamma| {
            Ok(EpPoint {
                gamma,
                big_gamma: map.big_gamma(gamma)?,
                big_gamma_formula: map.formula_big_gamma(gamma)?,
                pair: resonance_pair(family, gamma, search)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EpTrace { points })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpLocation {
    pub gamma: f64,
    pub big_gamma: f64,
    /// Final (two-peak, one-peak) γ bracket.
    pub bracket: (f64, f64),
    pub iterations: usize,
}

/// Bisects on the peak count until the bracket is narrower than `tol_gamma`.
pub fn locate_ep(
    family: &DimerFamily,
    gamma_lo: f64,
    gamma_hi: f64,
    tol_gamma: f64,
    search: &PeakSearch,
    map: &BigGammaMap,
) -> Result<EpLocation> {
    if !(tol_gamma > 0.0 && gamma_lo.is_finite() && gamma_hi.is_finite() && gamma_lo < gamma_hi) {
        return Err(Error::InvalidParameter(format!(
            "need gamma_lo < gamma_hi and tol_gamma > 0, got [{gamma_lo}, {gamma_hi}], {tol_gamma}"
        )));
    }
    let count = |g: f64| -> Result<usize> { Ok(search.peaks(&family.at(g)?)?.len()) };
    let (lo_count, hi_count) = (count(gamma_lo)?, count(gamma_hi)?);
    if lo_count < 2 || hi_count != 1 {
        return Err(Error::Bracket {
            gamma_lo,
            gamma_hi,
            lo_count,
            hi_count,
        });
    }
    let (mut lo, mut hi) = (gamma_lo, gamma_hi);
    let mut iterations = 0;
    while hi - lo >= tol_gamma {
        if iterations == MAX_BISECTIONS {
            return Err(Error::NoConvergence {
                iterations,
                residual: hi - lo,
            });
        }
        let mid = 0.5 * (lo + hi);
        match count(mid)? {
            0 => {
                return Err(Error::NoResonance {
                    gamma: mid,
                    e_min: search.window.e_min,
                    e_max: search.window.e_max,
                })
            }
            1 => hi = mid,
            _ => lo = mid,
        }
        iterations += 1;
    }
    let gamma = 0.5 * (lo + hi);
    Ok(EpLocation {
        gamma,
        big_gamma: map.big_gamma(gamma)?,
        bracket: (lo, hi),
        iterations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub a: f64,
    pub b: f64,
    /// RMS residual of the log-log regression.
    pub residual: f64,
    pub n_points: usize,
    /// γ range of the points used.
    pub gamma_range: (f64, f64),
}

/// Ordinary least squares of `ln y = ln A + B ln x`.
pub fn fit_log_log(xs: &[f64], ys: &[f64]) -> Result<PowerLawFit> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidParameter(format!(
            "{} abscissae but {} ordinates",
            xs.len(),
            ys.len()
        )));
    }
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(&x, &y)| x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(&x, &y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 5 {
        return Err(Error::InsufficientData(format!(
            "power-law fit needs at least 5 positive points, got {}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all abscissae are equal".into()));
    }
    let b = sxy / sxx;
    let intercept = my - b * mx;
    let residual = (pts
        .iter()
        .map(|p| (p.1 - intercept - b * p.0).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(PowerLawFit {
        a: intercept.exp(),
        b,
        residual,
        n_points: pts.len(),
        gamma_range: (f64::NAN, f64::NAN),
    })
}

/// Points whose relative detuning `(γ_EP − γ)/γ_EP` lies in
/// `[min_detuning, max_detuning]` enter the fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitBand {
    pub min_detuning: f64,
    pub max_detuning: f64,
}

impl Default for FitBand {
    fn default() -> Self {
        Self {
            min_detuning: 0.05,
            max_detuning: 0.25,
        }
    }
}

/// Fits `ΔE = A (Γ_EP − Γ)^B` over the pre-coalescence entries of `trace`
/// inside `band`.
pub fn fit_power_law(trace: &EpTrace, ep: &EpLocation, band: FitBand) -> Result<PowerLawFit> {
    if !(0.0 <= band.min_detuning && band.min_detuning < band.max_detuning) {
        return Err(Error::InvalidParameter(format!(
            "invalid fit band [{}, {}]",
            band.min_detuning, band.max_detuning
        )));
    }
    let selected: Vec<&EpPoint> = trace
        .pre_coalescence()
        .iter()
        .filter(|p| {
            let detuning = (ep.gamma - p.gamma) / ep.gamma;
            detuning >= band.min_detuning && detuning <= band.max_detuning
        })
        .collect();
    let xs: Vec<f64> = selected
        .iter()
        .map(|p| ep.big_gamma - p.big_gamma)
        .collect();
    let ys: Vec<f64> = selected
        .iter()
        .map(|p| p.splitting().unwrap_or(0.0))
        .collect();
    let mut fit = fit_log_log(&xs, &ys)?;
    fit.gamma_range = (
        selected.first().map_or(f64::NAN, |p| p.gamma),
        selected.last().map_or(f64::NAN, |p| p.gamma),
    );
    Ok(fit)
}
