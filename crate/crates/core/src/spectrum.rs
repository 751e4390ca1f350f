//! Transmission/reflection sweeps, resonance detection and width extraction.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::optimize::{bisect_level, golden_max, golden_min};
use crate::potential::{DimerFamily, LayeredPotential};
use crate::scatter::{cascade, unitarity_defect, TwoPortScattering};

/// Doublet window for the reference dimer, eV.
pub const DEFAULT_WINDOW: (f64, f64) = (0.15, 0.30);
/// Peak prominence threshold relative to the Hermitian maximum of T.
pub const DEFAULT_PROMINENCE_REL: f64 = 1e-2;
pub const DEFAULT_SWEEP_POINTS: usize = 4001;
/// Target bracket width for peak refinement, eV.
pub const PEAK_TOLERANCE: f64 = 1e-9;
const CROSSING_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyWindow {
    pub e_min: f64,
    pub e_max: f64,
}

impl EnergyWindow {
    pub fn new(e_min: f64, e_max: f64) -> Result<Self> {
        if !(e_min.is_finite() && e_max.is_finite() && e_min < e_max) {
            return Err(Error::InvalidParameter(format!(
                "energy window needs finite e_min < e_max, got [{e_min}, {e_max}]"
            )));
        }
        Ok(Self { e_min, e_max })
    }

    /// Fails unless the window sits strictly inside the resonance interval
    /// of `potential` (above the wells, below the barriers).
    pub fn check_within(&self, potential: &LayeredPotential) -> Result<()> {
        let (lower, upper) = potential.resonance_window();
        if self.e_min > lower && self.e_max < upper {
            Ok(())
        } else {
            Err(Error::WindowViolation {
                e_min: self.e_min,
                e_max: self.e_max,
                lower,
                upper,
            })
        }
    }

    /// `n` uniformly spaced energies including both ends.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        let step = (self.e_max - self.e_min) / (n - 1) as f64;
        (0..n)
            .map(|i| {
                if i == n - 1 {
                    self.e_max
                } else {
                    self.e_min + step * i as f64
                }
            })
            .collect()
    }
}

impl Default for EnergyWindow {
    fn default() -> Self {
        Self {
            e_min: DEFAULT_WINDOW.0,
            e_max: DEFAULT_WINDOW.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumPoint {
    pub energy: f64,
    pub s: TwoPortScattering,
    pub t: f64,
    pub r: f64,
    pub t_prime: f64,
    pub r_prime: f64,
    pub defect_left: f64,
    pub defect_right: f64,
}

impl SpectrumPoint {
    fn new(energy: f64, s: TwoPortScattering) -> Self {
        let (defect_left, defect_right) = unitarity_defect(&s);
        Self {
            energy,
            s,
            t: s.transmission(),
            r: s.reflection(),
            t_prime: s.transmission_prime(),
            r_prime: s.reflection_prime(),
            defect_left,
            defect_right,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSweep {
    potential: LayeredPotential,
    points: Vec<SpectrumPoint>,
}

impl SpectrumSweep {
    pub fn potential(&self) -> &LayeredPotential {
        &self.potential
    }

    pub fn points(&self) -> &[SpectrumPoint] {
        &self.points
    }

    pub fn energies(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.energy).collect()
    }

    pub fn transmissions(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.t).collect()
    }

    pub fn max_transmission(&self) -> f64 {
        self.points.iter().map(|p| p.t).fold(0.0, f64::max)
    }

    /// Peaks of T(E), refined against the continuous cascade.
    pub fn find_peaks(&self, prominence_min: f64) -> Result<Vec<Resonance>> {
        let potential = &self.potential;
        find_peaks_in(
            &self.energies(),
            &self.transmissions(),
            |e| cascade(potential, e).map(|s| s.transmission()),
            prominence_min,
        )
    }
}

/// Evaluates the cascade on a uniform grid (in parallel, order preserved).
pub fn sweep(
    potential: &LayeredPotential,
    window: &EnergyWindow,
    n_points: usize,
) -> Result<SpectrumSweep> {
    window.check_within(potential)?;
    if n_points < 3 {
        return Err(Error::InvalidParameter(format!(
            "a sweep needs at least 3 points, got {n_points}"
        )));
    }
    let points = window
        .grid(n_points)
        .into_par_iter()
        .map(|e| cascade(potential, e).map(|s| SpectrumPoint::new(e, s)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumSweep {
        potential: potential.clone(),
        points,
    })
}

/// A transmission maximum. Width is measured at half prominence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resonance {
    pub energy: f64,
    pub height: f64,
    pub fwhm: f64,
    pub q: f64,
    pub prominence: f64,
}

/// Finds local maxima of sampled `values` whose topographic prominence is at
/// least `prominence_min`, then refines each against the continuous `curve`.
///
/// Peak positions are refined by golden-section search to
/// [`PEAK_TOLERANCE`]; the flanking minima that set the prominence are
/// refined the same way, and the half-prominence crossings by bisection.
pub fn find_peaks_in<F>(
    energies: &[f64],
    values: &[f64],
    curve: F,
    prominence_min: f64,
) -> Result<Vec<Resonance>>
where
    F: Fn(f64) -> Result<f64>,
{
    let n = values.len();
    if n != energies.len() {
        return Err(Error::InvalidParameter(
            "energies and values differ in length".into(),
        ));
    }
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "peak search needs at least 3 samples, got {n}"
        )));
    }

    let refined_min = |idx: usize| -> Result<f64> {
        let grid = values[idx];
        if idx == 0 || idx == n - 1 {
            return Ok(grid);
        }
        let (_, v) = golden_min(&curve, energies[idx - 1], energies[idx + 1], PEAK_TOLERANCE)?;
        Ok(v.min(grid))
    };

    let mut found = Vec::new();
    for i in 1..n - 1 {
        let v = values[i];
        if !(v > values[i - 1] && v >= values[i + 1]) {
            continue;
        }

        let (mut energy, mut height) =
            golden_max(&curve, energies[i - 1], energies[i + 1], PEAK_TOLERANCE)?;
        if v > height {
            energy = energies[i];
            height = v;
        }

        // flanking minima up to the nearest higher sample (or the edge)
        let mut left_idx = i;
        let mut j = i;
        while j > 0 {
            j -= 1;
            if values[j] > v {
                break;
            }
            if values[j] < values[left_idx] {
                left_idx = j;
            }
        }
        let mut right_idx = i;
        let mut j = i;
        while j < n - 1 {
            j += 1;
            if values[j] > v {
                break;
            }
            if values[j] < values[right_idx] {
                right_idx = j;
            }
        }
        let base = refined_min(left_idx)?.max(refined_min(right_idx)?);
        let prominence = height - base;
        if !(prominence >= prominence_min) {
            continue;
        }

        let level = height - 0.5 * prominence;
        let left = {
            let start = energies.partition_point(|&e| e < energy).saturating_sub(1);
            let mut j = start;
            while values[j] > level && j > 0 {
                j -= 1;
            }
            if values[j] > level {
                energies[0]
            } else {
                let above = if j < start { energies[j + 1] } else { energy };
                bisect_level(&curve, level, energies[j], above, CROSSING_TOLERANCE)?
            }
        };
        let right = {
            let start = energies.partition_point(|&e| e <= energy).min(n - 1);
            let mut j = start;
            while values[j] > level && j < n - 1 {
                j += 1;
            }
            if values[j] > level {
                energies[n - 1]
            } else {
                let above = if j > start { energies[j - 1] } else { energy };
                bisect_level(&curve, level, energies[j], above, CROSSING_TOLERANCE)?
            }
        };
        let fwhm = right - left;
        found.push(Resonance {
            energy,
            height,
            fwhm,
            q: energy / fwhm,
            prominence,
        });
    }
    Ok(found)
}

/// Grid, window and threshold used to detect the doublet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakSearch {
    pub window: EnergyWindow,
    pub n_points: usize,
    /// Absolute prominence threshold on T.
    pub prominence_min: f64,
}

impl PeakSearch {
    pub fn new(window: EnergyWindow, n_points: usize, prominence_min: f64) -> Self {
        Self {
            window,
            n_points,
            prominence_min,
        }
    }

    /// Threshold fixed at `relative` times the largest Hermitian (γ = 0)
    /// transmission in the window.
    pub fn relative_to_hermitian(
        family: &DimerFamily,
        window: EnergyWindow,
        n_points: usize,
        relative: f64,
    ) -> Result<Self> {
        let hermitian = sweep(&family.at(0.0)?, &window, n_points)?;
        let peak = hermitian
            .find_peaks(0.0)?
            .iter()
            .map(|r| r.height)
            .fold(hermitian.max_transmission(), f64::max);
        Ok(Self::new(window, n_points, relative * peak))
    }

    pub fn with_points(self, n_points: usize) -> Self {
        Self { n_points, ..self }
    }

    pub fn peaks(&self, potential: &LayeredPotential) -> Result<Vec<Resonance>> {
        sweep(potential, &self.window, self.n_points)?.find_peaks(self.prominence_min)
    }
}

/// The tracked doublet: `upper` is `None` once the two maxima have merged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonancePair {
    pub lower: Resonance,
    pub upper: Option<Resonance>,
}

impl ResonancePair {
    pub fn count(&self) -> usize {
        1 + self.upper.is_some() as usize
    }

    pub fn splitting(&self) -> Option<f64> {
        self.upper.map(|u| u.energy - self.lower.energy)
    }

    pub fn resonances(&self) -> Vec<Resonance> {
        std::iter::once(self.lower).chain(self.upper).collect()
    }
}

/// Number of qualifying peaks in the search window at `gamma`.
pub fn count_peaks(family: &DimerFamily, gamma: f64, search: &PeakSearch) -> Result<usize> {
    Ok(search.peaks(&family.at(gamma)?)?.len())
}

pub fn resonance_pair(
    family: &DimerFamily,
    gamma: f64,
    search: &PeakSearch,
) -> Result<ResonancePair> {
    let mut peaks = search.peaks(&family.at(gamma)?)?;
    if peaks.is_empty() {
        return Err(Error::NoResonance {
            gamma,
            e_min: search.window.e_min,
            e_max: search.window.e_max,
        });
    }
    if peaks.len() > 2 {
        peaks.sort_by(|a, b| b.prominence.total_cmp(&a.prominence));
        peaks.truncate(2);
        peaks.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    }
    Ok(ResonancePair {
        lower: peaks[0],
        upper: peaks.get(1).copied(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{build_dimer, DimerParams, HBAR2_OVER_2M_ELECTRON};

    fn lorentzian(e: f64, center: f64, fwhm: f64, height: f64) -> f64 {
        let x = 2.0 * (e - center) / fwhm;
        height / (1.0 + x * x)
    }

    fn sample(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
        let es = EnergyWindow::new(lo, hi).unwrap().grid(n);
        let vs = es.iter().map(|&e| f(e)).collect();
        (es, vs)
    }

    #[test]
    fn two_lorentzians_recovered() {
        let f = |e: f64| lorentzian(e, 0.2, 0.002, 1.0) + lorentzian(e, 0.25, 0.003, 0.7);
        let (es, vs) = sample(&f, 0.15, 0.30, 1501);
        let peaks = find_peaks_in(&es, &vs, |e| Ok(f(e)), 0.1).unwrap();
        assert_eq!(peaks.len(), 2);
        assert!((peaks[0].energy - 0.2).abs() < 1e-6);
        assert!((peaks[1].energy - 0.25).abs() < 1e-6);
    }

    #[test]
    fn isolated_lorentzian_width() {
        let (center, width) = (0.22, 0.001);
        let f = |e: f64| lorentzian(e, center, width, 1.0);
        let (es, vs) = sample(&f, center - 0.05, center + 0.05, 2001);
        let peaks = find_peaks_in(&es, &vs, |e| Ok(f(e)), 0.5).unwrap();
        assert_eq!(peaks.len(), 1);
        assert!(((peaks[0].fwhm - width) / width).abs() < 1e-3);
        assert!(((peaks[0].q - center / width) / (center / width)).abs() < 1e-3);
    }

    #[test]
    fn monotonic_curve_has_no_peaks() {
        let f = |e: f64| e * e;
        let (es, vs) = sample(&f, 0.0, 1.0, 101);
        assert!(find_peaks_in(&es, &vs, |e| Ok(f(e)), 0.0)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn prominence_threshold_filters_ripples() {
        let f = |e: f64| lorentzian(e, 0.5, 0.05, 1.0) + 1e-3 * (200.0 * e).sin();
        let (es, vs) = sample(&f, 0.0, 1.0, 4001);
        let strict = find_peaks_in(&es, &vs, |e| Ok(f(e)), 0.1).unwrap();
        assert_eq!(strict.len(), 1);
        let loose = find_peaks_in(&es, &vs, |e| Ok(f(e)), 0.0).unwrap();
        assert!(loose.len() > 1);
    }

    #[test]
    fn window_violation() {
        let pot = build_dimer(&DimerParams::reference(), HBAR2_OVER_2M_ELECTRON).unwrap();
        let w = EnergyWindow::new(-0.1, 0.3).unwrap();
        assert!(matches!(
            sweep(&pot, &w, 11),
            Err(Error::WindowViolation { .. })
        ));
        let w = EnergyWindow::new(0.1, 55.0).unwrap();
        assert!(matches!(
            sweep(&pot, &w, 11),
            Err(Error::WindowViolation { .. })
        ));
        assert!(EnergyWindow::new(0.3, 0.2).is_err());
    }

    #[test]
    fn grid_is_exact_at_both_ends() {
        let g = EnergyWindow::new(0.15, 0.3).unwrap().grid(4001);
        assert_eq!(g[0], 0.15);
        assert_eq!(g[4000], 0.3);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn hermitian_sweep_is_unitary() {
        let pot = build_dimer(&DimerParams::reference(), HBAR2_OVER_2M_ELECTRON).unwrap();
        let sw = sweep(&pot, &EnergyWindow::default(), 1001).unwrap();
        for p in sw.points() {
            assert!((p.t + p.r - 1.0).abs() < 1e-10);
            assert!(p.t >= 0.0 && p.r >= 0.0);
        }
    }
}
