//! Direct boundary matching for the region amplitudes, used as the oracle
//! for [`crate::scatter::cascade`], plus wavefunction sampling and the
//! symmetric/antisymmetric classification of resonant states.
//!
//! Each region stores `ψ(x) = F e^{ik(x-o)} + B e^{-ik(x-o)}` with its own
//! origin `o`: the right edge of the left lead, the left edge of every other
//! region. The left lead carries a unit incident wave (`F₀ = 1`) and nothing
//! enters from the right (`B_last = 0`), so `B₀` and `F_last` are directly
//! the cascade's `r` and `t`.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::potential::LayeredPotential;

/// Padding of lead shown on each side when sampling, in nm.
pub const DEFAULT_LEAD_PADDING: f64 = 0.2;
pub const SYMMETRIC_THRESHOLD: f64 = 0.9;
pub const ANTISYMMETRIC_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct RegionAmplitudes {
    energy: f64,
    wavenumbers: Vec<Complex64>,
    interfaces: Vec<f64>,
    origins: Vec<f64>,
    forward: Vec<Complex64>,
    backward: Vec<Complex64>,
}

impl RegionAmplitudes {
    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn region_count(&self) -> usize {
        self.wavenumbers.len()
    }

    pub fn wavenumbers(&self) -> &[Complex64] {
        &self.wavenumbers
    }

    pub fn interfaces(&self) -> &[f64] {
        &self.interfaces
    }

    /// Right-moving amplitude of region `i`, at that region's origin.
    pub fn forward(&self, i: usize) -> Complex64 {
        self.forward[i]
    }

    /// Left-moving amplitude of region `i`, at that region's origin.
    pub fn backward(&self, i: usize) -> Complex64 {
        self.backward[i]
    }

    pub fn reflection(&self) -> Complex64 {
        self.backward[0]
    }

    pub fn transmission(&self) -> Complex64 {
        self.forward[self.forward.len() - 1]
    }

    /// Midpoint of the structure (always 0 for centred interfaces).
    pub fn center(&self) -> f64 {
        0.5 * (self.interfaces[0] + self.interfaces[self.interfaces.len() - 1])
    }

    /// `(a_i, b_i)` for global plane waves `e^{±ikx}`: in the left lead
    /// `ψ = a e^{ikx} + b e^{-ikx}`, elsewhere `ψ = b e^{ikx} + a e^{-ikx}`.
    pub fn coefficients(&self, i: usize) -> (Complex64, Complex64) {
        let k = self.wavenumbers[i];
        let o = self.origins[i];
        let ik = Complex64::i() * k;
        let right = self.forward[i] * (-ik * o).exp();
        let left = self.backward[i] * (ik * o).exp();
        if i == 0 {
            (right, left)
        } else {
            (left, right)
        }
    }

    /// Region containing `x`; points on an interface belong to the left side.
    pub fn region_of(&self, x: f64) -> usize {
        self.interfaces.partition_point(|&xi| xi < x)
    }

    pub fn psi_in(&self, i: usize, x: f64) -> Complex64 {
        let phase = Complex64::i() * self.wavenumbers[i] * (x - self.origins[i]);
        self.forward[i] * phase.exp() + self.backward[i] * (-phase).exp()
    }

    pub fn dpsi_in(&self, i: usize, x: f64) -> Complex64 {
        let ik = Complex64::i() * self.wavenumbers[i];
        let phase = ik * (x - self.origins[i]);
        ik * (self.forward[i] * phase.exp() - self.backward[i] * (-phase).exp())
    }

    pub fn psi(&self, x: f64) -> Complex64 {
        self.psi_in(self.region_of(x), x)
    }
}

fn origins_for(interfaces: &[f64]) -> Vec<f64> {
    let mut origins = Vec::with_capacity(interfaces.len() + 1);
    origins.push(interfaces[0]);
    origins.extend_from_slice(interfaces);
    origins
}

/// Solves the 2(N−1) continuity equations for ψ and ψ' at every interface.
pub fn solve_amplitudes(potential: &LayeredPotential, energy: f64) -> Result<RegionAmplitudes> {
    if !energy.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "energy must be finite, got {energy}"
        )));
    }
    let n = potential.len();
    let last = n - 1;
    let m = 2 * (n - 1);
    let ks = potential.wavenumbers(energy);
    let interfaces = potential.interfaces();
    let origins = origins_for(&interfaces);

    // unknown column for (region, forward?) or None when the amplitude is fixed
    let column = |region: usize, forward: bool| -> Option<usize> {
        match (region, forward) {
            (0, true) => None,
            (0, false) => Some(0),
            (r, false) if r == last => None,
            (r, true) if r == last => Some(m - 1),
            (r, true) => Some(1 + 2 * (r - 1)),
            (r, false) => Some(2 + 2 * (r - 1)),
        }
    };

    let mut mat = DMatrix::<Complex64>::zeros(m, m);
    let mut rhs = DVector::<Complex64>::zeros(m);
    for (j, &x) in interfaces.iter().enumerate() {
        let scale = ks[j].norm().max(ks[j + 1].norm()).max(f64::MIN_POSITIVE);
        for (region, sign) in [(j, 1.0), (j + 1, -1.0)] {
            let ik = Complex64::i() * ks[region];
            let fwd = (ik * (x - origins[region])).exp();
            let bwd = 1.0 / fwd;
            for (forward, value, slope) in [(true, fwd, ik * fwd), (false, bwd, -ik * bwd)] {
                let value = value * sign;
                let slope = slope * sign / scale;
                match column(region, forward) {
                    Some(col) => {
                        mat[(2 * j, col)] += value;
                        mat[(2 * j + 1, col)] += slope;
                    }
                    // the unit incident wave; the blocked inflow on the right is zero
                    None if region == 0 => {
                        rhs[2 * j] -= value;
                        rhs[2 * j + 1] -= slope;
                    }
                    None => {}
                }
            }
        }
    }

    let solution = mat
        .clone()
        .lu()
        .solve(&rhs)
        .filter(|x| x.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
        .ok_or_else(|| Error::SingularSystem {
            condition: condition_estimate(mat),
        })?;

    let mut forward = vec![Complex64::new(0.0, 0.0); n];
    let mut backward = vec![Complex64::new(0.0, 0.0); n];
    forward[0] = Complex64::new(1.0, 0.0);
    for region in 0..n {
        if let Some(col) = column(region, true) {
            forward[region] = solution[col];
        }
        if let Some(col) = column(region, false) {
            backward[region] = solution[col];
        }
    }
    Ok(RegionAmplitudes {
        energy,
        wavenumbers: ks,
        interfaces,
        origins,
        forward,
        backward,
    })
}

fn condition_estimate(mat: DMatrix<Complex64>) -> f64 {
    let sv = mat.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Max over interfaces of `|Δψ| + |Δψ'|·(1 nm)`, relative to the largest
/// `|ψ|` seen at the interfaces.
pub fn continuity_residual(amps: &RegionAmplitudes) -> f64 {
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for (j, &x) in amps.interfaces.iter().enumerate() {
        let (l, r) = (amps.psi_in(j, x), amps.psi_in(j + 1, x));
        let (dl, dr) = (amps.dpsi_in(j, x), amps.dpsi_in(j + 1, x));
        worst = worst.max((l - r).norm() + (dl - dr).norm());
        scale = scale.max(l.norm()).max(r.norm());
    }
    if scale == 0.0 {
        worst
    } else {
        worst / scale
    }
}

/// ψ on a uniform grid, with the region index of every sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledWavefunction {
    x: Vec<f64>,
    psi: Vec<Complex64>,
    region: Vec<usize>,
}

impl SampledWavefunction {
    pub fn new(x: Vec<f64>, psi: Vec<Complex64>, region: Vec<usize>) -> Result<Self> {
        if x.len() != psi.len() || x.len() != region.len() {
            return Err(Error::InvalidParameter(
                "grid, samples and region indices differ in length".into(),
            ));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter(
                "grid must be strictly increasing".into(),
            ));
        }
        if psi.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidParameter(
                "non-finite wavefunction sample".into(),
            ));
        }
        Ok(Self { x, psi, region })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn psi(&self) -> &[Complex64] {
        &self.psi
    }

    pub fn region(&self) -> &[usize] {
        &self.region
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.psi.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Samples ψ with [`DEFAULT_LEAD_PADDING`] of lead on each side.
pub fn sample_wavefunction(
    amps: &RegionAmplitudes,
    n_points: usize,
) -> Result<SampledWavefunction> {
    sample_wavefunction_padded(amps, n_points, DEFAULT_LEAD_PADDING)
}

/// Uniform grid symmetric about the structure centre, evaluated exactly from
/// the plane-wave amplitudes.
pub fn sample_wavefunction_padded(
    amps: &RegionAmplitudes,
    n_points: usize,
    padding: f64,
) -> Result<SampledWavefunction> {
    if n_points < 2 * amps.region_count() {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 points per region ({}), got {n_points}",
            2 * amps.region_count()
        )));
    }
    if !(padding.is_finite() && padding >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "lead padding must be finite and non-negative, got {padding}"
        )));
    }
    let center = amps.center();
    let half = 0.5 * (amps.interfaces[amps.interfaces.len() - 1] - amps.interfaces[0]) + padding;
    if !(half > 0.0) {
        return Err(Error::InvalidParameter("empty sampling interval".into()));
    }
    let step = 2.0 * half / (n_points - 1) as f64;
    let x: Vec<f64> = (0..n_points)
        .map(|k| {
            // mirror-exact grid: x[n-1-k] - c == -(x[k] - c)
            let offset = if 2 * k + 1 < n_points {
                -half + step * k as f64
            } else {
                half - step * (n_points - 1 - k) as f64
            };
            center + offset
        })
        .collect();
    let region: Vec<usize> = x.iter().map(|&xi| amps.region_of(xi)).collect();
    let psi = x
        .iter()
        .zip(&region)
        .map(|(&xi, &r)| amps.psi_in(r, xi))
        .collect();
    SampledWavefunction::new(x, psi, region)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryLabel {
    Symmetric,
    Antisymmetric,
    Mixed,
}

impl SymmetryLabel {
    pub fn from_score(score: f64) -> Self {
        if score > SYMMETRIC_THRESHOLD {
            SymmetryLabel::Symmetric
        } else if score < ANTISYMMETRIC_THRESHOLD {
            SymmetryLabel::Antisymmetric
        } else {
            SymmetryLabel::Mixed
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            SymmetryLabel::Symmetric => "symmetric",
            SymmetryLabel::Antisymmetric => "antisymmetric",
            SymmetryLabel::Mixed => "mixed",
        }
    }
}

impl fmt::Display for SymmetryLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Even-parity weight of Re ψ about `center`, after rotating the global
/// phase so that Σψ² is real and non-negative. 1 is even, 0 is odd.
pub fn symmetry_score(wf: &SampledWavefunction, center: f64) -> Result<f64> {
    let n = wf.len();
    let norm2: f64 = wf.psi.iter().map(|z| z.norm_sqr()).sum();
    if !(norm2.sqrt() >= 1e-30) {
        return Err(Error::DegenerateWavefunction);
    }
    let span = wf.x[n - 1] - wf.x[0];
    let mirrored = (0..n).all(|k| {
        let a = wf.x[k] - center;
        let b = wf.x[n - 1 - k] - center;
        (a + b).abs() <= 1e-9 * span
    });
    if !mirrored {
        return Err(Error::InvalidParameter(format!(
            "grid is not symmetric about {center}"
        )));
    }
    let sum_sq: Complex64 = wf.psi.iter().map(|z| z * z).sum();
    let rotation = Complex64::from_polar(1.0, -0.5 * sum_sq.arg());
    let real: Vec<f64> = wf.psi.iter().map(|z| (z * rotation).re).collect();
    let (mut even, mut odd) = (0.0, 0.0);
    for k in 0..n {
        let e = 0.5 * (real[k] + real[n - 1 - k]);
        let o = 0.5 * (real[k] - real[n - 1 - k]);
        even += e * e;
        odd += o * o;
    }
    if even + odd == 0.0 {
        return Err(Error::DegenerateWavefunction);
    }
    Ok(even / (even + odd))
}
