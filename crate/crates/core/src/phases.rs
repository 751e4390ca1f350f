//! S-matrix eigenvalues, complex eigenphases, Argand trajectories and
//! phase histograms.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::potential::LayeredPotential;
use crate::scatter::{cascade, TwoPortScattering};
use crate::spectrum::EnergyWindow;

pub const DEFAULT_HISTOGRAM_BINS: usize = 64;

/// `λ± = ((r + r') ± sqrt((r − r')² + 4tt')) / 2`, principal square root.
pub fn eigenvalues(s: &TwoPortScattering) -> (Complex64, Complex64) {
    let diff = s.r - s.r_prime;
    let mut disc = diff * diff + 4.0 * s.t * s.t_prime;
    disc.im += 0.0;
    let root = disc.sqrt();
    let sum = s.r + s.r_prime;
    (0.5 * (sum + root), 0.5 * (sum - root))
}

/// Splits `λ = e^{iθ}` into `(θ_Re, θ_Im)` with `θ_Re ∈ (−π, π]` and
/// `θ_Im = −ln|λ|`, so `|λ| = e^{−θ_Im}`.
pub fn eigenphase_split(lambda: Complex64) -> Result<(f64, f64)> {
    let modulus = lambda.norm();
    if modulus == 0.0 || !modulus.is_finite() {
        return Err(Error::ZeroEigenvalue);
    }
    let mut arg = lambda.im.atan2(lambda.re);
    if arg <= -PI {
        arg = PI;
    }
    Ok((arg, -modulus.ln()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenphasePair {
    pub lambda_plus: Complex64,
    pub lambda_minus: Complex64,
    pub theta: Complex64,
    pub theta_prime: Complex64,
}

impl EigenphasePair {
    pub fn from_smatrix(s: &TwoPortScattering) -> Result<Self> {
        let (lambda_plus, lambda_minus) = eigenvalues(s);
        let (re, im) = eigenphase_split(lambda_plus)?;
        let (re_p, im_p) = eigenphase_split(lambda_minus)?;
        Ok(Self {
            lambda_plus,
            lambda_minus,
            theta: Complex64::new(re, im),
            theta_prime: Complex64::new(re_p, im_p),
        })
    }
}

/// Two eigenvalue trajectories over an energy grid, with the branch
/// assignment kept continuous from one energy to the next.
#[derive(Debug, Clone, PartialEq)]
pub struct ArgandTrace {
    pub energies: Vec<f64>,
    /// `branches[b][i]` is `λ = e^{iθ}` of branch `b` at `energies[i]`.
    pub branches: [Vec<Complex64>; 2],
    /// Indices `i` where some branch steps from `i − 1` to `i` by more than
    /// ten times its median step (typically at the eigenvalue branch point).
    pub jumps: Vec<usize>,
}

impl ArgandTrace {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// `(θ_Re, θ_Im)` of every sample of branch `b`.
    pub fn eigenphases(&self, b: usize) -> Result<Vec<(f64, f64)>> {
        self.branches[b]
            .iter()
            .map(|&l| eigenphase_split(l))
            .collect()
    }

    pub fn max_radius_deviation(&self) -> f64 {
        self.branches
            .iter()
            .flatten()
            .map(|l| (l.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Assigns the unordered eigenvalue pairs to two branches by minimal total
/// displacement between consecutive samples.
pub fn track_branches(pairs: &[(Complex64, Complex64)]) -> ([Vec<Complex64>; 2], Vec<usize>) {
    let mut first = Vec::with_capacity(pairs.len());
    let mut second = Vec::with_capacity(pairs.len());
    for (i, &(a, b)) in pairs.iter().enumerate() {
        if i == 0 {
            first.push(a);
            second.push(b);
            continue;
        }
        let (p, q) = (first[i - 1], second[i - 1]);
        let keep = (a - p).norm() + (b - q).norm();
        let swap = (b - p).norm() + (a - q).norm();
        if swap < keep {
            first.push(b);
            second.push(a);
        } else {
            first.push(a);
            second.push(b);
        }
    }

    let mut jumps = Vec::new();
    for branch in [&first, &second] {
        let steps: Vec<f64> = branch.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
        if steps.is_empty() {
            continue;
        }
        let mut sorted = steps.clone();
        sorted.sort_by(f64::total_cmp);
        let median = sorted[sorted.len() / 2];
        jumps.extend(
            steps
                .iter()
                .enumerate()
                .filter(|(_, &s)| s > 10.0 * median)
                .map(|(i, _)| i + 1),
        );
    }
    jumps.sort_unstable();
    jumps.dedup();
    ([first, second], jumps)
}

pub fn trace_argand(
    potential: &LayeredPotential,
    window: &EnergyWindow,
    n_points: usize,
) -> Result<ArgandTrace> {
    window.check_within(potential)?;
    if n_points < 2 {
        return Err(Error::InvalidParameter(format!(
            "an Argand trace needs at least 2 points, got {n_points}"
        )));
    }
    let energies = window.grid(n_points);
    let pairs = energies
        .par_iter()
        .map(|&e| cascade(potential, e).map(|s| eigenvalues(&s)))
        .collect::<Result<Vec<_>>>()?;
    let (branches, jumps) = track_branches(&pairs);
    Ok(ArgandTrace {
        energies,
        branches,
        jumps,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseHistogram {
    /// `n_bins + 1` edges from −π to π.
    pub edges: Vec<f64>,
    pub counts: [Vec<u64>; 2],
}

impl PhaseHistogram {
    pub fn n_bins(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// Share of both branches' counts in bins whose centre lies within
    /// `radius` of ±π.
    pub fn fraction_near_pi(&self, radius: f64) -> f64 {
        let total = self.total();
        if total == 0 {
            return 0.0;
        }
        let near: u64 = (0..self.n_bins())
            .filter(|&i| {
                let center = 0.5 * (self.edges[i] + self.edges[i + 1]);
                PI - center.abs() <= radius
            })
            .map(|i| self.counts[0][i] + self.counts[1][i])
            .sum();
        near as f64 / total as f64
    }
}

/// Bins θ_Re of each branch uniformly over [−π, π]; the last bin includes π.
pub fn phase_histogram(trace: &ArgandTrace, n_bins: usize) -> Result<PhaseHistogram> {
    if n_bins < 2 {
        return Err(Error::InvalidParameter(format!(
            "histogram needs at least 2 bins, got {n_bins}"
        )));
    }
    let width = 2.0 * PI / n_bins as f64;
    let edges: Vec<f64> = (0..=n_bins)
        .map(|i| {
            if i == n_bins {
                PI
            } else {
                -PI + width * i as f64
            }
        })
        .collect();
    let mut counts = [vec![0u64; n_bins], vec![0u64; n_bins]];
    for (b, branch) in trace.branches.iter().enumerate() {
        for &lambda in branch {
            let (theta, _) = eigenphase_split(lambda)?;
            let bin = (((theta + PI) / width).floor() as usize).min(n_bins - 1);
            counts[b][bin] += 1;
        }
    }
    Ok(PhaseHistogram { edges, counts })
}
