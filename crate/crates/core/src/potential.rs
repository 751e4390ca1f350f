//! Piecewise-constant complex potentials and the PT-symmetric dimer.
//!
//! Units throughout the crate: energies in eV, lengths in nm, wavenumbers in
//! nm⁻¹. The kinetic prefactor ħ²/2m (eV·nm²) is carried by the potential so
//! the particle mass stays configurable.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// ħ²/2mₑ in eV·nm² (free-electron mass).
pub const HBAR2_OVER_2M_ELECTRON: f64 = 0.0380998212;

/// A constant-potential slab. Lead regions carry `width = 0.0` (unused).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub width: f64,
    pub potential: Complex64,
}

impl Region {
    pub fn new(width: f64, potential: Complex64) -> Self {
        Self { width, potential }
    }

    pub fn lead() -> Self {
        Self::new(0.0, Complex64::new(0.0, 0.0))
    }

    pub fn potential_real(&self) -> f64 {
        self.potential.re
    }

    pub fn potential_imag(&self) -> f64 {
        self.potential.im
    }
}

/// Principal-branch wavenumber `sqrt((E - V) / (ħ²/2m))`.
///
/// A radicand with a signed-zero imaginary part is taken from the upper side
/// of the cut, so barriers (E < V) give `k = +i κ` and decay.
pub fn wavenumber(region: &Region, energy: f64, hbar2_over_2m: f64) -> Complex64 {
    let mut radicand = (Complex64::new(energy, 0.0) - region.potential) / hbar2_over_2m;
    // -0.0 + 0.0 == +0.0
    radicand.im += 0.0;
    radicand.sqrt()
}

/// Ordered regions with semi-infinite, field-free leads at both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct LayeredPotential {
    regions: Vec<Region>,
    hbar2_over_2m: f64,
}

impl LayeredPotential {
    pub fn new(regions: Vec<Region>, hbar2_over_2m: f64) -> Result<Self> {
        if regions.len() < 3 {
            return Err(Error::InvalidParameter(format!(
                "need at least 3 regions (lead, scatterer, lead), got {}",
                regions.len()
            )));
        }
        if !(hbar2_over_2m.is_finite() && hbar2_over_2m > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "hbar2_over_2m must be finite and positive, got {hbar2_over_2m}"
            )));
        }
        let last = regions.len() - 1;
        for (i, region) in regions.iter().enumerate() {
            if !(region.potential.re.is_finite() && region.potential.im.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "region {i} has a non-finite potential"
                )));
            }
            if i == 0 || i == last {
                if region.potential != Complex64::new(0.0, 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "lead region {i} must have zero potential"
                    )));
                }
            } else if !(region.width.is_finite() && region.width > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "interior region {i} needs a finite positive width, got {}",
                    region.width
                )));
            }
        }
        Ok(Self {
            regions,
            hbar2_over_2m,
        })
    }

    /// A single interior slab between two leads.
    pub fn single(width: f64, potential: Complex64, hbar2_over_2m: f64) -> Result<Self> {
        Self::new(
            vec![
                Region::lead(),
                Region::new(width, potential),
                Region::lead(),
            ],
            hbar2_over_2m,
        )
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn interior(&self) -> &[Region] {
        &self.regions[1..self.regions.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn hbar2_over_2m(&self) -> f64 {
        self.hbar2_over_2m
    }

    /// Total width of the interior regions.
    pub fn total_width(&self) -> f64 {
        self.interior().iter().map(|r| r.width).sum()
    }

    /// Interface abscissas, centred so the structure spans `[-L/2, L/2]`.
    pub fn interfaces(&self) -> Vec<f64> {
        let mut x = -0.5 * self.total_width();
        let mut out = Vec::with_capacity(self.regions.len() - 1);
        out.push(x);
        for region in self.interior() {
            x += region.width;
            out.push(x);
        }
        out
    }

    pub fn wavenumbers(&self, energy: f64) -> Vec<Complex64> {
        self.regions
            .iter()
            .map(|r| wavenumber(r, energy, self.hbar2_over_2m))
            .collect()
    }

    /// True when every potential is real.
    pub fn is_real(&self) -> bool {
        self.regions.iter().all(|r| r.potential.im == 0.0)
    }

    /// Open energy interval in which resonances are searched: above the
    /// leads and the lowest interior real potential, below the highest one.
    pub fn resonance_window(&self) -> (f64, f64) {
        let lowest = self
            .interior()
            .iter()
            .map(|r| r.potential.re)
            .fold(f64::INFINITY, f64::min);
        let highest = self
            .interior()
            .iter()
            .map(|r| r.potential.re)
            .fold(f64::NEG_INFINITY, f64::max);
        (lowest.max(0.0), highest)
    }

    /// Parity (region order reversed) combined with time reversal (every
    /// potential conjugated).
    pub fn pt_transformed(&self) -> Self {
        Self {
            regions: self
                .regions
                .iter()
                .rev()
                .map(|r| Region::new(r.width, r.potential.conj()))
                .collect(),
            hbar2_over_2m: self.hbar2_over_2m,
        }
    }

    /// Region order reversed, potentials untouched.
    pub fn reversed(&self) -> Self {
        Self {
            regions: self.regions.iter().rev().copied().collect(),
            hbar2_over_2m: self.hbar2_over_2m,
        }
    }
}

/// Geometry and potentials of the two-scatterer dimer.
///
/// `c` is the width of each outer barrier, `b` the central barrier shared by
/// both scatterers and `a` the width of each complex well.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimerParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub v_barrier: f64,
    pub v_prime: f64,
    pub gamma: f64,
}

impl DimerParams {
    /// Reference geometry: 1.15 nm wells, 0.02 nm outer barriers, 0.01 nm
    /// central barrier, 50 eV barriers, V' = 0. With the electron mass its
    /// Hermitian doublet lies at 0.2086 and 0.2615 eV.
    pub fn reference() -> Self {
        Self {
            a: 1.15,
            b: 0.01,
            c: 0.02,
            v_barrier: 50.0,
            v_prime: 0.0,
            gamma: 0.0,
        }
    }

    pub fn with_gamma(self, gamma: f64) -> Self {
        Self { gamma, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, w) in [("a", self.a), ("b", self.b), ("c", self.c)] {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "width {name} must be finite and positive, got {w}"
                )));
            }
        }
        if !(self.v_barrier.is_finite() && self.v_prime.is_finite() && self.gamma.is_finite()) {
            return Err(Error::InvalidParameter(
                "potentials must be finite".to_string(),
            ));
        }
        if self.v_barrier <= self.v_prime {
            return Err(Error::InvalidParameter(format!(
                "barrier height {} must exceed V' = {}",
                self.v_barrier, self.v_prime
            )));
        }
        Ok(())
    }
}

impl Default for DimerParams {
    fn default() -> Self {
        Self::reference()
    }
}

/// Seven regions: lead, barrier(c), loss well, barrier(b), gain well,
/// barrier(c), lead. The loss well (V' − iγ) comes first.
pub fn build_dimer(params: &DimerParams, hbar2_over_2m: f64) -> Result<LayeredPotential> {
    params.validate()?;
    let barrier = Complex64::new(params.v_barrier, 0.0);
    let loss = Complex64::new(params.v_prime, -params.gamma);
    let gain = Complex64::new(params.v_prime, params.gamma);
    LayeredPotential::new(
        vec![
            Region::lead(),
            Region::new(params.c, barrier),
            Region::new(params.a, loss),
            Region::new(params.b, barrier),
            Region::new(params.a, gain),
            Region::new(params.c, barrier),
            Region::lead(),
        ],
        hbar2_over_2m,
    )
}

/// A dimer geometry with γ left free.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimerFamily {
    pub params: DimerParams,
    pub hbar2_over_2m: f64,
}

impl DimerFamily {
    pub fn new(params: DimerParams, hbar2_over_2m: f64) -> Result<Self> {
        params.validate()?;
        if !(hbar2_over_2m.is_finite() && hbar2_over_2m > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "hbar2_over_2m must be finite and positive, got {hbar2_over_2m}"
            )));
        }
        Ok(Self {
            params,
            hbar2_over_2m,
        })
    }

    pub fn reference() -> Self {
        Self {
            params: DimerParams::reference(),
            hbar2_over_2m: HBAR2_OVER_2M_ELECTRON,
        }
    }

    pub fn at(&self, gamma: f64) -> Result<LayeredPotential> {
        build_dimer(&self.params.with_gamma(gamma), self.hbar2_over_2m)
    }
}

/// Γ = sqrt([(ħ²/m)γ² + (E − V')]² − (E − V')²), evaluated as written in the
/// crate's eV/nm units with ħ²/m = 2·`hbar2_over_2m`.
pub fn gamma_to_big_gamma(
    gamma: f64,
    energy_ref: f64,
    v_prime: f64,
    hbar2_over_2m: f64,
) -> Result<f64> {
    let delta = energy_ref - v_prime;
    if !(delta > 0.0) {
        return Err(Error::Domain(format!(
            "reference energy {energy_ref} must exceed V' = {v_prime}"
        )));
    }
    if !gamma.is_finite() {
        return Err(Error::Domain(format!("gamma must be finite, got {gamma}")));
    }
    let u = 2.0 * hbar2_over_2m * gamma * gamma;
    // [u + δ]² − δ² = u (u + 2δ), free of cancellation for small γ.
    let radicand = u * (u + 2.0 * delta);
    if radicand < 0.0 {
        return Err(Error::Domain(format!("negative radicand {radicand:e}")));
    }
    Ok(radicand.sqrt())
}

/// Inverse of [`gamma_to_big_gamma`] on γ ≥ 0.
pub fn big_gamma_to_gamma(
    big_gamma: f64,
    energy_ref: f64,
    v_prime: f64,
    hbar2_over_2m: f64,
) -> Result<f64> {
    const MAX_ITER: usize = 50;
    const REL_TOL: f64 = 1e-12;

    if !(big_gamma.is_finite() && big_gamma >= 0.0) {
        return Err(Error::Domain(format!(
            "Gamma must be finite and non-negative, got {big_gamma}"
        )));
    }
    let delta = energy_ref - v_prime;
    if !(delta > 0.0) {
        return Err(Error::Domain(format!(
            "reference energy {energy_ref} must exceed V' = {v_prime}"
        )));
    }
    if big_gamma == 0.0 {
        return Ok(0.0);
    }
    let hm = 2.0 * hbar2_over_2m;
    // u² + 2δu − Γ² = 0, positive root in cancellation-free form.
    let u = big_gamma * big_gamma / (delta + (delta * delta + big_gamma * big_gamma).sqrt());
    let mut gamma = (u / hm).sqrt();

    let residual = |g: f64| -> Result<f64> {
        Ok((gamma_to_big_gamma(g, energy_ref, v_prime, hbar2_over_2m)? - big_gamma) / big_gamma)
    };
    for _ in 0..MAX_ITER {
        let rel = residual(gamma)?;
        if rel.abs() <= REL_TOL {
            return Ok(gamma);
        }
        // dΓ/dγ = (u + δ) · 2hm γ / Γ
        let current = big_gamma * (1.0 + rel);
        let u = hm * gamma * gamma;
        let slope = (u + delta) * 2.0 * hm * gamma / current;
        gamma -= (current - big_gamma) / slope;
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITER,
        residual: residual(gamma)?.abs(),
    })
}

/// How the reported control parameter Γ is derived from γ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BigGammaConvention {
    /// Γ = |γ| in eV: the scale on which the coalescence is reported at
    /// Γ ≈ 0.0266 for the reference dimer.
    #[default]
    Identity,
    /// The closed-form Γ(γ, E_ref) relation of [`gamma_to_big_gamma`].
    Formula,
}

/// γ ↔ Γ conversion bound to a reference energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BigGammaMap {
    pub convention: BigGammaConvention,
    pub energy_ref: f64,
    pub v_prime: f64,
    pub hbar2_over_2m: f64,
}

impl BigGammaMap {
    pub fn new(
        convention: BigGammaConvention,
        energy_ref: f64,
        v_prime: f64,
        hbar2_over_2m: f64,
    ) -> Result<Self> {
        if !(energy_ref.is_finite() && energy_ref > v_prime) {
            return Err(Error::Domain(format!(
                "reference energy {energy_ref} must exceed V' = {v_prime}"
            )));
        }
        Ok(Self {
            convention,
            energy_ref,
            v_prime,
            hbar2_over_2m,
        })
    }

    pub fn big_gamma(&self, gamma: f64) -> Result<f64> {
        match self.convention {
            BigGammaConvention::Identity => Ok(gamma.abs()),
            BigGammaConvention::Formula => self.formula_big_gamma(gamma),
        }
    }

    /// Γ from the closed-form relation, regardless of the active convention.
    pub fn formula_big_gamma(&self, gamma: f64) -> Result<f64> {
        gamma_to_big_gamma(gamma, self.energy_ref, self.v_prime, self.hbar2_over_2m)
    }

    pub fn gamma(&self, big_gamma: f64) -> Result<f64> {
        match self.convention {
            BigGammaConvention::Identity => {
                if big_gamma.is_finite() && big_gamma >= 0.0 {
                    Ok(big_gamma)
                } else {
                    Err(Error::Domain(format!(
                        "Gamma must be finite and non-negative, got {big_gamma}"
                    )))
                }
            }
            BigGammaConvention::Formula => {
                big_gamma_to_gamma(big_gamma, self.energy_ref, self.v_prime, self.hbar2_over_2m)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const H: f64 = HBAR2_OVER_2M_ELECTRON;

    #[test]
    fn swapped_barrier_geometry_is_all_real_at_zero_gamma() {
        let params = DimerParams {
            a: 1.15,
            b: 0.02,
            c: 0.01,
            v_barrier: 50.0,
            v_prime: 0.0,
            gamma: 0.0,
        };
        let pot = build_dimer(&params, H).unwrap();
        assert_eq!(pot.len(), 7);
        assert!(pot.is_real());
        assert_eq!(pot.regions()[3].width, 0.02);
        assert_eq!(pot.regions()[1].width, 0.01);
    }

    #[test]
    fn loss_precedes_gain() {
        let pot = build_dimer(&DimerParams::reference().with_gamma(0.5), H).unwrap();
        assert_eq!(pot.regions()[2].potential_imag(), -0.5);
        assert_eq!(pot.regions()[4].potential_imag(), 0.5);
        assert_eq!(pot.regions()[2].width, 1.15);
    }

    #[test]
    fn interfaces_span_symmetric_interval() {
        let p = DimerParams::reference();
        let pot = build_dimer(&p, H).unwrap();
        let xs = pot.interfaces();
        let half = p.a + p.b / 2.0 + p.c;
        assert_eq!(xs.len(), 6);
        assert!((xs[0] + half).abs() < 1e-15);
        assert!((xs[5] - half).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_params() {
        let mut p = DimerParams::reference();
        p.a = 0.0;
        assert!(matches!(
            build_dimer(&p, H),
            Err(Error::InvalidParameter(_))
        ));
        let mut p = DimerParams::reference();
        p.v_prime = 60.0;
        assert!(matches!(
            build_dimer(&p, H),
            Err(Error::InvalidParameter(_))
        ));
        let mut p = DimerParams::reference();
        p.c = -0.01;
        assert!(build_dimer(&p, H).is_err());
    }

    #[test]
    fn rejects_bad_layering() {
        assert!(LayeredPotential::new(vec![Region::lead(), Region::lead()], H).is_err());
        let bad_lead = vec![
            Region::new(0.0, Complex64::new(1.0, 0.0)),
            Region::new(1.0, Complex64::new(5.0, 0.0)),
            Region::lead(),
        ];
        assert!(LayeredPotential::new(bad_lead, H).is_err());
        let bad_width = vec![
            Region::lead(),
            Region::new(f64::INFINITY, Complex64::new(5.0, 0.0)),
            Region::lead(),
        ];
        assert!(LayeredPotential::new(bad_width, H).is_err());
    }

    #[test]
    fn lead_wavenumber() {
        // sqrt(0.2086 / 0.0380998212), independently evaluated with mpmath
        let k = wavenumber(&Region::lead(), 0.2086, 0.0380998);
        assert!((k.re - 2.339_891_954_225_813).abs() < 1e-13, "{k}");
        assert_eq!(k.im, 0.0);
    }

    #[test]
    fn barrier_wavenumber_is_positive_imaginary() {
        let barrier = Region::new(0.02, Complex64::new(50.0, 0.0));
        let k = wavenumber(&barrier, 0.2086, 0.0380998);
        assert_eq!(k.re, 0.0);
        assert!((k.im - (49.7914_f64 / 0.0380998).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn negative_zero_imaginary_part_stays_on_upper_side() {
        let barrier = Region::new(0.02, Complex64::new(50.0, 0.0));
        let mut r = barrier;
        r.potential.im = 0.0;
        let k = wavenumber(&r, 1.0, H);
        assert!(k.im > 0.0);
        // V' - i·0 written with a negative zero
        let well = Region::new(1.0, Complex64::new(60.0, -0.0));
        assert!(wavenumber(&well, 1.0, H).im > 0.0);
    }

    #[test]
    fn loss_region_is_absorbing() {
        let loss = Region::new(1.15, Complex64::new(0.0, -0.05));
        for e in [0.01, 0.2, 3.0] {
            assert!(wavenumber(&loss, e, H).im > 0.0);
        }
    }

    #[test]
    fn big_gamma_zero_and_small_gamma_expansion() {
        assert_eq!(gamma_to_big_gamma(0.0, 0.235, 0.0, H).unwrap(), 0.0);
        // Γ ≈ sqrt(2(E − V')) · sqrt(ħ²/m) · γ for γ → 0
        let (e, g): (f64, f64) = (0.235, 1e-6);
        let lead = (2.0 * e).sqrt() * (2.0 * H).sqrt() * g;
        let got = gamma_to_big_gamma(g, e, 0.0, H).unwrap();
        assert!(((got - lead) / lead).abs() < 1e-9);
    }

    #[test]
    fn big_gamma_domain_error() {
        assert!(matches!(
            gamma_to_big_gamma(0.1, 0.0, 0.0, H),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            big_gamma_to_gamma(-1.0, 0.2, 0.0, H),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn inverse_of_zero() {
        assert_eq!(big_gamma_to_gamma(0.0, 0.235, 0.0, H).unwrap(), 0.0);
    }

    #[test]
    fn identity_convention_passes_gamma_through() {
        let map = BigGammaMap::new(BigGammaConvention::Identity, 0.235, 0.0, H).unwrap();
        assert_eq!(map.big_gamma(0.0266).unwrap(), 0.0266);
        assert_eq!(map.gamma(0.0266).unwrap(), 0.0266);
        let formula = map.formula_big_gamma(0.0266).unwrap();
        assert!(formula > 0.0 && formula < 0.0266);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn pt_reversal_reproduces_dimer(
                a in 0.1f64..3.0, b in 0.001f64..0.2, c in 0.001f64..0.2,
                vb in 1.0f64..80.0, vp in -0.5f64..0.5, g in -1.0f64..1.0,
            ) {
                let p = DimerParams { a, b, c, v_barrier: vb, v_prime: vp, gamma: g };
                let pot = build_dimer(&p, H).unwrap();
                prop_assert_eq!(pot.pt_transformed(), pot);
            }

            #[test]
            fn big_gamma_monotone(g1 in 0.0f64..2.0, dg in 1e-6f64..1.0, e in 0.01f64..2.0) {
                let lo = gamma_to_big_gamma(g1, e, 0.0, H).unwrap();
                let hi = gamma_to_big_gamma(g1 + dg, e, 0.0, H).unwrap();
                prop_assert!(hi > lo);
            }

            #[test]
            fn big_gamma_round_trip(g in 1e-8f64..5.0, e in 0.01f64..5.0, vp in -1.0f64..0.0) {
                let big = gamma_to_big_gamma(g, e, vp, H).unwrap();
                let back = big_gamma_to_gamma(big, e, vp, H).unwrap();
                prop_assert!(((back - g) / g).abs() < 1e-10, "{} vs {}", back, g);
            }

            #[test]
            fn wavenumber_upper_half_plane(e in -10.0f64..10.0, vr in -10.0f64..10.0, vi in -5.0f64..=0.0) {
                // Im(radicand) = -Im(V)/h >= 0  =>  Im k >= 0
                let k = wavenumber(&Region::new(1.0, Complex64::new(vr, vi)), e, H);
                prop_assert!(k.im >= 0.0);
            }
        }
    }
}
