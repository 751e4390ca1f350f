//! Two-port S-matrices: interfaces, star composition and the full cascade.
//!
//! Amplitudes are referenced to the interfaces that bound each scatterer:
//! an interface S-matrix has its phase origin at the interface itself, and
//! the composition of two scatterers separated by a slab of width `d`
//! carries the propagation factors `e^{±ikd}` explicitly. The cascade over a
//! [`LayeredPotential`] therefore returns amplitudes referenced to the outer
//! faces `x = ∓L/2`, i.e. incoming `a₁e^{-ik₁L/2}` and outgoing `b₁e^{ik₁L/2}`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::potential::LayeredPotential;

/// Denominators below this magnitude are treated as a divergent geometric
/// series of multiple reflections.
pub const RESONANT_GUARD: f64 = 1e-300;

/// `S = [[r, t'], [t, r']]`: unprimed amplitudes for incidence from the left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPortScattering {
    pub r: Complex64,
    pub t: Complex64,
    pub r_prime: Complex64,
    pub t_prime: Complex64,
}

impl TwoPortScattering {
    pub fn new(r: Complex64, t: Complex64, r_prime: Complex64, t_prime: Complex64) -> Self {
        Self {
            r,
            t,
            r_prime,
            t_prime,
        }
    }

    pub fn identity() -> Self {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        Self::new(zero, one, zero, one)
    }

    /// Row-major `[[r, t'], [t, r']]`.
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        [[self.r, self.t_prime], [self.t, self.r_prime]]
    }

    /// The same scatterer seen from the other side.
    pub fn mirrored(&self) -> Self {
        Self::new(self.r_prime, self.t_prime, self.r, self.t)
    }

    pub fn transmission(&self) -> f64 {
        self.t.norm_sqr()
    }

    pub fn reflection(&self) -> f64 {
        self.r.norm_sqr()
    }

    pub fn transmission_prime(&self) -> f64 {
        self.t_prime.norm_sqr()
    }

    pub fn reflection_prime(&self) -> f64 {
        self.r_prime.norm_sqr()
    }

    pub fn is_finite(&self) -> bool {
        [self.r, self.t, self.r_prime, self.t_prime]
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest element-wise relative deviation from `other`.
    pub fn max_relative_difference(&self, other: &Self) -> f64 {
        let pairs = [
            (self.r, other.r),
            (self.t, other.t),
            (self.r_prime, other.r_prime),
            (self.t_prime, other.t_prime),
        ];
        pairs
            .iter()
            .map(|(x, y)| {
                let scale = x.norm().max(y.norm());
                if scale == 0.0 {
                    0.0
                } else {
                    (x - y).norm() / scale
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Free propagation through a slab: wavenumber `k` over width `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSegment {
    pub k: Complex64,
    pub d: f64,
}

impl PhaseSegment {
    pub fn new(k: Complex64, d: f64) -> Result<Self> {
        if !(d.is_finite() && d >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "segment length must be finite and non-negative, got {d}"
            )));
        }
        Ok(Self { k, d })
    }
}

/// Step between two constant-potential regions, from ψ and ψ' continuity.
pub fn interface_smatrix(k_left: Complex64, k_right: Complex64) -> Result<TwoPortScattering> {
    let sum = k_left + k_right;
    let scale = k_left.norm().max(k_right.norm());
    if sum.norm() <= f64::EPSILON * scale || sum.norm() == 0.0 {
        return Err(Error::SingularInterface { index: 0 });
    }
    let r = (k_left - k_right) / sum;
    Ok(TwoPortScattering::new(
        r,
        2.0 * k_left / sum,
        -r,
        2.0 * k_right / sum,
    ))
}

/// Combines `left` and `right` separated by `segment`, summing the multiple
/// reflections inside the segment as a geometric series.
pub fn star_combine(
    left: &TwoPortScattering,
    segment: &PhaseSegment,
    right: &TwoPortScattering,
) -> Result<TwoPortScattering> {
    let i = Complex64::new(0.0, 1.0);
    let phase = (-i * segment.k * segment.d).exp();
    let denom = phase * phase - left.r_prime * right.r;
    let magnitude = denom.norm();
    if !(magnitude >= RESONANT_GUARD) {
        return Err(Error::ResonantSingularity {
            index: 0,
            magnitude,
        });
    }
    Ok(TwoPortScattering {
        r: left.r + left.t_prime * right.r * left.t / denom,
        t: right.t * phase * left.t / denom,
        t_prime: left.t_prime * phase * right.t_prime / denom,
        r_prime: right.r_prime + right.t * left.r_prime * right.t_prime / denom,
    })
}

/// S-matrix of a whole layered structure, built left to right.
///
/// Error indices: `SingularInterface { index: j }` refers to the interface
/// between regions `j` and `j + 1`; `ResonantSingularity { index: i }` to
/// interior region `i`.
pub fn cascade(potential: &LayeredPotential, energy: f64) -> Result<TwoPortScattering> {
    let regions = potential.regions();
    let ks = potential.wavenumbers(energy);
    let mut acc = interface_smatrix(ks[0], ks[1]).map_err(|e| e.at_index(0))?;
    for i in 1..regions.len() - 1 {
        let next = interface_smatrix(ks[i], ks[i + 1]).map_err(|e| e.at_index(i))?;
        let segment = PhaseSegment {
            k: ks[i],
            d: regions[i].width,
        };
        acc = star_combine(&acc, &segment, &next).map_err(|e| e.at_index(i))?;
    }
    Ok(acc)
}

/// `(|r|² + |t|² − 1, |r'|² + |t'|² − 1)`: negative when absorbing, positive
/// when amplifying.
pub fn unitarity_defect(s: &TwoPortScattering) -> (f64, f64) {
    (
        s.reflection() + s.transmission() - 1.0,
        s.reflection_prime() + s.transmission_prime() - 1.0,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{build_dimer, DimerParams, Region, HBAR2_OVER_2M_ELECTRON};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn transparent_interface() {
        let s = interface_smatrix(c(1.7, 0.2), c(1.7, 0.2)).unwrap();
        assert!(close(s.r, c(0.0, 0.0), 1e-15));
        assert!(close(s.t, c(1.0, 0.0), 1e-15));
        assert!(close(s.t_prime, c(1.0, 0.0), 1e-15));
        assert!(close(s.r_prime, c(0.0, 0.0), 1e-15));
    }

    #[test]
    fn interface_substitution() {
        let s = interface_smatrix(c(2.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!(close(s.r, c(1.0 / 3.0, 0.0), 1e-15));
        assert!(close(s.t, c(4.0 / 3.0, 0.0), 1e-15));
        assert!(close(s.t_prime, c(2.0 / 3.0, 0.0), 1e-15));
        assert!(close(s.r_prime, c(-1.0 / 3.0, 0.0), 1e-15));
    }

    #[test]
    fn singular_interface() {
        assert_eq!(
            interface_smatrix(c(1.0, 2.0), c(-1.0, -2.0)),
            Err(Error::SingularInterface { index: 0 })
        );
    }

    #[test]
    fn cancelling_interfaces_give_identity() {
        let (k1, k2) = (c(2.3, 0.0), c(0.0, 36.0));
        let left = interface_smatrix(k1, k2).unwrap();
        let right = interface_smatrix(k2, k1).unwrap();
        let seg = PhaseSegment::new(k2, 0.0).unwrap();
        let s = star_combine(&left, &seg, &right).unwrap();
        let id = TwoPortScattering::identity();
        assert!(close(s.r, id.r, 1e-14));
        assert!(close(s.t, id.t, 1e-14));
        assert!(close(s.r_prime, id.r_prime, 1e-14));
        assert!(close(s.t_prime, id.t_prime, 1e-14));
    }

    #[test]
    fn identity_segment_is_pure_propagation() {
        let id = TwoPortScattering::identity();
        let k = c(2.0, 0.3);
        let d = 0.7;
        let s = star_combine(&id, &PhaseSegment::new(k, d).unwrap(), &id).unwrap();
        let expected = (Complex64::i() * k * d).exp();
        assert!(close(s.t, expected, 1e-14));
        assert!(close(s.t_prime, expected, 1e-14));
        assert!((s.t.norm() - (-k.im * d).exp()).abs() < 1e-14);
        assert!(close(s.r, c(0.0, 0.0), 1e-15));
    }

    #[test]
    fn free_structure_matches_plane_wave() {
        // zero potential everywhere: t must be e^{ikL}
        let h = HBAR2_OVER_2M_ELECTRON;
        let pot = LayeredPotential::new(
            vec![
                Region::lead(),
                Region::new(0.4, c(0.0, 0.0)),
                Region::new(0.9, c(0.0, 0.0)),
                Region::lead(),
            ],
            h,
        )
        .unwrap();
        let e = 0.3;
        let k = (e / h).sqrt();
        let s = cascade(&pot, e).unwrap();
        assert!(close(s.t, Complex64::from_polar(1.0, k * 1.3), 1e-13));
        assert!(s.r.norm() < 1e-15);
    }

    #[test]
    fn resonant_singularity_is_reported() {
        // r'_L r_R = 1 with no propagation phase: the series diverges exactly
        let mut left = TwoPortScattering::identity();
        left.r_prime = c(1.0, 0.0);
        let mut right = TwoPortScattering::identity();
        right.r = c(1.0, 0.0);
        let seg = PhaseSegment::new(c(0.0, 0.0), 1.0).unwrap();
        let err = star_combine(&left, &seg, &right).unwrap_err();
        assert!(matches!(err, Error::ResonantSingularity { .. }));
    }

    #[test]
    fn hermitian_dimer_unitary_and_specular() {
        let pot = build_dimer(&DimerParams::reference(), HBAR2_OVER_2M_ELECTRON).unwrap();
        for e in [0.05, 0.17, 0.2086, 0.24, 0.4, 1.3] {
            let s = cascade(&pot, e).unwrap();
            let (dl, dr) = unitarity_defect(&s);
            assert!(dl.abs() < 1e-12 && dr.abs() < 1e-12, "{e}: {dl:e} {dr:e}");
            assert!((s.r - s.r_prime).norm() < 1e-12);
            assert!((s.t - s.t_prime).norm() < 1e-12);
        }
    }

    #[test]
    fn reference_dimer_peak_reaches_unity() {
        let pot = build_dimer(&DimerParams::reference(), HBAR2_OVER_2M_ELECTRON).unwrap();
        // grid maximum near the lower Hermitian resonance
        let best = (0..=2000)
            .map(|i| 0.205 + 0.008 * i as f64 / 2000.0)
            .map(|e| cascade(&pot, e).unwrap().transmission())
            .fold(0.0, f64::max);
        assert!((best - 1.0).abs() < 1e-3, "{best}");
    }

    #[test]
    fn amplification_below_the_doublet_midpoint() {
        let pot = build_dimer(
            &DimerParams::reference().with_gamma(0.02),
            HBAR2_OVER_2M_ELECTRON,
        )
        .unwrap();
        // lower resonance for gamma = 0.02 eV sits near 0.2174 eV
        let s = cascade(&pot, 0.2174).unwrap();
        let (dl, dr) = unitarity_defect(&s);
        assert!(dl > 0.0 || dr > 0.0, "{dl} {dr}");
    }

    #[test]
    fn defect_is_continuous_in_energy() {
        let pot = build_dimer(
            &DimerParams::reference().with_gamma(0.015),
            HBAR2_OVER_2M_ELECTRON,
        )
        .unwrap();
        let n = 20_001;
        let de = 0.15 / (n - 1) as f64;
        let defects: Vec<f64> = (0..n)
            .map(|i| unitarity_defect(&cascade(&pot, 0.15 + de * i as f64).unwrap()).0)
            .collect();
        let max_jump = defects
            .windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .fold(0.0, f64::max);
        // the defect stays O(1) and its slope is bounded by the resonance width
        let max_abs = defects.iter().fold(0.0_f64, |m, d| m.max(d.abs()));
        assert!(
            max_jump < 0.02 * max_abs.max(1.0),
            "{max_jump} vs {max_abs}"
        );
    }

    #[test]
    fn gain_loss_swap_is_structure_reversal() {
        let h = HBAR2_OVER_2M_ELECTRON;
        let p = DimerParams::reference().with_gamma(0.02);
        let fwd = build_dimer(&p, h).unwrap();
        let back = build_dimer(&p.with_gamma(-0.02), h).unwrap();
        assert_eq!(back, fwd.reversed());
        for e in [0.19, 0.21, 0.23, 0.25, 0.27] {
            let s = cascade(&fwd, e).unwrap();
            let m = cascade(&back, e).unwrap();
            assert!(m.max_relative_difference(&s.mirrored()) < 1e-10);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn dimer_strategy() -> impl Strategy<Value = (DimerParams, f64)> {
            (
                0.5f64..2.0,
                0.005f64..0.05,
                0.005f64..0.05,
                5.0f64..60.0,
                -0.05f64..0.05,
                -0.08f64..0.08,
                0.02f64..1.0,
            )
                .prop_map(|(a, b, c, vb, vp, g, frac)| {
                    let p = DimerParams {
                        a,
                        b,
                        c,
                        v_barrier: vb,
                        v_prime: vp,
                        gamma: g,
                    };
                    let e = vp.max(0.0) + frac * 0.9 * (vb.min(2.0) - vp.max(0.0));
                    (p, e)
                })
        }

        proptest! {
            #[test]
            fn interface_flux_conservation(kl in 0.01f64..50.0, kr in 0.01f64..50.0) {
                let s = interface_smatrix(c(kl, 0.0), c(kr, 0.0)).unwrap();
                let flux = s.r.norm_sqr() + kr / kl * s.t.norm_sqr();
                prop_assert!((flux - 1.0).abs() < 1e-13);
            }

            #[test]
            fn two_real_scatterers_unitary(
                v1 in 1.0f64..40.0, v2 in 0.0f64..0.3,
                w1 in 0.005f64..0.1, w2 in 0.1f64..2.0, e in 0.05f64..0.9,
            ) {
                let h = HBAR2_OVER_2M_ELECTRON;
                let pot = LayeredPotential::new(vec![
                    Region::lead(),
                    Region::new(w1, c(v1, 0.0)),
                    Region::new(w2, c(v2, 0.0)),
                    Region::new(w1, c(v1, 0.0)),
                    Region::lead(),
                ], h).unwrap();
                let s = cascade(&pot, e).unwrap();
                let (dl, dr) = unitarity_defect(&s);
                prop_assert!(dl.abs() < 1e-12 && dr.abs() < 1e-12);
                // r t'* + t r'* = 0
                let cross = s.r * s.t_prime.conj() + s.t * s.r_prime.conj();
                prop_assert!(cross.norm() < 1e-12);
            }

            #[test]
            fn reciprocity_for_complex_potentials((p, e) in dimer_strategy()) {
                let pot = build_dimer(&p, HBAR2_OVER_2M_ELECTRON).unwrap();
                let s = cascade(&pot, e).unwrap();
                prop_assert!((s.t - s.t_prime).norm() <= 1e-10 * s.t.norm());
            }

            #[test]
            fn grouping_is_associative(
                k1 in 0.5f64..3.0, k2 in 5.0f64..40.0, k3 in 0.5f64..3.0, kim in 0.0f64..0.3,
                d1 in 0.005f64..0.05, d2 in 0.3f64..1.5,
            ) {
                let ka = c(k1, 0.0);
                let kb = c(0.0, k2);
                let kc = c(k3, kim);
                let a = interface_smatrix(ka, kb).unwrap();
                let b = interface_smatrix(kb, kc).unwrap();
                let cc = interface_smatrix(kc, ka).unwrap();
                let s1 = PhaseSegment::new(kb, d1).unwrap();
                let s2 = PhaseSegment::new(kc, d2).unwrap();
                let left_first = star_combine(&star_combine(&a, &s1, &b).unwrap(), &s2, &cc).unwrap();
                let right_first = star_combine(&a, &s1, &star_combine(&b, &s2, &cc).unwrap()).unwrap();
                prop_assert!(left_first.max_relative_difference(&right_first) < 1e-12);
            }
        }
    }
}
