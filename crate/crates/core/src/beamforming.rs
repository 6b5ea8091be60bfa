//! Zero-forcing projectors built from Eve's LOS response and the
//! one-parameter beamformer family `w(τ) = √τ·w_ZF + √(1−τ)·w_ZF⊥`.
//!
//! Eve's LOS matrix `G_o = r_oᵀ g_o` has rank one, so the projector onto its
//! row space is the projector onto `span{g_oᴴ}` whatever `r_o` is. Everything
//! here therefore depends on `g_o` only.

use alloc::vec::Vec;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::linalg::{conj, dot, norm, norm_sqr, ComplexMatrix};
use crate::{Component, Error, Result};

/// Relative tolerance below which a channel component counts as zero.
pub const DEGENERACY_TOLERANCE: f64 = 1e-9;

/// Orthogonal projectors onto Eve's LOS direction and its complement.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorPair {
    /// `Ψ = g_oᴴ g_o / ‖g_o‖²`.
    pub onto_eve_los: ComplexMatrix,
    /// `Ψ⊥ = I − Ψ`.
    pub onto_complement: ComplexMatrix,
}

/// Materializes both projectors for `g_o`.
pub fn eve_los_projectors(g_o: &[Complex64]) -> Result<ProjectorPair> {
    let n2 = norm_sqr(g_o);
    if !(n2 > 0.0) {
        return Err(Error::domain("Eve's LOS response must be non-zero", n2));
    }
    let col = conj(g_o);
    let onto: Vec<Complex64> = ComplexMatrix::outer(&col, g_o)
        .as_slice()
        .iter()
        .map(|z| z / n2)
        .collect();
    let onto_eve_los = ComplexMatrix::from_row_major(g_o.len(), g_o.len(), onto)?;
    let onto_complement = ComplexMatrix::identity(g_o.len()).sub(&onto_eve_los);
    Ok(ProjectorPair {
        onto_eve_los,
        onto_complement,
    })
}

/// `Ψ·v` without forming `Ψ`.
pub fn project_onto_eve_los(g_o: &[Complex64], v: &[Complex64]) -> Vec<Complex64> {
    let coef = dot(g_o, v) / norm_sqr(g_o);
    g_o.iter().map(|g| g.conj() * coef).collect()
}

/// `Ψ⊥·v` without forming `Ψ⊥`.
pub fn project_onto_complement(g_o: &[Complex64], v: &[Complex64]) -> Vec<Complex64> {
    let along = project_onto_eve_los(g_o, v);
    v.iter().zip(&along).map(|(x, p)| x - p).collect()
}

/// The orthonormal pair spanning the plane that holds `hᴴ` and `g_oᴴ`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamformerFamily {
    /// `Ψ⊥hᴴ / ‖Ψ⊥hᴴ‖`, invisible to Eve's LOS path.
    pub w_zf: Vec<Complex64>,
    /// `Ψhᴴ / ‖Ψhᴴ‖`, aligned with Eve's LOS path.
    pub w_zf_perp: Vec<Complex64>,
    /// `‖Ψ⊥hᴴ‖`, equal to `h·w_zf`.
    pub a: f64,
    /// `‖Ψhᴴ‖`, equal to `h·w_zf_perp`.
    pub b: f64,
}

/// Splits `hᴴ` along and across `g_oᴴ` and normalizes both parts.
///
/// Fails with [`Error::DegenerateGeometry`] when either part is shorter than
/// `1e-9·‖h‖`.
pub fn build_family(h: &[Complex64], g_o: &[Complex64]) -> Result<BeamformerFamily> {
    if h.len() != g_o.len() {
        return Err(Error::domain(
            "h and g_o must have the same length",
            h.len() as f64,
        ));
    }
    if !(norm_sqr(g_o) > 0.0) {
        return Err(Error::domain("Eve's LOS response must be non-zero", 0.0));
    }
    let h_col = conj(h);
    let along = project_onto_eve_los(g_o, &h_col);
    let across: Vec<Complex64> = h_col.iter().zip(&along).map(|(x, p)| x - p).collect();
    let tolerance = DEGENERACY_TOLERANCE * norm(h);
    let a = norm(&across);
    let b = norm(&along);
    if !(a > tolerance) {
        return Err(Error::DegenerateGeometry {
            component: Component::ZeroForcing,
            norm: a,
            tolerance,
        });
    }
    if !(b > tolerance) {
        return Err(Error::DegenerateGeometry {
            component: Component::EveAligned,
            norm: b,
            tolerance,
        });
    }
    Ok(BeamformerFamily {
        w_zf: across.iter().map(|z| z / a).collect(),
        w_zf_perp: along.iter().map(|z| z / b).collect(),
        a,
        b,
    })
}

/// `w(τ) = √τ·w_ZF + √(1−τ)·w_ZF⊥` for `τ ∈ [0, 1]`.
pub fn combine(family: &BeamformerFamily, tau: f64) -> Result<Vec<Complex64>> {
    check_tau(tau)?;
    let (s, c) = (tau.sqrt(), (1.0 - tau).sqrt());
    Ok(family
        .w_zf
        .iter()
        .zip(&family.w_zf_perp)
        .map(|(z, p)| z * s + p * c)
        .collect())
}

pub(crate) fn check_tau(tau: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::domain("tau must lie in [0, 1]", tau));
    }
    Ok(())
}

impl BeamformerFamily {
    /// Same as [`combine`].
    pub fn at(&self, tau: f64) -> Result<Vec<Complex64>> {
        combine(self, tau)
    }
}

/// A family, or the matched filter when the family cannot be built.
#[derive(Debug, Clone, PartialEq)]
pub enum Beamformer {
    /// The regular case.
    Family(BeamformerFamily),
    /// Fallback `hᴴ/‖h‖`, used for every `τ`.
    Mrt(Vec<Complex64>),
}

impl Beamformer {
    /// Builds the family, falling back to MRT on degenerate geometry.
    pub fn family_or_mrt(h: &[Complex64], g_o: &[Complex64]) -> Result<Self> {
        match build_family(h, g_o) {
            Ok(f) => Ok(Beamformer::Family(f)),
            Err(Error::DegenerateGeometry { .. }) => {
                let n = norm(h);
                if !(n > 0.0) {
                    return Err(Error::domain("main channel must be non-zero", n));
                }
                Ok(Beamformer::Mrt(h.iter().map(|z| z.conj() / n).collect()))
            }
            Err(e) => Err(e),
        }
    }

    /// Transmit vector for `tau`.
    pub fn at(&self, tau: f64) -> Result<Vec<Complex64>> {
        match self {
            Beamformer::Family(f) => combine(f, tau),
            Beamformer::Mrt(w) => {
                check_tau(tau)?;
                Ok(w.clone())
            }
        }
    }
}

/// Bob's SNR `γ̄_B·|h·w|²`.
pub fn bob_snr(h: &[Complex64], w: &[Complex64], mean_snr_bob: f64) -> f64 {
    mean_snr_bob * dot(h, w).norm_sqr()
}

/// Eve's MRC output SNR `γ̄_E·‖G·w‖²`.
pub fn eve_snr(g: &ComplexMatrix, w: &[Complex64], mean_snr_eve: f64) -> f64 {
    mean_snr_eve * norm_sqr(&g.mul_vec(w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{alice_steering, complex_gaussian};
    use crate::linalg::{inner, normalized};
    use crate::montecarlo::RngSpec;
    use core::f64::consts::FRAC_PI_4;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_vec(n: usize, seed: u64) -> Vec<Complex64> {
        let mut r = RngSpec::new(seed, 17).stream_rng();
        (0..n).map(|_| complex_gaussian(&mut r)).collect()
    }

    #[test]
    fn projector_of_all_ones() {
        let p = eve_los_projectors(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        for i in 0..2 {
            for k in 0..2 {
                assert!((p.onto_eve_los.get(i, k) - c(0.5, 0.0)).norm() < 1e-15);
            }
        }
        assert!(eve_los_projectors(&[c(0.0, 0.0); 3]).is_err());
    }

    #[test]
    fn complement_trace_is_rank() {
        let g = alice_steering(FRAC_PI_4, 4, 0.5).unwrap();
        let p = eve_los_projectors(&g).unwrap();
        assert!((p.onto_complement.trace() - c(3.0, 0.0)).norm() < 1e-10);
        assert!((p.onto_eve_los.trace() - c(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn fast_path_matches_matrices() {
        let g = alice_steering(0.9, 5, 0.5).unwrap();
        let p = eve_los_projectors(&g).unwrap();
        let v = random_vec(5, 1);
        let slow = p.onto_eve_los.mul_vec(&v);
        let fast = project_onto_eve_los(&g, &v);
        let slow_c = p.onto_complement.mul_vec(&v);
        let fast_c = project_onto_complement(&g, &v);
        for i in 0..5 {
            assert!((slow[i] - fast[i]).norm() < 1e-12);
            assert!((slow_c[i] - fast_c[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn aligned_channel_is_degenerate() {
        let g = alice_steering(0.7, 4, 0.5).unwrap();
        match build_family(&g, &g) {
            Err(Error::DegenerateGeometry {
                component: Component::ZeroForcing,
                ..
            }) => {}
            other => panic!("unexpected {other:?}"),
        }
        // conj(h) orthogonal to conj(g_o) ⇒ g_o·hᴴ = 0
        let v = random_vec(4, 3);
        let h_col = project_onto_complement(&g, &v);
        let h = conj(&h_col);
        match build_family(&h, &g) {
            Err(Error::DegenerateGeometry {
                component: Component::EveAligned,
                ..
            }) => {}
            other => panic!("unexpected {other:?}"),
        }
        let fallback = Beamformer::family_or_mrt(&h, &g).unwrap();
        let w = fallback.at(0.3).unwrap();
        assert!((bob_snr(&h, &w, 1.0) - norm_sqr(&h)).abs() < 1e-12);
    }

    #[test]
    fn random_family_decomposition() {
        let g = alice_steering(FRAC_PI_4, 4, 0.5).unwrap();
        let h = random_vec(4, 5);
        let f = build_family(&h, &g).unwrap();
        assert!(dot(&g, &f.w_zf).norm() < 1e-10);
        assert!((f.a * f.a + f.b * f.b - norm_sqr(&h)).abs() < 1e-10);
        assert!((dot(&h, &f.w_zf) - c(f.a, 0.0)).norm() < 1e-12);
        assert!((dot(&h, &f.w_zf_perp) - c(f.b, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn combine_endpoints_and_domain() {
        let g = alice_steering(0.4, 3, 0.5).unwrap();
        let f = build_family(&random_vec(3, 8), &g).unwrap();
        assert_eq!(combine(&f, 1.0).unwrap(), f.w_zf);
        assert_eq!(combine(&f, 0.0).unwrap(), f.w_zf_perp);
        assert!((norm(&combine(&f, 0.5).unwrap()) - 1.0).abs() < 1e-12);
        assert!(combine(&f, -0.01).is_err());
        assert!(combine(&f, 1.01).is_err());
        assert!(combine(&f, f64::NAN).is_err());
    }

    #[test]
    fn bob_snr_examples() {
        let h = random_vec(4, 9);
        let mrt = normalized(&conj(&h)).unwrap();
        assert!((bob_snr(&h, &mrt, 3.0) - 3.0 * norm_sqr(&h)).abs() < 1e-12);
        let g = alice_steering(1.3, 4, 0.5).unwrap();
        let f = build_family(&h, &g).unwrap();
        // closed-form maximizer τ* = a²/(a²+b²)
        let tau_star = f.a * f.a / (f.a * f.a + f.b * f.b);
        let best = bob_snr(&h, &combine(&f, tau_star).unwrap(), 2.0);
        assert!((best - 2.0 * norm_sqr(&h)).abs() < 1e-10);
        for k in 0..=100 {
            let tau = k as f64 / 100.0;
            let w = combine(&f, tau).unwrap();
            let law = (tau.sqrt() * f.a + (1.0 - tau).sqrt() * f.b).powi(2);
            assert!((bob_snr(&h, &w, 1.0) - law).abs() < 1e-10);
            assert!(bob_snr(&h, &w, 2.0) <= best + 1e-10);
        }
        // w ⟂ hᴴ
        let w = normalized(&project_onto_complement(&h, &random_vec(4, 10))).unwrap();
        assert!(bob_snr(&h, &w, 5.0) < 1e-24);
    }

    #[test]
    fn eve_snr_examples() {
        let theta = 0.6;
        let g_o = alice_steering(theta, 4, 0.5).unwrap();
        let r_o = crate::channel::eve_array_response(0.2, 2, 0.5).unwrap();
        let los = crate::channel::los_eve_matrix(&r_o, &g_o);
        let f = build_family(&random_vec(4, 12), &g_o).unwrap();
        assert!(eve_snr(&los, &f.w_zf, 10.0) <= 1e-18 * 10.0 * los.frobenius_norm_sqr());

        let row = ComplexMatrix::from_row_major(1, 4, g_o.to_vec()).unwrap();
        let w = normalized(&random_vec(4, 13)).unwrap();
        assert!((eve_snr(&row, &w, 7.0) - 7.0 * dot(&g_o, &w).norm_sqr()).abs() < 1e-12);

        // row-by-row expansion as brute-force oracle
        let g = ComplexMatrix::from_row_major(3, 4, random_vec(12, 14)).unwrap();
        let mut brute = 0.0;
        for i in 0..3 {
            let mut acc = c(0.0, 0.0);
            for (k, wk) in w.iter().enumerate() {
                acc += g.get(i, k) * *wk;
            }
            brute += acc.norm_sqr();
        }
        assert!((eve_snr(&g, &w, 1.0) - brute).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn projector_pair_invariants(theta in 0.0f64..6.3, n in 2usize..=8) {
            let g = alice_steering(theta, n, 0.5).unwrap();
            let p = eve_los_projectors(&g).unwrap();
            let id = ComplexMatrix::identity(n);
            for m in [&p.onto_eve_los, &p.onto_complement] {
                prop_assert!(m.adjoint().max_abs_diff(m) < 1e-10);
                prop_assert!(m.mul(m).max_abs_diff(m) < 1e-10);
            }
            prop_assert!(p.onto_eve_los.add(&p.onto_complement).max_abs_diff(&id) < 1e-12);
            prop_assert!((p.onto_eve_los.trace().re - 1.0).abs() < 1e-10);
        }

        #[test]
        fn family_invariants(theta in 0.0f64..6.3, n in 2usize..=8, seed in 0u64..1_000_000, tau in 0.0f64..=1.0) {
            let g = alice_steering(theta, n, 0.5).unwrap();
            let h = random_vec(n, seed);
            let f = build_family(&h, &g).unwrap();
            prop_assert!((norm(&f.w_zf) - 1.0).abs() < 1e-12);
            prop_assert!((norm(&f.w_zf_perp) - 1.0).abs() < 1e-12);
            prop_assert!(inner(&f.w_zf, &f.w_zf_perp).norm() < 1e-10);
            prop_assert!(dot(&g, &f.w_zf).norm() < 1e-10);
            let w = combine(&f, tau).unwrap();
            prop_assert!((norm(&w) - 1.0).abs() < 1e-12);
            prop_assert!((dot(&g, &w).norm_sqr() - (1.0 - tau) * n as f64).abs() < 1e-10);
            let tau_star = f.a * f.a / (f.a * f.a + f.b * f.b);
            let best = dot(&h, &combine(&f, tau_star).unwrap()).norm_sqr();
            prop_assert!((best - norm_sqr(&h)).abs() < 1e-10);
        }
    }
}
