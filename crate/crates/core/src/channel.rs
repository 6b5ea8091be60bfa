//! Line-of-sight array responses and Rician channel draws.
//!
//! Array responses use 0-based element indices: entry `k` of Alice's response
//! toward angle `θ` is `exp(+j2πkδ·cos θ)`, while Eve's receive response uses
//! the opposite sign. Scattered components are i.i.d. `CN(0, 1)`, drawn as
//! `(N(0, ½) + j·N(0, ½))`.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, TAU};
use core::ops::Deref;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::ComplexMatrix;
use crate::model::Scenario;
use crate::{Error, Result};

/// Unit-modulus ULA response whose first entry is 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector(Vec<Complex64>);

impl SteeringVector {
    /// Entries as a slice.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    /// Consumes the vector.
    pub fn into_vec(self) -> Vec<Complex64> {
        self.0
    }
}

impl Deref for SteeringVector {
    type Target = [Complex64];

    fn deref(&self) -> &[Complex64] {
        &self.0
    }
}

fn ula_response(angle: f64, n: usize, spacing: f64, sign: f64) -> Result<SteeringVector> {
    if n == 0 {
        return Err(Error::domain("array needs at least one element", 0.0));
    }
    if !(spacing > 0.0) || !spacing.is_finite() {
        return Err(Error::domain("element spacing must be positive", spacing));
    }
    if !angle.is_finite() {
        return Err(Error::domain("angle must be finite", angle));
    }
    let step = sign * TAU * spacing * angle.cos();
    Ok(SteeringVector(
        (0..n).map(|k| Complex64::cis(step * k as f64)).collect(),
    ))
}

/// Alice's transmit response toward `angle`: entry `k` is `exp(+j2πkδ·cos angle)`.
pub fn alice_steering(angle: f64, n: usize, spacing: f64) -> Result<SteeringVector> {
    ula_response(angle, n, spacing, 1.0)
}

/// Eve's receive response for angle of arrival `aoa`: entry `k` is
/// `exp(−j2πkδ·cos aoa)`.
pub fn eve_array_response(aoa: f64, n: usize, spacing: f64) -> Result<SteeringVector> {
    ula_response(aoa, n, spacing, -1.0)
}

/// Rank-one LOS matrix `G_o = r_oᵀ g_o` with entry `(i, k) = r_o[i]·g_o[k]`.
pub fn los_eve_matrix(r_o: &SteeringVector, g_o: &SteeringVector) -> ComplexMatrix {
    ComplexMatrix::outer(r_o, g_o)
}

/// LOS and scattered amplitude weights `(√(K/(1+K)), √(1/(1+K)))`.
pub fn rician_weights(k: f64) -> (f64, f64) {
    if k.is_infinite() {
        (1.0, 0.0)
    } else {
        ((k / (1.0 + k)).sqrt(), (1.0 / (1.0 + k)).sqrt())
    }
}

/// One circularly-symmetric complex Gaussian with unit variance.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

/// Bob's LOS response `h_o` for a scenario.
pub fn bob_los(scenario: &Scenario) -> Result<SteeringVector> {
    alice_steering(scenario.bob_angle, scenario.n_alice, scenario.spacing_alice)
}

/// Alice's response toward Eve, `g_o`, for a scenario.
pub fn eve_los(scenario: &Scenario) -> Result<SteeringVector> {
    alice_steering(scenario.eve_angle, scenario.n_alice, scenario.spacing_alice)
}

/// Eve's receive response `r_o` for a scenario.
pub fn eve_receive_response(scenario: &Scenario) -> Result<SteeringVector> {
    eve_array_response(scenario.eve_aoa, scenario.n_eve, scenario.spacing_eve)
}

/// Alice-to-Bob channel `h` (a row vector) with its LOS part.
#[derive(Debug, Clone, PartialEq)]
pub struct MainChannel {
    /// The channel realization.
    pub h: Vec<Complex64>,
    /// LOS component `h_o`.
    pub los: SteeringVector,
    /// Rician K-factor used for the draw.
    pub k_bob: f64,
}

/// Alice-to-Eve channel matrix `G` (`N_E × N_A`) with its LOS part.
#[derive(Debug, Clone, PartialEq)]
pub struct EveChannel {
    /// The channel realization.
    pub g: ComplexMatrix,
    /// LOS component `G_o`.
    pub los: ComplexMatrix,
    /// Rician K-factor used for the draw.
    pub k_eve: f64,
}

/// Draws `h = √(K_B/(1+K_B))·h_o + √(1/(1+K_B))·h_r`.
pub fn sample_main_channel<R: Rng + ?Sized>(
    scenario: &Scenario,
    rng: &mut R,
) -> Result<MainChannel> {
    let los = bob_los(scenario)?;
    let (a, b) = rician_weights(scenario.k_bob);
    let h = los
        .iter()
        .map(|l| l * a + complex_gaussian(rng) * b)
        .collect();
    Ok(MainChannel {
        h,
        los,
        k_bob: scenario.k_bob,
    })
}

/// Draws `G = √(K_E/(1+K_E))·G_o + √(1/(1+K_E))·G_r`; `G_r` is drawn row by row.
pub fn sample_eve_channel<R: Rng + ?Sized>(scenario: &Scenario, rng: &mut R) -> Result<EveChannel> {
    let los = los_eve_matrix(&eve_receive_response(scenario)?, &eve_los(scenario)?);
    let (a, b) = rician_weights(scenario.k_eve);
    let data = los
        .as_slice()
        .iter()
        .map(|l| l * a + complex_gaussian(rng) * b)
        .collect();
    let g = ComplexMatrix::from_row_major(los.rows(), los.cols(), data)?;
    Ok(EveChannel {
        g,
        los,
        k_eve: scenario.k_eve,
    })
}
