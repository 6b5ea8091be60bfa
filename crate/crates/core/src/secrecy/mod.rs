//! Closed-form secrecy quantities for a beamformer `w`.
//!
//! For any unit `w`, Eve's SNR is modelled as a Gamma variable whose shape
//! `N_E·m̂` and scale `γ̂̄/m̂` come from the effective K-factor
//! `K̂ = K_E·|g_o·w|²`. The secrecy outage probability is then the Gamma tail
//! beyond `2^(−R_S)(1+γ_B) − 1`.

mod special;

pub use special::{
    gamma_function, ln_gamma, lower_incomplete_gamma, regularized_gamma_pair,
    regularized_lower_gamma, regularized_upper_gamma,
};

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::linalg::dot;
use crate::montecarlo::check_unit;
use crate::{Error, Result};

/// Effective statistics of Eve's SNR for one beamformer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveEveStats {
    /// `K̂ = K_E·|g_o·w|²`.
    pub k_hat: f64,
    /// Nakagami shape `m̂ = (K̂+1)²/(2K̂+1)`.
    pub m_hat: f64,
    /// Per-antenna mean `γ̂̄ = (K_E|g_o·w|² + 1)·γ̄_E / (1 + K_E)`.
    pub mean_snr_hat: f64,
    /// Eve's antenna count.
    pub n_eve: usize,
}

impl EffectiveEveStats {
    /// Builds the triple from `K̂` and `γ̂̄`.
    pub fn new(k_hat: f64, mean_snr_hat: f64, n_eve: usize) -> Result<Self> {
        if !(k_hat >= 0.0) || !k_hat.is_finite() {
            return Err(Error::domain(
                "effective K-factor must be finite and non-negative",
                k_hat,
            ));
        }
        if !(mean_snr_hat > 0.0) || !mean_snr_hat.is_finite() {
            return Err(Error::domain(
                "effective mean SNR must be positive",
                mean_snr_hat,
            ));
        }
        if n_eve == 0 {
            return Err(Error::domain("Eve needs at least 1 antenna", 0.0));
        }
        let m_hat = (k_hat + 1.0).powi(2) / (2.0 * k_hat + 1.0);
        Ok(Self {
            k_hat,
            m_hat,
            mean_snr_hat,
            n_eve,
        })
    }

    /// Builds the triple from the LOS leakage `|g_o·w|²`.
    pub fn from_leakage(leakage: f64, k_eve: f64, mean_snr_eve: f64, n_eve: usize) -> Result<Self> {
        if !(k_eve >= 0.0) || !k_eve.is_finite() {
            return Err(Error::domain(
                "Eve's K-factor must be finite and non-negative",
                k_eve,
            ));
        }
        if !(leakage >= 0.0) {
            return Err(Error::domain("LOS leakage must be non-negative", leakage));
        }
        let k_hat = leakage * k_eve;
        Self::new(k_hat, (k_hat + 1.0) * mean_snr_eve / (1.0 + k_eve), n_eve)
    }

    /// Gamma shape `N_E·m̂`.
    pub fn shape(&self) -> f64 {
        self.n_eve as f64 * self.m_hat
    }

    /// Gamma rate `m̂ / γ̂̄`.
    pub fn rate(&self) -> f64 {
        self.m_hat / self.mean_snr_hat
    }
}

/// Effective statistics for a unit-norm `w` and Eve's LOS response `g_o`.
pub fn effective_eve_stats(
    g_o: &[Complex64],
    w: &[Complex64],
    k_eve: f64,
    mean_snr_eve: f64,
    n_eve: usize,
) -> Result<EffectiveEveStats> {
    check_unit(w, g_o.len())?;
    EffectiveEveStats::from_leakage(dot(g_o, w).norm_sqr(), k_eve, mean_snr_eve, n_eve)
}

/// Bob's SNR and the target secrecy rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageQuery {
    /// Instantaneous SNR at Bob.
    pub gamma_bob: f64,
    /// Target secrecy rate in bits/s/Hz.
    pub secrecy_rate: f64,
}

impl OutageQuery {
    /// Both fields must be non-negative.
    pub fn new(gamma_bob: f64, secrecy_rate: f64) -> Result<Self> {
        if !(gamma_bob >= 0.0) {
            return Err(Error::domain("Bob's SNR must be non-negative", gamma_bob));
        }
        if !(secrecy_rate >= 0.0) {
            return Err(Error::domain(
                "secrecy rate must be non-negative",
                secrecy_rate,
            ));
        }
        Ok(Self {
            gamma_bob,
            secrecy_rate,
        })
    }
}

/// Eve-SNR level above which secrecy at rate `R_S` fails: `2^(−R_S)(1+γ_B) − 1`.
pub fn outage_threshold(gamma_bob: f64, secrecy_rate: f64) -> f64 {
    (-secrecy_rate).exp2() * (1.0 + gamma_bob) - 1.0
}

fn check_level(gamma: f64) -> Result<()> {
    if !(gamma >= 0.0) {
        return Err(Error::domain("SNR level must be non-negative", gamma));
    }
    Ok(())
}

/// CDF of Eve's SNR, `P(N_E·m̂, m̂·γ/γ̂̄)`.
pub fn eve_snr_cdf(gamma: f64, stats: &EffectiveEveStats) -> Result<f64> {
    check_level(gamma)?;
    regularized_lower_gamma(stats.shape(), stats.rate() * gamma)
}

/// Density of Eve's SNR: Gamma with shape `N_E·m̂` and rate `m̂/γ̂̄`.
pub fn eve_snr_pdf(gamma: f64, stats: &EffectiveEveStats) -> Result<f64> {
    check_level(gamma)?;
    let (shape, rate) = (stats.shape(), stats.rate());
    if gamma == 0.0 {
        // shape ≥ 1 always since m̂ ≥ 1
        return Ok(if shape == 1.0 { rate } else { 0.0 });
    }
    let log_density =
        shape * rate.ln() + (shape - 1.0) * gamma.ln() - rate * gamma - ln_gamma(shape)?;
    Ok(log_density.exp())
}

/// Secrecy rate `max(0, log₂(1+γ_B) − log₂(1+γ_E))`.
pub fn secrecy_rate(gamma_bob: f64, gamma_eve: f64) -> f64 {
    ((1.0 + gamma_bob).log2() - (1.0 + gamma_eve).log2()).max(0.0)
}

/// Secrecy outage probability `Pr(γ_E > 2^(−R_S)(1+γ_B) − 1)`.
///
/// A non-positive threshold means Bob's capacity is already below `R_S`, and
/// the result is exactly 1.
pub fn outage_probability(query: &OutageQuery, stats: &EffectiveEveStats) -> Result<f64> {
    let t = outage_threshold(query.gamma_bob, query.secrecy_rate);
    if t <= 0.0 {
        return Ok(1.0);
    }
    regularized_upper_gamma(stats.shape(), stats.rate() * t)
}
