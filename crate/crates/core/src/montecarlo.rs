//! Counter-based random substreams and Monte Carlo estimators.
//!
//! Every random draw in a simulation comes from a ChaCha8 generator whose
//! 256-bit key is the little-endian concatenation
//!
//! ```text
//! master_seed (u64) ‖ stream_id (u64) ‖ index (u64) ‖ lane tag (u64)
//! ```
//!
//! so each `(master_seed, stream_id, lane, index)` tuple owns a distinct
//! generator. Trial `i` of an estimator always reads the generator keyed by
//! `i`, which makes results independent of scheduling and worker count.

use alloc::vec::Vec;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::beamforming::{build_family, check_tau};
use crate::channel::{
    complex_gaussian, eve_los, eve_receive_response, rician_weights, sample_main_channel,
};
use crate::exec::{chunked, DEFAULT_CHUNK};
use crate::linalg::{dot, norm};
use crate::model::Scenario;
use crate::optimize::MAX_SKIPPED_FRACTION;
use crate::secrecy::outage_threshold;
use crate::{Error, Result};

const LANE_TAG: u64 = 0x7769_7265_7461_7000;

/// Purpose of a family of substreams within one [`RngSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Lane {
    /// One long sequential stream (index 0 only).
    Sequential = 0,
    /// Main-channel draws, one generator per realization.
    MainChannel = 1,
    /// Eavesdropper-channel draws, one generator per trial.
    EveChannel = 2,
    /// Estimated-location draws, one generator per location sample.
    Location = 3,
    /// Random-search beamformer candidates.
    Oracle = 4,
}

/// Seed material for a reproducible simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngSpec {
    /// Experiment-wide seed.
    pub master_seed: u64,
    /// Independent stream under the same master seed.
    pub stream_id: u64,
}

impl RngSpec {
    /// Builds a spec.
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        Self {
            master_seed,
            stream_id,
        }
    }

    /// Same master seed, different stream.
    pub fn with_stream(self, stream_id: u64) -> Self {
        Self { stream_id, ..self }
    }

    /// The 256-bit ChaCha key for `(lane, index)`.
    pub fn key(&self, lane: Lane, index: u64) -> [u8; 32] {
        let mut key = [0u8; 32];
        key[0..8].copy_from_slice(&self.master_seed.to_le_bytes());
        key[8..16].copy_from_slice(&self.stream_id.to_le_bytes());
        key[16..24].copy_from_slice(&index.to_le_bytes());
        key[24..32].copy_from_slice(&(LANE_TAG | lane as u64).to_le_bytes());
        key
    }

    /// Generator for item `index` of `lane`.
    pub fn rng(&self, lane: Lane, index: u64) -> ChaCha8Rng {
        ChaCha8Rng::from_seed(self.key(lane, index))
    }

    /// A single sequential generator for this stream.
    pub fn stream_rng(&self) -> ChaCha8Rng {
        self.rng(Lane::Sequential, 0)
    }
}

/// A Bernoulli tally turned into a probability estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalEstimate {
    /// Fraction of successes.
    pub value: f64,
    /// `√(p(1−p)/n)`.
    pub std_error: f64,
    /// Number of trials.
    pub n_trials: u64,
}

impl EmpiricalEstimate {
    /// Estimate from `successes` out of `n_trials` (which must be positive).
    pub fn from_counts(successes: u64, n_trials: u64) -> Self {
        let p = successes as f64 / n_trials as f64;
        Self {
            value: p,
            std_error: (p * (1.0 - p) / n_trials as f64).sqrt(),
            n_trials,
        }
    }

    /// `√(se₁² + se₂²)`, the standard error of a difference.
    pub fn combined_std_error(&self, other: &Self) -> f64 {
        self.std_error.hypot(other.std_error)
    }
}

/// Draws `‖G·w‖²` for a fixed transmit vector without materializing `G`.
///
/// Row `i` of `G·w` is `a·r_o[i]·(g_o·w) + b·Σ_k G_r[i,k]·w[k]` with the
/// scattered entries read in the same row-major order as
/// [`sample_eve_channel`](crate::channel::sample_eve_channel).
#[derive(Debug, Clone)]
pub struct EveGainSampler {
    los_terms: Vec<Complex64>,
    scatter_weight: f64,
    w: Vec<Complex64>,
}

impl EveGainSampler {
    /// Precomputes the LOS contribution for `w` under `scenario`.
    pub fn new(scenario: &Scenario, w: &[Complex64]) -> Result<Self> {
        scenario.validate()?;
        check_unit(w, scenario.n_alice)?;
        let r_o = eve_receive_response(scenario)?;
        let g_o = eve_los(scenario)?;
        let (los_weight, scatter_weight) = rician_weights(scenario.k_eve);
        let leak = dot(&g_o, w) * los_weight;
        Ok(Self {
            los_terms: r_o.iter().map(|r| r * leak).collect(),
            scatter_weight,
            w: w.to_vec(),
        })
    }

    /// One draw of `‖G·w‖²`.
    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.los_terms
            .iter()
            .map(|los| {
                let scatter: Complex64 = self.w.iter().map(|wk| complex_gaussian(rng) * wk).sum();
                (los + scatter * self.scatter_weight).norm_sqr()
            })
            .sum()
    }
}

pub(crate) fn check_unit(w: &[Complex64], n: usize) -> Result<()> {
    if w.len() != n {
        return Err(Error::domain(
            "beamformer length must equal Alice's antenna count",
            w.len() as f64,
        ));
    }
    let nw = norm(w);
    if (nw - 1.0).abs() > 1e-9 {
        return Err(Error::domain("beamformer must have unit norm", nw));
    }
    Ok(())
}

/// Monte Carlo secrecy outage for a fixed `h` and `w`.
///
/// Each trial draws a fresh Eve channel from lane [`Lane::EveChannel`] and
/// counts the event `γ_E > 2^(−R_S)(1+γ_B) − 1`. A non-positive threshold
/// means outage is certain, and no sampling happens.
pub fn empirical_outage(
    scenario: &Scenario,
    h: &[Complex64],
    w: &[Complex64],
    n_trials: u64,
    rng: RngSpec,
) -> Result<EmpiricalEstimate> {
    if n_trials == 0 {
        return Err(Error::domain("need at least one trial", 0.0));
    }
    let sampler = EveGainSampler::new(scenario, w)?;
    if h.len() != scenario.n_alice {
        return Err(Error::domain(
            "main channel length must equal Alice's antenna count",
            h.len() as f64,
        ));
    }
    let gamma_bob = scenario.mean_snr_bob * dot(h, w).norm_sqr();
    let threshold = outage_threshold(gamma_bob, scenario.secrecy_rate);
    if threshold <= 0.0 {
        return Ok(EmpiricalEstimate {
            value: 1.0,
            std_error: 0.0,
            n_trials,
        });
    }
    let mean_snr_eve = scenario.mean_snr_eve;
    let counts = chunked(n_trials as usize, DEFAULT_CHUNK, |range| {
        range
            .filter(|&i| {
                let mut r = rng.rng(Lane::EveChannel, i as u64);
                mean_snr_eve * sampler.sample(&mut r) > threshold
            })
            .count() as u64
    });
    Ok(EmpiricalEstimate::from_counts(
        counts.iter().sum(),
        n_trials,
    ))
}

/// Monte Carlo outage of the `τ`-family averaged over the main channel.
///
/// Trial `i` draws `h` from `(Lane::MainChannel, i)` and Eve's channel from
/// `(Lane::EveChannel, i)`, builds `w(τ)` from that `h`, and counts the outage
/// event. This is the simulation counterpart of
/// [`average_curve_over_main_channel`](crate::optimize::average_curve_over_main_channel)
/// evaluated at `tau`; degenerate main-channel draws are dropped from the tally.
pub fn empirical_average_outage(
    scenario: &Scenario,
    tau: f64,
    n_trials: u64,
    rng: RngSpec,
) -> Result<EmpiricalEstimate> {
    if n_trials == 0 {
        return Err(Error::domain("need at least one trial", 0.0));
    }
    scenario.validate()?;
    check_tau(tau)?;
    let g_o = eve_los(scenario)?;
    let chunks = chunked(
        n_trials as usize,
        DEFAULT_CHUNK,
        |range| -> Result<(u64, u64)> {
            let (mut hits, mut used) = (0u64, 0u64);
            for i in range {
                let h = sample_main_channel(scenario, &mut rng.rng(Lane::MainChannel, i as u64))?.h;
                let w = match build_family(&h, &g_o) {
                    Ok(f) => f.at(tau)?,
                    Err(Error::DegenerateGeometry { .. }) => continue,
                    Err(e) => return Err(e),
                };
                used += 1;
                let threshold = outage_threshold(
                    scenario.mean_snr_bob * dot(&h, &w).norm_sqr(),
                    scenario.secrecy_rate,
                );
                if threshold <= 0.0 {
                    hits += 1;
                    continue;
                }
                let sampler = EveGainSampler::new(scenario, &w)?;
                if scenario.mean_snr_eve * sampler.sample(&mut rng.rng(Lane::EveChannel, i as u64))
                    > threshold
                {
                    hits += 1;
                }
            }
            Ok((hits, used))
        },
    );
    let (mut hits, mut used) = (0, 0);
    for c in chunks {
        let (h, u) = c?;
        hits += h;
        used += u;
    }
    let skipped = n_trials - used;
    if skipped as f64 > MAX_SKIPPED_FRACTION * n_trials as f64 || used == 0 {
        return Err(Error::TooManyDiscarded {
            what: "degenerate main-channel draws",
            skipped: skipped as usize,
            total: n_trials as usize,
            allowed: MAX_SKIPPED_FRACTION,
        });
    }
    Ok(EmpiricalEstimate::from_counts(hits, used))
}

/// `n_trials` draws of Eve's SNR `γ̄_E‖G·w‖²`, in trial order.
pub fn empirical_eve_snr(
    scenario: &Scenario,
    w: &[Complex64],
    n_trials: u64,
    rng: RngSpec,
) -> Result<Vec<f64>> {
    let sampler = EveGainSampler::new(scenario, w)?;
    let mean_snr_eve = scenario.mean_snr_eve;
    let chunks = chunked(n_trials as usize, DEFAULT_CHUNK, |range| {
        range
            .map(|i| mean_snr_eve * sampler.sample(&mut rng.rng(Lane::EveChannel, i as u64)))
            .collect::<Vec<_>>()
    });
    Ok(chunks.into_iter().flatten().collect())
}

/// Empirical CDF of Eve's SNR evaluated on an ascending `grid`.
pub fn empirical_eve_cdf(
    scenario: &Scenario,
    w: &[Complex64],
    grid: &[f64],
    n_trials: u64,
    rng: RngSpec,
) -> Result<Vec<f64>> {
    if n_trials == 0 {
        return Err(Error::domain("need at least one trial", 0.0));
    }
    if grid.windows(2).any(|p| !(p[0] <= p[1])) {
        return Err(Error::domain("CDF grid must be sorted ascending", f64::NAN));
    }
    let mut samples = empirical_eve_snr(scenario, w, n_trials, rng)?;
    samples.sort_unstable_by(f64::total_cmp);
    let n = samples.len() as f64;
    Ok(grid
        .iter()
        .map(|&g| samples.partition_point(|&s| s <= g) as f64 / n)
        .collect())
}

/// Kolmogorov distance `sup |F_n − F|` between the empirical CDF of
/// `samples` and `cdf`.
pub fn kolmogorov_distance<F>(samples: &[f64], cdf: F) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut sorted = samples.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut sup = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x)?;
        sup = sup.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    Ok(sup)
}

/// Result of re-running [`empirical_outage`] under several Eve angles of arrival.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiInvariance {
    /// `(φ_E, estimate)` pairs in input order.
    pub estimates: Vec<(f64, EmpiricalEstimate)>,
    /// Largest pairwise absolute difference of the estimates.
    pub max_difference: f64,
    /// Largest pairwise combined standard error.
    pub max_combined_std_error: f64,
}

/// Reruns the outage simulation with identical scattered draws while varying
/// only Eve's angle of arrival.
pub fn phi_invariance_check(
    scenario: &Scenario,
    h: &[Complex64],
    w: &[Complex64],
    phi_values: &[f64],
    n_trials: u64,
    rng: RngSpec,
) -> Result<PhiInvariance> {
    if phi_values.len() < 2 {
        return Err(Error::domain(
            "need at least two angles of arrival",
            phi_values.len() as f64,
        ));
    }
    let estimates = phi_values
        .iter()
        .map(|&phi| {
            let s = Scenario {
                eve_aoa: phi,
                ..scenario.clone()
            };
            empirical_outage(&s, h, w, n_trials, rng).map(|e| (phi, e))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut max_difference = 0.0f64;
    let mut max_combined_std_error = 0.0f64;
    for (i, (_, a)) in estimates.iter().enumerate() {
        for (_, b) in &estimates[i + 1..] {
            max_difference = max_difference.max((a.value - b.value).abs());
            max_combined_std_error = max_combined_std_error.max(a.combined_std_error(b));
        }
    }
    Ok(PhiInvariance {
        estimates,
        max_difference,
        max_combined_std_error,
    })
}
