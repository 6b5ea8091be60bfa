//! Eavesdropper location uncertainty from a TDOA anchor network.
//!
//! The Fisher information of the TDOA measurements depends only on the
//! bearings from Eve to each anchor. Its inverse serves as the covariance of
//! an unbiased location estimate, and averaging the analytic outage over
//! estimates drawn from that Gaussian gives the location-averaged outage.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::beamforming::{build_family, Beamformer};
use crate::channel::{eve_los, sample_main_channel};
use crate::exec::chunked;
use crate::model::{CartesianPosition, LinkGeometry, Scenario};
use crate::montecarlo::{Lane, RngSpec};
use crate::optimize::{
    outage_on_grid, tau_grid, Accumulator, TauCurve, AVERAGING_CHUNK, MAX_SKIPPED_FRACTION,
};
use crate::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Estimates closer than this to Alice (meters) are redrawn.
pub const ALICE_EXCLUSION_RADIUS: f64 = 1e-6;

/// Largest fraction of location draws that may be redrawn.
pub const MAX_RESAMPLED_FRACTION: f64 = 0.001;

/// Anchors cooperating in TDOA localization.
#[derive(Debug, Clone, PartialEq)]
pub struct AnchorSet {
    anchors: Vec<CartesianPosition>,
    timing_sigma: f64,
    propagation_speed: f64,
}

impl AnchorSet {
    /// Anchor 0 is the TDOA reference. `timing_sigma` may be zero, meaning a
    /// perfectly known location; fewer than three anchors never yields an
    /// invertible Fisher matrix.
    pub fn new(
        anchors: Vec<CartesianPosition>,
        timing_sigma: f64,
        propagation_speed: f64,
    ) -> Result<Self> {
        if anchors.len() < 2 {
            return Err(Error::domain(
                "TDOA needs at least two anchors",
                anchors.len() as f64,
            ));
        }
        for (i, a) in anchors.iter().enumerate() {
            if anchors[..i].contains(a) {
                return Err(Error::domain("anchors must be pairwise distinct", i as f64));
            }
        }
        if !(timing_sigma >= 0.0) || !timing_sigma.is_finite() {
            return Err(Error::domain(
                "timing standard deviation must be finite and non-negative",
                timing_sigma,
            ));
        }
        if !(propagation_speed > 0.0) || !propagation_speed.is_finite() {
            return Err(Error::domain(
                "propagation speed must be positive",
                propagation_speed,
            ));
        }
        Ok(Self {
            anchors,
            timing_sigma,
            propagation_speed,
        })
    }

    /// Anchors with timing noise expressed as a range `cσ_t` in meters.
    pub fn with_range_sigma(anchors: Vec<CartesianPosition>, range_sigma: f64) -> Result<Self> {
        Self::new(anchors, range_sigma / SPEED_OF_LIGHT, SPEED_OF_LIGHT)
    }

    /// `bearings.len()` anchors at distance `radius` from `center`.
    pub fn circle(
        center: CartesianPosition,
        radius: f64,
        bearings: &[f64],
        range_sigma: f64,
    ) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::domain(
                "anchor circle radius must be positive",
                radius,
            ));
        }
        let anchors = bearings
            .iter()
            .map(|b| {
                let (s, c) = b.sin_cos();
                CartesianPosition::new(center.x + radius * c, center.y + radius * s)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::with_range_sigma(anchors, range_sigma)
    }

    /// Anchor positions.
    pub fn anchors(&self) -> &[CartesianPosition] {
        &self.anchors
    }

    /// Timing standard deviation in seconds.
    pub fn timing_sigma(&self) -> f64 {
        self.timing_sigma
    }

    /// Propagation speed in m/s.
    pub fn propagation_speed(&self) -> f64 {
        self.propagation_speed
    }

    /// `cσ_t` in meters.
    pub fn range_sigma(&self) -> f64 {
        self.propagation_speed * self.timing_sigma
    }
}

/// Bearing `atan2(y_n − y, x_n − x)` from `loc` to every anchor.
pub fn anchor_bearings(set: &AnchorSet, loc: CartesianPosition) -> Result<Vec<f64>> {
    set.anchors
        .iter()
        .map(|a| {
            if *a == loc {
                Err(Error::domain(
                    "an anchor coincides with the evaluated location",
                    a.x,
                ))
            } else {
                Ok((a.y - loc.y).atan2(a.x - loc.x))
            }
        })
        .collect()
}

/// Negative log-likelihood of one TDOA measurement,
/// `(φ_n − (d_n − d_1)/c)² / (4c²σ_t²)`.
pub fn tdoa_neg_log_likelihood(phi_n: f64, d_n: f64, d_1: f64, c: f64, sigma_t: f64) -> f64 {
    let residual = phi_n - (d_n - d_1) / c;
    residual * residual / (4.0 * c * c * sigma_t * sigma_t)
}

/// Symmetric 2×2 Fisher information matrix, units 1/m².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherMatrix {
    /// `J₁₁`.
    pub j11: f64,
    /// `J₁₂ = J₂₁`.
    pub j12: f64,
    /// `J₂₂`.
    pub j22: f64,
}

impl FisherMatrix {
    /// Determinant.
    pub fn determinant(&self) -> f64 {
        self.j11 * self.j22 - self.j12 * self.j12
    }

    /// Squared Frobenius norm.
    pub fn norm_sqr(&self) -> f64 {
        self.j11 * self.j11 + 2.0 * self.j12 * self.j12 + self.j22 * self.j22
    }
}

/// Fisher information of the TDOA scheme at `loc`, with anchor 0 as reference:
/// `J₁₁ = Σ (cos θ_n − cos θ_1)² / (2c²σ_t²)`, `J₂₂` likewise with sines and
/// `J₁₂` with the mixed product.
pub fn tdoa_fisher(set: &AnchorSet, loc: CartesianPosition) -> Result<FisherMatrix> {
    let range_sigma = set.range_sigma();
    if !(range_sigma > 0.0) {
        return Err(Error::domain(
            "Fisher information is unbounded for zero timing noise",
            range_sigma,
        ));
    }
    let bearings = anchor_bearings(set, loc)?;
    let (s1, c1) = bearings[0].sin_cos();
    let (mut j11, mut j12, mut j22) = (0.0, 0.0, 0.0);
    for b in &bearings[1..] {
        let (s, c) = b.sin_cos();
        let (dc, ds) = (c - c1, s - s1);
        j11 += dc * dc;
        j12 += ds * dc;
        j22 += ds * ds;
    }
    let scale = 1.0 / (2.0 * range_sigma * range_sigma);
    Ok(FisherMatrix {
        j11: j11 * scale,
        j12: j12 * scale,
        j22: j22 * scale,
    })
}

/// Covariance of the estimated location in `(σ_x, σ_y, ρ)` form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocationCovariance {
    /// Standard deviation along x, meters.
    pub sigma_x: f64,
    /// Standard deviation along y, meters.
    pub sigma_y: f64,
    /// Correlation coefficient.
    pub rho: f64,
}

impl LocationCovariance {
    /// Validates `σ ≥ 0` and `|ρ| < 1`.
    pub fn new(sigma_x: f64, sigma_y: f64, rho: f64) -> Result<Self> {
        if !(sigma_x >= 0.0) || !(sigma_y >= 0.0) || !sigma_x.is_finite() || !sigma_y.is_finite() {
            return Err(Error::domain(
                "location standard deviations must be finite and non-negative",
                sigma_x.min(sigma_y),
            ));
        }
        if !(rho.abs() < 1.0) {
            return Err(Error::domain(
                "correlation must lie strictly inside (-1, 1)",
                rho,
            ));
        }
        Ok(Self {
            sigma_x,
            sigma_y,
            rho,
        })
    }

    /// A perfectly known location.
    pub fn exact() -> Self {
        Self {
            sigma_x: 0.0,
            sigma_y: 0.0,
            rho: 0.0,
        }
    }

    /// The full matrix `[[σ_x², σ_xy], [σ_xy, σ_y²]]`.
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        let sxy = self.rho * self.sigma_x * self.sigma_y;
        [
            [self.sigma_x * self.sigma_x, sxy],
            [sxy, self.sigma_y * self.sigma_y],
        ]
    }
}

/// `V = J⁻¹` split into `(σ_x, σ_y, ρ)`.
pub fn location_covariance(j: &FisherMatrix) -> Result<LocationCovariance> {
    let det = j.determinant();
    let threshold = 1e-18 * j.norm_sqr();
    if !(det > threshold) || !det.is_finite() {
        return Err(Error::DegenerateAnchors {
            determinant: det,
            threshold,
            anchors: 0,
        });
    }
    let (v11, v12, v22) = (j.j22 / det, -j.j12 / det, j.j11 / det);
    let (sigma_x, sigma_y) = (v11.sqrt(), v22.sqrt());
    LocationCovariance::new(sigma_x, sigma_y, v12 / (sigma_x * sigma_y))
}

/// Covariance of the location estimate at `loc`; zero timing noise gives
/// [`LocationCovariance::exact`].
pub fn covariance_at(set: &AnchorSet, loc: CartesianPosition) -> Result<LocationCovariance> {
    if set.range_sigma() == 0.0 {
        anchor_bearings(set, loc)?;
        return Ok(LocationCovariance::exact());
    }
    // one TDOA difference cannot fix two coordinates, and rounding keeps the
    // rank-1 determinant above the relative threshold
    if set.anchors.len() < 3 {
        let j = tdoa_fisher(set, loc)?;
        return Err(Error::DegenerateAnchors {
            determinant: j.determinant(),
            threshold: 1e-18 * j.norm_sqr(),
            anchors: set.anchors.len(),
        });
    }
    location_covariance(&tdoa_fisher(set, loc)?).map_err(|e| match e {
        Error::DegenerateAnchors {
            determinant,
            threshold,
            ..
        } => Error::DegenerateAnchors {
            determinant,
            threshold,
            anchors: set.anchors.len(),
        },
        other => other,
    })
}

/// Draws an estimate `true_loc + L·z` with `L` the lower Cholesky factor of
/// the covariance and `z` two standard normals.
pub fn sample_estimated_location<R: Rng + ?Sized>(
    true_loc: CartesianPosition,
    cov: &LocationCovariance,
    rng: &mut R,
) -> CartesianPosition {
    let z1: f64 = rng.sample(StandardNormal);
    let z2: f64 = rng.sample(StandardNormal);
    let l22 = cov.sigma_y * (1.0 - cov.rho * cov.rho).sqrt();
    CartesianPosition {
        x: true_loc.x + cov.sigma_x * z1,
        y: true_loc.y + cov.rho * cov.sigma_y * z1 + l22 * z2,
    }
}

/// Knobs of the location-averaged outage computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AveragingSettings {
    /// Points of the uniform `τ` grid.
    pub grid_size: usize,
    /// Estimated locations drawn.
    pub n_location_samples: usize,
    /// Main-channel draws per location sample.
    pub n_channel_realizations: usize,
    /// Reuse the same main-channel draws for every location sample.
    pub fix_main_channel: bool,
    /// Diagnostic: score the estimate-built beamformer against Eve's true
    /// position instead of the estimated one.
    pub evaluate_at_true_location: bool,
}

/// Location-averaged outage curve with bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct UncertaintyCurve {
    /// Mean outage per `τ` with standard errors over (location, channel) pairs.
    pub curve: TauCurve,
    /// Covariance the estimates were drawn from.
    pub covariance: LocationCovariance,
    /// Pairs that entered the average.
    pub used: usize,
    /// Pairs skipped for degenerate geometry.
    pub skipped: usize,
    /// Location draws redrawn for landing on Alice.
    pub resampled: usize,
}

/// Location-averaged outage over `τ`.
///
/// For each location sample `i`: draw an estimate of Eve's position, turn it
/// into a distance and bearing from Alice, rebuild `g_o` and Eve's mean SNR
/// from them, and evaluate the analytic outage on the `τ` grid for each main
/// channel draw. Main-channel draw `j` of sample `i` uses index
/// `i·n_channel_realizations + j` of [`Lane::MainChannel`], or `j` when the
/// main channel is fixed; location sample `i` uses index `i` of
/// [`Lane::Location`].
pub fn averaged_outage_curve(
    base: &Scenario,
    geometry: &LinkGeometry,
    anchors: &AnchorSet,
    settings: &AveragingSettings,
    rng: RngSpec,
) -> Result<UncertaintyCurve> {
    if settings.n_location_samples == 0 || settings.n_channel_realizations == 0 {
        return Err(Error::domain(
            "need at least one location sample and one channel draw",
            0.0,
        ));
    }
    let truth = geometry.apply(base)?;
    truth.validate()?;
    let covariance = covariance_at(anchors, geometry.eve)?;
    let taus = tau_grid(settings.grid_size)?;
    let true_g_o = eve_los(&truth)?;
    let n_ch = settings.n_channel_realizations;

    let chunk_size = (AVERAGING_CHUNK / n_ch).max(1);
    let chunks = chunked(
        settings.n_location_samples,
        chunk_size,
        |range| -> Result<(Accumulator, usize)> {
            let mut acc = Accumulator::new(taus.len());
            let mut resampled = 0usize;
            for i in range {
                let mut loc_rng = rng.rng(Lane::Location, i as u64);
                let estimate = loop {
                    let e = sample_estimated_location(geometry.eve, &covariance, &mut loc_rng);
                    if e.distance_to(&CartesianPosition::ORIGIN) > ALICE_EXCLUSION_RADIUS {
                        break e;
                    }
                    resampled += 1;
                    if resampled > settings.n_location_samples {
                        return Err(Error::TooManyDiscarded {
                            what: "location estimates on top of Alice",
                            skipped: resampled,
                            total: settings.n_location_samples,
                            allowed: MAX_RESAMPLED_FRACTION,
                        });
                    }
                };
                let assumed = geometry.with_eve_at(&truth, estimate)?;
                let g_o = eve_los(&assumed)?;
                for j in 0..n_ch {
                    let index = if settings.fix_main_channel {
                        j
                    } else {
                        i * n_ch + j
                    };
                    let h =
                        sample_main_channel(&truth, &mut rng.rng(Lane::MainChannel, index as u64))?
                            .h;
                    let family = match build_family(&h, &g_o) {
                        Ok(f) => Beamformer::Family(f),
                        Err(Error::DegenerateGeometry { .. }) => {
                            acc.skipped += 1;
                            continue;
                        }
                        Err(e) => return Err(e),
                    };
                    let outage = if settings.evaluate_at_true_location {
                        outage_on_grid(&truth, &h, &true_g_o, &family, &taus)?
                    } else {
                        outage_on_grid(&assumed, &h, &g_o, &family, &taus)?
                    };
                    acc.push(&outage);
                }
            }
            Ok((acc, resampled))
        },
    );

    let mut total = Accumulator::new(taus.len());
    let mut resampled = 0;
    for c in chunks {
        let (acc, r) = c?;
        total.merge(&acc);
        resampled += r;
    }
    if resampled as f64 > MAX_RESAMPLED_FRACTION * settings.n_location_samples as f64 {
        return Err(Error::TooManyDiscarded {
            what: "location estimates on top of Alice",
            skipped: resampled,
            total: settings.n_location_samples,
            allowed: MAX_RESAMPLED_FRACTION,
        });
    }
    let (mean, se) = total.finish("degenerate (location, channel) pairs", MAX_SKIPPED_FRACTION)?;
    Ok(UncertaintyCurve {
        curve: TauCurve::new(taus, mean, Some(se)),
        covariance,
        used: total.used,
        skipped: total.skipped,
        resampled,
    })
}

/// Default anchor layout: four anchors 3 km from Eve's true position at
/// bearings 45°, 135°, 225° and 315°.
pub fn default_anchors(true_eve: CartesianPosition, range_sigma: f64) -> Result<AnchorSet> {
    use core::f64::consts::FRAC_PI_4;
    AnchorSet::circle(
        true_eve,
        3000.0,
        &[FRAC_PI_4, 3.0 * FRAC_PI_4, 5.0 * FRAC_PI_4, 7.0 * FRAC_PI_4],
        range_sigma,
    )
}
