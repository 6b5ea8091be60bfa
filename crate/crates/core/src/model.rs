//! Scenario parameters, planar geometry and link-budget arithmetic.
//!
//! Every quantity is stored in linear units and radians. Conversions from
//! decibels and degrees happen at the configuration boundary.

use core::f64::consts::TAU;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::{Error, Result};

/// Default ULA element spacing in wavelengths (half-wavelength array).
pub const DEFAULT_SPACING: f64 = 0.5;

/// Converts decibels to a linear power ratio.
pub fn db_to_linear(value_db: f64) -> f64 {
    10f64.powf(value_db / 10.0)
}

/// Converts a linear power ratio to decibels.
pub fn linear_to_db(value: f64) -> f64 {
    10.0 * value.log10()
}

/// Wraps an angle into `[0, 2π)`.
pub fn normalize_angle(angle: f64) -> f64 {
    let wrapped = num_traits::Euclid::rem_euclid(&angle, &TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if wrapped >= TAU {
        0.0
    } else {
        wrapped
    }
}

/// Position relative to Alice in polar coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPosition {
    distance: f64,
    angle: f64,
}

impl PolarPosition {
    /// Builds a position; the angle is wrapped into `[0, 2π)`.
    pub fn new(distance: f64, angle: f64) -> Result<Self> {
        if !(distance >= 0.0) || !distance.is_finite() {
            return Err(Error::domain(
                "distance must be finite and non-negative",
                distance,
            ));
        }
        if !angle.is_finite() {
            return Err(Error::domain("angle must be finite", angle));
        }
        Ok(Self {
            distance,
            angle: normalize_angle(angle),
        })
    }

    /// Distance in meters.
    pub fn distance(&self) -> f64 {
        self.distance
    }

    /// Angle in radians, in `[0, 2π)`.
    pub fn angle(&self) -> f64 {
        self.angle
    }
}

/// Planar position in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartesianPosition {
    /// Abscissa in meters.
    pub x: f64,
    /// Ordinate in meters.
    pub y: f64,
}

impl CartesianPosition {
    /// Builds a position from finite coordinates.
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::domain(
                "coordinates must be finite",
                if x.is_finite() { y } else { x },
            ));
        }
        Ok(Self { x, y })
    }

    /// The origin, where Alice sits.
    pub const ORIGIN: CartesianPosition = CartesianPosition { x: 0.0, y: 0.0 };

    /// Euclidean distance to `other`.
    pub fn distance_to(&self, other: &CartesianPosition) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Polar to Cartesian conversion.
pub fn polar_to_cartesian(p: PolarPosition) -> CartesianPosition {
    let (s, c) = p.angle.sin_cos();
    CartesianPosition {
        x: p.distance * c,
        y: p.distance * s,
    }
}

/// Cartesian to polar conversion; the origin has no defined angle.
pub fn cartesian_to_polar(c: CartesianPosition) -> Result<PolarPosition> {
    if c.x == 0.0 && c.y == 0.0 {
        return Err(Error::domain("the origin has no polar angle", 0.0));
    }
    PolarPosition::new(c.x.hypot(c.y), c.y.atan2(c.x))
}

/// Which receiver a link-budget query is for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Receiver {
    /// The legitimate receiver.
    Bob,
    /// The eavesdropper.
    Eve,
}

/// Transmit power, path-loss exponent and receiver noise levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    transmit_power: f64,
    path_loss_exponent: f64,
    noise_variance_bob: f64,
    noise_variance_eve: f64,
}

impl LinkBudget {
    /// All four quantities must be strictly positive and finite.
    pub fn new(
        transmit_power: f64,
        path_loss_exponent: f64,
        noise_variance_bob: f64,
        noise_variance_eve: f64,
    ) -> Result<Self> {
        for (what, v) in [
            ("transmit power must be positive", transmit_power),
            ("path-loss exponent must be positive", path_loss_exponent),
            ("Bob's noise variance must be positive", noise_variance_bob),
            ("Eve's noise variance must be positive", noise_variance_eve),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::domain(what, v));
            }
        }
        Ok(Self {
            transmit_power,
            path_loss_exponent,
            noise_variance_bob,
            noise_variance_eve,
        })
    }

    /// Unit transmit power with noise levels chosen so that receivers at the
    /// given distances see the given mean SNRs (linear).
    pub fn calibrated(
        path_loss_exponent: f64,
        bob_distance: f64,
        mean_snr_bob: f64,
        eve_distance: f64,
        mean_snr_eve: f64,
    ) -> Result<Self> {
        if !(bob_distance > 0.0) || !(eve_distance > 0.0) {
            return Err(Error::domain(
                "calibration distances must be positive",
                bob_distance.min(eve_distance),
            ));
        }
        if !(mean_snr_bob > 0.0) || !(mean_snr_eve > 0.0) {
            return Err(Error::domain(
                "calibration SNRs must be positive",
                mean_snr_bob.min(mean_snr_eve),
            ));
        }
        Self::new(
            1.0,
            path_loss_exponent,
            bob_distance.powf(-path_loss_exponent) / mean_snr_bob,
            eve_distance.powf(-path_loss_exponent) / mean_snr_eve,
        )
    }

    /// Transmit power in watts.
    pub fn transmit_power(&self) -> f64 {
        self.transmit_power
    }

    /// Path-loss exponent.
    pub fn path_loss_exponent(&self) -> f64 {
        self.path_loss_exponent
    }

    /// Noise variance at `receiver` in watts.
    pub fn noise_variance(&self, receiver: Receiver) -> f64 {
        match receiver {
            Receiver::Bob => self.noise_variance_bob,
            Receiver::Eve => self.noise_variance_eve,
        }
    }
}

/// Mean received SNR `P·d^(−η)/σ²` at `distance` meters.
pub fn mean_snr_from_geometry(
    budget: &LinkBudget,
    distance: f64,
    receiver: Receiver,
) -> Result<f64> {
    if !(distance > 0.0) || !distance.is_finite() {
        return Err(Error::domain(
            "distance must be positive and finite",
            distance,
        ));
    }
    Ok(
        budget.transmit_power * distance.powf(-budget.path_loss_exponent)
            / budget.noise_variance(receiver),
    )
}

/// Full system parameterization in linear units and radians.
///
/// `eve_aoa` never enters the analytic outage formula; it only shapes Eve's
/// own array response in simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// Antennas at Alice (at least 2).
    pub n_alice: usize,
    /// Antennas at Eve (at least 1).
    pub n_eve: usize,
    /// Alice's element spacing in wavelengths.
    pub spacing_alice: f64,
    /// Eve's element spacing in wavelengths.
    pub spacing_eve: f64,
    /// Rician K-factor of the main channel.
    pub k_bob: f64,
    /// Rician K-factor of Eve's channel.
    pub k_eve: f64,
    /// Mean SNR at Bob.
    pub mean_snr_bob: f64,
    /// Mean SNR at Eve.
    pub mean_snr_eve: f64,
    /// Direction from Alice to Bob, radians.
    pub bob_angle: f64,
    /// Direction from Alice to Eve, radians.
    pub eve_angle: f64,
    /// Angle of arrival at Eve's array, radians.
    pub eve_aoa: f64,
    /// Target secrecy rate in bits/s/Hz.
    pub secrecy_rate: f64,
}

impl Scenario {
    /// Checks the structural invariants.
    pub fn validate(&self) -> Result<()> {
        if self.n_alice < 2 {
            return Err(Error::domain(
                "Alice needs at least 2 antennas",
                self.n_alice as f64,
            ));
        }
        if self.n_eve < 1 {
            return Err(Error::domain(
                "Eve needs at least 1 antenna",
                self.n_eve as f64,
            ));
        }
        for (what, v) in [
            (
                "Alice's antenna spacing must be positive",
                self.spacing_alice,
            ),
            ("Eve's antenna spacing must be positive", self.spacing_eve),
            ("Bob's mean SNR must be positive", self.mean_snr_bob),
            ("Eve's mean SNR must be positive", self.mean_snr_eve),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::domain(what, v));
            }
        }
        for (what, v) in [
            ("Bob's K-factor must be non-negative", self.k_bob),
            ("Eve's K-factor must be non-negative", self.k_eve),
            ("secrecy rate must be non-negative", self.secrecy_rate),
        ] {
            if !(v >= 0.0) || v.is_nan() {
                return Err(Error::domain(what, v));
            }
        }
        for (what, v) in [
            ("Bob's angle must be finite", self.bob_angle),
            ("Eve's angle must be finite", self.eve_angle),
            ("Eve's angle of arrival must be finite", self.eve_aoa),
        ] {
            if !v.is_finite() {
                return Err(Error::domain(what, v));
            }
        }
        Ok(())
    }

    /// Copy with a different number of transmit antennas.
    pub fn with_n_alice(&self, n_alice: usize) -> Self {
        Self {
            n_alice,
            ..self.clone()
        }
    }
}

/// Alice at the origin, Bob and the true Eve at fixed positions, with a link
/// budget that turns distances into mean SNRs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    /// Power and noise levels.
    pub budget: LinkBudget,
    /// Bob's position.
    pub bob: CartesianPosition,
    /// Eve's true position.
    pub eve: CartesianPosition,
}

impl LinkGeometry {
    /// Overwrites the angles and mean SNRs of `base` from this geometry.
    pub fn apply(&self, base: &Scenario) -> Result<Scenario> {
        let bob = cartesian_to_polar(self.bob)?;
        let mut s = self.with_eve_at(base, self.eve)?;
        s.bob_angle = bob.angle();
        s.mean_snr_bob = mean_snr_from_geometry(&self.budget, bob.distance(), Receiver::Bob)?;
        Ok(s)
    }

    /// Overwrites Eve's angle and mean SNR in `base` as if she stood at `eve`.
    pub fn with_eve_at(&self, base: &Scenario, eve: CartesianPosition) -> Result<Scenario> {
        let polar = cartesian_to_polar(eve)?;
        Ok(Scenario {
            eve_angle: polar.angle(),
            mean_snr_eve: mean_snr_from_geometry(&self.budget, polar.distance(), Receiver::Eve)?,
            ..base.clone()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_PI_4, PI, SQRT_2};
    use proptest::prelude::*;

    #[test]
    fn db_conversion_examples() {
        assert_eq!(db_to_linear(0.0), 1.0);
        assert!((db_to_linear(10.0) - 10.0).abs() < 1e-12);
        // 10^0.5 to 6 significant digits
        assert!((db_to_linear(5.0) - 3.16228).abs() < 5e-6);
        assert!((linear_to_db(db_to_linear(7.3)) - 7.3).abs() < 1e-12);
    }

    #[test]
    fn mean_snr_examples() {
        let unit = LinkBudget::new(1.0, 4.0, 1.0, 1.0).unwrap();
        assert_eq!(
            mean_snr_from_geometry(&unit, 1.0, Receiver::Bob).unwrap(),
            1.0
        );
        assert!(
            (mean_snr_from_geometry(&unit, 2.0, Receiver::Eve).unwrap() - 0.0625).abs() < 1e-15
        );
        let b = LinkBudget::new(10.0, 2.0, 0.1, 0.1).unwrap();
        assert!((mean_snr_from_geometry(&b, 10.0, Receiver::Bob).unwrap() - 1.0).abs() < 1e-12);
        assert!(mean_snr_from_geometry(&b, 0.0, Receiver::Bob).is_err());
        assert!(mean_snr_from_geometry(&b, -3.0, Receiver::Bob).is_err());
    }

    #[test]
    fn calibrated_budget_hits_targets() {
        let b = LinkBudget::calibrated(4.0, 1414.0, 10.0, 900.0, 3.0).unwrap();
        assert!((mean_snr_from_geometry(&b, 1414.0, Receiver::Bob).unwrap() - 10.0).abs() < 1e-9);
        assert!((mean_snr_from_geometry(&b, 900.0, Receiver::Eve).unwrap() - 3.0).abs() < 1e-9);
    }

    #[test]
    fn link_budget_rejects_non_positive() {
        assert!(LinkBudget::new(0.0, 4.0, 1.0, 1.0).is_err());
        assert!(LinkBudget::new(1.0, 4.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn polar_cartesian_examples() {
        let c = polar_to_cartesian(PolarPosition::new(1.0, 0.0).unwrap());
        assert_eq!((c.x, c.y), (1.0, 0.0));
        let c = polar_to_cartesian(PolarPosition::new(SQRT_2, FRAC_PI_4).unwrap());
        assert!((c.x - 1.0).abs() < 1e-15 && (c.y - 1.0).abs() < 1e-15);
        let p = cartesian_to_polar(CartesianPosition::new(1000.0, -1000.0).unwrap()).unwrap();
        assert!((p.distance() - 1414.21356).abs() < 1e-5);
        assert!((p.angle() - (2.0 * PI - FRAC_PI_4)).abs() < 1e-12);
        assert!(cartesian_to_polar(CartesianPosition::ORIGIN).is_err());
    }

    #[test]
    fn polar_rejects_negative_distance() {
        assert!(PolarPosition::new(-1.0, 0.0).is_err());
        assert!((PolarPosition::new(1.0, -PI).unwrap().angle() - PI).abs() < 1e-15);
        assert!(PolarPosition::new(1.0, -1e-300).unwrap().angle() < TAU);
    }

    #[test]
    fn link_geometry_derives_angles_and_snrs() {
        let bob = CartesianPosition::new(1225.0, 707.0).unwrap();
        let eve = CartesianPosition::new(1000.0, -1000.0).unwrap();
        let budget = LinkBudget::calibrated(
            4.0,
            bob.distance_to(&CartesianPosition::ORIGIN),
            10.0,
            eve.distance_to(&CartesianPosition::ORIGIN),
            10.0,
        )
        .unwrap();
        let geom = LinkGeometry { budget, bob, eve };
        let base = Scenario {
            n_alice: 4,
            n_eve: 2,
            spacing_alice: 0.5,
            spacing_eve: 0.5,
            k_bob: 10.0,
            k_eve: 3.0,
            mean_snr_bob: 1.0,
            mean_snr_eve: 1.0,
            bob_angle: 0.0,
            eve_angle: 0.0,
            eve_aoa: 0.0,
            secrecy_rate: 1.0,
        };
        let s = geom.apply(&base).unwrap();
        assert!((s.mean_snr_bob - 10.0).abs() < 1e-9);
        assert!((s.mean_snr_eve - 10.0).abs() < 1e-9);
        assert!((s.bob_angle - 707f64.atan2(1225.0)).abs() < 1e-12);
        assert!((s.eve_angle - 7.0 * FRAC_PI_4).abs() < 1e-12);
        // twice the distance, 2^-4 of the SNR
        let far = geom
            .with_eve_at(&s, CartesianPosition::new(2000.0, -2000.0).unwrap())
            .unwrap();
        assert!((far.mean_snr_eve - 10.0 / 16.0).abs() < 1e-9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn polar_round_trip(x in -1e4f64..1e4, y in -1e4f64..1e4) {
            prop_assume!(x.hypot(y) > 1e-6);
            let c = CartesianPosition::new(x, y).unwrap();
            let back = polar_to_cartesian(cartesian_to_polar(c).unwrap());
            let scale = x.hypot(y);
            prop_assert!((back.x - x).abs() <= 1e-12 * scale);
            prop_assert!((back.y - y).abs() <= 1e-12 * scale);
        }

        #[test]
        fn db_is_multiplicative_and_increasing(a in -50f64..50.0, b in -50f64..50.0) {
            let lhs = db_to_linear(a + b);
            let rhs = db_to_linear(a) * db_to_linear(b);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs);
            if a < b {
                prop_assert!(db_to_linear(a) < db_to_linear(b));
            }
        }

        #[test]
        fn snr_decreases_with_distance(d in 1.0f64..1e4, eta in 0.5f64..6.0, step in 1e-3f64..100.0) {
            let b = LinkBudget::new(1.0, eta, 1e-9, 1e-9).unwrap();
            let near = mean_snr_from_geometry(&b, d, Receiver::Bob).unwrap();
            let far = mean_snr_from_geometry(&b, d + step, Receiver::Bob).unwrap();
            prop_assert!(far < near);
        }
    }
}
