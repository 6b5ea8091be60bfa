//! Location-based transmit beamforming for Rician wiretap channels.
//!
//! A multi-antenna transmitter (Alice) serves a single-antenna receiver (Bob)
//! while a multi-antenna eavesdropper (Eve) listens. Alice knows Bob's channel
//! exactly but only knows where Eve is. This crate builds the one-parameter
//! beamformer family that contains the outage-optimal transmit vector,
//! evaluates the closed-form secrecy outage probability for any member of that
//! family, and carries the Monte Carlo machinery used to check those formulas.
//!
//! The crate is `no_std` and only needs `alloc`. The `std` feature (default)
//! enables `std` support in dependencies; `parallel` spreads Monte Carlo work
//! over a rayon pool without changing any result bit.
//!
//! Module map:
//!
//! * [`model`]: scenario parameters, geometry and link-budget arithmetic.
//! * [`channel`]: steering vectors and Rician channel sampling.
//! * [`beamforming`]: zero-forcing projectors and the `w(τ)` family.
//! * [`secrecy`]: special functions, Eve's SNR law and the outage formula.
//! * [`optimize`]: τ sweeps, the optimal τ and a random-search optimality check.
//! * [`localization`]: TDOA Fisher information and location-averaged outage.
//! * [`montecarlo`]: counter-based RNG substreams and empirical estimators.

#![no_std]
#![warn(missing_docs)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(any(feature = "std", test))]
extern crate std;

pub mod beamforming;
pub mod channel;
mod error;
mod exec;
pub mod linalg;
pub mod localization;
pub mod model;
pub mod montecarlo;
pub mod optimize;
pub mod secrecy;

pub use error::{Component, Error, Result};

pub use num_complex::Complex64;
