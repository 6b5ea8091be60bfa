//! Gamma function and regularized incomplete gamma functions.

use core::f64::consts::PI;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::{Error, Result};

/// Relative size of the last series term / continued-fraction update.
const EPS: f64 = 1e-14;
const MAX_ITER: usize = 10_000;
const FPMIN: f64 = f64::MIN_POSITIVE / EPS;

// Lanczos approximation, g = 7, nine coefficients.
const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

fn lanczos_sum(z: f64) -> f64 {
    LANCZOS[1..]
        .iter()
        .enumerate()
        .fold(LANCZOS[0], |acc, (i, c)| acc + c / (z + (i + 1) as f64))
}

fn check_shape(z: f64) -> Result<()> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::domain(
            "gamma function argument must be positive and finite",
            z,
        ));
    }
    Ok(())
}

/// `ln Γ(z)` for `z > 0`.
pub fn ln_gamma(z: f64) -> Result<f64> {
    check_shape(z)?;
    Ok(ln_gamma_unchecked(z))
}

fn ln_gamma_unchecked(z: f64) -> f64 {
    if z < 0.5 {
        // reflection: Γ(z)Γ(1−z) = π / sin(πz)
        (PI / (PI * z).sin()).ln() - ln_gamma_unchecked(1.0 - z)
    } else {
        let z = z - 1.0;
        let t = z + LANCZOS_G + 0.5;
        LN_SQRT_2PI + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln()
    }
}

/// `Γ(z)` for `z > 0`; overflows to infinity above `z ≈ 171.6`.
pub fn gamma_function(z: f64) -> Result<f64> {
    check_shape(z)?;
    Ok(gamma_unchecked(z))
}

fn gamma_unchecked(z: f64) -> f64 {
    if z < 0.5 {
        PI / ((PI * z).sin() * gamma_unchecked(1.0 - z))
    } else if z > 140.0 {
        ln_gamma_unchecked(z).exp()
    } else {
        let z = z - 1.0;
        let t = z + LANCZOS_G + 0.5;
        (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * lanczos_sum(z)
    }
}

/// `(P(a, x), Q(a, x))`, the regularized lower and upper incomplete gamma
/// functions.
///
/// Uses the power series below `x = a + 1` and a Lentz continued fraction
/// above it; the function that is computed directly is the one that is not
/// close to 1, and the other is its complement.
pub fn regularized_gamma_pair(a: f64, x: f64) -> Result<(f64, f64)> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::domain(
            "incomplete gamma shape must be positive and finite",
            a,
        ));
    }
    if !(x >= 0.0) {
        return Err(Error::domain(
            "incomplete gamma argument must be non-negative",
            x,
        ));
    }
    if x == 0.0 {
        return Ok((0.0, 1.0));
    }
    if x.is_infinite() {
        return Ok((1.0, 0.0));
    }
    let log_prefactor = -x + a * x.ln() - ln_gamma_unchecked(a);
    if x < a + 1.0 {
        let p = (series(a, x)? * log_prefactor.exp()).clamp(0.0, 1.0);
        Ok((p, 1.0 - p))
    } else {
        let q = (continued_fraction(a, x)? * log_prefactor.exp()).clamp(0.0, 1.0);
        Ok((1.0 - q, q))
    }
}

fn series(a: f64, x: f64) -> Result<f64> {
    let mut ap = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * EPS {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence {
        routine: "incomplete gamma series",
        iterations: MAX_ITER,
    })
}

fn continued_fraction(a: f64, x: f64) -> Result<f64> {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b + an / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            return Ok(h);
        }
    }
    Err(Error::NonConvergence {
        routine: "incomplete gamma continued fraction",
        iterations: MAX_ITER,
    })
}

/// Regularized lower incomplete gamma `P(a, x) = γ(a, x) / Γ(a)`.
pub fn regularized_lower_gamma(a: f64, x: f64) -> Result<f64> {
    regularized_gamma_pair(a, x).map(|(p, _)| p)
}

/// Regularized upper incomplete gamma `Q(a, x) = 1 − P(a, x)`.
pub fn regularized_upper_gamma(a: f64, x: f64) -> Result<f64> {
    regularized_gamma_pair(a, x).map(|(_, q)| q)
}

/// Lower incomplete gamma `γ(a, x) = ∫₀ˣ e^(−t) t^(a−1) dt`.
pub fn lower_incomplete_gamma(a: f64, x: f64) -> Result<f64> {
    Ok(regularized_lower_gamma(a, x)? * gamma_function(a)?)
}
