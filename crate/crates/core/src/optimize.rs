//! Searching the beamformer family for the outage-minimizing `τ`.
//!
//! The outage curve over `τ ∈ [0, 1]` is scanned on a uniform grid first; a
//! golden-section search then refines inside the best grid cell. Nothing
//! assumes the curve is unimodal beyond that cell.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::Rng;

use crate::beamforming::{build_family, Beamformer};
use crate::channel::{complex_gaussian, eve_los, sample_main_channel};
use crate::exec::chunked;
use crate::linalg::{dot, normalized};
use crate::model::Scenario;
use crate::montecarlo::{check_unit, Lane, RngSpec};
use crate::secrecy::{outage_probability, EffectiveEveStats, OutageQuery};
use crate::{Error, Result};

/// Maximum fraction of degenerate main-channel draws an average may skip.
pub const MAX_SKIPPED_FRACTION: f64 = 0.01;

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Outage probability sampled over `τ`.
#[derive(Debug, Clone, PartialEq)]
pub struct TauCurve {
    /// Strictly increasing grid over `[0, 1]`.
    pub taus: Vec<f64>,
    /// Outage probability at each grid point.
    pub outage: Vec<f64>,
    /// Monte Carlo standard error per point, for averaged curves.
    pub std_error: Option<Vec<f64>>,
    /// Grid point with the lowest outage (smallest `τ` on ties).
    pub argmin_tau: f64,
    /// Lowest outage on the grid.
    pub min_outage: f64,
}

impl TauCurve {
    /// Assembles a curve and locates its minimum.
    pub fn new(taus: Vec<f64>, outage: Vec<f64>, std_error: Option<Vec<f64>>) -> Self {
        debug_assert_eq!(taus.len(), outage.len());
        let idx = argmin(&outage);
        Self {
            argmin_tau: taus[idx],
            min_outage: outage[idx],
            taus,
            outage,
            std_error,
        }
    }

    /// Index of [`argmin_tau`](Self::argmin_tau).
    pub fn argmin_index(&self) -> usize {
        argmin(&self.outage)
    }

    /// Number of separate valleys in the curve. Runs of equal values count
    /// as one point; an endpoint counts when it is below its only neighbour.
    pub fn valley_count(&self) -> usize {
        let mut runs: Vec<f64> = Vec::with_capacity(self.outage.len());
        for &v in &self.outage {
            if runs.last() != Some(&v) {
                runs.push(v);
            }
        }
        if runs.len() == 1 {
            return 1;
        }
        (0..runs.len())
            .filter(|&i| {
                let left = i == 0 || runs[i] < runs[i - 1];
                let right = i + 1 == runs.len() || runs[i] < runs[i + 1];
                left && right
            })
            .count()
    }
}

fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < values[best] {
            best = i;
        }
    }
    best
}

/// `grid_size` evenly spaced points from 0 to 1 inclusive.
pub fn tau_grid(grid_size: usize) -> Result<Vec<f64>> {
    if grid_size < 2 {
        return Err(Error::domain(
            "tau grid needs at least 2 points",
            grid_size as f64,
        ));
    }
    let last = (grid_size - 1) as f64;
    Ok((0..grid_size).map(|i| i as f64 / last).collect())
}

/// Analytic outage probability for any unit transmit vector `w`.
///
/// Only `|h·w|²` and `|g_o·w|²` matter, so this applies to vectors outside
/// the `τ` family as well.
pub fn outage_for_beamformer(
    scenario: &Scenario,
    h: &[Complex64],
    g_o: &[Complex64],
    w: &[Complex64],
) -> Result<f64> {
    let gamma_bob = scenario.mean_snr_bob * dot(h, w).norm_sqr();
    let stats = EffectiveEveStats::from_leakage(
        dot(g_o, w).norm_sqr(),
        scenario.k_eve,
        scenario.mean_snr_eve,
        scenario.n_eve,
    )?;
    outage_probability(&OutageQuery::new(gamma_bob, scenario.secrecy_rate)?, &stats)
}

/// What to do when `h` is (numerically) parallel or orthogonal to `g_oᴴ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DegeneratePolicy {
    /// Return [`Error::DegenerateGeometry`].
    #[default]
    Fail,
    /// Use the matched filter `hᴴ/‖h‖` for every `τ`.
    MatchedFilter,
}

fn beamformer(h: &[Complex64], g_o: &[Complex64], policy: DegeneratePolicy) -> Result<Beamformer> {
    match policy {
        DegeneratePolicy::Fail => build_family(h, g_o).map(Beamformer::Family),
        DegeneratePolicy::MatchedFilter => Beamformer::family_or_mrt(h, g_o),
    }
}

fn check_channel(scenario: &Scenario, h: &[Complex64]) -> Result<()> {
    scenario.validate()?;
    if h.len() != scenario.n_alice {
        return Err(Error::domain(
            "main channel length must equal Alice's antenna count",
            h.len() as f64,
        ));
    }
    Ok(())
}

/// Outage at each `τ` of a uniform grid for one main-channel realization.
pub fn sweep_tau(scenario: &Scenario, h: &[Complex64], grid_size: usize) -> Result<TauCurve> {
    sweep_tau_with(scenario, h, grid_size, DegeneratePolicy::Fail)
}

/// [`sweep_tau`] with an explicit degeneracy policy.
pub fn sweep_tau_with(
    scenario: &Scenario,
    h: &[Complex64],
    grid_size: usize,
    policy: DegeneratePolicy,
) -> Result<TauCurve> {
    check_channel(scenario, h)?;
    let taus = tau_grid(grid_size)?;
    let g_o = eve_los(scenario)?;
    let bf = beamformer(h, &g_o, policy)?;
    let outage = outage_on_grid(scenario, h, &g_o, &bf, &taus)?;
    Ok(TauCurve::new(taus, outage, None))
}

pub(crate) fn outage_on_grid(
    scenario: &Scenario,
    h: &[Complex64],
    g_o: &[Complex64],
    bf: &Beamformer,
    taus: &[f64],
) -> Result<Vec<f64>> {
    taus.iter()
        .map(|&t| outage_for_beamformer(scenario, h, g_o, &bf.at(t)?))
        .collect()
}

/// A refined minimizer of the outage curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauOptimum {
    /// Minimizing `τ`.
    pub tau: f64,
    /// Outage probability there.
    pub outage: f64,
}

/// Golden-section search for a minimum of `f` on `[lo, hi]`.
///
/// Returns the best point evaluated, smallest abscissa on ties.
pub fn golden_section_min<F>(mut f: F, lo: f64, hi: f64, iters: usize) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo <= hi) {
        return Err(Error::domain(
            "golden-section bracket must satisfy lo <= hi",
            lo - hi,
        ));
    }
    let (mut a, mut b) = (lo, hi);
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    let mut best = if fd < fc { (d, fd) } else { (c, fc) };
    for _ in 0..iters {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c)?;
            best = better(best, (c, fc));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d)?;
            best = better(best, (d, fd));
        }
    }
    Ok(best)
}

fn better(cur: (f64, f64), cand: (f64, f64)) -> (f64, f64) {
    if cand.1 < cur.1 || (cand.1 == cur.1 && cand.0 < cur.0) {
        cand
    } else {
        cur
    }
}

/// Coarse grid scan plus golden-section refinement inside the neighbouring
/// cells of the best grid point. Never returns worse than the grid minimum.
pub fn optimal_tau(
    scenario: &Scenario,
    h: &[Complex64],
    coarse_grid: usize,
    refine_iters: usize,
) -> Result<TauOptimum> {
    check_channel(scenario, h)?;
    let g_o = eve_los(scenario)?;
    let family = build_family(h, &g_o)?;
    let taus = tau_grid(coarse_grid)?;
    let outage = outage_on_grid(
        scenario,
        h,
        &g_o,
        &Beamformer::Family(family.clone()),
        &taus,
    )?;
    let idx = argmin(&outage);
    let grid_best = (taus[idx], outage[idx]);
    let lo = taus[idx.saturating_sub(1)];
    let hi = taus[(idx + 1).min(taus.len() - 1)];
    let refined = golden_section_min(
        |t| outage_for_beamformer(scenario, h, &g_o, &family.at(t)?),
        lo,
        hi,
        refine_iters,
    )?;
    let (tau, outage) = better(grid_best, refined);
    Ok(TauOptimum { tau, outage })
}

/// Lowest analytic outage among the given unit-norm candidates.
pub fn min_outage_over<I>(scenario: &Scenario, h: &[Complex64], candidates: I) -> Result<f64>
where
    I: IntoIterator<Item = Vec<Complex64>>,
{
    check_channel(scenario, h)?;
    let g_o = eve_los(scenario)?;
    let mut best = f64::INFINITY;
    for w in candidates {
        check_unit(&w, scenario.n_alice)?;
        best = best.min(outage_for_beamformer(scenario, h, &g_o, &w)?);
    }
    if best.is_infinite() {
        return Err(Error::domain("need at least one candidate beamformer", 0.0));
    }
    Ok(best)
}

/// Draws a vector uniformly from the complex unit sphere in `n` dimensions.
pub fn random_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..n).map(|_| complex_gaussian(rng)).collect();
        if let Some(u) = normalized(&v) {
            return u;
        }
    }
}

/// Brute-force optimality check: the lowest outage among `n_samples`
/// transmit vectors drawn uniformly from the complex unit sphere.
pub fn random_search_oracle<R: Rng + ?Sized>(
    scenario: &Scenario,
    h: &[Complex64],
    n_samples: usize,
    rng: &mut R,
) -> Result<f64> {
    if n_samples == 0 {
        return Err(Error::domain("need at least one sample", 0.0));
    }
    let n = scenario.n_alice;
    min_outage_over(
        scenario,
        h,
        (0..n_samples).map(|_| random_unit_vector(n, rng)),
    )
}

/// A curve averaged over independent main-channel draws.
#[derive(Debug, Clone, PartialEq)]
pub struct AveragedCurve {
    /// Element-wise mean (with standard errors).
    pub curve: TauCurve,
    /// Draws that entered the mean.
    pub used: usize,
    /// Degenerate draws that were skipped.
    pub skipped: usize,
}

#[derive(Clone)]
pub(crate) struct Accumulator {
    pub sum: Vec<f64>,
    pub sum_sq: Vec<f64>,
    pub used: usize,
    pub skipped: usize,
}

impl Accumulator {
    pub fn new(width: usize) -> Self {
        Self {
            sum: vec![0.0; width],
            sum_sq: vec![0.0; width],
            used: 0,
            skipped: 0,
        }
    }

    pub fn push(&mut self, values: &[f64]) {
        for ((s, q), v) in self.sum.iter_mut().zip(self.sum_sq.iter_mut()).zip(values) {
            *s += v;
            *q += v * v;
        }
        self.used += 1;
    }

    pub fn merge(&mut self, other: &Self) {
        for (s, o) in self.sum.iter_mut().zip(&other.sum) {
            *s += o;
        }
        for (s, o) in self.sum_sq.iter_mut().zip(&other.sum_sq) {
            *s += o;
        }
        self.used += other.used;
        self.skipped += other.skipped;
    }

    /// Means and standard errors of the mean.
    pub fn finish(&self, what: &'static str, allowed: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let total = self.used + self.skipped;
        if self.skipped as f64 > allowed * total as f64 || self.used == 0 {
            return Err(Error::TooManyDiscarded {
                what,
                skipped: self.skipped,
                total,
                allowed,
            });
        }
        let n = self.used as f64;
        let mean: Vec<f64> = self.sum.iter().map(|s| s / n).collect();
        let se = mean
            .iter()
            .zip(&self.sum_sq)
            .map(|(m, q)| {
                if self.used < 2 {
                    0.0
                } else {
                    ((q / n - m * m).max(0.0) * n / (n - 1.0) / n).sqrt()
                }
            })
            .collect();
        Ok((mean, se))
    }
}

pub(crate) const AVERAGING_CHUNK: usize = 64;

/// Mean outage curve over `n_realizations` main-channel draws.
///
/// Draw `i` uses the generator keyed by `(Lane::MainChannel, i)`. Degenerate
/// draws are skipped and counted; more than 1% skipped is an error.
pub fn average_curve_over_main_channel(
    scenario: &Scenario,
    n_realizations: usize,
    grid_size: usize,
    rng: RngSpec,
) -> Result<AveragedCurve> {
    scenario.validate()?;
    if n_realizations == 0 {
        return Err(Error::domain("need at least one realization", 0.0));
    }
    let taus = tau_grid(grid_size)?;
    let g_o = eve_los(scenario)?;
    let chunks = chunked(
        n_realizations,
        AVERAGING_CHUNK,
        |range| -> Result<Accumulator> {
            let mut acc = Accumulator::new(taus.len());
            for i in range {
                let h = sample_main_channel(scenario, &mut rng.rng(Lane::MainChannel, i as u64))?;
                match build_family(&h.h, &g_o) {
                    Ok(f) => acc.push(&outage_on_grid(
                        scenario,
                        &h.h,
                        &g_o,
                        &Beamformer::Family(f),
                        &taus,
                    )?),
                    Err(Error::DegenerateGeometry { .. }) => acc.skipped += 1,
                    Err(e) => return Err(e),
                }
            }
            Ok(acc)
        },
    );
    let mut total = Accumulator::new(taus.len());
    for c in chunks {
        total.merge(&c?);
    }
    let (mean, se) = total.finish("degenerate main-channel draws", MAX_SKIPPED_FRACTION)?;
    Ok(AveragedCurve {
        curve: TauCurve::new(taus, mean, Some(se)),
        used: total.used,
        skipped: total.skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::db_to_linear;
    use core::f64::consts::{FRAC_PI_3, FRAC_PI_4};

    fn reference(n_alice: usize) -> Scenario {
        Scenario {
            n_alice,
            n_eve: 2,
            spacing_alice: 0.5,
            spacing_eve: 0.5,
            k_bob: db_to_linear(10.0),
            k_eve: db_to_linear(5.0),
            mean_snr_bob: 10.0,
            mean_snr_eve: 10.0,
            bob_angle: FRAC_PI_3,
            eve_angle: FRAC_PI_4,
            eve_aoa: 0.0,
            secrecy_rate: 1.0,
        }
    }

    fn draw_h(s: &Scenario, seed: u64) -> Vec<Complex64> {
        sample_main_channel(s, &mut RngSpec::new(seed, 0).rng(Lane::MainChannel, 0))
            .unwrap()
            .h
    }

    #[test]
    fn grid_and_endpoints() {
        assert!(tau_grid(1).is_err());
        assert_eq!(tau_grid(3).unwrap(), vec![0.0, 0.5, 1.0]);
        let s = reference(4);
        let h = draw_h(&s, 1);
        let c = sweep_tau(&s, &h, 11).unwrap();
        let g_o = eve_los(&s).unwrap();
        let f = build_family(&h, &g_o).unwrap();
        assert_eq!(
            c.outage[0],
            outage_for_beamformer(&s, &h, &g_o, &f.w_zf_perp).unwrap()
        );
        assert_eq!(
            c.outage[10],
            outage_for_beamformer(&s, &h, &g_o, &f.w_zf).unwrap()
        );
        assert_eq!(c.min_outage, c.outage[c.argmin_index()]);
    }

    #[test]
    fn degenerate_channel_policies() {
        let s = reference(3);
        let g_o = eve_los(&s).unwrap();
        assert!(matches!(
            sweep_tau(&s, &g_o, 5),
            Err(Error::DegenerateGeometry { .. })
        ));
        let c = sweep_tau_with(&s, &g_o, 5, DegeneratePolicy::MatchedFilter).unwrap();
        assert!(c.outage.windows(2).all(|p| p[0] == p[1]));
    }

    #[test]
    fn flat_objective_breaks_ties_to_smallest_tau() {
        let s = Scenario {
            k_eve: 0.0,
            mean_snr_eve: 1e-12,
            ..reference(4)
        };
        let h = draw_h(&s, 2);
        let opt = optimal_tau(&s, &h, 101, 40).unwrap();
        assert!(opt.outage < 1e-9);
        let c = sweep_tau(&s, &h, 101).unwrap();
        assert_eq!(
            c.argmin_index(),
            c.outage.iter().position(|&v| v == c.min_outage).unwrap()
        );
    }

    #[test]
    fn refinement_never_worsens() {
        for seed in 0..20 {
            for n in [2, 3, 4, 6] {
                let s = reference(n);
                let h = draw_h(&s, seed);
                let coarse = sweep_tau(&s, &h, 21).unwrap();
                let opt = optimal_tau(&s, &h, 21, 50).unwrap();
                assert!(opt.outage <= coarse.min_outage + 1e-12);
                assert!((opt.tau - coarse.argmin_tau).abs() <= 1.0 / 20.0 + 1e-12);
            }
        }
    }

    #[test]
    fn finer_grid_never_hurts() {
        let s = reference(4);
        let h = draw_h(&s, 5);
        let mut prev = f64::INFINITY;
        // 2^k + 1 points nest each coarser grid
        for k in 1..=10 {
            let c = sweep_tau(&s, &h, (1 << k) + 1).unwrap();
            assert!(c.min_outage <= prev + 1e-12);
            prev = c.min_outage;
        }
    }

    #[test]
    fn optimum_is_reproducible() {
        let s = reference(3);
        let h = draw_h(&s, 9);
        assert_eq!(
            optimal_tau(&s, &h, 101, 60).unwrap(),
            optimal_tau(&s, &h, 101, 60).unwrap()
        );
    }

    #[test]
    fn oracle_with_forced_zero_forcing() {
        let s = reference(4);
        let h = draw_h(&s, 3);
        let g_o = eve_los(&s).unwrap();
        let f = build_family(&h, &g_o).unwrap();
        let got = min_outage_over(&s, &h, [f.w_zf.clone()]).unwrap();
        assert_eq!(got, sweep_tau(&s, &h, 2).unwrap().outage[1]);
        assert!(min_outage_over(&s, &h, core::iter::empty()).is_err());
    }

    #[test]
    fn oracle_never_beats_family() {
        for n in [2, 3] {
            let s = reference(n);
            for seed in 0..3 {
                let h = draw_h(&s, 100 + seed);
                let opt = optimal_tau(&s, &h, 1001, 60).unwrap();
                let mut rng = RngSpec::new(seed, 7).rng(Lane::Oracle, 0);
                let oracle = random_search_oracle(&s, &h, 20_000, &mut rng).unwrap();
                assert!(
                    oracle >= opt.outage - 1e-3,
                    "n={n}: oracle {oracle} < family {}",
                    opt.outage
                );
            }
        }
    }

    #[test]
    fn single_realization_average_is_the_sweep() {
        let s = reference(4);
        let spec = RngSpec::new(42, 3);
        let avg = average_curve_over_main_channel(&s, 1, 51, spec).unwrap();
        let h = sample_main_channel(&s, &mut spec.rng(Lane::MainChannel, 0))
            .unwrap()
            .h;
        let single = sweep_tau(&s, &h, 51).unwrap();
        assert_eq!(avg.curve.outage, single.outage);
        assert_eq!(avg.used, 1);
    }

    #[test]
    fn pure_los_average_is_deterministic() {
        let s = Scenario {
            k_bob: 1e12,
            ..reference(4)
        };
        let avg = average_curve_over_main_channel(&s, 200, 51, RngSpec::new(1, 1)).unwrap();
        let h_o = crate::channel::bob_los(&s).unwrap();
        let los = sweep_tau(&s, &h_o, 51).unwrap();
        for (a, b) in avg.curve.outage.iter().zip(&los.outage) {
            assert!((a - b).abs() < 1e-4);
        }
    }

    #[test]
    fn valley_count_cases() {
        let c = |v: Vec<f64>| TauCurve::new(tau_grid(v.len()).unwrap(), v, None).valley_count();
        assert_eq!(c(vec![3.0, 2.0, 1.0, 2.0]), 1);
        assert_eq!(c(vec![1.0, 2.0, 3.0]), 1);
        assert_eq!(c(vec![3.0, 1.0, 2.0, 1.5, 2.0]), 2);
        assert_eq!(c(vec![2.0, 1.0, 1.0, 2.0]), 1);
        assert_eq!(c(vec![1.0, 1.0]), 1);
    }

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let (x, fx) = golden_section_min(|t| Ok((t - 0.3).powi(2)), 0.0, 1.0, 80).unwrap();
        assert!((x - 0.3).abs() < 1e-8 && fx < 1e-16);
        assert!(golden_section_min(Ok, 1.0, 0.0, 5).is_err());
    }
}
