//! Experiment runners: each turns a resolved configuration into a report,
//! human-readable summary lines and, when validating, a list of checks.

use wiretap_core::beamforming::build_family;
use wiretap_core::channel::eve_los;
use wiretap_core::localization::{
    averaged_outage_curve, covariance_at, tdoa_fisher, AveragingSettings,
};
use wiretap_core::model::{db_to_linear, Scenario};
use wiretap_core::montecarlo::{empirical_average_outage, empirical_outage, RngSpec};
use wiretap_core::optimize::{
    average_curve_over_main_channel, optimal_tau, random_search_oracle, sweep_tau, TauCurve,
};

use crate::checks::{self, representative_h, Check};
use crate::config::{ChannelMode, ExperimentConfig, ExperimentKind};
use crate::report::{Cell, CsvReport};
use crate::streams;

/// Everything a run produces.
#[derive(Debug, Clone)]
pub struct Outcome {
    /// The CSV report.
    pub report: CsvReport,
    /// Lines for standard output.
    pub summary: Vec<String>,
    /// Checks performed (empty unless validating).
    pub checks: Vec<Check>,
}

impl Outcome {
    /// Number of failed checks.
    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }
}

type Result<T> = wiretap_core::Result<T>;

/// Dispatches on the experiment kind.
pub fn run(cfg: &ExperimentConfig, config_toml: String) -> Result<Outcome> {
    match cfg.kind {
        ExperimentKind::SweepTau => run_sweep_tau(cfg, config_toml),
        ExperimentKind::Optimize => run_optimize(cfg, config_toml),
        ExperimentKind::SweepSnr => run_sweep_snr(cfg, config_toml),
        ExperimentKind::Uncertainty => run_uncertainty(cfg, config_toml),
        ExperimentKind::Validate => run_validate(cfg, config_toml),
        ExperimentKind::Fisher => run_fisher(cfg, config_toml),
    }
}

/// The outage curve for one antenna count under the configured channel mode.
pub fn outage_curve(cfg: &ExperimentConfig, scenario: &Scenario) -> Result<TauCurve> {
    match cfg.mode {
        ChannelMode::Average => {
            let spec = RngSpec::new(cfg.seed, streams::AVERAGE + scenario.n_alice as u64);
            Ok(
                average_curve_over_main_channel(scenario, cfg.n_realizations, cfg.grid_size, spec)?
                    .curve,
            )
        }
        ChannelMode::SingleH => sweep_tau(
            scenario,
            &representative_h(scenario, cfg.seed)?,
            cfg.grid_size,
        ),
    }
}

fn nearest_index(taus: &[f64], tau: f64) -> usize {
    taus.iter()
        .enumerate()
        .min_by(|a, b| (a.1 - tau).abs().total_cmp(&(b.1 - tau).abs()))
        .map(|(i, _)| i)
        .unwrap_or(0)
}

/// Outage versus `τ` per antenna count, with optional Monte Carlo columns.
pub fn run_sweep_tau(cfg: &ExperimentConfig, config_toml: String) -> Result<Outcome> {
    let mut columns = vec!["tau [1]".to_string()];
    for n in &cfg.n_alice {
        columns.push(format!("analytic_sop_na{n} [prob]"));
        if cfg.mode == ChannelMode::Average {
            columns.push(format!("analytic_sop_se_na{n} [prob]"));
        }
        if cfg.validate {
            columns.push(format!("empirical_sop_na{n} [prob]"));
            columns.push(format!("empirical_sop_se_na{n} [prob]"));
        }
    }
    let mut summary = Vec::new();
    let mut checks_out = Vec::new();
    let mut curves = Vec::new();
    let mut empirical = Vec::new();
    for &n in &cfg.n_alice {
        let scenario = cfg.scenario.with_n_alice(n);
        let curve = outage_curve(cfg, &scenario)?;
        summary.push(format!(
            "N_A = {n}: τ* = {:.4}, minimum outage {:.6}",
            curve.argmin_tau, curve.min_outage
        ));
        let mut emp = vec![None; curve.taus.len()];
        if cfg.validate {
            let mut worst = f64::NEG_INFINITY;
            let mut worst_abs = 0.0f64;
            let h = match cfg.mode {
                ChannelMode::SingleH => Some(representative_h(&scenario, cfg.seed)?),
                ChannelMode::Average => None,
            };
            let g_o = eve_los(&scenario)?;
            for (k, &tau) in cfg.validate_taus.iter().enumerate() {
                let idx = nearest_index(&curve.taus, tau);
                let grid_tau = curve.taus[idx];
                let spec = RngSpec::new(cfg.seed, streams::empirical(n, k));
                let e = match &h {
                    Some(h) => empirical_outage(
                        &scenario,
                        h,
                        &build_family(h, &g_o)?.at(grid_tau)?,
                        cfg.n_trials,
                        spec,
                    )?,
                    None => empirical_average_outage(&scenario, grid_tau, cfg.n_trials, spec)?,
                };
                let analytic_se = curve.std_error.as_ref().map_or(0.0, |s| s[idx]);
                let diff = (curve.outage[idx] - e.value).abs();
                worst = worst.max(diff - (3.0 * e.std_error).max(0.015) - 3.0 * analytic_se);
                worst_abs = worst_abs.max(diff);
                emp[idx] = Some(e);
            }
            checks_out.push(Check::at_most(
                format!("analytic vs Monte Carlo outage, N_A = {n}"),
                worst,
                0.0,
                format!("largest |Δ| = {worst_abs:.4e}; limit max(3·SE, 0.015) per point"),
            ));
        }
        curves.push(curve);
        empirical.push(emp);
    }
    let mut report = CsvReport::new(cfg.kind, columns, cfg.seed, config_toml);
    for i in 0..cfg.grid_size {
        let mut row = vec![Cell::Num(curves[0].taus[i])];
        for (curve, emp) in curves.iter().zip(&empirical) {
            row.push(Cell::Num(curve.outage[i]));
            if let Some(se) = &curve.std_error {
                row.push(Cell::Num(se[i]));
            }
            if cfg.validate {
                match &emp[i] {
                    Some(e) => row.extend([Cell::Num(e.value), Cell::Num(e.std_error)]),
                    None => row.extend([Cell::Empty, Cell::Empty]),
                }
            }
        }
        report.push(row);
    }
    Ok(Outcome {
        report,
        summary,
        checks: checks_out,
    })
}

/// `(τ*, minimum outage)` for one scenario under the configured channel mode.
fn optimum(cfg: &ExperimentConfig, scenario: &Scenario) -> Result<(f64, f64)> {
    match cfg.mode {
        ChannelMode::Average => {
            let c = outage_curve(cfg, scenario)?;
            Ok((c.argmin_tau, c.min_outage))
        }
        ChannelMode::SingleH => {
            let o = optimal_tau(
                scenario,
                &representative_h(scenario, cfg.seed)?,
                cfg.grid_size,
                cfg.refine_iters,
            )?;
            Ok((o.tau, o.outage))
        }
    }
}

fn oracle_applies(cfg: &ExperimentConfig, n: usize) -> bool {
    cfg.validate && cfg.mode == ChannelMode::SingleH && n <= 3 && cfg.oracle_samples > 0
}

fn oracle(cfg: &ExperimentConfig, scenario: &Scenario) -> Result<f64> {
    let h = representative_h(scenario, cfg.seed)?;
    let spec = RngSpec::new(cfg.seed, streams::ORACLE + scenario.n_alice as u64);
    random_search_oracle(scenario, &h, cfg.oracle_samples, &mut spec.stream_rng())
}

/// Optimal `τ` and minimum outage per antenna count.
pub fn run_optimize(cfg: &ExperimentConfig, config_toml: String) -> Result<Outcome> {
    let mut columns = vec![
        "n_alice [1]".to_string(),
        "optimal_tau [1]".into(),
        "min_sop [prob]".into(),
    ];
    let with_oracle = cfg.n_alice.iter().any(|&n| oracle_applies(cfg, n));
    if with_oracle {
        columns.push("oracle_min_sop [prob]".into());
    }
    let mut report = CsvReport::new(cfg.kind, columns, cfg.seed, config_toml);
    let mut summary = Vec::new();
    let mut checks_out = Vec::new();
    let mut minima = Vec::new();
    for &n in &cfg.n_alice {
        let scenario = cfg.scenario.with_n_alice(n);
        let (tau, min) = optimum(cfg, &scenario)?;
        summary.push(format!("N_A = {n}: τ* = {tau:.6}, minimum outage {min:.6}"));
        let mut row = vec![Cell::Count(n as u64), Cell::Num(tau), Cell::Num(min)];
        if with_oracle {
            if oracle_applies(cfg, n) {
                let o = oracle(cfg, &scenario)?;
                checks_out.push(Check::at_least(
                    format!("random search never beats the τ-family, N_A = {n}"),
                    o - min,
                    -1e-3,
                    format!("{} unit vectors", cfg.oracle_samples),
                ));
                row.push(Cell::Num(o));
            } else {
                row.push(Cell::Empty);
            }
        }
        report.push(row);
        minima.push(min);
    }
    if cfg.validate {
        checks_out.push(decrease_check("minimum outage decreases with N_A", &minima));
    }
    Ok(Outcome {
        report,
        summary,
        checks: checks_out,
    })
}

/// Largest step `v[i+1] − v[i]`; non-positive means non-increasing.
fn largest_increase(values: &[f64]) -> f64 {
    values
        .windows(2)
        .map(|p| p[1] - p[0])
        .fold(f64::NEG_INFINITY, f64::max)
}

fn decrease_check(name: &str, values: &[f64]) -> Check {
    let worst = if values.len() < 2 {
        f64::NEG_INFINITY
    } else {
        largest_increase(values)
    };
    Check::at_most(name, worst, 1e-9, format!("values {values:.6?}"))
}

/// Optimal `τ` and minimum outage versus Bob's mean SNR. Every SNR reuses the
/// same main-channel draws, so the comparison across SNRs is paired.
pub fn run_sweep_snr(cfg: &ExperimentConfig, config_toml: String) -> Result<Outcome> {
    let mut columns = vec!["mean_snr_bob [dB]".to_string()];
    for &n in &cfg.n_alice {
        columns.push(format!("optimal_tau_na{n} [1]"));
        columns.push(format!("min_sop_na{n} [prob]"));
        if oracle_applies(cfg, n) {
            columns.push(format!("oracle_min_sop_na{n} [prob]"));
        }
    }
    let mut report = CsvReport::new(cfg.kind, columns, cfg.seed, config_toml);
    let mut per_n: Vec<Vec<f64>> = vec![Vec::new(); cfg.n_alice.len()];
    let mut checks_out = Vec::new();
    for &snr_db in &cfg.mean_snr_bob_db {
        let mut row = vec![Cell::Num(snr_db)];
        for (j, &n) in cfg.n_alice.iter().enumerate() {
            let scenario = Scenario {
                mean_snr_bob: db_to_linear(snr_db),
                ..cfg.scenario.with_n_alice(n)
            };
            let (tau, min) = optimum(cfg, &scenario)?;
            row.extend([Cell::Num(tau), Cell::Num(min)]);
            if oracle_applies(cfg, n) {
                let o = oracle(cfg, &scenario)?;
                checks_out.push(Check::at_least(
                    format!("random search never beats the τ-family, N_A = {n}, γ̄_B = {snr_db} dB"),
                    o - min,
                    -1e-3,
                    "",
                ));
                row.push(Cell::Num(o));
            }
            per_n[j].push(min);
        }
        report.push(row);
    }
    let mut summary = Vec::new();
    for (j, &n) in cfg.n_alice.iter().enumerate() {
        summary.push(format!(
            "N_A = {n}: minimum outage over γ̄_B {:.6?}",
            per_n[j]
        ));
        if cfg.validate {
            checks_out.push(decrease_check(
                &format!("minimum outage non-increasing in γ̄_B, N_A = {n}"),
                &per_n[j],
            ));
        }
    }
    Ok(Outcome {
        report,
        summary,
        checks: checks_out,
    })
}

fn sigma_label(s: f64) -> String {
    format!("{s}")
}

/// Location-averaged outage versus `τ`, one curve per ranging accuracy, plus
/// the perfect-location curve over the same main-channel draws.
pub fn run_uncertainty(cfg: &ExperimentConfig, config_toml: String) -> Result<Outcome> {
    let geometry = cfg.geometry.as_ref().ok_or(wiretap_core::Error::Domain {
        what: "uncertainty needs a geometry",
        value: 0.0,
    })?;
    let n = cfg.n_alice[0];
    let base = cfg.scenario.with_n_alice(n);
    let truth = geometry.apply(&base)?;
    let settings = AveragingSettings {
        grid_size: cfg.grid_size,
        n_location_samples: cfg.n_location_samples,
        n_channel_realizations: cfg.n_channel_realizations,
        fix_main_channel: cfg.fix_main_channel,
        evaluate_at_true_location: cfg.evaluate_at_true_location,
    };
    let spec = RngSpec::new(cfg.seed, streams::UNCERTAINTY);
    let perfect = if cfg.fix_main_channel {
        average_curve_over_main_channel(&truth, cfg.n_channel_realizations, cfg.grid_size, spec)?
    } else {
        average_curve_over_main_channel(
            &truth,
            cfg.n_location_samples * cfg.n_channel_realizations,
            cfg.grid_size,
            spec,
        )?
    };
    let mut columns = vec!["tau [1]".to_string(), "perfect_location_sop [prob]".into()];
    let mut curves = Vec::new();
    let mut summary = vec![format!(
        "N_A = {n}: Bob at θ_B = {:.6} rad, Eve at θ_E = {:.6} rad; perfect-location minimum {:.6} at τ = {:.4}",
        truth.bob_angle, truth.eve_angle, perfect.curve.min_outage, perfect.curve.argmin_tau
    )];
    for &sigma in &cfg.range_sigma_m {
        let anchors = cfg.anchors.build(geometry.eve, sigma)?;
        let c = averaged_outage_curve(&base, geometry, &anchors, &settings, spec)?;
        summary.push(format!(
            "cσ_t = {sigma} m: σ_x = {:.3} m, σ_y = {:.3} m, ρ = {:.4}; minimum {:.6} at τ = {:.4} ({} pairs, {} skipped, {} redrawn)",
            c.covariance.sigma_x, c.covariance.sigma_y, c.covariance.rho, c.curve.min_outage, c.curve.argmin_tau, c.used, c.skipped, c.resampled
        ));
        columns.push(format!("avg_sop_cst{}m [prob]", sigma_label(sigma)));
        columns.push(format!("avg_sop_se_cst{}m [prob]", sigma_label(sigma)));
        curves.push((sigma, c.curve));
    }
    let mut checks_out = Vec::new();
    if cfg.validate {
        let minima: Vec<f64> = curves.iter().map(|(_, c)| c.min_outage).collect();
        let worst_drop = minima
            .windows(2)
            .map(|p| p[0] - p[1])
            .fold(f64::NEG_INFINITY, f64::max);
        checks_out.push(Check::at_most(
            "minimum averaged outage non-decreasing in cσ_t",
            if minima.len() < 2 {
                f64::NEG_INFINITY
            } else {
                worst_drop
            },
            1e-9,
            format!("minima {minima:.6?}"),
        ));
        for (sigma, c) in &curves {
            if *sigma == 0.0 && !cfg.evaluate_at_true_location {
                let d = c
                    .outage
                    .iter()
                    .zip(&perfect.curve.outage)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                checks_out.push(Check::at_most(
                    "cσ_t = 0 curve equals the perfect-location curve",
                    d,
                    1e-6,
                    "",
                ));
            }
        }
    }
    let mut report = CsvReport::new(cfg.kind, columns, cfg.seed, config_toml);
    for i in 0..perfect.curve.taus.len() {
        let mut row = vec![
            Cell::Num(perfect.curve.taus[i]),
            Cell::Num(perfect.curve.outage[i]),
        ];
        for (_, c) in &curves {
            row.push(Cell::Num(c.outage[i]));
            row.push(Cell::Num(c.std_error.as_ref().map_or(0.0, |s| s[i])));
        }
        report.push(row);
    }
    Ok(Outcome {
        report,
        summary,
        checks: checks_out,
    })
}

/// Fisher information and location covariance at Eve's true position.
pub fn run_fisher(cfg: &ExperimentConfig, config_toml: String) -> Result<Outcome> {
    let geometry = cfg.geometry.as_ref().ok_or(wiretap_core::Error::Domain {
        what: "fisher needs a geometry",
        value: 0.0,
    })?;
    let columns = [
        "range_sigma [m]",
        "j11 [1/m^2]",
        "j12 [1/m^2]",
        "j22 [1/m^2]",
        "sigma_x [m]",
        "sigma_y [m]",
        "rho [1]",
    ]
    .map(String::from)
    .to_vec();
    let mut report = CsvReport::new(cfg.kind, columns, cfg.seed, config_toml);
    let mut summary = Vec::new();
    for &sigma in &cfg.range_sigma_m {
        let anchors = cfg.anchors.build(geometry.eve, sigma)?;
        if sigma == 0.0 {
            report.push(vec![
                Cell::Num(0.0),
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::Num(0.0),
                Cell::Num(0.0),
                Cell::Num(0.0),
            ]);
            summary.push("cσ_t = 0 m: location known exactly".into());
            continue;
        }
        let j = tdoa_fisher(&anchors, geometry.eve)?;
        let v = covariance_at(&anchors, geometry.eve)?;
        summary.push(format!(
            "cσ_t = {sigma} m: J = [[{:.6e}, {:.6e}], [{:.6e}, {:.6e}]] 1/m², σ_x = {:.4} m, σ_y = {:.4} m, ρ = {:.6}",
            j.j11, j.j12, j.j12, j.j22, v.sigma_x, v.sigma_y, v.rho
        ));
        report.push(vec![
            Cell::Num(sigma),
            Cell::Num(j.j11),
            Cell::Num(j.j12),
            Cell::Num(j.j22),
            Cell::Num(v.sigma_x),
            Cell::Num(v.sigma_y),
            Cell::Num(v.rho),
        ]);
    }
    Ok(Outcome {
        report,
        summary,
        checks: Vec::new(),
    })
}

/// Runs every oracle check and reports one row per check.
pub fn run_validate(cfg: &ExperimentConfig, config_toml: String) -> Result<Outcome> {
    let mut all = checks::structural_invariants(cfg.invariant_configs, cfg.seed)?;
    all.extend(checks::special_functions()?);
    all.extend(checks::worked_outage()?);
    for &n in &cfg.n_alice {
        let scenario = cfg.scenario.with_n_alice(n);
        all.push(checks::mc_agreement(&scenario, &cfg.validate_taus, cfg.n_trials, cfg.seed)?.0);
        all.push(checks::cdf_distance(
            &scenario,
            cfg.n_trials,
            cfg.cdf_model_tolerance,
            cfg.seed,
        )?);
        all.extend(checks::phi_invariance(
            &scenario,
            &cfg.phi_values,
            cfg.n_trials,
            cfg.seed,
        )?);
        if n <= 3 && cfg.oracle_samples > 0 {
            all.push(checks::family_optimality(
                &scenario,
                cfg.oracle_draws,
                cfg.oracle_samples,
                cfg.grid_size,
                cfg.seed,
            )?);
        }
    }
    let columns = [
        "check [text]",
        "observed [1]",
        "limit [1]",
        "passed [bool]",
        "detail [text]",
    ]
    .map(String::from)
    .to_vec();
    let mut report = CsvReport::new(cfg.kind, columns, cfg.seed, config_toml);
    for c in &all {
        report.push(vec![
            Cell::Text(c.name.clone()),
            Cell::Num(c.observed),
            Cell::Num(c.limit),
            Cell::Text(c.passed.to_string()),
            Cell::Text(c.detail.clone()),
        ]);
    }
    Ok(Outcome {
        report,
        summary: Vec::new(),
        checks: all,
    })
}
