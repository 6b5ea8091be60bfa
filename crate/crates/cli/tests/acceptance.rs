//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Run with `cargo test -p wiretap-lbb --test acceptance`.

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4};
use std::path::{Path, PathBuf};
use std::time::Instant;

use wiretap_core::localization::{
    location_covariance, sample_estimated_location, tdoa_fisher, AnchorSet,
};
use wiretap_core::model::{db_to_linear, CartesianPosition, Scenario};
use wiretap_core::montecarlo::RngSpec;
use wiretap_core::optimize::{average_curve_over_main_channel, TauCurve};
use wiretap_lbb::checks::{self, Check};
use wiretap_lbb::config::{self, Overrides};
use wiretap_lbb::{rerun_report, run_config, streams, with_workers};

const SEED: u64 = 2024;

fn reference(n_alice: usize) -> Scenario {
    Scenario {
        n_alice,
        n_eve: 2,
        spacing_alice: 0.5,
        spacing_eve: 0.5,
        k_bob: db_to_linear(10.0),
        k_eve: db_to_linear(5.0),
        mean_snr_bob: db_to_linear(10.0),
        mean_snr_eve: db_to_linear(10.0),
        bob_angle: FRAC_PI_3,
        eve_angle: FRAC_PI_4,
        eve_aoa: 0.0,
        secrecy_rate: 1.0,
    }
}

fn averaged(scenario: &Scenario, realizations: usize) -> wiretap_core::Result<TauCurve> {
    let spec = RngSpec::new(SEED, streams::AVERAGE + scenario.n_alice as u64);
    Ok(average_curve_over_main_channel(scenario, realizations, 1001, spec)?.curve)
}

type Verdict = Result<(bool, String), String>;

fn from_checks(checks: &[Check]) -> Verdict {
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(Check::line)
        .collect();
    if failed.is_empty() {
        let worst = checks
            .iter()
            .map(|c| format!("{} {:.3e}/{:.1e}", c.name, c.observed, c.limit))
            .collect::<Vec<_>>()
            .join("; ");
        Ok((true, worst))
    } else {
        Ok((false, failed.join(" | ")))
    }
}

fn core<T>(r: wiretap_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn mc_agreement() -> Verdict {
    let mut all = Vec::new();
    for n in [2, 3, 4] {
        all.push(
            core(checks::mc_agreement(
                &reference(n),
                &[0.0, 0.25, 0.5, 0.75, 1.0],
                1_000_000,
                SEED,
            ))?
            .0,
        );
    }
    from_checks(&all)
}

fn family_optimality() -> Verdict {
    let mut all = Vec::new();
    for n in [2, 3] {
        all.push(core(checks::family_optimality(
            &reference(n),
            20,
            100_000,
            1001,
            SEED,
        ))?);
    }
    from_checks(&all)
}

fn trends() -> Verdict {
    let curves: Vec<TauCurve> = [2, 3, 4]
        .iter()
        .map(|&n| averaged(&reference(n), 10_000))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let valleys: Vec<usize> = curves.iter().map(TauCurve::valley_count).collect();
    let minima: Vec<f64> = curves.iter().map(|c| c.min_outage).collect();
    let taus: Vec<f64> = curves.iter().map(|c| c.argmin_tau).collect();
    let unique = valleys.iter().all(|&v| v == 1);
    let decreasing = minima.windows(2).all(|p| p[0] - p[1] >= 1e-3);
    let tau_ok = taus.windows(2).all(|p| p[1] >= p[0]) && taus[2] >= 0.9;
    Ok((
        unique && decreasing && tau_ok,
        format!("valleys {valleys:?}, minima {minima:.6?}, τ* {taus:?}"),
    ))
}

fn snr_monotonicity() -> Verdict {
    let mut detail = Vec::new();
    let mut ok = true;
    for n in [2, 3, 4] {
        let minima: Vec<f64> = [0.0, 5.0, 10.0, 15.0, 20.0]
            .iter()
            .map(|&db| {
                averaged(
                    &Scenario {
                        mean_snr_bob: db_to_linear(db),
                        ..reference(n)
                    },
                    10_000,
                )
                .map(|c| c.min_outage)
            })
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let worst = minima
            .windows(2)
            .map(|p| p[1] - p[0])
            .fold(f64::NEG_INFINITY, f64::max);
        ok &= worst <= 1e-9;
        detail.push(format!("N_A={n} {minima:.4?}"));
    }
    Ok((ok, detail.join("; ")))
}

fn structural() -> Verdict {
    from_checks(&core(checks::structural_invariants(100, SEED))?)
}

fn special() -> Verdict {
    from_checks(&core(checks::special_functions())?)
}

fn worked() -> Verdict {
    from_checks(&core(checks::worked_outage())?)
}

fn phi() -> Verdict {
    let mut all = Vec::new();
    for n in [2, 3, 4] {
        all.extend(core(checks::phi_invariance(
            &reference(n),
            &[
                0.0,
                FRAC_PI_4,
                std::f64::consts::FRAC_PI_2,
                std::f64::consts::PI,
            ],
            1_000_000,
            SEED,
        ))?);
    }
    from_checks(&all)
}

fn fisher() -> Verdict {
    let s = 50.0;
    let anchors = core(AnchorSet::with_range_sigma(
        vec![
            CartesianPosition { x: 1000.0, y: 0.0 },
            CartesianPosition { x: 0.0, y: 1000.0 },
            CartesianPosition { x: -1000.0, y: 0.0 },
        ],
        s,
    ))?;
    let j = core(tdoa_fisher(&anchors, CartesianPosition::ORIGIN))?;
    let k = 1.0 / (2.0 * s * s);
    let rel = |got: f64, want: f64| (got - want).abs() / want.abs();
    let j_err = rel(j.j11, 5.0 * k).max(rel(j.j12, -k)).max(rel(j.j22, k));
    let v = core(location_covariance(&j))?;
    let m = v.matrix();
    let h = s * s / 2.0;
    let v_err = rel(m[0][0], h)
        .max(rel(m[0][1], h))
        .max(rel(m[1][0], h))
        .max(rel(m[1][1], 5.0 * h));
    let rho_err = rel(v.rho, 1.0 / 5f64.sqrt());

    let truth = CartesianPosition {
        x: 1000.0,
        y: -1000.0,
    };
    let mut rng = RngSpec::new(SEED, 9).stream_rng();
    let n = 1_000_000usize;
    let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for _ in 0..n {
        let e = sample_estimated_location(truth, &v, &mut rng);
        let (dx, dy) = (e.x - truth.x, e.y - truth.y);
        sx += dx;
        sy += dy;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    let nf = n as f64;
    let (mx, my) = (sx / nf, sy / nf);
    let z = (mx.abs() / (v.sigma_x / nf.sqrt())).max(my.abs() / (v.sigma_y / nf.sqrt()));
    let rho_hat = (sxy / nf - mx * my) / ((sxx / nf - mx * mx) * (syy / nf - my * my)).sqrt();
    let ok = j_err <= 1e-12
        && v_err <= 1e-12
        && rho_err <= 1e-12
        && z <= 4.0
        && (rho_hat - v.rho).abs() <= 0.005;
    Ok((
        ok,
        format!(
            "J rel err {j_err:.1e}, V rel err {v_err:.1e}, ρ rel err {rho_err:.1e}; sample mean {z:.2} SE, ρ̂ − ρ = {:.1e}",
            rho_hat - v.rho
        ),
    ))
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn uncertainty() -> Verdict {
    let (file, text) =
        config::load(&configs_dir().join("uncertainty.toml")).map_err(|e| e.to_string())?;
    let overrides = Overrides {
        kind: Some(config::ExperimentKind::Uncertainty),
        validate: true,
        ..Overrides::default()
    };
    let (_, outcome) = run_config(file, &text, &overrides).map_err(|e| e.to_string())?;
    if outcome.checks.len() != 2 {
        return Ok((
            false,
            format!("expected two checks, got {}", outcome.checks.len()),
        ));
    }
    let (ok, detail) = from_checks(&outcome.checks)?;
    Ok((
        ok,
        format!(
            "{detail}; {}",
            outcome.summary[1..]
                .iter()
                .map(|s| s.split(';').nth(1).unwrap_or("").trim())
                .collect::<Vec<_>>()
                .join(", ")
        ),
    ))
}

fn reproducibility() -> Verdict {
    let dir = std::env::temp_dir().join(format!("wiretap-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mut names = Vec::new();
    let mut entries: Vec<PathBuf> = std::fs::read_dir(configs_dir())
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    entries.sort();
    for path in entries {
        let (file, text) = config::load(&path).map_err(|e| e.to_string())?;
        let kind = file
            .experiment
            .kind
            .ok_or("shipped configs name their kind")?;
        let validate = !matches!(kind, config::ExperimentKind::Uncertainty);
        let overrides = Overrides {
            quick: true,
            validate,
            ..Overrides::default()
        };
        let (_, first) = run_config(file, &text, &overrides).map_err(|e| e.to_string())?;
        let original = first.report.render();
        let csv = dir.join(format!("{}.csv", kind.name()));
        std::fs::write(&csv, &original).map_err(|e| e.to_string())?;
        for workers in [1, 8] {
            let again = with_workers(Some(workers), || rerun_report(&csv))
                .map_err(|e| e.to_string())?
                .map_err(|e| e.to_string())?;
            if again.report.render() != original {
                return Ok((
                    false,
                    format!(
                        "{} differs when regenerated on {workers} workers",
                        path.display()
                    ),
                ));
            }
        }
        names.push(kind.name());
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok((
        true,
        format!("byte-identical under 1 and 8 workers: {}", names.join(", ")),
    ))
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 11] = [
        (
            "analytic vs Monte Carlo outage within max(3·SE, 0.015)",
            mc_agreement,
        ),
        (
            "random search never beats the τ-family by more than 1e-3",
            family_optimality,
        ),
        (
            "averaged curves: unique minimum, minima fall with N_A, τ* rises to ≥ 0.9",
            trends,
        ),
        (
            "minimum outage non-increasing in Bob's mean SNR",
            snr_monotonicity,
        ),
        (
            "projector, zero-forcing, leakage, norm and matched-filter invariants",
            structural,
        ),
        (
            "incomplete gamma and gamma function spot values and monotonicity",
            special,
        ),
        ("worked outage value and certain-outage clamp", worked),
        ("outage invariant under Eve's angle of arrival", phi),
        (
            "Fisher information, location covariance and sampler moments",
            fisher,
        ),
        (
            "location uncertainty raises the minimum; exact location reproduces the baseline",
            uncertainty,
        ),
        (
            "reports regenerate byte-identically from their footers",
            reproducibility,
        ),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (passed, detail) = run().unwrap_or_else(|e| (false, format!("error: {e}")));
        if !passed {
            failures += 1;
        }
        println!(
            "ACCEPTANCE {:>2} {} {name} [{:.1} s] {detail}",
            i + 1,
            if passed { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} passed, {failures} failed",
        criteria.len() - failures
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
