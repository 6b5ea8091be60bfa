use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, PI};

use wiretap_core::beamforming::{build_family, Beamformer};
use wiretap_core::channel::{eve_los, sample_main_channel};
use wiretap_core::localization::{averaged_outage_curve, default_anchors, AveragingSettings};
use wiretap_core::model::{db_to_linear, CartesianPosition, LinkBudget, LinkGeometry, Scenario};
use wiretap_core::montecarlo::{empirical_average_outage, empirical_outage, Lane, RngSpec};
use wiretap_core::optimize::{
    average_curve_over_main_channel, optimal_tau, outage_for_beamformer, sweep_tau,
};

fn scenario(n_alice: usize, n_eve: usize, k_eve: f64) -> Scenario {
    Scenario {
        n_alice,
        n_eve,
        spacing_alice: 0.5,
        spacing_eve: 0.5,
        k_bob: db_to_linear(10.0),
        k_eve,
        mean_snr_bob: 10.0,
        mean_snr_eve: 10.0,
        bob_angle: FRAC_PI_3,
        eve_angle: FRAC_PI_4,
        eve_aoa: 0.3,
        secrecy_rate: 1.0,
    }
}

fn h_for(s: &Scenario, seed: u64) -> Vec<wiretap_core::Complex64> {
    sample_main_channel(s, &mut RngSpec::new(seed, 0).rng(Lane::MainChannel, 0))
        .unwrap()
        .h
}

// With no LOS at Eve the Gamma law of her SNR is exact, so analytic and
// simulated outage may differ only by sampling noise.
#[test]
fn rayleigh_eve_analytic_outage_is_exact() {
    for (n_alice, n_eve) in [(2, 1), (3, 2), (4, 3)] {
        let s = scenario(n_alice, n_eve, 0.0);
        let h = h_for(&s, n_alice as u64);
        let g_o = eve_los(&s).unwrap();
        let family = build_family(&h, &g_o).unwrap();
        for tau in [0.0, 0.4, 0.9] {
            let w = family.at(tau).unwrap();
            let analytic = outage_for_beamformer(&s, &h, &g_o, &w).unwrap();
            let e = empirical_outage(&s, &h, &w, 400_000, RngSpec::new(5, n_alice as u64)).unwrap();
            let se = (analytic * (1.0 - analytic) / 400_000.0).sqrt();
            assert!(
                (analytic - e.value).abs() <= 4.5 * se + 1e-12,
                "N_A={n_alice} N_E={n_eve} τ={tau}: {analytic} vs {}",
                e.value
            );
        }
    }
}

#[test]
fn strong_eve_los_makes_zero_forcing_secure() {
    let s = scenario(4, 2, 1e9);
    let h = h_for(&s, 1);
    let g_o = eve_los(&s).unwrap();
    let family = build_family(&h, &g_o).unwrap();
    let zf = outage_for_beamformer(&s, &h, &g_o, &family.at(1.0).unwrap()).unwrap();
    let aligned = outage_for_beamformer(&s, &h, &g_o, &family.at(0.0).unwrap()).unwrap();
    assert!(zf < 1e-6, "{zf}");
    assert!(aligned > 0.99, "{aligned}");
    let e = empirical_outage(
        &s,
        &h,
        &family.at(1.0).unwrap(),
        100_000,
        RngSpec::new(2, 2),
    )
    .unwrap();
    assert_eq!(e.value, 0.0);
}

#[test]
fn single_h_optimum_agrees_with_its_sweep() {
    let s = scenario(4, 2, db_to_linear(5.0));
    let h = h_for(&s, 11);
    let curve = sweep_tau(&s, &h, 1001).unwrap();
    let best = optimal_tau(&s, &h, 1001, 60).unwrap();
    assert!(best.outage <= curve.min_outage);
    assert!((best.tau - curve.argmin_tau).abs() <= 2e-3);
    assert!(curve.min_outage - best.outage < 1e-4);
}

#[test]
fn averaged_curve_matches_joint_simulation() {
    let s = scenario(3, 2, db_to_linear(5.0));
    let spec = RngSpec::new(77, 3);
    let avg = average_curve_over_main_channel(&s, 20_000, 3, spec).unwrap();
    for (k, &tau) in avg.curve.taus.iter().enumerate() {
        let e = empirical_average_outage(&s, tau, 200_000, spec.with_stream(4)).unwrap();
        let tol = (3.0 * e.std_error).max(0.015) + 3.0 * avg.curve.std_error.as_ref().unwrap()[k];
        assert!((e.value - avg.curve.outage[k]).abs() <= tol, "τ={tau}");
    }
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let s = scenario(4, 2, db_to_linear(5.0));
    let spec = RngSpec::new(123, 0);
    let h = h_for(&s, 9);
    let w = build_family(&h, &eve_los(&s).unwrap())
        .unwrap()
        .at(0.7)
        .unwrap();
    let run = || {
        (
            average_curve_over_main_channel(&s, 3000, 101, spec).unwrap(),
            empirical_outage(&s, &h, &w, 50_000, spec).unwrap(),
            empirical_average_outage(&s, 0.8, 20_000, spec).unwrap(),
        )
    };
    let pool = |n| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .unwrap()
    };
    let one = pool(1).install(run);
    let four = pool(4).install(run);
    assert_eq!(one, four);
    let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&one.0.curve.outage), bits(&four.0.curve.outage));
}

#[test]
fn geometry_pipeline() {
    let bob = CartesianPosition::new(1225.0, 707.0).unwrap();
    let eve = CartesianPosition::new(1000.0, -1000.0).unwrap();
    let o = CartesianPosition::ORIGIN;
    let budget =
        LinkBudget::calibrated(4.0, bob.distance_to(&o), 10.0, eve.distance_to(&o), 10.0).unwrap();
    let geometry = LinkGeometry { budget, bob, eve };
    let base = scenario(4, 2, db_to_linear(5.0));
    let truth = geometry.apply(&base).unwrap();
    assert!((truth.eve_angle - 7.0 * PI / 4.0).abs() < 1e-12);
    assert!((truth.mean_snr_bob - 10.0).abs() < 1e-9 && (truth.mean_snr_eve - 10.0).abs() < 1e-9);

    // Moving Eve closer raises her mean SNR by the path-loss law.
    let closer = geometry
        .with_eve_at(&truth, CartesianPosition::new(500.0, -500.0).unwrap())
        .unwrap();
    assert!((closer.mean_snr_eve / truth.mean_snr_eve - 16.0).abs() < 1e-9);
    assert_eq!(closer.eve_angle, truth.eve_angle);

    let settings = AveragingSettings {
        grid_size: 51,
        n_location_samples: 200,
        n_channel_realizations: 10,
        fix_main_channel: false,
        evaluate_at_true_location: false,
    };
    let exact = averaged_outage_curve(
        &base,
        &geometry,
        &default_anchors(eve, 0.0).unwrap(),
        &settings,
        RngSpec::new(4, 4),
    )
    .unwrap();
    let noisy = averaged_outage_curve(
        &base,
        &geometry,
        &default_anchors(eve, 400.0).unwrap(),
        &settings,
        RngSpec::new(4, 4),
    )
    .unwrap();
    assert_eq!(exact.covariance.sigma_x, 0.0);
    assert!(noisy.curve.min_outage > exact.curve.min_outage);
    assert!(noisy.curve.valley_count() >= 1);

    let h = h_for(&truth, 3);
    let family = Beamformer::family_or_mrt(&h, &eve_los(&truth).unwrap()).unwrap();
    assert!(matches!(family, Beamformer::Family(_)));
}
