use std::f64::consts::PI;

use hybridnet_core::channel::cascade_moments_bf;
use hybridnet_core::coverage::{coverage_probability, NonOutageConfig};
use hybridnet_core::interference::{
    interference_cdf, laplace_interference, mean_interference, mean_interference_direct,
    mean_interference_direct_unconditional,
};
use hybridnet_core::model::{
    db_to_linear, nearest_distance_ccdf, path_loss_direct, path_loss_irs_ue, regime_probabilities,
    Regime, LAMBDA_0,
};
use hybridnet_core::signal::{irs_power_aggregates, signal_gamma_spec};
use hybridnet_core::SystemParams;
use hybridnet_sim::*;

fn defaults() -> SystemParams {
    SystemParams::default()
}

#[test]
fn poisson_counts() {
    // λ_I π D2² = 100
    let p = defaults().with(|r| r.lambda_i = 100.0 / (PI * 2500.0)).unwrap();
    let counts: Vec<f64> = (0..1000)
        .map(|k| {
            let mut rng = stream_rng(1, k);
            sample_topology(&p, 5000.0, &mut rng).unwrap().irs_points.len() as f64
        })
        .collect();
    let est = SimEstimate::from_values(&counts);
    assert!((est.value - 100.0).abs() < 3.0 * 10.0 / (1000f64).sqrt(), "{est:?}");
}

#[test]
fn topology_invariants() {
    let p = defaults().with(|r| r.lambda_i = 200.0 * LAMBDA_0).unwrap();
    for k in 0..200 {
        let mut rng = stream_rng(2, k);
        let t = sample_topology(&p, 5000.0, &mut rng).unwrap();
        assert!(t.active_mask[t.serving_bs]);
        let l0 = t.l0();
        assert!(t.bs_points.iter().all(|b| b[0].hypot(b[1]) >= l0));
        assert!(t.irs_points.iter().all(|q| q[0].hypot(q[1]) <= p.d2()));
        if let Some(j) = t.assoc_irs {
            let q = t.irs_points[j];
            assert!(q[0].hypot(q[1]) <= p.d1());
            assert_eq!(q[0].hypot(q[1]), t.d0());
        }
    }
}

#[test]
fn disk_radius_is_validated() {
    let mut rng = stream_rng(0, 0);
    assert!(sample_topology(&defaults(), 1000.0, &mut rng).is_err());
    assert!(min_disk_radius(&defaults()) > 1500.0);
}

#[test]
fn serving_distance_distribution() {
    let p = defaults();
    let l0: Vec<f64> = (0..10_000)
        .map(|k| {
            let mut rng = stream_rng(3, k);
            sample_topology(&p, 2000.0, &mut rng).unwrap().l0()
        })
        .collect();
    let ks = ks_distance(&sorted(&l0), |x| 1.0 - nearest_distance_ccdf(x, p.lambda_b()));
    assert!(ks < 0.02, "KS {ks}");
}

#[test]
fn rayleigh_only_signal_mean() {
    let p = defaults().with(|r| r.lambda_i = 0.0).unwrap();
    let mut rng = stream_rng(4, 0);
    let t = sample_conditioned_topology(50.0, f64::INFINITY, &p, 5000.0, false, &mut rng).unwrap();
    let g = TopologyGains::new(&t, &p, Geometry::Exact);
    let s: Vec<f64> = (0..100_000).map(|_| g.draw(&mut rng).s).collect();
    let est = SimEstimate::from_values(&s);
    let gd = path_loss_direct(50.0, &p);
    assert!((est.value - gd).abs() < 3.0 * est.std_err, "{est:?} vs {gd}");
}

#[test]
fn single_element_cascade_mean() {
    let p = defaults().with(|r| {
        r.n = 1;
        r.lambda_i = 1e-12;
    })
    .unwrap();
    let (l0, d0) = (50.0, 5.0);
    let s = conditional_signal_samples(l0, d0, &p, Geometry::FarField, 200_000, 5).unwrap();
    let est = SimEstimate::from_values(&s);
    let want = cascade_moments_bf(l0, d0, &p).unwrap().m1_h1sq;
    assert!((est.value - want).abs() < 3.0 * est.std_err, "{est:?} vs {want}");
}

#[test]
fn beamformed_signal_matches_matched_gamma() {
    let p = defaults();
    let spec = signal_gamma_spec(50.0, 5.0, &p).unwrap();
    let s = conditional_signal_samples(50.0, 5.0, &p, Geometry::Exact, 10_000, 6).unwrap();
    let ks = ks_distance(&sorted(&s), |x| spec.cdf(x));
    assert!(ks < 0.03, "KS {ks}");
}

#[test]
fn irs_power_aggregate_matches_field_average() {
    // E_I1(0) = E Σ_j g_r(d_j) over the IRS field within D2
    let p = defaults();
    let v: Vec<f64> = (0..10_000)
        .map(|k| {
            let mut rng = stream_rng(7, k);
            let t = sample_conditioned_topology(50.0, 0.0, &p, 5000.0, false, &mut rng).unwrap();
            t.irs_points[1..]
                .iter()
                .map(|q| path_loss_irs_ue(q[0].hypot(q[1]), &p))
                .sum()
        })
        .collect();
    let est = SimEstimate::from_values(&v);
    let want = irs_power_aggregates(0.0, &p).unwrap().e_i1;
    assert!((est.value - want).abs() < 3.0 * est.std_err, "{est:?} vs {want}");
}

#[test]
fn interference_laplace_transform() {
    let p = defaults();
    let (l0, d0) = (50.0, 30.0);
    let cfg = SimConfig::desk();
    let i = conditional_interference_samples(l0, d0, &p, &cfg, 10_000, 8).unwrap();
    let mean = i.iter().sum::<f64>() / i.len() as f64;
    let s = 1.0 / mean;
    let e: Vec<f64> = i.iter().map(|x| (-s * x).exp()).collect();
    let est = SimEstimate::from_values(&e);
    let want = laplace_interference(s, l0, d0, &p).unwrap();
    // the disk drops the far field, which the analysis keeps
    let tail = 1.0 - (-s * mean_interference_direct(cfg.disk_radius, &p)).exp();
    assert!(
        (est.value - want).abs() < 3.0 * est.std_err + tail,
        "{est:?} vs {want} (tail {tail:e})"
    );
}

#[test]
fn no_irs_interference_median() {
    let p = defaults();
    let i = sorted(
        &conditional_interference_samples(50.0, f64::INFINITY, &p, &SimConfig::desk(), 10_000, 9)
            .unwrap(),
    );
    let median = quantile(&i, 0.5);
    let opts = Default::default();
    let cdf = |x: f64| interference_cdf(x, 50.0, 1e9, &p, &opts).unwrap();
    assert!((cdf(0.95 * median) - 0.5) * (cdf(1.05 * median) - 0.5) < 0.0);
}

#[test]
fn coverage_threshold_limit() {
    let p = defaults().with(|r| r.r_bar = 1e-9).unwrap();
    let est = estimate_coverage(&p, &SimConfig::smoke(), 10).unwrap();
    assert!(est.p_cov.value > 0.999);
}

#[test]
fn coverage_agrees_with_analysis_without_irs() {
    let p = defaults().with(|r| r.lambda_i = 0.0).unwrap();
    let est = estimate_coverage(&p, &SimConfig::desk(), 11).unwrap();
    let a = coverage_probability(&p, &NonOutageConfig::default()).unwrap().p_cov;
    let tol = 0.015f64.max(3.0 * est.p_cov.std_err);
    assert!((est.p_cov.value - a).abs() < tol, "{:?} vs {a}", est.p_cov);
}

#[test]
fn standard_error_rate() {
    let p = defaults().with(|r| r.lambda_i = 0.0).unwrap();
    let cfg = SimConfig {
        n_fading: 20,
        ..SimConfig::smoke()
    };
    let a = run_monte_carlo(&p, &SimConfig { n_topologies: 400, ..cfg }, 12).unwrap();
    let b = run_monte_carlo(&p, &SimConfig { n_topologies: 800, ..cfg }, 12).unwrap();
    let ratio = b.coverage(1.0).std_err / a.coverage(1.0).std_err;
    assert!((0.6..=0.85).contains(&ratio), "{ratio}");
}

#[test]
fn regime_frequencies_match() {
    let p = defaults().with(|r| r.lambda_i = 100.0 * LAMBDA_0).unwrap();
    let cfg = SimConfig {
        n_topologies: 4000,
        n_fading: 1,
        ..SimConfig::smoke()
    };
    let f = run_monte_carlo(&p, &cfg, 13).unwrap().regime_frequencies();
    let probs = regime_probabilities(&p);
    for (got, want) in f.iter().zip([probs.p_bf, probs.p_sc, probs.p_wo]) {
        let sigma = (want * (1.0 - want) / 4000.0).sqrt();
        assert!((got - want).abs() < 3.0 * sigma, "{got} vs {want}");
    }
}

#[test]
fn deterministic_across_thread_counts() {
    let p = defaults().with(|r| r.lambda_i = 50.0 * LAMBDA_0).unwrap();
    let cfg = SimConfig::smoke();
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let mut buf = Vec::new();
            run_monte_carlo(&p, &cfg, 14).unwrap().write_samples_csv(&mut buf).unwrap();
            buf
        })
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one, run(3));
}

#[test]
fn geometry_toggle_audit() {
    let p = defaults();
    let cfg = SimConfig {
        n_topologies: 300,
        n_fading: 20,
        ..SimConfig::desk()
    };
    let exact = run_monte_carlo(&p, &cfg, 15).unwrap().mean_interference();
    let far = run_monte_carlo(&p, &SimConfig { geometry: Geometry::FarField, ..cfg }, 15)
        .unwrap()
        .mean_interference();
    let analytic = mean_interference(&p).unwrap();
    let truncated = mean_interference_direct(cfg.disk_radius, &p)
        / mean_interference_direct_unconditional(&p).unwrap();
    eprintln!(
        "mean interference: exact {:.4e}, r≈l {:.4e}, analytic {analytic:.4e}; far-field share beyond disk {truncated:.2e}",
        exact.value, far.value
    );
    assert!(exact.value.is_finite() && far.value.is_finite());
}

#[test]
fn coverage_curve_reuses_draws() {
    let p = defaults().with(|r| r.lambda_i = 0.0).unwrap();
    let run = run_monte_carlo(&p, &SimConfig::smoke(), 16).unwrap();
    let mut prev = 1.0;
    for db in -10..=20 {
        let c = run.coverage(db_to_linear(db as f64)).value;
        assert!(c <= prev);
        prev = c;
    }
    assert!(run.runs.iter().all(|r| r.regime == Regime::NoIrs));
}
