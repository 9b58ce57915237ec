//! Conditional distribution of the received signal power S, approximated by
//! a moment-matched Gamma law in each IRS regime, and its unconditional
//! mean.

use std::f64::consts::PI;

use crate::channel::{cascade_moments_bf, gain_coefficients};
use crate::error::{Error, Result};
use crate::model::{
    path_loss_direct, path_loss_irs_ue, pdf_d0, regime_probabilities, Regime, SystemParams,
};
use crate::specfun::{exp_integral, integrate_adaptive, QuadOptions};

/// Aggregate IRS–UE power statistics over the IRSs in the annulus (d₀, D2].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IrsAggregates {
    /// E Σ g_r(d_j)
    pub e_i1: f64,
    /// E Σ g_r(d_j)²
    pub e_i2: f64,
    /// E (Σ g_r(d_j))²
    pub e_i3: f64,
}

pub fn irs_power_aggregates(d0: f64, params: &SystemParams) -> Result<IrsAggregates> {
    if !(d0 >= 0.0 && d0 <= params.d2()) {
        return Err(Error::domain(
            "irs_power_aggregates",
            format!("d0 = {d0} outside [0, D2 = {}]", params.d2()),
        ));
    }
    let a = params.alpha();
    let h2 = params.h_i() * params.h_i();
    let inner = d0 * d0 + h2;
    let outer = params.d2() * params.d2() + h2;
    let lam = params.lambda_i();
    let beta = params.beta();
    let e_i1 = 2.0 * PI * lam * beta / (a - 2.0)
        * (inner.powf(1.0 - a / 2.0) - outer.powf(1.0 - a / 2.0));
    let e_i2 =
        PI * lam * beta * beta / (a - 1.0) * (inner.powf(1.0 - a) - outer.powf(1.0 - a));
    Ok(IrsAggregates {
        e_i1,
        e_i2,
        e_i3: e_i1 * e_i1 + e_i2,
    })
}

fn e_i1(d0: f64, params: &SystemParams) -> f64 {
    irs_power_aggregates(d0.min(params.d2()), params)
        .expect("clamped into domain")
        .e_i1
}

/// E{S}/g_d(l₀) in the beamformed regime.
pub fn kappa_bf(d0: f64, params: &SystemParams) -> f64 {
    let n = params.n() as f64;
    let gr = path_loss_irs_ue(d0, params);
    let (g_bf, _) = gain_coefficients(params.n());
    1.0 + g_bf * gr + n * PI / 4.0 * (PI * gr).sqrt() + n * e_i1(d0, params)
}

/// Mean gain of the IRS-scattered paths relative to the direct path, for an
/// IRS at d₀ that scatters (rather than beamforms).
pub fn kappa_sc(d0: f64, params: &SystemParams) -> f64 {
    let n = params.n() as f64;
    1.0 + n * path_loss_irs_ue(d0, params) + n * e_i1(d0, params)
}

/// First two moments of S conditioned on (l₀, d₀).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalMoments {
    pub mean: f64,
    pub second: f64,
}

impl ConditionalMoments {
    pub fn variance(&self) -> f64 {
        self.second - self.mean * self.mean
    }
}

/// Gamma(k, θ) law of S conditioned on (l₀, d₀).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaSpec {
    pub k: f64,
    pub theta: f64,
    pub regime: Regime,
}

impl GammaSpec {
    pub fn mean(&self) -> f64 {
        self.k * self.theta
    }

    pub fn variance(&self) -> f64 {
        self.k * self.theta * self.theta
    }

    /// P{S ≤ x}.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let q = crate::specfun::regularized_upper_gamma(self.k, x / self.theta)
            .expect("k > 0 and x > 0");
        1.0 - q
    }
}

pub fn signal_moments(l0: f64, d0: f64, params: &SystemParams) -> Result<ConditionalMoments> {
    let gd = path_loss_direct(l0, params);
    let n = params.n() as f64;
    match Regime::of(d0, params) {
        Regime::Beamformed => {
            let c = cascade_moments_bf(l0, d0, params)?;
            Ok(ConditionalMoments {
                mean: c.m1_h1sq + c.m1_h2sq,
                second: c.m2_h1sq + c.m2_h2sq + 4.0 * c.m1_h1sq * c.m1_h2sq,
            })
        }
        Regime::ScatteredOnly => {
            let agg = irs_power_aggregates(params.d1(), params)?;
            Ok(ConditionalMoments {
                mean: gd * (1.0 + n * agg.e_i1),
                second: 2.0 * gd * gd * (1.0 + 2.0 * n * agg.e_i1 + n * n * agg.e_i3),
            })
        }
        Regime::NoIrs => Ok(ConditionalMoments {
            mean: gd,
            second: 2.0 * gd * gd,
        }),
    }
}

pub fn signal_gamma_spec(l0: f64, d0: f64, params: &SystemParams) -> Result<GammaSpec> {
    if !(l0 >= 0.0 && d0 >= 0.0) {
        return Err(Error::domain(
            "signal_gamma_spec",
            format!("distances must be nonnegative, got l0 = {l0}, d0 = {d0}"),
        ));
    }
    let regime = Regime::of(d0, params);
    if regime == Regime::NoIrs {
        return Ok(GammaSpec {
            k: 1.0,
            theta: path_loss_direct(l0, params),
            regime,
        });
    }
    let m = signal_moments(l0, d0, params)?;
    let variance = m.variance();
    if !(variance > 0.0) {
        return Err(Error::NegativeVariance { l0, d0, variance });
    }
    Ok(GammaSpec {
        k: m.mean * m.mean / variance,
        theta: variance / m.mean,
        regime,
    })
}

/// E{g_d(l₀)} over the serving distance.
pub fn mean_direct_gain(params: &SystemParams) -> Result<f64> {
    let lam = params.lambda_b();
    let hb = params.h_b();
    let a = params.alpha();
    let x = lam * PI * hb * hb;
    Ok(params.beta() * lam * PI * hb.powf(2.0 - a) * x.exp() * exp_integral(a / 2.0, x)?)
}

/// Unconditional mean signal power E{S}.
pub fn mean_signal_power(params: &SystemParams) -> Result<f64> {
    let e_b0 = mean_direct_gain(params)?;
    let probs = regime_probabilities(params);
    let n = params.n() as f64;
    let opts = QuadOptions::default().with_tolerances(0.0, 1e-10);
    let bf = if params.lambda_i() > 0.0 {
        integrate_adaptive(
            |d0| kappa_bf(d0, params) * pdf_d0(d0, params),
            0.0,
            params.d1(),
            &[],
            &opts,
        )
        .map_err(|e| e.in_context("mean signal power, beamformed part"))?
        .value
    } else {
        0.0
    };
    let sc = probs.p_sc * (1.0 + n * e_i1(params.d1(), params));
    Ok(e_b0 * (bf + sc + probs.p_wo))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{linear_to_db, pdf_l0, RawParams, LAMBDA_0};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(edit: impl FnOnce(&mut RawParams)) -> SystemParams {
        SystemParams::default().with(edit).unwrap()
    }

    #[test]
    fn aggregates_basic_properties() {
        let p = SystemParams::default();
        let at_edge = irs_power_aggregates(p.d2(), &p).unwrap();
        assert_eq!(at_edge.e_i1, 0.0);
        assert_eq!(at_edge.e_i2, 0.0);
        let mut prev = f64::INFINITY;
        for i in 0..=50 {
            let a = irs_power_aggregates(i as f64, &p).unwrap();
            assert!(a.e_i1 < prev);
            assert!((a.e_i3 - a.e_i1 * a.e_i1 - a.e_i2).abs() <= 1e-15 * a.e_i3);
            prev = a.e_i1;
        }
        assert!(irs_power_aggregates(p.d2() + 1e-9, &p).is_err());
    }

    #[test]
    fn aggregates_match_sampled_irs_fields() {
        // IRSs of density λ_I in the disk of radius D2 around the UE; sum
        // g_r over those with d > 0 (the whole disk).
        let p = params(|r| r.lambda_i = 200.0 * LAMBDA_0);
        let agg = irs_power_aggregates(0.0, &p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mean_count = p.lambda_i() * PI * p.d2() * p.d2();
        let pois = rand_distr::Poisson::new(mean_count).unwrap();
        let (mut s1, mut s2, mut s11) = (0.0, 0.0, 0.0);
        let topologies = 10_000;
        let mut sums = Vec::with_capacity(topologies);
        for _ in 0..topologies {
            use rand::Rng;
            use rand_distr::Distribution;
            let count: f64 = pois.sample(&mut rng);
            let mut x = 0.0;
            let mut x2 = 0.0;
            for _ in 0..count as usize {
                let d = p.d2() * rng.random::<f64>().sqrt();
                let g = path_loss_irs_ue(d, &p);
                x += g;
                x2 += g * g;
            }
            s1 += x;
            s2 += x2;
            s11 += x * x;
            sums.push(x);
        }
        let n = topologies as f64;
        let m1 = s1 / n;
        let var1 = sums.iter().map(|x| (x - m1).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((m1 - agg.e_i1).abs() < 3.0 * (var1 / n).sqrt(), "{m1} vs {}", agg.e_i1);
        // E Σg² and E (Σg)² only loosely (heavy tails near d = 0)
        assert!((s2 / n / agg.e_i2 - 1.0).abs() < 0.1);
        assert!((s11 / n / agg.e_i3 - 1.0).abs() < 0.1);
    }

    #[test]
    fn kappa_values() {
        let p = SystemParams::default();
        for d0 in [0.0, 1.0, 10.0, 25.0] {
            assert!(kappa_bf(d0, &p) > kappa_sc(d0, &p));
            assert!(kappa_sc(d0, &p) >= 1.0);
        }
        let k = kappa_bf(1.0, &p);
        let gr = path_loss_irs_ue(1.0, &p);
        let dom = gain_coefficients(2000).0 * gr / k;
        assert!((dom - 0.856_827_214_107_671_7).abs() < 1e-12, "{dom}");
        // N = 0 degenerates to the direct link only
        let mut raw = RawParams::default();
        raw.n = 0;
        let p0 = SystemParams::from_raw_unchecked(raw);
        assert_eq!(kappa_bf(3.0, &p0), 1.0);
        assert_eq!(kappa_sc(3.0, &p0), 1.0);
    }

    #[test]
    fn gamma_spec_regimes() {
        let p = SystemParams::default();
        let g = signal_gamma_spec(50.0, 60.0, &p).unwrap();
        assert_eq!(g.regime, Regime::NoIrs);
        assert_eq!(g.k, 1.0);
        assert_eq!(g.theta, path_loss_direct(50.0, &p));
        assert_eq!(signal_gamma_spec(50.0, p.d1(), &p).unwrap().regime, Regime::Beamformed);
        assert_eq!(signal_gamma_spec(50.0, p.d2(), &p).unwrap().regime, Regime::ScatteredOnly);

        let sparse = params(|r| r.lambda_i = 1e-14);
        let g = signal_gamma_spec(50.0, 30.0, &sparse).unwrap();
        assert!((g.k - 1.0).abs() < 1e-6);
        assert!((g.theta / path_loss_direct(50.0, &p) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn hardening_and_mean_scaling() {
        // k_bf(2N)/k_bf(N) at l₀ = 50, d₀ = 1, from exact Rayleigh/Gaussian
        // moments evaluated independently. The direct-path fading variance
        // still dominates here, so the ratio sits above the asymptotic 2.
        let p = SystemParams::default();
        let k = |n| signal_gamma_spec(50.0, 1.0, &p.with(|r| r.n = n).unwrap()).unwrap().k;
        for (n, k_n, ratio) in [
            (500, 14.309_356_399_475_474, 3.014_600_545_776_389),
            (1000, 43.136_993_611_567_62, 3.252_767_691_134_437),
            (2000, 140.314_619_112_379_77, 3.250_403_357_505_032),
            (4000, 456.079_109_069_919, 3.058_714_150_350_224),
        ] {
            assert!((k(n) / k_n - 1.0).abs() < 1e-9, "N={n}");
            assert!((k(2 * n) / k(n) / ratio - 1.0).abs() < 1e-9, "N={n}");
        }
        // the ratio drifts towards 2 once N g_r(d₀) is large
        assert!(k(64_000) / k(32_000) < k(8000) / k(4000));

        let mean = |n| signal_moments(50.0, 1.0, &p.with(|r| r.n = n).unwrap()).unwrap().mean;
        let r = mean(8000) / mean(4000);
        assert!((r - 3.847_053_290_285_339_6).abs() < 1e-9, "{r}");
        let ksc = |n| signal_gamma_spec(50.0, 30.0, &p.with(|r| r.n = n).unwrap()).unwrap().k;
        assert!((ksc(2000) / ksc(8000) - 1.0).abs() < 0.1);
    }

    #[test]
    fn mean_direct_gain_matches_quadrature() {
        for lam in [10.0, 20.0, 40.0] {
            let p = params(|r| r.lambda_b = lam * LAMBDA_0);
            let closed = mean_direct_gain(&p).unwrap();
            let opts = QuadOptions::default().with_tolerances(0.0, 1e-12);
            let direct = integrate_adaptive(
                |l| path_loss_direct(l, &p) * pdf_l0(l, &p),
                0.0,
                f64::INFINITY,
                &[100.0],
                &opts,
            )
            .unwrap()
            .value;
            assert!((closed / direct - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn mean_signal_power_limits_and_gain() {
        let no_irs = params(|r| r.lambda_i = 0.0);
        assert_eq!(
            mean_signal_power(&no_irs).unwrap(),
            mean_direct_gain(&no_irs).unwrap()
        );
        let at = |lb: f64| {
            mean_signal_power(&no_irs.with(|r| r.lambda_b = lb * LAMBDA_0).unwrap()).unwrap()
        };
        let gain = linear_to_db(at(40.0) / at(20.0));
        assert!((gain - 2.1).abs() < 0.2, "{gain}");
        let mut prev = 0.0;
        for li in [0.0, 1.0, 2.0, 5.0, 10.0, 20.0] {
            let v = mean_signal_power(&params(|r| r.lambda_i = li * LAMBDA_0)).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn matched_gamma_reproduces_moments(
            l0 in 1.0f64..500.0,
            d0 in 0.0f64..60.0,
            n in 1u32..8000,
            li in 0.0f64..50.0,
        ) {
            let p = params(|r| { r.n = n; r.lambda_i = li * LAMBDA_0; });
            let g = signal_gamma_spec(l0, d0, &p).unwrap();
            let m = signal_moments(l0, d0, &p).unwrap();
            prop_assert!((g.mean() / m.mean - 1.0).abs() < 1e-12);
            if g.regime != Regime::NoIrs {
                prop_assert!((g.variance() / m.variance() - 1.0).abs() < 1e-12);
            }
        }
    }
}
