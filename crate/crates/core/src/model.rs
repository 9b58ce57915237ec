//! Network parameters, path-loss laws, link-distance laws, regime
//! probabilities and the deployment cost model.

use std::f64::consts::PI;

use crate::config::KeyValues;
use crate::error::{Error, Result};

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Reference BS/IRS density λ₀ in m⁻². One BS per 252 m cell radius.
pub const LAMBDA_0: f64 = 5e-6;

/// Converts a power ratio in dB to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear power ratio to dB.
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Unvalidated parameter set. Every field is public so that callers can
/// override individual values before calling [`RawParams::validate`].
///
/// `Default` gives the reference configuration: λ_B = 10λ₀, λ_I = 10λ₀,
/// p = 0.5, N = 2000, H_B = 20 m, H_I = 1 m, α = 3, f_c = 2 GHz,
/// D1 = 25 m, D2 = 50 m, W = −147 dB, R̄ = 1 bps/Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct RawParams {
    pub lambda_b: f64,
    pub lambda_i: f64,
    pub p: f64,
    pub n: u32,
    pub h_b: f64,
    pub h_i: f64,
    pub alpha: f64,
    pub f_c: f64,
    pub d1: f64,
    pub d2: f64,
    /// Normalized noise power σ²/P₀, in dB.
    pub w_db: f64,
    /// Target rate in bps/Hz; the SINR threshold is 2^R̄ − 1.
    pub r_bar: f64,
}

impl Default for RawParams {
    fn default() -> Self {
        RawParams {
            lambda_b: 10.0 * LAMBDA_0,
            lambda_i: 10.0 * LAMBDA_0,
            p: 0.5,
            n: 2000,
            h_b: 20.0,
            h_i: 1.0,
            alpha: 3.0,
            f_c: 2e9,
            d1: 25.0,
            d2: 50.0,
            w_db: -147.0,
            r_bar: 1.0,
        }
    }
}

impl RawParams {
    /// Sets R̄ from an SINR threshold given in dB.
    pub fn set_threshold_db(&mut self, gamma_db: f64) {
        self.r_bar = (1.0 + db_to_linear(gamma_db)).log2();
    }

    /// Applies the parameter keys present in `kv`. Unknown keys are left for
    /// the caller; see [`RawParams::KEYS`].
    pub fn apply(&mut self, kv: &KeyValues) -> Result<()> {
        for (key, value, line) in kv.iter() {
            let parse = |v: &str| -> Result<f64> {
                crate::config::parse_quantity(v).map_err(|reason| Error::Config { line, reason })
            };
            match key {
                "lambda_B" => self.lambda_b = parse(value)?,
                "lambda_I" => self.lambda_i = parse(value)?,
                "p" => self.p = parse(value)?,
                "N" => {
                    let n = parse(value)?;
                    if n < 0.0 || n.fract() != 0.0 || n > u32::MAX as f64 {
                        return Err(Error::Config {
                            line,
                            reason: format!("N must be a nonnegative integer, got `{value}`"),
                        });
                    }
                    self.n = n as u32;
                }
                "H_B" => self.h_b = parse(value)?,
                "H_I" => self.h_i = parse(value)?,
                "alpha" => self.alpha = parse(value)?,
                "f_c" => self.f_c = parse(value)?,
                "D1" => self.d1 = parse(value)?,
                "D2" => self.d2 = parse(value)?,
                "W_dB" => self.w_db = parse(value)?,
                "R_bar" => self.r_bar = parse(value)?,
                "gamma_dB" => self.set_threshold_db(parse(value)?),
                _ => {}
            }
        }
        Ok(())
    }

    /// Parameter keys understood by [`RawParams::apply`].
    pub const KEYS: &'static [(&'static str, &'static str)] = &[
        ("lambda_B", "BS density in m^-2 (accepts `<x> lambda0`)"),
        ("lambda_I", "IRS density in m^-2 (accepts `<x> lambda0`)"),
        ("p", "loading factor in (0, 1]"),
        ("N", "reflecting elements per IRS"),
        ("H_B", "BS height in m (>= 1)"),
        ("H_I", "IRS height in m (>= 1)"),
        ("alpha", "path-loss exponent (> 2)"),
        ("f_c", "carrier frequency in Hz"),
        ("D1", "IRS association radius in m"),
        ("D2", "IRS interference radius in m (> D1)"),
        ("W_dB", "normalized noise power sigma^2/P0 in dB"),
        ("R_bar", "target rate in bps/Hz"),
        ("gamma_dB", "SINR threshold in dB (sets R_bar)"),
    ];

    pub fn validate(&self) -> Result<SystemParams> {
        let finite = |name: &'static str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(name, format!("must be finite, got {v}")))
            }
        };
        for (name, v) in [
            ("lambda_B", self.lambda_b),
            ("lambda_I", self.lambda_i),
            ("p", self.p),
            ("H_B", self.h_b),
            ("H_I", self.h_i),
            ("alpha", self.alpha),
            ("f_c", self.f_c),
            ("D1", self.d1),
            ("D2", self.d2),
            ("W_dB", self.w_db),
            ("R_bar", self.r_bar),
        ] {
            finite(name, v)?;
        }
        if self.lambda_b <= 0.0 {
            return Err(Error::invalid("lambda_B", "must be positive"));
        }
        if self.lambda_i < 0.0 {
            return Err(Error::invalid("lambda_I", "must be nonnegative"));
        }
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(Error::invalid("p", format!("must lie in (0, 1], got {}", self.p)));
        }
        if self.n < 1 {
            return Err(Error::invalid("N", "at least one element per IRS"));
        }
        if self.h_b < 1.0 {
            return Err(Error::invalid("H_B", "far-field model needs H_B >= 1 m"));
        }
        if self.h_i < 1.0 {
            return Err(Error::invalid("H_I", "far-field model needs H_I >= 1 m"));
        }
        if self.alpha <= 2.0 {
            return Err(Error::invalid(
                "alpha",
                format!(
                    "must be strictly greater than 2 (closed forms carry 1/(alpha-2)), got {}",
                    self.alpha
                ),
            ));
        }
        if self.f_c <= 0.0 {
            return Err(Error::invalid("f_c", "must be positive"));
        }
        if !(self.d1 > 0.0 && self.d1 < self.d2) {
            return Err(Error::invalid(
                "D1",
                format!("need 0 < D1 < D2, got D1 = {}, D2 = {}", self.d1, self.d2),
            ));
        }
        if self.r_bar <= 0.0 {
            return Err(Error::invalid("R_bar", "target rate must be positive"));
        }
        Ok(SystemParams::from_raw_unchecked(self.clone()))
    }
}

/// Validated, immutable system parameters with derived constants.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    raw: RawParams,
    beta: f64,
    w: f64,
    gamma_bar: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        RawParams::default()
            .validate()
            .expect("reference parameters are valid")
    }
}

impl SystemParams {
    pub(crate) fn from_raw_unchecked(raw: RawParams) -> Self {
        let beta = (4.0 * PI * raw.f_c / SPEED_OF_LIGHT).powi(-2);
        let w = db_to_linear(raw.w_db);
        let gamma_bar = raw.r_bar.exp2() - 1.0;
        SystemParams {
            raw,
            beta,
            w,
            gamma_bar,
        }
    }

    /// Copies the parameters, applies `edit`, and revalidates.
    pub fn with(&self, edit: impl FnOnce(&mut RawParams)) -> Result<SystemParams> {
        let mut raw = self.raw.clone();
        edit(&mut raw);
        raw.validate()
    }

    pub fn raw(&self) -> &RawParams {
        &self.raw
    }
    pub fn lambda_b(&self) -> f64 {
        self.raw.lambda_b
    }
    pub fn lambda_i(&self) -> f64 {
        self.raw.lambda_i
    }
    /// Density of co-channel (active) BSs, λ'_B = pλ_B.
    pub fn lambda_b_active(&self) -> f64 {
        self.raw.p * self.raw.lambda_b
    }
    pub fn p(&self) -> f64 {
        self.raw.p
    }
    pub fn n(&self) -> u32 {
        self.raw.n
    }
    pub fn h_b(&self) -> f64 {
        self.raw.h_b
    }
    pub fn h_i(&self) -> f64 {
        self.raw.h_i
    }
    pub fn alpha(&self) -> f64 {
        self.raw.alpha
    }
    pub fn f_c(&self) -> f64 {
        self.raw.f_c
    }
    pub fn d1(&self) -> f64 {
        self.raw.d1
    }
    pub fn d2(&self) -> f64 {
        self.raw.d2
    }
    /// Reference gain at 1 m, β = (4πf_c/c)⁻².
    pub fn beta(&self) -> f64 {
        self.beta
    }
    /// Linear normalized noise power σ²/P₀.
    pub fn w(&self) -> f64 {
        self.w
    }
    pub fn w_db(&self) -> f64 {
        self.raw.w_db
    }
    /// SINR threshold γ̄ = 2^R̄ − 1 (linear).
    pub fn gamma_bar(&self) -> f64 {
        self.gamma_bar
    }
    pub fn r_bar(&self) -> f64 {
        self.raw.r_bar
    }
    /// δ = 2/α.
    pub fn delta(&self) -> f64 {
        2.0 / self.raw.alpha
    }
}

/// Mean power gain of the direct BS–UE link at horizontal distance `l`.
pub fn path_loss_direct(l: f64, params: &SystemParams) -> f64 {
    params.beta() * (l * l + params.h_b() * params.h_b()).powf(-params.alpha() / 2.0)
}

/// Mean power gain of the IRS–UE link at horizontal distance `d`.
pub fn path_loss_irs_ue(d: f64, params: &SystemParams) -> f64 {
    params.beta() * (d * d + params.h_i() * params.h_i()).powf(-params.alpha() / 2.0)
}

/// Mean power gain of a BS–IRS link at horizontal distance `r`.
pub fn path_loss_bs_irs(r: f64, params: &SystemParams) -> f64 {
    let dh = params.h_b() - params.h_i();
    params.beta() * (r * r + dh * dh).powf(-params.alpha() / 2.0)
}

/// Nearest-neighbour distance density of a 2D PPP with density `lambda`.
pub fn nearest_distance_pdf(x: f64, lambda: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    2.0 * PI * lambda * x * (-lambda * PI * x * x).exp()
}

/// P{nearest point farther than x}.
pub fn nearest_distance_ccdf(x: f64, lambda: f64) -> f64 {
    (-lambda * PI * x * x).exp()
}

/// Quantile of the nearest-neighbour distance.
pub fn nearest_distance_quantile(q: f64, lambda: f64) -> f64 {
    (-(1.0 - q).ln() / (PI * lambda)).sqrt()
}

/// Density of the distance from the typical UE to its serving BS.
pub fn pdf_l0(l0: f64, params: &SystemParams) -> f64 {
    nearest_distance_pdf(l0, params.lambda_b())
}

/// Density of the distance from the typical UE to its nearest IRS.
pub fn pdf_d0(d0: f64, params: &SystemParams) -> f64 {
    nearest_distance_pdf(d0, params.lambda_i())
}

/// Which IRS service the typical UE receives, decided by d₀.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// d₀ ≤ D1: nearest IRS beamforms towards the UE.
    Beamformed,
    /// D1 < d₀ ≤ D2: IRSs only scatter.
    ScatteredOnly,
    /// d₀ > D2: no IRS close enough to matter.
    NoIrs,
}

impl Regime {
    pub fn of(d0: f64, params: &SystemParams) -> Regime {
        if d0 <= params.d1() {
            Regime::Beamformed
        } else if d0 <= params.d2() {
            Regime::ScatteredOnly
        } else {
            Regime::NoIrs
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Regime::Beamformed => "bf",
            Regime::ScatteredOnly => "sc",
            Regime::NoIrs => "wo",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeProbabilities {
    pub p_bf: f64,
    pub p_sc: f64,
    pub p_wo: f64,
}

pub fn regime_probabilities(params: &SystemParams) -> RegimeProbabilities {
    let lam = params.lambda_i();
    let e1 = (-lam * PI * params.d1() * params.d1()).exp();
    let e2 = (-lam * PI * params.d2() * params.d2()).exp();
    RegimeProbabilities {
        // -expm1 keeps P_bf accurate for sparse IRSs.
        p_bf: -(-lam * PI * params.d1() * params.d1()).exp_m1(),
        p_sc: e1 - e2,
        p_wo: e2,
    }
}

/// Per-unit deployment costs: a BS costs `c0`, an IRS costs `c0 / k_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostModel {
    pub c0: f64,
    pub k_n: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel { c0: 1.0, k_n: 5.0 }
    }
}

/// Densities realizing a cost budget at a given IRS/BS ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deployment {
    pub lambda_b: f64,
    pub lambda_i: f64,
    pub zeta: f64,
    pub cost: f64,
}

impl CostModel {
    pub fn new(c0: f64, k_n: f64) -> Result<Self> {
        if !(c0 > 0.0 && c0.is_finite()) {
            return Err(Error::invalid("c0", "BS unit cost must be positive"));
        }
        if !(k_n > 0.0) {
            return Err(Error::invalid("K_N", "BS/IRS cost ratio must be positive"));
        }
        Ok(CostModel { c0, k_n })
    }

    /// Total cost per m², C = λ_B c₀ (1 + ζ/K_N).
    pub fn total_cost(&self, lambda_b: f64, zeta: f64) -> f64 {
        lambda_b * self.c0 * (1.0 + zeta / self.k_n)
    }

    pub fn cost_to_density(&self, cost: f64, zeta: f64) -> Result<Deployment> {
        if !(cost > 0.0) {
            return Err(Error::invalid("C", "total cost must be positive"));
        }
        if !(zeta >= 0.0) {
            return Err(Error::invalid("zeta", "density ratio must be nonnegative"));
        }
        let lambda_b = cost / (self.c0 * (1.0 + zeta / self.k_n));
        Ok(Deployment {
            lambda_b,
            lambda_i: zeta * lambda_b,
            zeta,
            cost,
        })
    }

    pub fn apply(&mut self, kv: &KeyValues) -> Result<()> {
        for (key, value, line) in kv.iter() {
            let v = || {
                crate::config::parse_quantity(value).map_err(|reason| Error::Config { line, reason })
            };
            match key {
                "c0" => self.c0 = v()?,
                "K_N" => self.k_n = v()?,
                _ => {}
            }
        }
        CostModel::new(self.c0, self.k_n).map(|_| ())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::quad::{integrate_adaptive, QuadOptions};
    use proptest::prelude::*;

    fn params(edit: impl FnOnce(&mut RawParams)) -> SystemParams {
        let mut raw = RawParams::default();
        edit(&mut raw);
        raw.validate().unwrap()
    }

    #[test]
    fn beta_at_two_gigahertz() {
        let p = SystemParams::default();
        let expected = (SPEED_OF_LIGHT / (4.0 * PI * 2e9)).powi(2);
        assert!((p.beta() - expected).abs() < 1e-18);
        assert!((p.beta() - 1.4228584142858626e-4).abs() < 1e-15);
        assert!((linear_to_db(p.beta()) + 38.468383135).abs() < 1e-8);
    }

    #[test]
    fn beta_follows_carrier() {
        let p = SystemParams::default();
        let q = p.with(|r| r.f_c = 4e9).unwrap();
        assert!((p.beta() / q.beta() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn direct_path_loss_values() {
        let p = params(|r| {
            r.alpha = 2.0 + 1e-12;
            r.h_b = 1.0;
        });
        assert!((path_loss_direct(0.0, &p) - p.beta()).abs() < 1e-15 * p.beta() + 1e-20);

        let p = SystemParams::default();
        // 2900^-1.5 = 6.4033e-6 evaluated independently at high precision.
        let expected = p.beta() * 6.403_287_523_346_616e-6;
        assert!((path_loss_direct(50.0, &p) / expected - 1.0).abs() < 1e-12);
    }

    #[test]
    fn irs_path_loss_values() {
        let p = SystemParams::default();
        assert!((path_loss_irs_ue(0.0, &p) - p.beta()).abs() < 1e-18);
        // 626^-1.5
        let expected = p.beta() * 6.384_670_662_759_038e-5;
        assert!((path_loss_irs_ue(25.0, &p) / expected - 1.0).abs() < 1e-12);
        for d in [0.0, 1.0, 10.0, 300.0] {
            assert!(path_loss_irs_ue(d, &p) > path_loss_direct(d, &p));
        }
    }

    #[test]
    fn path_loss_far_field_slope() {
        let p = SystemParams::default();
        let slope = (path_loss_direct(1e5, &p).ln() - path_loss_direct(1e4, &p).ln()) / (10f64).ln();
        assert!((slope / -p.alpha() - 1.0).abs() < 0.01);
    }

    #[test]
    fn rejects_invalid_parameters() {
        let bad: [fn(&mut RawParams); 7] = [
            |r| r.alpha = 2.0,
            |r| r.p = 0.0,
            |r| r.p = 1.5,
            |r| r.h_b = 0.5,
            |r| r.d1 = 60.0,
            |r| r.n = 0,
            |r| r.lambda_b = 0.0,
        ];
        for edit in bad {
            let mut raw = RawParams::default();
            edit(&mut raw);
            assert!(raw.validate().is_err(), "{raw:?}");
        }
    }

    #[test]
    fn threshold_and_rate_are_tied() {
        let p = params(|r| r.set_threshold_db(10.0));
        assert!((p.gamma_bar() - 10.0).abs() < 1e-12);
        assert!(((1.0 + p.gamma_bar()).log2() - p.r_bar()).abs() < 1e-15);
        assert!((SystemParams::default().gamma_bar() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn distance_pdf_normalization_and_mode() {
        let p = SystemParams::default();
        let opts = QuadOptions::default().with_tolerances(1e-12, 1e-12);
        let total = integrate_adaptive(|x| pdf_l0(x, &p), 0.0, f64::INFINITY, &[], &opts)
            .unwrap()
            .value;
        assert!((total - 1.0).abs() < 1e-9);

        let lam = p.lambda_b();
        let mode = 1.0 / (2.0 * PI * lam).sqrt();
        let h = 1e-3 * mode;
        assert!(pdf_l0(mode, &p) > pdf_l0(mode - h, &p));
        assert!(pdf_l0(mode, &p) > pdf_l0(mode + h, &p));
    }

    #[test]
    fn sparse_irs_tail() {
        let p = params(|r| r.lambda_i = 5e-6);
        let tail = nearest_distance_ccdf(50.0, p.lambda_i());
        assert!((tail - 0.961_491_159_801_407_6).abs() < 1e-12);
        let opts = QuadOptions::default().with_tolerances(1e-13, 1e-12);
        let head = integrate_adaptive(|x| pdf_d0(x, &p), 0.0, 50.0, &[], &opts)
            .unwrap()
            .value;
        assert!((head + tail - 1.0).abs() < 1e-10);
    }

    #[test]
    fn regime_probability_values() {
        let p = params(|r| r.lambda_i = 0.0);
        let rp = regime_probabilities(&p);
        assert_eq!((rp.p_bf, rp.p_sc, rp.p_wo), (0.0, 0.0, 1.0));

        let p = params(|r| r.lambda_i = 1.0);
        let rp = regime_probabilities(&p);
        assert!((rp.p_bf - 1.0).abs() < 1e-15 && rp.p_sc.abs() < 1e-15 && rp.p_wo.abs() < 1e-15);

        let p = params(|r| r.lambda_i = 5e-6);
        let rp = regime_probabilities(&p);
        assert!((rp.p_wo - 0.961_491_159_801_407_6).abs() < 1e-12);
        assert!((rp.p_bf - 0.009_769_442_934_496_718).abs() < 1e-14);
    }

    #[test]
    fn regime_boundaries_are_half_open() {
        let p = SystemParams::default();
        assert_eq!(Regime::of(25.0, &p), Regime::Beamformed);
        assert_eq!(Regime::of(25.0 + 1e-9, &p), Regime::ScatteredOnly);
        assert_eq!(Regime::of(50.0, &p), Regime::ScatteredOnly);
        assert_eq!(Regime::of(50.0 + 1e-9, &p), Regime::NoIrs);
    }

    #[test]
    fn cost_to_density_cases() {
        let cm = CostModel::new(1.0, 5.0).unwrap();
        let c = 80.0 * LAMBDA_0;
        assert_eq!(cm.cost_to_density(c, 0.0).unwrap().lambda_b, c);
        let d = cm.cost_to_density(c, 5.0).unwrap();
        assert!((d.lambda_b - 40.0 * LAMBDA_0).abs() < 1e-18);
        assert!((d.lambda_i - 5.0 * d.lambda_b).abs() < 1e-18);
        let d = cm.cost_to_density(c, 2.5).unwrap();
        assert!((d.lambda_b / (80.0 * LAMBDA_0 / 1.5) - 1.0).abs() < 1e-14);
        assert!(cm.cost_to_density(-1.0, 1.0).is_err());
        assert!(cm.cost_to_density(1.0, -1.0).is_err());
        assert!(CostModel::new(1.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn regime_probabilities_sum_to_one(
            lambda_i in 0.0f64..1e-2,
            d1 in 1.0f64..100.0,
            gap in 0.1f64..200.0,
        ) {
            let p = params(|r| { r.lambda_i = lambda_i; r.d1 = d1; r.d2 = d1 + gap; });
            let rp = regime_probabilities(&p);
            prop_assert!((rp.p_bf + rp.p_sc + rp.p_wo - 1.0).abs() < 1e-12);
            for v in [rp.p_bf, rp.p_sc, rp.p_wo] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
        }

        #[test]
        fn cost_round_trip(
            lambda_b in 1e-7f64..1e-2,
            zeta in 0.0f64..50.0,
            c0 in 0.1f64..100.0,
            k_n in 0.1f64..100.0,
        ) {
            let cm = CostModel::new(c0, k_n).unwrap();
            let cost = cm.total_cost(lambda_b, zeta);
            let d = cm.cost_to_density(cost, zeta).unwrap();
            prop_assert!((d.lambda_b / lambda_b - 1.0).abs() < 1e-12);
            prop_assert!((cm.total_cost(d.lambda_b, zeta) / cost - 1.0).abs() < 1e-12);
        }

        #[test]
        fn direct_path_loss_decreasing(l in 0.0f64..1e5, dl in 1e-3f64..1e3) {
            let p = SystemParams::default();
            let a = path_loss_direct(l, &p);
            prop_assert!(a > 0.0 && a.is_finite());
            prop_assert!(path_loss_direct(l + dl, &p) < a);
        }
    }
}
