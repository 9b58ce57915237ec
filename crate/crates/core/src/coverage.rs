//! Conditional non-outage probability, coverage probability and spatial
//! throughput, and the cost-constrained IRS/BS density ratio.
//!
//! For a Gamma(k, θ) signal with integer k,
//!
//! ```text
//! P_no = Σ_{i<k} ((−1)^i / i!) ∂ⁱ/∂sⁱ e^{V(s)} |_{s=1}
//! V(s) = −s γ̄W/θ − 2πλ'_B U(s x̃),   x̃ = γ̄η̄/θ
//! ```
//!
//! and ∂ⁱe^V = e^V B_i(V′, …, V⁽ⁱ⁾). Since U′ is completely monotone the
//! arguments y_j = (−1)^j V⁽ʲ⁾ are all nonnegative, and
//! (−1)^i B_i(V′, …) = B_i(y), so the sum has no cancellation.

use std::cell::RefCell;
use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::interference::{interference_cdf_with, kernel_u, kernel_u_derivatives, LaplaceContext};
use crate::model::{
    nearest_distance_quantile, pdf_d0, pdf_l0, regime_probabilities, CostModel, Regime,
    SystemParams,
};
use crate::signal::{signal_gamma_spec, GammaSpec};
use crate::specfun::{complete_bell_all, integrate_adaptive, InverseLaplaceOptions, QuadOptions};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonOutageConfig {
    /// Shapes above this use the normal (hardened-signal) branch.
    pub k_tilde: f64,
    /// Interpolation priority factor M.
    pub m: f64,
    /// Absolute tolerance per quadrature axis.
    pub quad_tol: f64,
    /// Allowed excursion of the raw probability outside [0, 1].
    pub band_tol: f64,
    pub laplace: InverseLaplaceOptions,
}

impl Default for NonOutageConfig {
    fn default() -> Self {
        NonOutageConfig {
            k_tilde: 8.0,
            m: 1.5,
            quad_tol: 1e-5,
            band_tol: 1e-6,
            laplace: InverseLaplaceOptions::default(),
        }
    }
}

impl NonOutageConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.k_tilde >= 2.0) || self.k_tilde as usize > crate::interference::MAX_DERIVATIVE_ORDER {
            return Err(Error::invalid("k_tilde", "must lie in [2, 16]"));
        }
        if !(self.m > 0.0) {
            return Err(Error::invalid("M", "must be positive"));
        }
        if !(self.quad_tol > 0.0) {
            return Err(Error::invalid("quad_tol", "must be positive"));
        }
        Ok(())
    }
}

const INTEGER_TOL: f64 = 1e-9;

/// (−1)^j V⁽ʲ⁾(s) for j = 1…order, and V(s).
fn signed_v_derivatives(
    s: f64,
    theta: f64,
    ctx: &LaplaceContext,
    params: &SystemParams,
    order: usize,
) -> Result<(f64, Vec<f64>)> {
    let g = params.gamma_bar();
    let noise = g * params.w() / theta;
    let x_tilde = g * ctx.eta_bar / theta;
    let c = 2.0 * PI * ctx.lambda_b_active;
    let v = -s * noise - c * kernel_u(s * x_tilde, ctx);
    if order == 0 {
        return Ok((v, Vec::new()));
    }
    let du = kernel_u_derivatives(s * x_tilde, ctx, order)?;
    let mut y = Vec::with_capacity(order);
    let mut scale = x_tilde;
    for (idx, d) in du.iter().enumerate() {
        let j = idx + 1;
        // V⁽ʲ⁾ = −c x̃ʲ U⁽ʲ⁾, plus −noise for j = 1
        let vj = -c * scale * d - if j == 1 { noise } else { 0.0 };
        y.push(if j % 2 == 0 { vj } else { -vj });
        scale *= x_tilde;
    }
    Ok((v, y))
}

/// Partial sums P(1), …, P(n_max) of the Lemma series at s = 1.
fn non_outage_partial_sums(
    theta: f64,
    n_max: usize,
    ctx: &LaplaceContext,
    params: &SystemParams,
) -> Result<Vec<f64>> {
    let (v, y) = signed_v_derivatives(1.0, theta, ctx, params, n_max - 1)?;
    let bell = complete_bell_all(&y);
    let ev = v.exp();
    let mut acc = 0.0;
    let mut fact = 1.0;
    let mut out = Vec::with_capacity(n_max);
    for (i, b) in bell.iter().enumerate().take(n_max) {
        if i > 0 {
            fact *= i as f64;
        }
        acc += b / fact;
        out.push(ev * acc);
    }
    Ok(out)
}

fn checked(value: f64, l0: f64, d0: f64, k: u32, cfg: &NonOutageConfig) -> Result<f64> {
    if !(value >= -cfg.band_tol && value <= 1.0 + cfg.band_tol) {
        return Err(Error::ProbabilityOutOfBand { value, l0, d0, k });
    }
    Ok(value.clamp(0.0, 1.0))
}

/// P{S > γ̄(I + W)} for S ~ Gamma(k, θ) with integer k.
pub fn non_outage_integer_shape(
    k: u32,
    theta: f64,
    l0: f64,
    d0: f64,
    params: &SystemParams,
    cfg: &NonOutageConfig,
) -> Result<f64> {
    if k == 0 || k as f64 > cfg.k_tilde {
        return Err(Error::invalid("k_S", format!("integer shape {k} outside [1, {}]", cfg.k_tilde)));
    }
    let ctx = LaplaceContext::new(l0, d0, params);
    let sums = non_outage_partial_sums(theta, k as usize, &ctx, params)?;
    checked(sums[k as usize - 1], l0, d0, k, cfg)
}

/// Which evaluation path a shape parameter takes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShapeBranch {
    Normal,
    Integer(u32),
    /// Floor, ceiling and the weight of the floor.
    Interpolated(u32, u32, f64),
}

pub fn shape_branch(k: f64, cfg: &NonOutageConfig) -> ShapeBranch {
    if k > cfg.k_tilde {
        return ShapeBranch::Normal;
    }
    let r = k.round();
    if (k - r).abs() < INTEGER_TOL && r >= 1.0 {
        return ShapeBranch::Integer(r as u32);
    }
    if k < 1.0 {
        // no Lemma term below one; the exponential law is the nearest
        return ShapeBranch::Integer(1);
    }
    let lo = k.floor();
    let hi = k.ceil();
    let w = cfg.m * (hi - k) / (cfg.m * (hi - k) + (k - lo));
    ShapeBranch::Interpolated(lo as u32, hi as u32, w)
}

/// Conditional non-outage probability for given (l₀, d₀).
pub fn non_outage(l0: f64, d0: f64, params: &SystemParams, cfg: &NonOutageConfig) -> Result<f64> {
    let spec = signal_gamma_spec(l0, d0, params)?;
    non_outage_with(&spec, l0, d0, params, cfg)
}

pub fn non_outage_with(
    spec: &GammaSpec,
    l0: f64,
    d0: f64,
    params: &SystemParams,
    cfg: &NonOutageConfig,
) -> Result<f64> {
    let ctx = LaplaceContext::new(l0, d0, params);
    match shape_branch(spec.k, cfg) {
        ShapeBranch::Normal => {
            let z = spec.mean() / params.gamma_bar() - params.w();
            if z <= 0.0 {
                return Ok(0.0);
            }
            interference_cdf_with(z, &ctx, &cfg.laplace)
        }
        ShapeBranch::Integer(k) => {
            let sums = non_outage_partial_sums(spec.theta, k as usize, &ctx, params)?;
            checked(sums[k as usize - 1], l0, d0, k, cfg)
        }
        ShapeBranch::Interpolated(lo, hi, w) => {
            let sums = non_outage_partial_sums(spec.theta, hi as usize, &ctx, params)?;
            let p_lo = checked(sums[lo as usize - 1], l0, d0, lo, cfg)?;
            let p_hi = checked(sums[hi as usize - 1], l0, d0, hi, cfg)?;
            Ok(w * p_lo + (1.0 - w) * p_hi)
        }
    }
}

/// Contributions of the three IRS regimes to the coverage probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeBreakdown {
    pub bf: f64,
    pub sc: f64,
    pub wo: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageResult {
    pub p_cov: f64,
    /// Spatial throughput R̄ p λ_B P_cov, bps/Hz/m².
    pub nu: f64,
    pub breakdown: RegimeBreakdown,
}

const L0_TAIL: f64 = 1e-6;
/// Fixed outer panels over d₀ ∈ [0, D1], evaluated in parallel.
const OUTER_PANELS: usize = 8;

/// d₀ at which the beamformed shape crosses k̃ (k_bf does not depend on l₀).
fn normal_branch_boundary(params: &SystemParams, cfg: &NonOutageConfig) -> Result<Option<f64>> {
    let k = |d0: f64| signal_gamma_spec(1.0, d0, params).map(|g| g.k);
    let (mut lo, mut hi) = (0.0, params.d1());
    if !(k(lo)? > cfg.k_tilde && k(hi)? <= cfg.k_tilde) {
        return Ok(None);
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if k(mid)? > cfg.k_tilde {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

fn integrate_over_l0(
    d0: f64,
    l_max: f64,
    params: &SystemParams,
    cfg: &NonOutageConfig,
    opts: &QuadOptions,
) -> Result<f64> {
    // P_no fails loudly; the quadrature closure cannot, so stash the error.
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let r = integrate_adaptive(
        |l0| {
            if failure.borrow().is_some() {
                return 0.0;
            }
            match non_outage(l0, d0, params, cfg) {
                Ok(p) => p * pdf_l0(l0, params),
                Err(e) => {
                    *failure.borrow_mut() = Some(e);
                    0.0
                }
            }
        },
        0.0,
        l_max,
        &[],
        opts,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(r.map_err(|e| e.in_context(&format!("l0 integral at d0 = {d0}")))?.value)
}

pub fn coverage_probability(params: &SystemParams, cfg: &NonOutageConfig) -> Result<CoverageResult> {
    cfg.validate()?;
    let l_max = nearest_distance_quantile(1.0 - L0_TAIL, params.lambda_b());
    let opts = QuadOptions::default()
        .with_tolerances(cfg.quad_tol, 0.0)
        .with_max_subdivisions(400);
    let probs = regime_probabilities(params);

    // Scattered and no-IRS parts do not depend on d₀ within their ranges.
    let d_sc = 0.5 * (params.d1() + params.d2());
    let d_wo = 2.0 * params.d2();
    let single = [(d_sc, probs.p_sc), (d_wo, probs.p_wo)];
    let singles: Vec<Result<f64>> = single
        .par_iter()
        .map(|&(d0, weight)| {
            if weight == 0.0 {
                return Ok(0.0);
            }
            integrate_over_l0(d0, l_max, params, cfg, &opts)
                .map(|v| weight * v)
                .map_err(|e| e.in_context(Regime::of(d0, params).name()))
        })
        .collect();

    let bf = if probs.p_bf > 0.0 {
        let mut edges: Vec<f64> = (0..=OUTER_PANELS)
            .map(|i| params.d1() * i as f64 / OUTER_PANELS as f64)
            .collect();
        if let Some(b) = normal_branch_boundary(params, cfg)? {
            edges.push(b);
            edges.sort_by(f64::total_cmp);
            edges.dedup();
        }
        let panel_opts = opts.with_tolerances(cfg.quad_tol / edges.len() as f64, 0.0);
        let panels: Vec<Result<f64>> = edges
            .par_windows(2)
            .map(|w| {
                let failure: RefCell<Option<Error>> = RefCell::new(None);
                let r = integrate_adaptive(
                    |d0| {
                        if failure.borrow().is_some() {
                            return 0.0;
                        }
                        match integrate_over_l0(d0, l_max, params, cfg, &opts) {
                            Ok(v) => v * pdf_d0(d0, params),
                            Err(e) => {
                                *failure.borrow_mut() = Some(e);
                                0.0
                            }
                        }
                    },
                    w[0],
                    w[1],
                    &[],
                    &panel_opts,
                );
                if let Some(e) = failure.into_inner() {
                    return Err(e);
                }
                Ok(r.map_err(|e| e.in_context(&format!("d0 panel [{}, {}]", w[0], w[1])))?.value)
            })
            .collect();
        let mut sum = 0.0;
        for p in panels {
            sum += p.map_err(|e| e.in_context("bf"))?;
        }
        sum
    } else {
        0.0
    };

    let mut it = singles.into_iter();
    let sc = it.next().expect("two entries")?;
    let wo = it.next().expect("two entries")?;
    let p_cov = (bf + sc + wo).clamp(0.0, 1.0);
    Ok(CoverageResult {
        p_cov,
        nu: spatial_throughput(p_cov, params),
        breakdown: RegimeBreakdown { bf, sc, wo },
    })
}

/// ν = R̄ p λ_B P_cov.
pub fn spatial_throughput(p_cov: f64, params: &SystemParams) -> f64 {
    params.r_bar() * params.p() * params.lambda_b() * p_cov
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaPoint {
    pub zeta: f64,
    pub lambda_b: f64,
    pub lambda_i: f64,
    pub p_cov: f64,
    pub nu: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimalZeta {
    pub zeta_star: f64,
    pub nu_star: f64,
    pub curve: Vec<ZetaPoint>,
}

/// Default ζ grid 0, 0.25, …, 10.
pub fn default_zeta_grid() -> Vec<f64> {
    (0..=40).map(|i| i as f64 * 0.25).collect()
}

/// Throughput along a ζ grid at fixed total cost; argmax with ties broken
/// towards the smaller ζ.
pub fn optimal_density_ratio(
    cost: f64,
    cost_model: &CostModel,
    params: &SystemParams,
    cfg: &NonOutageConfig,
    zeta_grid: &[f64],
) -> Result<OptimalZeta> {
    if zeta_grid.is_empty() {
        return Err(Error::invalid("zeta_grid", "must be nonempty"));
    }
    if zeta_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::invalid("zeta_grid", "must be strictly ascending"));
    }
    let curve: Vec<Result<ZetaPoint>> = zeta_grid
        .par_iter()
        .map(|&zeta| {
            let dep = cost_model.cost_to_density(cost, zeta)?;
            let p = params.with(|r| {
                r.lambda_b = dep.lambda_b;
                r.lambda_i = dep.lambda_i;
            })?;
            let res = coverage_probability(&p, cfg)
                .map_err(|e| e.in_context(&format!("zeta = {zeta}")))?;
            Ok(ZetaPoint {
                zeta,
                lambda_b: dep.lambda_b,
                lambda_i: dep.lambda_i,
                p_cov: res.p_cov,
                nu: res.nu,
            })
        })
        .collect();
    let curve = curve.into_iter().collect::<Result<Vec<_>>>()?;
    let mut best = curve[0];
    for pt in &curve[1..] {
        if pt.nu > best.nu {
            best = *pt;
        }
    }
    Ok(OptimalZeta {
        zeta_star: best.zeta,
        nu_star: best.nu,
        curve,
    })
}
