//! Conditional interference: Laplace transform through the kernel U, its
//! high-order derivatives, the conditional cdf, and mean interference.
//!
//! With t = b₃x and H(x) = ₂F₁(1, δ; 1+δ; −1/t),
//!
//! ```text
//! U(x) = b₁ x^δ − b₂ H(x)
//! ∂ⁱU  = (δ)ᵢ b₁ x^(δ−i) − b₂ [(δ)ᵢ H / xⁱ + Lᵢ(x)]
//! Lᵢ   = b₃ⁱ Rᵢ(t) / (t^(i−1) (1+t)ⁱ)
//! ```
//!
//! The polynomials Rᵢ follow from H′ = δH/x − δb₃/(1+t):
//! R₁ = −δ and
//! R_{i+1} = t(1+t)Rᵢ′ − (i−1)(1+t)Rᵢ − i t Rᵢ − δ(δ)ᵢ(1+t)ⁱ.
//!
//! For t < ½ the leading t^δ terms cancel, so U and its derivatives are
//! summed from U = b₂δ Σ_k (−1)^k t^(1+k)/(k+1−δ) instead.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{path_loss_direct, Regime, SystemParams};
use crate::signal::{irs_power_aggregates, kappa_sc};
use crate::specfun::hyper::hyp2f1_left_half_plane;
use crate::specfun::{exp_integral, falling_factorial, inverse_laplace_cdf, InverseLaplaceOptions};

/// Highest derivative order of U that may be requested.
pub const MAX_DERIVATIVE_ORDER: usize = 16;

const SERIES_SWITCH: f64 = 0.5;
const MAX_SERIES_TERMS: usize = 4_000;

/// Mean gain of interfering paths relative to their direct component.
pub fn eta_bar(d0: f64, params: &SystemParams) -> f64 {
    match Regime::of(d0, params) {
        Regime::Beamformed => kappa_sc(d0, params),
        Regime::ScatteredOnly => {
            let e = irs_power_aggregates(params.d1(), params)
                .expect("D1 < D2 by validation")
                .e_i1;
            1.0 + params.n() as f64 * e
        }
        Regime::NoIrs => 1.0,
    }
}

/// Constants of the interference Laplace transform for one (l₀, d₀).
#[derive(Debug, Clone, PartialEq)]
pub struct LaplaceContext {
    pub l0: f64,
    pub eta_bar: f64,
    pub lambda_b_active: f64,
    pub delta: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
}

impl LaplaceContext {
    pub fn new(l0: f64, d0: f64, params: &SystemParams) -> Self {
        let alpha = params.alpha();
        let delta = params.delta();
        LaplaceContext {
            l0,
            eta_bar: eta_bar(d0, params),
            lambda_b_active: params.lambda_b_active(),
            delta,
            b1: PI * params.beta().powf(delta) / (alpha * (2.0 * PI / alpha).sin()),
            b2: 0.5 * (l0 * l0 + params.h_b() * params.h_b()),
            b3: path_loss_direct(l0, params),
        }
    }

    /// E{e^(−sI)} for real s ≥ 0.
    pub fn laplace(&self, s: f64) -> f64 {
        (-2.0 * PI * self.lambda_b_active * kernel_u(self.eta_bar * s, self)).exp()
    }

    /// The same transform continued to Re s > 0.
    pub fn laplace_complex(&self, s: Complex64) -> Complex64 {
        (-2.0 * PI * self.lambda_b_active * kernel_u_complex(s * self.eta_bar, self)).exp()
    }
}

/// U(x) for x ≥ 0; U(0) = 0.
pub fn kernel_u(x: f64, ctx: &LaplaceContext) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    kernel_u_complex(Complex64::new(x, 0.0), ctx).re
}

/// U on the closed right half-plane.
pub fn kernel_u_complex(x: Complex64, ctx: &LaplaceContext) -> Complex64 {
    if x == Complex64::new(0.0, 0.0) {
        return x;
    }
    let t = x * ctx.b3;
    if t.norm() < SERIES_SWITCH {
        return small_t_series(t, ctx.delta) * ctx.b2;
    }
    let h = hyp2f1_left_half_plane(ctx.delta, -t.inv());
    x.powf(ctx.delta) * ctx.b1 - h * ctx.b2
}

/// δ Σ_k (−1)^k t^(1+k)/(k+1−δ)
fn small_t_series(t: Complex64, delta: f64) -> Complex64 {
    let mut pow = t;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..MAX_SERIES_TERMS {
        let term = pow / (k as f64 + 1.0 - delta);
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            break;
        }
        pow *= -t;
    }
    sum * delta
}

/// Coefficients (ascending powers of t) of R₁…R_max.
pub fn remainder_polynomials(delta: f64, max_order: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(max_order);
    if max_order == 0 {
        return out;
    }
    out.push(vec![-delta]);
    // (1+t)^i, kept alongside
    let mut binom = vec![1.0, 1.0];
    for i in 1..max_order {
        let r = &out[i - 1];
        let mut next = vec![0.0; i + 1];
        let fi = i as f64;
        for (j, &c) in r.iter().enumerate() {
            let jf = j as f64;
            // t(1+t)R′: j c t^j + j c t^(j+1)
            next[j] += jf * c;
            next[j + 1] += jf * c;
            // −(i−1)(1+t)R
            next[j] -= (fi - 1.0) * c;
            next[j + 1] -= (fi - 1.0) * c;
            // −i t R
            next[j + 1] -= fi * c;
        }
        let k = delta * falling_factorial(delta, i);
        for (j, &c) in binom.iter().enumerate() {
            next[j] -= k * c;
        }
        out.push(next);
        let mut nb = vec![1.0; binom.len() + 1];
        for j in 1..binom.len() {
            nb[j] = binom[j - 1] + binom[j];
        }
        binom = nb;
    }
    out
}

fn horner(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

/// Lᵢ(x) for i = 1…max_order.
pub fn remainder_terms(x: f64, ctx: &LaplaceContext, max_order: usize) -> Vec<f64> {
    let t = ctx.b3 * x;
    remainder_polynomials(ctx.delta, max_order)
        .iter()
        .enumerate()
        .map(|(idx, r)| {
            let i = idx as i32 + 1;
            ctx.b3.powi(i) * horner(r, t) / (t.powi(i - 1) * (1.0 + t).powi(i))
        })
        .collect()
}

/// ∂ⁱU/∂xⁱ for i = 1…max_order at x > 0.
pub fn kernel_u_derivatives(x: f64, ctx: &LaplaceContext, max_order: usize) -> Result<Vec<f64>> {
    if max_order > MAX_DERIVATIVE_ORDER {
        return Err(Error::OrderCap {
            requested: max_order,
            cap: MAX_DERIVATIVE_ORDER,
        });
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(
            "kernel_u_derivatives",
            format!("x must be positive, got {x}"),
        ));
    }
    let delta = ctx.delta;
    let t = ctx.b3 * x;
    if t < SERIES_SWITCH {
        return Ok((1..=max_order)
            .map(|i| ctx.b2 * delta * ctx.b3.powi(i as i32) * series_derivative(t, delta, i))
            .collect());
    }
    let h = hyp2f1_left_half_plane(delta, Complex64::new(-1.0 / t, 0.0)).re;
    let l = remainder_terms(x, ctx, max_order);
    Ok((1..=max_order)
        .map(|i| {
            let ff = falling_factorial(delta, i);
            let xi = x.powi(i as i32);
            ff * ctx.b1 * x.powf(delta) / xi - ctx.b2 * (ff * h / xi + l[i - 1])
        })
        .collect())
}

/// dⁱ/dtⁱ Σ_k (−1)^k t^(1+k)/(k+1−δ)
fn series_derivative(t: f64, delta: f64, i: usize) -> f64 {
    let mut sum = 0.0;
    let mut peak: f64 = 0.0;
    for k in (i - 1)..(i - 1 + MAX_SERIES_TERMS) {
        let n = k + 1;
        // n (n−1) ⋯ (n−i+1)
        let ff: f64 = (0..i).map(|j| (n - j) as f64).product();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let term = sign * ff * t.powi((n - i) as i32) / (n as f64 - delta);
        sum += term;
        peak = peak.max(term.abs());
        if k > 2 * i + 4 && term.abs() <= 1e-17 * peak {
            break;
        }
        if t == 0.0 {
            break;
        }
    }
    sum
}

/// E{e^(−sI)} conditioned on (l₀, d₀).
pub fn laplace_interference(s: f64, l0: f64, d0: f64, params: &SystemParams) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::domain(
            "laplace_interference",
            format!("s must be nonnegative, got {s}"),
        ));
    }
    Ok(LaplaceContext::new(l0, d0, params).laplace(s))
}

/// P{I ≤ x} conditioned on (l₀, d₀).
pub fn interference_cdf(
    x: f64,
    l0: f64,
    d0: f64,
    params: &SystemParams,
    opts: &InverseLaplaceOptions,
) -> Result<f64> {
    let ctx = LaplaceContext::new(l0, d0, params);
    interference_cdf_with(x, &ctx, opts)
}

pub fn interference_cdf_with(
    x: f64,
    ctx: &LaplaceContext,
    opts: &InverseLaplaceOptions,
) -> Result<f64> {
    if ctx.lambda_b_active == 0.0 {
        return Ok(1.0);
    }
    inverse_laplace_cdf(|s| ctx.laplace_complex(s), x, opts)
}

/// Mean direct-path interference from active BSs beyond l₀.
pub fn mean_interference_direct(l0: f64, params: &SystemParams) -> f64 {
    let a = params.alpha();
    let hb = params.h_b();
    2.0 * PI * params.lambda_b_active() * params.beta()
        / ((a - 2.0) * (l0 * l0 + hb * hb).powf(a / 2.0 - 1.0))
}

/// E{I} conditioned on (l₀, d₀).
pub fn mean_interference_conditional(l0: f64, d0: f64, params: &SystemParams) -> f64 {
    eta_bar(d0, params) * mean_interference_direct(l0, params)
}

/// E over l₀ of the direct-path mean interference.
pub fn mean_interference_direct_unconditional(params: &SystemParams) -> Result<f64> {
    let a = params.alpha();
    let hb = params.h_b();
    let lam = params.lambda_b();
    let x = lam * PI * hb * hb;
    Ok(2.0 * PI * params.lambda_b_active() * params.beta() / (a - 2.0)
        * lam
        * PI
        * hb.powf(4.0 - a)
        * x.exp()
        * exp_integral(a / 2.0 - 1.0, x)?)
}

/// Unconditional mean interference E{I}.
pub fn mean_interference(params: &SystemParams) -> Result<f64> {
    let e_i1 = irs_power_aggregates(0.0, params)?.e_i1;
    Ok((1.0 + params.n() as f64 * e_i1) * mean_interference_direct_unconditional(params)?)
}
