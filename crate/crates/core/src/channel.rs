//! Small-scale fading statistics of the direct and IRS-cascaded links, and
//! the conditional moments of the two signal components h₁ (direct plus
//! beamformed IRS) and h₂ (scattering from all other IRSs).

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};
use crate::model::{path_loss_direct, path_loss_irs_ue, SystemParams};
use crate::signal::irs_power_aggregates;

/// 1 − π²/16, the variance of a unit double-Rayleigh amplitude.
pub const DOUBLE_RAYLEIGH_VAR: f64 = 1.0 - PI * PI / 16.0;

/// Mean of a unit double-Rayleigh amplitude.
pub const DOUBLE_RAYLEIGH_MEAN: f64 = PI / 4.0;

/// Power gain coefficients of an N-element IRS, `(G_bf, G_sc)`.
pub fn gain_coefficients(n: u32) -> (f64, f64) {
    let n = n as f64;
    (PI * PI / 16.0 * n * n + DOUBLE_RAYLEIGH_VAR * n, n)
}

/// Statistics of a single element's cascaded amplitude |h_i||h_r|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementStats {
    pub mean_amp: f64,
    pub var_amp: f64,
    pub g_i: f64,
    pub g_r: f64,
}

impl ElementStats {
    pub fn new(g_i: f64, g_r: f64) -> Self {
        let g = g_i * g_r;
        ElementStats {
            mean_amp: DOUBLE_RAYLEIGH_MEAN * g.sqrt(),
            var_amp: DOUBLE_RAYLEIGH_VAR * g,
            g_i,
            g_r,
        }
    }
}

/// Mean and variance of the co-phased sum of N element amplitudes, treated
/// as Gaussian.
pub fn beamformed_amplitude_stats(g_i: f64, g_r: f64, n: u32) -> (f64, f64) {
    let e = ElementStats::new(g_i, g_r);
    (n as f64 * e.mean_amp, n as f64 * e.var_amp)
}

/// Variance of the zero-mean CSCG aggregate of N randomly phased elements.
pub fn scattered_channel_variance(g_i: f64, g_r: f64, n: u32) -> f64 {
    n as f64 * g_i * g_r
}

/// In-phase (equivalently quadrature) variance of one randomly phased
/// element.
pub fn element_quadrature_variance(g_i: f64, g_r: f64) -> f64 {
    0.5 * g_i * g_r
}

/// First two moments of |h₁|² and |h₂|², conditioned on (l₀, d₀).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadeMoments {
    pub m1_h1sq: f64,
    pub m2_h1sq: f64,
    pub m1_h2sq: f64,
    pub m2_h2sq: f64,
}

/// Beamformed-regime cascade moments, with every BS–IRS gain replaced by
/// g_d(l₀).
pub fn cascade_moments_bf(l0: f64, d0: f64, params: &SystemParams) -> Result<CascadeMoments> {
    if !(d0 >= 0.0 && d0 <= params.d1()) {
        return Err(Error::domain(
            "cascade_moments_bf",
            format!("d0 = {d0} outside the beamforming range [0, {}]", params.d1()),
        ));
    }
    let gd = path_loss_direct(l0, params);
    let gr = path_loss_irs_ue(d0, params);
    let n = params.n() as f64;
    let (g_bf, _) = gain_coefficients(params.n());
    let c = DOUBLE_RAYLEIGH_VAR;
    let sqrt_pi = PI.sqrt();

    let m1_h1sq = gd * (1.0 + n * PI / 4.0 * (PI * gr).sqrt() + g_bf * gr);
    let m2_h1sq = gd
        * gd
        * (2.0
            + 0.75 * PI.powf(1.5) * n * gr.sqrt()
            + 6.0 * g_bf * gr
            + 2.0 * sqrt_pi * (PI.powi(3) * n.powi(3) / 64.0 + 3.0 * PI * n * n * c / 4.0) * gr.powf(1.5)
            + (PI.powi(4) * n.powi(4) / 256.0 + 3.0 * PI * PI * n.powi(3) * c / 8.0 + 3.0 * n * n * c * c)
                * gr
                * gr);

    let agg = irs_power_aggregates(d0, params)?;
    Ok(CascadeMoments {
        m1_h1sq,
        m2_h1sq,
        m1_h2sq: n * gd * agg.e_i1,
        m2_h2sq: 2.0 * n * n * gd * gd * agg.e_i3,
    })
}

/// Unit-power Rayleigh amplitude (each quadrature has variance ½).
pub fn sample_fading_rayleigh<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let e: f64 = Exp1.sample(rng);
    e.sqrt()
}

/// Product of two independent unit-power Rayleigh amplitudes.
pub fn sample_fading_double_rayleigh<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let a: f64 = Exp1.sample(rng);
    let b: f64 = Exp1.sample(rng);
    (a * b).sqrt()
}

/// Phase uniform on [0, 2π).
pub fn sample_uniform_phase<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random::<f64>() * 2.0 * PI
}
