//! Exact SINR synthesis for one topology.
//!
//! Given the IRS–UE amplitudes of IRS j, any path BS m → IRS j → UE whose
//! phases are not aligned for it is a sum of N independent CN terms, i.e.
//! CN(0, g_i,m⁽ʲ⁾ A_j) with A_j = Σ_n |h_r,n⁽ʲ⁾|². Only the serving BS
//! through the associated IRS needs per-element amplitudes.

use hybridnet_core::model::{path_loss_bs_irs, path_loss_direct, path_loss_irs_ue, Regime};
use hybridnet_core::SystemParams;
use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};

use crate::topology::{distance, Topology};

/// How BS–IRS distances enter the BS–IRS path loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Geometry {
    /// Cosine-law distance r_{m,j} and the BS–IRS height difference.
    #[default]
    Exact,
    /// r_{m,j} ≈ l_m with the direct-link path loss, as in the analysis.
    FarField,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub s: f64,
    pub i: f64,
    pub sinr: f64,
}

/// Mean path gains of one topology, precomputed for repeated fading draws.
#[derive(Debug, Clone)]
pub struct TopologyGains {
    n: u32,
    w: f64,
    g_d0: f64,
    assoc: Option<usize>,
    /// IRS–UE gain per retained IRS.
    g_r: Vec<f64>,
    /// Serving BS → IRS gain per retained IRS.
    g_i0: Vec<f64>,
    /// Direct gains of active interferers.
    g_dm: Vec<f64>,
    /// Interferer → IRS gains, row-major (interferer, IRS).
    g_im: Vec<f64>,
    pub l0: f64,
    pub d0: f64,
    pub regime: Regime,
}

fn bs_irs_gain(bs: [f64; 2], irs: [f64; 2], params: &SystemParams, geometry: Geometry) -> f64 {
    match geometry {
        Geometry::Exact => path_loss_bs_irs(distance(bs, irs), params),
        Geometry::FarField => path_loss_direct(bs[0].hypot(bs[1]), params),
    }
}

impl TopologyGains {
    pub fn new(topo: &Topology, params: &SystemParams, geometry: Geometry) -> Self {
        let bs0 = topo.bs_points[topo.serving_bs];
        let g_r = topo
            .irs_points
            .iter()
            .map(|q| path_loss_irs_ue(q[0].hypot(q[1]), params))
            .collect();
        let g_i0 = topo
            .irs_points
            .iter()
            .map(|q| bs_irs_gain(bs0, *q, params, geometry))
            .collect();
        let mut g_dm = Vec::new();
        let mut g_im = Vec::new();
        for (m, bs) in topo.bs_points.iter().enumerate() {
            if m == topo.serving_bs || !topo.active_mask[m] {
                continue;
            }
            g_dm.push(path_loss_direct(bs[0].hypot(bs[1]), params));
            g_im.extend(topo.irs_points.iter().map(|q| bs_irs_gain(*bs, *q, params, geometry)));
        }
        TopologyGains {
            n: params.n(),
            w: params.w(),
            g_d0: path_loss_direct(topo.l0(), params),
            assoc: topo.assoc_irs,
            g_r,
            g_i0,
            g_dm,
            g_im,
            l0: topo.l0(),
            d0: topo.d0(),
            regime: topo.regime(),
        }
    }

    pub fn interferer_count(&self) -> usize {
        self.g_dm.len()
    }

    /// Per-IRS aggregate A_j, and the co-phased cascade amplitude of the
    /// associated IRS.
    fn draw_irs<R: Rng + ?Sized>(&self, rng: &mut R, a: &mut Vec<f64>) -> f64 {
        a.clear();
        let mut beam = 0.0;
        let gamma = (self.n > 0).then(|| Gamma::new(self.n as f64, 1.0).expect("n > 0"));
        for (j, (&g_r, &g_i)) in self.g_r.iter().zip(&self.g_i0).enumerate() {
            if Some(j) == self.assoc {
                let mut amp = 0.0;
                let mut pow = 0.0;
                for _ in 0..self.n {
                    let ei: f64 = Exp1.sample(rng);
                    let er: f64 = Exp1.sample(rng);
                    amp += (ei * er).sqrt();
                    pow += er;
                }
                beam = amp * (g_i * g_r).sqrt();
                a.push(g_r * pow);
            } else {
                let sum: f64 = gamma.as_ref().map_or(0.0, |g| g.sample(rng));
                a.push(g_r * sum);
            }
        }
        beam
    }

    pub fn signal<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut a = Vec::with_capacity(self.g_r.len());
        self.signal_with(rng, &mut a)
    }

    fn signal_with<R: Rng + ?Sized>(&self, rng: &mut R, a: &mut Vec<f64>) -> f64 {
        let beam = self.draw_irs(rng, a);
        let hd: f64 = Exp1.sample(rng);
        let coherent = (self.g_d0 * hd).sqrt() + beam;
        let var: f64 = a
            .iter()
            .zip(&self.g_i0)
            .enumerate()
            .filter(|(j, _)| Some(*j) != self.assoc)
            .map(|(_, (a, g))| a * g)
            .sum();
        let sd = (var / 2.0).sqrt();
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        let x = coherent + sd * re;
        let y = sd * im;
        x * x + y * y
    }

    /// One joint fading draw of signal and interference.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Sample {
        let mut a = Vec::with_capacity(self.g_r.len());
        let s = self.signal_with(rng, &mut a);
        let j = a.len();
        let mut i = 0.0;
        for (m, g_d) in self.g_dm.iter().enumerate() {
            let row = &self.g_im[m * j..(m + 1) * j];
            let mean = g_d + row.iter().zip(&a).map(|(g, a)| g * a).sum::<f64>();
            let h: f64 = Exp1.sample(rng);
            i += mean * h;
        }
        Sample {
            s,
            i,
            sinr: s / (i + self.w),
        }
    }
}

/// Single SINR draw for a topology.
pub fn simulate_sinr<R: Rng + ?Sized>(
    topo: &Topology,
    params: &SystemParams,
    geometry: Geometry,
    rng: &mut R,
) -> Sample {
    TopologyGains::new(topo, params, geometry).draw(rng)
}
