use std::io::{self, Write};

use hybridnet_core::model::Regime;
use hybridnet_core::{Result, SystemParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::sinr::{Geometry, Sample, TopologyGains};
use crate::topology::{sample_conditioned_topology, sample_topology};

/// Independent stream for work item `index` under a master seed.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub disk_radius: f64,
    pub n_topologies: usize,
    pub n_fading: usize,
    pub geometry: Geometry,
}

impl SimConfig {
    pub fn smoke() -> Self {
        SimConfig {
            disk_radius: 5_000.0,
            n_topologies: 100,
            n_fading: 50,
            geometry: Geometry::Exact,
        }
    }

    pub fn desk() -> Self {
        SimConfig {
            n_topologies: 500,
            n_fading: 200,
            ..Self::smoke()
        }
    }

    pub fn paper() -> Self {
        SimConfig {
            disk_radius: 20_000.0,
            n_topologies: 2000,
            n_fading: 1000,
            geometry: Geometry::Exact,
        }
    }
}

impl Default for SimConfig {
    fn default() -> Self {
        Self::desk()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEstimate {
    pub value: f64,
    pub std_err: f64,
    pub n: usize,
}

impl SimEstimate {
    /// Mean and standard error of independent values.
    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        SimEstimate {
            value: mean,
            std_err: (var / n as f64).sqrt(),
            n,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TopologyRun {
    pub id: usize,
    pub l0: f64,
    pub d0: f64,
    pub regime: Regime,
    pub samples: Vec<Sample>,
}

/// All fading draws of all topologies, in topology order.
#[derive(Debug, Clone)]
pub struct MonteCarloRun {
    pub runs: Vec<TopologyRun>,
}

impl MonteCarloRun {
    fn per_topology(&self, f: impl Fn(&TopologyRun) -> f64) -> SimEstimate {
        let v: Vec<f64> = self.runs.iter().map(f).collect();
        SimEstimate::from_values(&v)
    }

    /// P{SINR ≥ γ̄}, standard error over topology means.
    pub fn coverage(&self, gamma_bar: f64) -> SimEstimate {
        self.per_topology(|r| {
            r.samples.iter().filter(|s| s.sinr >= gamma_bar).count() as f64 / r.samples.len() as f64
        })
    }

    pub fn mean_signal(&self) -> SimEstimate {
        self.per_topology(|r| r.samples.iter().map(|s| s.s).sum::<f64>() / r.samples.len() as f64)
    }

    pub fn mean_interference(&self) -> SimEstimate {
        self.per_topology(|r| r.samples.iter().map(|s| s.i).sum::<f64>() / r.samples.len() as f64)
    }

    /// Fractions of topologies in the beamformed, scattered and no-IRS regimes.
    pub fn regime_frequencies(&self) -> [f64; 3] {
        let mut c = [0usize; 3];
        for r in &self.runs {
            c[match r.regime {
                Regime::Beamformed => 0,
                Regime::ScatteredOnly => 1,
                Regime::NoIrs => 2,
            }] += 1;
        }
        let n = self.runs.len() as f64;
        c.map(|k| k as f64 / n)
    }

    pub fn signal_values(&self) -> Vec<f64> {
        self.runs.iter().flat_map(|r| r.samples.iter().map(|s| s.s)).collect()
    }

    pub fn interference_values(&self) -> Vec<f64> {
        self.runs.iter().flat_map(|r| r.samples.iter().map(|s| s.i)).collect()
    }

    /// CSV: topology_id, l0, d0, regime, S, I, sinr.
    pub fn write_samples_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "topology_id,l0,d0,regime,S,I,sinr")?;
        for r in &self.runs {
            for s in &r.samples {
                writeln!(
                    out,
                    "{},{},{},{},{:e},{:e},{:e}",
                    r.id,
                    r.l0,
                    r.d0,
                    r.regime.name(),
                    s.s,
                    s.i,
                    s.sinr
                )?;
            }
        }
        Ok(())
    }
}

/// Simulates `n_topologies` × `n_fading` draws. Topology k uses stream k of
/// the master seed, so results do not depend on the worker count.
pub fn run_monte_carlo(params: &SystemParams, cfg: &SimConfig, seed: u64) -> Result<MonteCarloRun> {
    let runs: Vec<Result<TopologyRun>> = (0..cfg.n_topologies)
        .into_par_iter()
        .map(|id| {
            let mut rng = stream_rng(seed, id as u64);
            let topo = sample_topology(params, cfg.disk_radius, &mut rng)?;
            let gains = TopologyGains::new(&topo, params, cfg.geometry);
            let samples = (0..cfg.n_fading).map(|_| gains.draw(&mut rng)).collect();
            Ok(TopologyRun {
                id,
                l0: gains.l0,
                d0: gains.d0,
                regime: gains.regime,
                samples,
            })
        })
        .collect();
    Ok(MonteCarloRun {
        runs: runs.into_iter().collect::<Result<_>>()?,
    })
}

#[derive(Debug, Clone)]
pub struct CoverageEstimate {
    pub p_cov: SimEstimate,
    pub mean_s: SimEstimate,
    pub mean_i: SimEstimate,
    pub regime_frequencies: [f64; 3],
    pub run: MonteCarloRun,
}

pub fn estimate_coverage(params: &SystemParams, cfg: &SimConfig, seed: u64) -> Result<CoverageEstimate> {
    if cfg.n_topologies < 100 {
        return Err(hybridnet_core::Error::InvalidParameter {
            name: "n_topologies",
            reason: format!("{} is below the minimum of 100", cfg.n_topologies),
        });
    }
    let run = run_monte_carlo(params, cfg, seed)?;
    Ok(CoverageEstimate {
        p_cov: run.coverage(params.gamma_bar()),
        mean_s: run.mean_signal(),
        mean_i: run.mean_interference(),
        regime_frequencies: run.regime_frequencies(),
        run,
    })
}

/// Signal power draws with the serving BS at l₀ and the nearest IRS at d₀;
/// a fresh IRS field per draw.
pub fn conditional_signal_samples(
    l0: f64,
    d0: f64,
    params: &SystemParams,
    geometry: Geometry,
    n: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    (0..n)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(seed, k as u64);
            let topo = sample_conditioned_topology(l0, d0, params, f64::INFINITY, false, &mut rng)?;
            Ok(TopologyGains::new(&topo, params, geometry).signal(&mut rng))
        })
        .collect()
}

/// Interference draws conditioned on (l₀, d₀); `d0 = ∞` removes all IRSs.
pub fn conditional_interference_samples(
    l0: f64,
    d0: f64,
    params: &SystemParams,
    cfg: &SimConfig,
    n: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    (0..n)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(seed, k as u64);
            let topo = sample_conditioned_topology(l0, d0, params, cfg.disk_radius, true, &mut rng)?;
            Ok(TopologyGains::new(&topo, params, cfg.geometry).draw(&mut rng).i)
        })
        .collect()
}

/// Sorted copy of the samples.
pub fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Empirical quantile of sorted data (linear interpolation).
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Empirical cdf of sorted data at x.
pub fn empirical_cdf(sorted: &[f64], x: f64) -> f64 {
    sorted.partition_point(|v| *v <= x) as f64 / sorted.len() as f64
}

/// Kolmogorov–Smirnov distance between sorted samples and a continuous cdf.
pub fn ks_distance(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let f = cdf(*x);
            (f - i as f64 / n).abs().max((i as f64 + 1.0) / n - f)
        })
        .fold(0.0, f64::max)
}
