use hybridnet_core::coverage::{coverage_probability, optimal_density_ratio, OptimalZeta};
use hybridnet_core::interference::{interference_cdf, mean_interference, mean_interference_conditional};
use hybridnet_core::model::{db_to_linear, linear_to_db};
use hybridnet_core::signal::{mean_signal_power, signal_gamma_spec};
use hybridnet_core::SystemParams;
use hybridnet_sim::{
    conditional_interference_samples, conditional_signal_samples, empirical_cdf, ks_distance,
    quantile, run_monte_carlo, sorted,
};
use rayon::prelude::*;

use crate::error::RunError;
use crate::spec::{Case, ExperimentSpec, Kind};

/// Rows of one experiment, plus comment lines for the CSV header.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    /// `(column, meaning)`, written as header comments.
    pub legend: Vec<(String, String)>,
    pub rows: Vec<Vec<String>>,
    pub summary: Vec<String>,
    pub notes: Vec<String>,
}

pub fn fmt(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v}")
    }
}

/// Master seed for (case, point): splitmix64 of the combined index.
pub fn derived_seed(seed: u64, case: usize, point: usize) -> u64 {
    let mut z = seed
        .wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(((case as u64) << 32 | point as u64) + 1));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct Builder<'a> {
    spec: &'a ExperimentSpec,
    table: Table,
    case_keys: Vec<String>,
}

impl<'a> Builder<'a> {
    fn new(spec: &'a ExperimentSpec, columns: &[(&str, &str)]) -> Self {
        let case_keys: Vec<String> = spec.cases[0].assignments.iter().map(|(k, _)| k.clone()).collect();
        let mut table = Table::default();
        table.columns.push("case".into());
        table.legend.push(("case".into(), "curve index (see [cases])".into()));
        for k in &case_keys {
            // a data column of the same name holds the resolved value
            let name = if columns.iter().any(|(c, _)| c == k) {
                format!("{k}_case")
            } else {
                k.clone()
            };
            table.legend.push((name.clone(), "case value as given in [cases]".into()));
            table.columns.push(name);
        }
        for (c, m) in columns {
            table.columns.push(c.to_string());
            table.legend.push((c.to_string(), m.to_string()));
        }
        table.columns.push("source".into());
        table.legend.push(("source".into(), "analytic | mc".into()));
        Builder {
            spec,
            table,
            case_keys,
        }
    }

    fn row(&mut self, case_idx: usize, values: &[String], source: &str) {
        let case = &self.spec.cases[case_idx];
        let mut row = vec![case_idx.to_string()];
        for k in &self.case_keys {
            let v = case
                .assignments
                .iter()
                .find(|(key, _)| key == k)
                .map(|(_, v)| v.clone())
                .unwrap_or_default();
            row.push(v);
        }
        row.extend(values.iter().cloned());
        row.push(source.to_string());
        self.table.rows.push(row);
    }
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<Table, RunError> {
    let mut table = match spec.kind {
        Kind::SignalCdf => signal_cdf(spec),
        Kind::InterferenceCdf => interference_cdf_table(spec),
        Kind::CoverageCurve => coverage_curve(spec),
        Kind::MeanPowers => mean_powers(spec),
        Kind::ThroughputVsLambdaI => throughput_vs_lambda_i(spec),
        Kind::ThroughputVsZeta => throughput_vs_zeta(spec),
        Kind::ThroughputVsCost => throughput_vs_cost(spec),
        Kind::OptimalZetaSweep => optimal_zeta_sweep(spec),
    }?;
    if spec.mc
        && matches!(spec.kind, Kind::ThroughputVsCost | Kind::OptimalZetaSweep)
    {
        table
            .notes
            .push("mc = on is ignored for this kind; only analytic rows are written".into());
    }
    Ok(table)
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    linspace(lo.ln(), hi.ln(), n).into_iter().map(f64::exp).collect()
}

/// log-domain cdf slope x f(x) at the median, by a central difference.
fn median_slope(cdf: impl Fn(f64) -> f64, median: f64) -> f64 {
    let h: f64 = 0.01;
    (cdf(median * h.exp()) - cdf(median * (-h).exp())) / (2.0 * h)
}

fn bisect_median(cdf: impl Fn(f64) -> Result<f64, RunError>, mut lo: f64, mut hi: f64) -> Result<f64, RunError> {
    while cdf(lo)? > 0.5 {
        lo /= 10.0;
    }
    while cdf(hi)? < 0.5 {
        hi *= 10.0;
    }
    for _ in 0..100 {
        let mid = (lo * hi).sqrt();
        if cdf(mid)? < 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo - 1.0 < 1e-10 {
            break;
        }
    }
    Ok((lo * hi).sqrt())
}

fn signal_cdf(spec: &ExperimentSpec) -> Result<Table, RunError> {
    let mut b = Builder::new(
        spec,
        &[
            ("S", "signal power, linear (normalized by P0)"),
            ("S_dB", "signal power, dB"),
            ("cdf", "P{S <= x}"),
        ],
    );
    for (ci, case) in spec.cases.iter().enumerate() {
        let p = case.params()?;
        let (l0, d0) = (case.scalars.l0, case.scalars.d0);
        let g = signal_gamma_spec(l0, d0, &p).map_err(|e| RunError::numerical("signal_cdf", e))?;
        let grid = match &spec.grid {
            Some(g) => g.clone(),
            None => {
                let sd = g.variance().sqrt();
                let lo = (g.mean() - 5.0 * sd).max(1e-3 * g.mean());
                linspace(lo, g.mean() + 7.0 * sd, spec.points)
            }
        };
        for x in &grid {
            b.row(ci, &[fmt(*x), fmt(linear_to_db(*x)), fmt(g.cdf(*x))], "analytic");
        }
        let median = bisect_median(|x| Ok(g.cdf(x)), g.mean() / 2.0, g.mean() * 2.0)?;
        let mut line = format!(
            "case {ci}: l0 = {l0}, d0 = {d0}, regime {}, k = {}, theta = {:e}, median slope {:.6}",
            g.regime.name(),
            g.k,
            g.theta,
            median_slope(|x| g.cdf(x), median)
        );
        if spec.mc {
            let n = spec.mc_scale.conditional_draws();
            let s = sorted(
                &conditional_signal_samples(l0, d0, &p, spec.geometry, n, derived_seed(spec.seed, ci, 0))
                    .map_err(RunError::from_core)?,
            );
            for x in &grid {
                b.row(ci, &[fmt(*x), fmt(linear_to_db(*x)), fmt(empirical_cdf(&s, *x))], "mc");
            }
            line.push_str(&format!(", KS vs mc {:.6} ({n} draws)", ks_distance(&s, |x| g.cdf(x))));
        }
        b.table.summary.push(line);
    }
    Ok(b.table)
}

fn interference_cdf_table(spec: &ExperimentSpec) -> Result<Table, RunError> {
    let mut b = Builder::new(
        spec,
        &[
            ("I", "interference power, linear (normalized by P0)"),
            ("I_dB", "interference power, dB"),
            ("cdf", "P{I <= x}"),
        ],
    );
    let opts = spec.analytic.laplace;
    for (ci, case) in spec.cases.iter().enumerate() {
        let p = case.params()?;
        let (l0, d0) = (case.scalars.l0, case.scalars.d0);
        let cdf = |x: f64| {
            interference_cdf(x, l0, d0, &p, &opts).map_err(|e| {
                RunError::numerical(&format!("interference_cdf case {ci} at x = {x:e}"), e)
            })
        };
        let mean = mean_interference_conditional(l0, d0, &p);
        let grid = match &spec.grid {
            Some(g) => g.clone(),
            None => logspace(mean * 1e-2, mean * 1e2, spec.points),
        };
        let values: Vec<Result<f64, RunError>> = grid.par_iter().map(|x| cdf(*x)).collect();
        let mut running: f64 = 0.0;
        for (x, v) in grid.iter().zip(values) {
            // monotone along the sorted grid
            running = running.max(v?);
            b.row(ci, &[fmt(*x), fmt(linear_to_db(*x)), fmt(running)], "analytic");
        }
        let median = bisect_median(cdf, mean / 4.0, mean * 4.0)?;
        let mut line = format!("case {ci}: l0 = {l0}, d0 = {d0}, p = {}, analytic median {median:e}", p.p());
        if spec.mc {
            let n = spec.mc_scale.conditional_draws();
            let cfg = hybridnet_sim::SimConfig {
                geometry: spec.geometry,
                ..spec.mc_scale.sim_config()
            };
            let s = sorted(
                &conditional_interference_samples(l0, d0, &p, &cfg, n, derived_seed(spec.seed, ci, 0))
                    .map_err(RunError::from_core)?,
            );
            for x in &grid {
                b.row(ci, &[fmt(*x), fmt(linear_to_db(*x)), fmt(empirical_cdf(&s, *x))], "mc");
            }
            line.push_str(&format!(", mc median {:e} ({n} draws)", quantile(&s, 0.5)));
        }
        b.table.summary.push(line);
    }
    Ok(b.table)
}

fn sim_config(spec: &ExperimentSpec) -> hybridnet_sim::SimConfig {
    hybridnet_sim::SimConfig {
        geometry: spec.geometry,
        ..spec.mc_scale.sim_config()
    }
}

fn coverage_at(p: &SystemParams, spec: &ExperimentSpec, what: &str) -> Result<(f64, f64), RunError> {
    let r = coverage_probability(p, &spec.analytic).map_err(|e| RunError::numerical(what, e))?;
    Ok((r.p_cov, r.nu))
}

fn coverage_curve(spec: &ExperimentSpec) -> Result<Table, RunError> {
    let mut b = Builder::new(
        spec,
        &[
            ("gamma_dB", "SINR threshold, dB"),
            ("lambda_I", "IRS density, m^-2"),
            ("p_cov", "coverage probability"),
            ("nu", "spatial throughput, bps/Hz/m^2"),
            ("std_err", "MC standard error over topologies (empty for analytic)"),
        ],
    );
    let grid = spec.grid.clone().expect("default grid");
    for (ci, case) in spec.cases.iter().enumerate() {
        let base = case.params()?;
        let points: Vec<Result<(SystemParams, f64, f64), RunError>> = grid
            .par_iter()
            .map(|db| {
                let p = case.with("gamma_dB", *db)?.params()?;
                let (c, nu) = coverage_at(&p, spec, &format!("coverage case {ci} at {db} dB"))?;
                Ok((p, c, nu))
            })
            .collect();
        for (db, pt) in grid.iter().zip(points) {
            let (p, c, nu) = pt?;
            b.row(ci, &[fmt(*db), fmt(p.lambda_i()), fmt(c), fmt(nu), String::new()], "analytic");
        }
        if spec.mc {
            let run = run_monte_carlo(&base, &sim_config(spec), derived_seed(spec.seed, ci, 0))
                .map_err(RunError::from_core)?;
            for db in &grid {
                let p = case.with("gamma_dB", *db)?.params()?;
                let est = run.coverage(db_to_linear(*db));
                let nu = p.r_bar() * p.p() * p.lambda_b() * est.value;
                b.row(
                    ci,
                    &[fmt(*db), fmt(p.lambda_i()), fmt(est.value), fmt(nu), fmt(est.std_err)],
                    "mc",
                );
            }
        }
    }
    Ok(b.table)
}

fn mean_powers(spec: &ExperimentSpec) -> Result<Table, RunError> {
    let mut b = Builder::new(
        spec,
        &[
            ("lambda_B", "BS density, m^-2"),
            ("lambda_I", "IRS density, m^-2"),
            ("E_S", "mean signal power, linear"),
            ("E_S_dB", "mean signal power, dB"),
            ("E_I", "mean interference power, linear"),
            ("E_I_dB", "mean interference power, dB"),
            ("std_err_S", "MC standard error of E_S (empty for analytic)"),
            ("std_err_I", "MC standard error of E_I (empty for analytic)"),
        ],
    );
    let grid = spec.grid.clone().expect("default grid");
    for (ci, case) in spec.cases.iter().enumerate() {
        for (pi, li) in grid.iter().enumerate() {
            let p = case.with("lambda_I", *li)?.params()?;
            let es = mean_signal_power(&p).map_err(|e| RunError::numerical("mean signal power", e))?;
            let ei = mean_interference(&p).map_err(|e| RunError::numerical("mean interference", e))?;
            let row = |s: f64, i: f64, es: String, ei: String| {
                vec![
                    fmt(p.lambda_b()),
                    fmt(p.lambda_i()),
                    fmt(s),
                    fmt(linear_to_db(s)),
                    fmt(i),
                    fmt(linear_to_db(i)),
                    es,
                    ei,
                ]
            };
            b.row(ci, &row(es, ei, String::new(), String::new()), "analytic");
            if spec.mc {
                let run = run_monte_carlo(&p, &sim_config(spec), derived_seed(spec.seed, ci, pi))
                    .map_err(RunError::from_core)?;
                let (s, i) = (run.mean_signal(), run.mean_interference());
                b.row(ci, &row(s.value, i.value, fmt(s.std_err), fmt(i.std_err)), "mc");
            }
        }
    }
    Ok(b.table)
}

fn throughput_vs_lambda_i(spec: &ExperimentSpec) -> Result<Table, RunError> {
    let mut b = Builder::new(
        spec,
        &[
            ("lambda_I", "IRS density, m^-2"),
            ("p_cov", "coverage probability"),
            ("nu", "spatial throughput, bps/Hz/m^2"),
            ("std_err", "MC standard error over topologies (empty for analytic)"),
        ],
    );
    let grid = spec.grid.clone().expect("default grid");
    for (ci, case) in spec.cases.iter().enumerate() {
        let points: Vec<Result<(SystemParams, f64, f64), RunError>> = grid
            .par_iter()
            .map(|li| {
                let p = case.with("lambda_I", *li)?.params()?;
                let (c, nu) = coverage_at(&p, spec, &format!("coverage case {ci} at lambda_I = {li:e}"))?;
                Ok((p, c, nu))
            })
            .collect();
        for (pi, pt) in points.into_iter().enumerate() {
            let (p, c, nu) = pt?;
            b.row(ci, &[fmt(p.lambda_i()), fmt(c), fmt(nu), String::new()], "analytic");
            if spec.mc {
                let run = run_monte_carlo(&p, &sim_config(spec), derived_seed(spec.seed, ci, pi))
                    .map_err(RunError::from_core)?;
                let est = run.coverage(p.gamma_bar());
                let nu = p.r_bar() * p.p() * p.lambda_b() * est.value;
                b.row(ci, &[fmt(p.lambda_i()), fmt(est.value), fmt(nu), fmt(est.std_err)], "mc");
            }
        }
    }
    Ok(b.table)
}

fn optimize(case: &Case, spec: &ExperimentSpec, grid: &[f64], what: &str) -> Result<OptimalZeta, RunError> {
    let p = case.params()?;
    let cost = case.scalars.cost.ok_or_else(|| RunError::config("`C` is required"))?;
    optimal_density_ratio(cost, &case.scalars.cost_model, &p, &spec.analytic, grid)
        .map_err(|e| RunError::numerical(what, e))
}

fn throughput_vs_zeta(spec: &ExperimentSpec) -> Result<Table, RunError> {
    let mut b = Builder::new(
        spec,
        &[
            ("zeta", "IRS/BS density ratio"),
            ("lambda_B", "BS density at cost C, m^-2"),
            ("lambda_I", "IRS density, m^-2"),
            ("p_cov", "coverage probability"),
            ("nu", "spatial throughput, bps/Hz/m^2"),
            ("std_err", "MC standard error over topologies (empty for analytic)"),
        ],
    );
    let grid = spec.grid.clone().expect("default grid");
    for (ci, case) in spec.cases.iter().enumerate() {
        let opt = optimize(case, spec, &grid, &format!("zeta curve case {ci}"))?;
        for (pi, pt) in opt.curve.iter().enumerate() {
            b.row(
                ci,
                &[fmt(pt.zeta), fmt(pt.lambda_b), fmt(pt.lambda_i), fmt(pt.p_cov), fmt(pt.nu), String::new()],
                "analytic",
            );
            if spec.mc {
                let p = case
                    .with("lambda_B", pt.lambda_b)?
                    .with("lambda_I", pt.lambda_i)?
                    .params()?;
                let run = run_monte_carlo(&p, &sim_config(spec), derived_seed(spec.seed, ci, pi))
                    .map_err(RunError::from_core)?;
                let est = run.coverage(p.gamma_bar());
                let nu = p.r_bar() * p.p() * p.lambda_b() * est.value;
                b.row(
                    ci,
                    &[fmt(pt.zeta), fmt(pt.lambda_b), fmt(pt.lambda_i), fmt(est.value), fmt(nu), fmt(est.std_err)],
                    "mc",
                );
            }
        }
        let nu0 = opt.curve[0].nu;
        b.table.summary.push(format!(
            "case {ci}: zeta* = {}, nu* = {:e}, nu(zeta = {}) = {nu0:e}, ratio {:.4}",
            opt.zeta_star,
            opt.nu_star,
            opt.curve[0].zeta,
            opt.nu_star / nu0
        ));
    }
    Ok(b.table)
}

fn throughput_vs_cost(spec: &ExperimentSpec) -> Result<Table, RunError> {
    let mut b = Builder::new(
        spec,
        &[
            ("C", "total cost per m^2, units of c0"),
            ("zeta_star", "throughput-maximizing zeta on the zeta grid"),
            ("nu_star", "throughput at zeta_star, bps/Hz/m^2"),
            ("p_cov_star", "coverage at zeta_star"),
            ("nu_first", "throughput at the first zeta of the grid (BS-only when it is 0)"),
        ],
    );
    let grid = spec.grid.clone().expect("validated");
    for (ci, case) in spec.cases.iter().enumerate() {
        for c in &grid {
            let opt = optimize(&case.with("C", *c)?, spec, &spec.zeta_grid, &format!("case {ci} at C = {c:e}"))?;
            let best = opt.curve.iter().find(|p| p.zeta == opt.zeta_star).expect("argmax on curve");
            b.row(
                ci,
                &[fmt(*c), fmt(opt.zeta_star), fmt(opt.nu_star), fmt(best.p_cov), fmt(opt.curve[0].nu)],
                "analytic",
            );
        }
    }
    Ok(b.table)
}

fn optimal_zeta_sweep(spec: &ExperimentSpec) -> Result<Table, RunError> {
    let var = spec.sweep_variable.clone();
    let mut b = Builder::new(
        spec,
        &[
            (var.as_str(), "swept variable"),
            ("zeta_star", "throughput-maximizing zeta on the zeta grid"),
            ("nu_star", "throughput at zeta_star, bps/Hz/m^2"),
            ("p_cov_star", "coverage at zeta_star"),
        ],
    );
    let grid = spec.grid.clone().expect("validated");
    for (ci, case) in spec.cases.iter().enumerate() {
        for v in &grid {
            let opt = optimize(&case.with(&var, *v)?, spec, &spec.zeta_grid, &format!("case {ci} at {var} = {v}"))?;
            let best = opt.curve.iter().find(|p| p.zeta == opt.zeta_star).expect("argmax on curve");
            b.row(ci, &[fmt(*v), fmt(opt.zeta_star), fmt(opt.nu_star), fmt(best.p_cov)], "analytic");
        }
    }
    Ok(b.table)
}
