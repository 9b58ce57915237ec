//! Experiment files: `[experiment]`, `[params]` and `[cases]` sections.
//!
//! ```text
//! [experiment]
//! kind = signal_cdf
//! name = signal_cdf
//! l0 = 50
//! mc = on
//!
//! [params]
//! lambda_B = 10 lambda0
//!
//! [cases]
//! d0 = 1, 5, 25
//! N = 2000, 2000, 400
//! ```
//!
//! Every key under `[cases]` holds a comma list; position k of all lists
//! forms case k. Case keys may be any parameter key or any scalar key.

use std::fmt;
use std::str::FromStr;

use hybridnet_core::config::{parse_grid, parse_quantity, ConfigFile, KeyValues};
use hybridnet_core::coverage::NonOutageConfig;
use hybridnet_core::model::LAMBDA_0;
use hybridnet_core::{CostModel, RawParams, SystemParams};
use hybridnet_sim::{Geometry, SimConfig};

use crate::error::RunError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    SignalCdf,
    InterferenceCdf,
    CoverageCurve,
    MeanPowers,
    ThroughputVsLambdaI,
    ThroughputVsZeta,
    ThroughputVsCost,
    OptimalZetaSweep,
}

impl Kind {
    pub const ALL: [Kind; 8] = [
        Kind::SignalCdf,
        Kind::InterferenceCdf,
        Kind::CoverageCurve,
        Kind::MeanPowers,
        Kind::ThroughputVsLambdaI,
        Kind::ThroughputVsZeta,
        Kind::ThroughputVsCost,
        Kind::OptimalZetaSweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::SignalCdf => "signal_cdf",
            Kind::InterferenceCdf => "interference_cdf",
            Kind::CoverageCurve => "coverage_curve",
            Kind::MeanPowers => "mean_powers",
            Kind::ThroughputVsLambdaI => "throughput_vs_lambdaI",
            Kind::ThroughputVsZeta => "throughput_vs_zeta",
            Kind::ThroughputVsCost => "throughput_vs_cost",
            Kind::OptimalZetaSweep => "optimal_zeta_sweep",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Kind::SignalCdf => "conditional signal-power cdf at (l0, d0): matched Gamma vs MC",
            Kind::InterferenceCdf => "conditional interference cdf at (l0, d0) by Laplace inversion vs MC",
            Kind::CoverageCurve => "coverage probability over an SINR-threshold grid (gamma_dB)",
            Kind::MeanPowers => "unconditional mean signal and interference power over lambda_I",
            Kind::ThroughputVsLambdaI => "coverage and spatial throughput over lambda_I",
            Kind::ThroughputVsZeta => "throughput over the IRS/BS density ratio zeta at fixed cost C",
            Kind::ThroughputVsCost => "optimal zeta and throughput over a total-cost grid C",
            Kind::OptimalZetaSweep => "optimal zeta over a grid of one variable (`sweep`)",
        }
    }

    /// Variable of the inner grid, and its default when the kind has one.
    pub fn sweep_default(self) -> (&'static str, Option<&'static str>) {
        match self {
            Kind::SignalCdf => ("S", None),
            Kind::InterferenceCdf => ("I", None),
            Kind::CoverageCurve => ("gamma_dB", Some("-10:1:20")),
            Kind::MeanPowers | Kind::ThroughputVsLambdaI => {
                ("lambda_I", Some("0, 1 lambda0, 2 lambda0, 5 lambda0, 10 lambda0, 20 lambda0"))
            }
            Kind::ThroughputVsZeta => ("zeta", Some("0:0.25:10")),
            Kind::ThroughputVsCost => ("C", None),
            Kind::OptimalZetaSweep => ("", None),
        }
    }
}

impl FromStr for Kind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Kind::ALL.iter().map(|k| k.name()).collect();
                format!("unknown kind `{s}`; expected one of {}", names.join(", "))
            })
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum McScale {
    Smoke,
    #[default]
    Desk,
    Paper,
}

impl McScale {
    pub fn sim_config(self) -> SimConfig {
        match self {
            McScale::Smoke => SimConfig::smoke(),
            McScale::Desk => SimConfig::desk(),
            McScale::Paper => SimConfig::paper(),
        }
    }

    /// Draws for the conditional cdf experiments.
    pub fn conditional_draws(self) -> usize {
        match self {
            McScale::Smoke => 2_000,
            McScale::Desk => 10_000,
            McScale::Paper => 100_000,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            McScale::Smoke => "smoke",
            McScale::Desk => "desk",
            McScale::Paper => "paper",
        }
    }
}

impl FromStr for McScale {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "smoke" => Ok(McScale::Smoke),
            "desk" => Ok(McScale::Desk),
            "paper" => Ok(McScale::Paper),
            _ => Err(format!("unknown MC scale `{s}`; expected smoke, desk or paper")),
        }
    }
}

/// Experiment keys, with their help text.
pub const EXPERIMENT_KEYS: &[(&str, &str)] = &[
    ("kind", "experiment kind (see list above)"),
    ("name", "output file stem (default: the kind)"),
    ("seed", "master seed for Monte Carlo (default 1)"),
    ("mc", "on | off: add Monte Carlo series (default off)"),
    ("mc_scale", "smoke | desk | paper (default desk)"),
    ("geometry", "exact | far_field: BS-IRS distances in the simulator (default exact)"),
    ("grid", "inner grid: list `a, b, c` or range `start:step:stop`"),
    ("sweep", "optimal_zeta_sweep: variable swept by `grid` (a parameter or scalar key)"),
    ("zeta_grid", "zeta grid for the optimizer kinds (default 0:0.25:10)"),
    ("points", "cdf kinds: grid size when `grid` is absent (default 120)"),
    ("k_tilde", "shape above which the normal branch is used (default 8)"),
    ("M", "interpolation factor (default 1.5)"),
    ("quad_tol", "absolute tolerance per quadrature axis (default 1e-5)"),
];

/// Scalars that are not system parameters; allowed in `[experiment]` and
/// `[cases]`.
pub const SCALAR_KEYS: &[(&str, &str)] = &[
    ("l0", "serving distance for the cdf kinds, m (default 50)"),
    ("d0", "nearest-IRS distance for the cdf kinds, m; `inf` for none (default 1)"),
    ("Q", "if set, lambda_I = Q / N (elements per m^2)"),
    ("C", "total deployment cost, in c0 * m^-2 (accepts `lambda0`)"),
    ("K_N", "BS/IRS unit-cost ratio (default 5)"),
    ("c0", "BS unit cost (default 1)"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct Scalars {
    pub l0: f64,
    pub d0: f64,
    pub q: Option<f64>,
    pub cost: Option<f64>,
    pub cost_model: CostModel,
}

impl Default for Scalars {
    fn default() -> Self {
        Scalars {
            l0: 50.0,
            d0: 1.0,
            q: None,
            cost: None,
            cost_model: CostModel::default(),
        }
    }
}

fn is_param_key(k: &str) -> bool {
    RawParams::KEYS.iter().any(|(p, _)| *p == k)
}

fn is_scalar_key(k: &str) -> bool {
    SCALAR_KEYS.iter().any(|(p, _)| *p == k)
}

fn number(key: &str, value: &str, line: usize) -> Result<f64, RunError> {
    parse_quantity(value).map_err(|e| RunError::config(format!("line {line}: `{key}`: {e}")))
}

impl Scalars {
    fn set(&mut self, key: &str, value: &str, line: usize) -> Result<(), RunError> {
        let v = number(key, value, line)?;
        match key {
            "l0" => self.l0 = v,
            "d0" => self.d0 = v,
            "Q" => self.q = Some(v),
            "C" => self.cost = Some(v),
            "K_N" => self.cost_model.k_n = v,
            "c0" => self.cost_model.c0 = v,
            _ => unreachable!("checked by caller"),
        }
        Ok(())
    }
}

/// One resolved curve: parameters plus scalars, and the case assignments
/// that produced it (for the CSV columns).
#[derive(Debug, Clone)]
pub struct Case {
    pub assignments: Vec<(String, String)>,
    pub raw: RawParams,
    pub scalars: Scalars,
}

impl Case {
    /// Validated parameters, with λ_I = Q/N applied when Q is set.
    pub fn params(&self) -> Result<SystemParams, RunError> {
        let mut raw = self.raw.clone();
        if let Some(q) = self.scalars.q {
            raw.lambda_i = q / raw.n as f64;
        }
        raw.validate().map_err(RunError::from_core)
    }

    /// Same case with one more key set.
    pub fn with(&self, key: &str, value: f64) -> Result<Case, RunError> {
        let mut c = self.clone();
        c.assign(key, &value.to_string(), 0)?;
        Ok(c)
    }

    fn assign(&mut self, key: &str, value: &str, line: usize) -> Result<(), RunError> {
        if is_scalar_key(key) {
            self.scalars.set(key, value, line)
        } else if is_param_key(key) {
            let mut kv = KeyValues::default();
            kv.insert(key, value, line);
            self.raw.apply(&kv).map_err(RunError::from_core)
        } else {
            Err(RunError::config(format!(
                "line {line}: unknown key `{key}`; run `hybridnet list-experiments` for the key list"
            )))
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub kind: Kind,
    pub name: String,
    pub seed: u64,
    pub mc: bool,
    pub mc_scale: McScale,
    pub geometry: Geometry,
    pub sweep_variable: String,
    pub grid: Option<Vec<f64>>,
    pub zeta_grid: Vec<f64>,
    pub points: usize,
    pub analytic: NonOutageConfig,
    pub cases: Vec<Case>,
    /// Source text, echoed into the manifest.
    pub source: String,
}

fn ascending(name: &str, grid: &[f64]) -> Result<(), RunError> {
    if grid.is_empty() {
        return Err(RunError::config(format!("`{name}` must not be empty")));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(RunError::config(format!("`{name}` must be strictly ascending")));
    }
    Ok(())
}

fn grid_value(key: &str, value: &str, line: usize) -> Result<Vec<f64>, RunError> {
    parse_grid(value).map_err(|e| RunError::config(format!("line {line}: `{key}`: {e}")))
}

impl ExperimentSpec {
    pub fn parse(text: &str) -> Result<Self, RunError> {
        let file = ConfigFile::parse(text).map_err(RunError::from_core)?;
        for name in file.section_names() {
            if !["", "experiment", "params", "cases"].contains(&name) {
                return Err(RunError::config(format!(
                    "unknown section `[{name}]`; expected [experiment], [params] or [cases]"
                )));
            }
        }
        if !file.section("").is_empty() {
            return Err(RunError::config("keys must follow a section header such as [experiment]"));
        }
        let exp = file.section("experiment");
        let kind: Kind = match exp.get("kind") {
            Some((v, line)) => v.parse().map_err(|e| RunError::config(format!("line {line}: {e}")))?,
            None => return Err(RunError::config("[experiment] needs `kind`")),
        };
        let (default_var, default_grid) = kind.sweep_default();
        let mut spec = ExperimentSpec {
            kind,
            name: kind.name().to_string(),
            seed: 1,
            mc: false,
            mc_scale: McScale::Desk,
            geometry: Geometry::Exact,
            sweep_variable: default_var.to_string(),
            grid: default_grid.map(|g| parse_grid(g).expect("valid default grid")),
            zeta_grid: parse_grid("0:0.25:10").expect("valid default grid"),
            points: 120,
            analytic: NonOutageConfig::default(),
            cases: Vec::new(),
            source: text.to_string(),
        };
        let mut base = Case {
            assignments: Vec::new(),
            raw: RawParams::default(),
            scalars: Scalars::default(),
        };
        for (key, value, line) in exp.iter() {
            let bad = |e: String| RunError::config(format!("line {line}: `{key}`: {e}"));
            match key {
                "kind" => {}
                "name" => {
                    if value.is_empty() || value.contains(['/', '\\']) {
                        return Err(bad("must be a plain file stem".into()));
                    }
                    spec.name = value.to_string();
                }
                "seed" => spec.seed = value.parse().map_err(|_| bad("expected an unsigned integer".into()))?,
                "mc" => {
                    spec.mc = match value {
                        "on" | "true" => true,
                        "off" | "false" => false,
                        _ => return Err(bad("expected on or off".into())),
                    }
                }
                "mc_scale" => spec.mc_scale = value.parse().map_err(bad)?,
                "geometry" => {
                    spec.geometry = match value {
                        "exact" => Geometry::Exact,
                        "far_field" => Geometry::FarField,
                        _ => return Err(bad("expected exact or far_field".into())),
                    }
                }
                "grid" => spec.grid = Some(grid_value(key, value, line)?),
                "sweep" => spec.sweep_variable = value.to_string(),
                "zeta_grid" => spec.zeta_grid = grid_value(key, value, line)?,
                "points" => {
                    spec.points = value
                        .parse()
                        .ok()
                        .filter(|p: &usize| *p >= 2)
                        .ok_or_else(|| bad("expected an integer >= 2".into()))?
                }
                "k_tilde" => spec.analytic.k_tilde = number(key, value, line)?,
                "M" => spec.analytic.m = number(key, value, line)?,
                "quad_tol" => spec.analytic.quad_tol = number(key, value, line)?,
                k if is_scalar_key(k) => base.scalars.set(k, value, line)?,
                _ => {
                    return Err(bad(
                        "unknown [experiment] key; run `hybridnet list-experiments` for the key list".into(),
                    ))
                }
            }
        }
        for (key, value, line) in file.section("params").iter() {
            if !is_param_key(key) {
                return Err(RunError::config(format!(
                    "line {line}: unknown parameter `{key}`; run `hybridnet list-experiments` for the key list"
                )));
            }
            base.assign(key, value, line)?;
        }

        let cases = file.section("cases");
        let mut columns: Vec<(String, Vec<String>, usize)> = Vec::new();
        for (key, value, line) in cases.iter() {
            let vals: Vec<String> = value.split(',').map(|v| v.trim().to_string()).collect();
            if vals.iter().any(String::is_empty) {
                return Err(RunError::config(format!("line {line}: `{key}` has an empty entry")));
            }
            columns.retain(|(k, _, _)| k != key);
            columns.push((key.to_string(), vals, line));
        }
        let n_cases = columns.first().map_or(1, |c| c.1.len());
        if let Some((key, vals, line)) = columns.iter().find(|c| c.1.len() != n_cases) {
            return Err(RunError::config(format!(
                "line {line}: `{key}` lists {} values but the other [cases] keys list {n_cases}",
                vals.len()
            )));
        }
        for k in 0..n_cases {
            let mut case = base.clone();
            for (key, vals, line) in &columns {
                case.assign(key, &vals[k], *line)?;
                case.assignments.push((key.clone(), vals[k].clone()));
            }
            spec.cases.push(case);
        }
        spec.validate()?;
        Ok(spec)
    }

    /// Kind-specific checks and parameter validation of every case.
    pub fn validate(&self) -> Result<(), RunError> {
        self.analytic.validate().map_err(RunError::from_core)?;
        for case in &self.cases {
            case.params()?;
            let s = &case.scalars;
            CostModel::new(s.cost_model.c0, s.cost_model.k_n).map_err(RunError::from_core)?;
            if matches!(self.kind, Kind::SignalCdf | Kind::InterferenceCdf) {
                if !(s.l0 >= 0.0) {
                    return Err(RunError::config("`l0` must be nonnegative"));
                }
                if !(s.d0 >= 0.0) {
                    return Err(RunError::config("`d0` must be nonnegative (or inf)"));
                }
            }
            if self.kind == Kind::ThroughputVsZeta && s.cost.is_none() {
                return Err(RunError::config("throughput_vs_zeta needs the total cost `C`"));
            }
            if self.kind == Kind::OptimalZetaSweep && s.cost.is_none() {
                return Err(RunError::config("optimal_zeta_sweep needs the total cost `C`"));
            }
        }
        if let Some(g) = &self.grid {
            ascending("grid", g)?;
        }
        ascending("zeta_grid", &self.zeta_grid)?;
        if self.zeta_grid[0] < 0.0 {
            return Err(RunError::config("`zeta_grid` must be nonnegative"));
        }
        match self.kind {
            Kind::ThroughputVsCost if self.grid.is_none() => {
                return Err(RunError::config("throughput_vs_cost needs `grid` (total costs C)"));
            }
            Kind::OptimalZetaSweep => {
                let v = self.sweep_variable.as_str();
                if v.is_empty() {
                    return Err(RunError::config("optimal_zeta_sweep needs `sweep` (the variable to vary)"));
                }
                if !(is_param_key(v) || is_scalar_key(v)) || v == "C" {
                    return Err(RunError::config(format!(
                        "`sweep = {v}` is not a parameter or scalar key (C is fixed per case)"
                    )));
                }
                if self.grid.is_none() {
                    return Err(RunError::config("optimal_zeta_sweep needs `grid`"));
                }
            }
            _ => {}
        }
        if let Some(g) = &self.grid {
            if matches!(self.kind, Kind::SignalCdf | Kind::InterferenceCdf) && g[0] <= 0.0 {
                return Err(RunError::config("cdf grids are powers and must be positive"));
            }
        }
        Ok(())
    }
}

/// Text for `list-experiments`.
pub fn experiment_help() -> String {
    let mut out = String::from("Experiment kinds:\n");
    for k in Kind::ALL {
        out.push_str(&format!("  {:<22} {}\n", k.name(), k.description()));
    }
    let mut block = |title: &str, keys: &[(&str, &str)]| {
        out.push_str(&format!("\n{title}\n"));
        for (k, h) in keys {
            out.push_str(&format!("  {k:<10} {h}\n"));
        }
    };
    block("[experiment] keys:", EXPERIMENT_KEYS);
    block("Scalar keys ([experiment] or [cases]):", SCALAR_KEYS);
    block("[params] keys (also allowed in [cases]):", RawParams::KEYS);
    out.push_str(&format!(
        "\n[cases] keys hold comma lists of equal length; entry k of every list forms curve k.\n\
         Densities accept a `lambda0` suffix (lambda0 = {LAMBDA_0:e} m^-2).\n"
    ));
    out
}
