//! Experiment runner: parses experiment files, evaluates the analytic
//! pipeline (and optionally the simulator), and writes CSV plus a manifest.

pub mod error;
pub mod output;
pub mod run;
pub mod spec;

use std::path::{Path, PathBuf};
use std::time::Instant;

pub use error::RunError;
pub use run::{run_experiment, Table};
pub use spec::{ExperimentSpec, Kind, McScale};

/// Checked-in experiment files, compiled into the binary.
pub const BUILTIN_CONFIGS: &[(&str, &str)] = &[
    ("signal_cdf.conf", include_str!("../configs/signal_cdf.conf")),
    ("interference_cdf.conf", include_str!("../configs/interference_cdf.conf")),
    ("coverage_curve.conf", include_str!("../configs/coverage_curve.conf")),
    ("coverage_no_irs.conf", include_str!("../configs/coverage_no_irs.conf")),
    ("mean_powers.conf", include_str!("../configs/mean_powers.conf")),
    ("throughput_vs_lambdaI.conf", include_str!("../configs/throughput_vs_lambdaI.conf")),
    ("throughput_vs_zeta.conf", include_str!("../configs/throughput_vs_zeta.conf")),
    ("throughput_vs_cost.conf", include_str!("../configs/throughput_vs_cost.conf")),
    ("optimal_zeta_sweep.conf", include_str!("../configs/optimal_zeta_sweep.conf")),
];

/// Command-line overrides applied on top of an experiment file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub mc_scale: Option<McScale>,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub csv: PathBuf,
    pub manifest: PathBuf,
    pub table: Table,
}

pub fn load_spec(text: &str, overrides: &Overrides) -> Result<ExperimentSpec, RunError> {
    let mut spec = ExperimentSpec::parse(text)?;
    if let Some(s) = overrides.seed {
        spec.seed = s;
    }
    if let Some(m) = overrides.mc_scale {
        spec.mc_scale = m;
    }
    Ok(spec)
}

pub fn read_spec(path: &Path, overrides: &Overrides) -> Result<ExperimentSpec, RunError> {
    let text = std::fs::read_to_string(path).map_err(|e| RunError::io(path, e))?;
    load_spec(&text, overrides)
}

/// Runs one experiment and writes `<name>.csv` and `<name>.manifest`.
pub fn execute(spec: &ExperimentSpec, out_dir: &Path) -> Result<Outcome, RunError> {
    let dir = output::ensure_dir(out_dir)?;
    let start = Instant::now();
    let table = run_experiment(spec)?;
    let csv = dir.join(format!("{}.csv", spec.name));
    output::write_file(&csv, &output::render_csv(spec, &table))?;
    let manifest = dir.join(format!("{}.manifest", spec.name));
    let text = output::render_manifest(spec, rayon::current_num_threads(), start.elapsed(), &csv);
    output::write_file(&manifest, &text)?;
    Ok(Outcome {
        csv,
        manifest,
        table,
    })
}
