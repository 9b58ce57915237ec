use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use crate::error::RunError;
use crate::run::Table;
use crate::spec::ExperimentSpec;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// CSV text: `#` header lines (legend, summary, notes), then the table.
/// Contains nothing that depends on timing or thread count.
pub fn render_csv(spec: &ExperimentSpec, table: &Table) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# hybridnet {VERSION}");
    let _ = writeln!(out, "# experiment {} (kind {})", spec.name, spec.kind);
    let mc = if spec.mc {
        format!("on, scale {}, seed {}", spec.mc_scale.name(), spec.seed)
    } else {
        "off".to_string()
    };
    let _ = writeln!(out, "# monte carlo: {mc}");
    for (c, m) in &table.legend {
        let _ = writeln!(out, "# {c}: {m}");
    }
    for s in &table.summary {
        let _ = writeln!(out, "# summary: {s}");
    }
    for n in &table.notes {
        let _ = writeln!(out, "# note: {n}");
    }
    let _ = writeln!(out, "{}", table.columns.join(","));
    for row in &table.rows {
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

pub fn render_manifest(spec: &ExperimentSpec, threads: usize, wall: Duration, csv: &Path) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "tool = hybridnet {VERSION}");
    let _ = writeln!(out, "experiment = {}", spec.name);
    let _ = writeln!(out, "kind = {}", spec.kind);
    let _ = writeln!(out, "csv = {}", csv.display());
    let _ = writeln!(out, "seed = {}", spec.seed);
    let _ = writeln!(out, "mc = {}", if spec.mc { "on" } else { "off" });
    let _ = writeln!(out, "mc_scale = {}", spec.mc_scale.name());
    let _ = writeln!(out, "geometry = {:?}", spec.geometry);
    let _ = writeln!(out, "threads = {threads}");
    let _ = writeln!(out, "wall_time_s = {:.3}", wall.as_secs_f64());
    let _ = writeln!(out, "analytic = {:?}", spec.analytic);
    for (i, case) in spec.cases.iter().enumerate() {
        let _ = writeln!(out, "case.{i}.params = {:?}", case.raw);
        let _ = writeln!(out, "case.{i}.scalars = {:?}", case.scalars);
        if let Ok(p) = case.params() {
            let _ = writeln!(
                out,
                "case.{i}.resolved = lambda_B {:e}, lambda_I {:e}, beta {:e}, W {:e}, gamma_bar {:e}",
                p.lambda_b(),
                p.lambda_i(),
                p.beta(),
                p.w(),
                p.gamma_bar()
            );
        }
    }
    out.push_str("\n# source config\n");
    for line in spec.source.lines() {
        let _ = writeln!(out, "# {line}");
    }
    out
}

pub fn write_file(path: &Path, text: &str) -> Result<(), RunError> {
    fs::write(path, text).map_err(|e| RunError::io(path, e))
}

pub fn ensure_dir(dir: &Path) -> Result<PathBuf, RunError> {
    fs::create_dir_all(dir).map_err(|e| RunError::io(dir, e))?;
    Ok(dir.to_path_buf())
}
