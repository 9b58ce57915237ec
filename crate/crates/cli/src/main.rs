use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hybridnet_cli::{execute, load_spec, read_spec, spec, McScale, Overrides, RunError, BUILTIN_CONFIGS};

#[derive(Parser)]
#[command(name = "hybridnet", version, about = "Coverage and throughput of hybrid BS/IRS downlink networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment file, or every built-in experiment.
    Run {
        /// Experiment file.
        config: Option<PathBuf>,
        /// Run all built-in experiments at the selected MC scale.
        #[arg(long, conflicts_with = "config")]
        all_paper_figs: bool,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_parser = parse_scale)]
        mc_scale: Option<McScale>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Parse and check an experiment file without running it.
    Validate { config: PathBuf },
    /// List experiment kinds and every config key.
    ListExperiments,
}

fn parse_scale(s: &str) -> Result<McScale, String> {
    s.parse()
}

fn run(cmd: Command) -> Result<(), RunError> {
    match cmd {
        Command::ListExperiments => {
            print!("{}", spec::experiment_help());
            println!("\nBuilt-in experiments (run --all-paper-figs):");
            for (name, _) in BUILTIN_CONFIGS {
                println!("  {name}");
            }
            Ok(())
        }
        Command::Validate { config } => {
            let s = read_spec(&config, &Overrides::default())?;
            println!(
                "{}: ok ({} , {} case(s), mc {})",
                config.display(),
                s.kind,
                s.cases.len(),
                if s.mc { "on" } else { "off" }
            );
            Ok(())
        }
        Command::Run {
            config,
            all_paper_figs,
            out,
            seed,
            mc_scale,
            threads,
        } => {
            if let Some(n) = threads {
                if n == 0 {
                    return Err(RunError::config("--threads must be at least 1"));
                }
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .map_err(|e| RunError::config(format!("cannot set thread count: {e}")))?;
            }
            let overrides = Overrides { seed, mc_scale };
            let specs = if all_paper_figs {
                BUILTIN_CONFIGS
                    .iter()
                    .map(|(name, text)| {
                        load_spec(text, &overrides).map_err(|e| RunError::config(format!("{name}: {e}")))
                    })
                    .collect::<Result<Vec<_>, _>>()?
            } else {
                let path = config.ok_or_else(|| RunError::config("give an experiment file or --all-paper-figs"))?;
                vec![read_spec(&path, &overrides)?]
            };
            for s in &specs {
                eprintln!("running {} ({})", s.name, s.kind);
                let outcome = execute(s, &out)?;
                for line in &outcome.table.summary {
                    println!("{}: {line}", s.name);
                }
                println!("{}: wrote {}", s.name, outcome.csv.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
