use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use travwave::config::ExperimentConfig;
use travwave::{check, output, run_experiment, run_sweep, ExperimentKind, LabError, Status};

/// Stability experiments for traveling waves of 1+1 dimensional wave systems.
///
/// Exit codes: 0 pass, 1 usage or input error, 2 hypothesis violated,
/// 3 numerical failure.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Null structure, hyperbolicity margin and profile decay constants.
    Check(Common),
    /// Run the experiment named in the config.
    Run(Common),
    /// Run a cross-product sweep.
    Sweep(Common),
    /// Run a convergence study.
    Convergence(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `out` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides `seed` in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Print nothing on success.
    #[arg(long)]
    quiet: bool,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig, LabError> {
        let mut cfg = ExperimentConfig::load(&self.config)?;
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        Ok(cfg)
    }

    fn out_dir(&self, cfg: &ExperimentConfig) -> PathBuf {
        self.out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("out"))
    }
}

fn require(cfg: &ExperimentConfig, kind: ExperimentKind) -> Result<(), LabError> {
    if cfg.experiment == kind {
        Ok(())
    } else {
        Err(LabError::Config(format!(
            "this subcommand needs experiment = \"{}\", the config has \"{}\"",
            kind.name(),
            cfg.experiment.name()
        )))
    }
}

fn dispatch(command: &Command) -> Result<Status, LabError> {
    match command {
        Command::Check(args) => {
            let cfg = args.load()?;
            let report = check::check(&cfg)?;
            if let Some(dir) = &args.out {
                output::ensure_dir(dir)?;
                output::write_json(&report, &dir.join("check.json"))?;
            }
            if !args.quiet {
                println!("{}", serde_json::to_string_pretty(&report)?);
            }
            Ok(report.status)
        }
        Command::Run(args) | Command::Sweep(args) | Command::Convergence(args) => {
            let cfg = args.load()?;
            match command {
                Command::Sweep(_) => require(&cfg, ExperimentKind::Sweep)?,
                Command::Convergence(_) => require(&cfg, ExperimentKind::Convergence)?,
                _ => {}
            }
            let dir = args.out_dir(&cfg);
            let started = Instant::now();
            if cfg.experiment == ExperimentKind::Sweep {
                let result = run_sweep(&cfg, Some(&dir))?;
                output::write_timing(&dir, started.elapsed().as_secs_f64())?;
                if !args.quiet {
                    for row in &result.rows {
                        match (&row.summary, &row.error) {
                            (Some(s), _) => println!(
                                "run {:03} epsilon={} amplitude={} status={:?} ratio={:?}",
                                row.index, row.epsilon, row.amplitude, s.status, s.ratio
                            ),
                            (None, Some(e)) => println!("run {:03} error: {e}", row.index),
                            (None, None) => {}
                        }
                    }
                    println!("wrote {}", dir.join("sweep.csv").display());
                }
                Ok(result.status())
            } else {
                let summary = run_experiment(&cfg, Some(&dir))?;
                output::write_timing(&dir, started.elapsed().as_secs_f64())?;
                if !args.quiet {
                    println!("{}", serde_json::to_string_pretty(&summary)?);
                }
                Ok(summary.status)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match dispatch(&cli.command) {
        Ok(status) => ExitCode::from(status.exit_code() as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
