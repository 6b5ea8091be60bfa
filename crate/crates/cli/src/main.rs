use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wiretap_lbb::config::{self, ExperimentKind, Overrides};
use wiretap_lbb::experiments::Outcome;
use wiretap_lbb::plot::{emit_plot_script, relative_reference, PlotStyle};
use wiretap_lbb::{report, rerun_report, run_config, with_workers, Exit, RunError};

/// Location-based beamforming experiments for Rician wiretap channels.
#[derive(Parser)]
#[command(name = "wiretap-lbb", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Outage probability versus tau for each antenna count.
    SweepTau(RunArgs),
    /// Optimal tau and minimum outage for each antenna count.
    Optimize(RunArgs),
    /// Minimum outage versus Bob's mean SNR.
    SweepSnr(RunArgs),
    /// Outage averaged over Eve's estimated location.
    Uncertainty(RunArgs),
    /// Run every oracle check; exits with status 4 on any failure.
    Validate(RunArgs),
    /// Fisher information and location covariance of the anchor set.
    Fisher(RunArgs),
    /// Write a gnuplot script for a report.
    Plot(PlotArgs),
    /// Regenerate a report from its own footer.
    Rerun(RerunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Master seed (overrides the file).
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo trials per point (overrides the file).
    #[arg(long)]
    trials: Option<u64>,
    /// Number of tau grid points (overrides the file).
    #[arg(long)]
    grid: Option<usize>,
    /// Output CSV path; defaults to the file's `output_path`, then `<kind>.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Add Monte Carlo or oracle columns and check them.
    #[arg(long)]
    validate: bool,
    /// Cap sample counts for a fast smoke run.
    #[arg(long)]
    quick: bool,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct PlotArgs {
    /// Report CSV to plot.
    #[arg(long)]
    report: PathBuf,
    /// Script path; defaults to the report path with extension `.gp`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Line style.
    #[arg(long, value_enum, default_value_t)]
    style: PlotStyle,
}

#[derive(Args)]
struct RerunArgs {
    /// Report whose footer describes the run.
    #[arg(long)]
    report: PathBuf,
    /// Where to write the regenerated report.
    #[arg(long)]
    out: PathBuf,
    /// Worker threads.
    #[arg(long)]
    workers: Option<usize>,
}

fn finish(outcome: &Outcome, out: &Path) -> Result<Exit, RunError> {
    outcome
        .report
        .write(out)
        .map_err(|e| RunError::Io(format!("cannot write {}: {e}", out.display())))?;
    for line in &outcome.summary {
        println!("{line}");
    }
    for check in &outcome.checks {
        println!("{}", check.line());
    }
    println!("wrote {}", out.display());
    let failures = outcome.failures();
    if failures > 0 {
        eprintln!("{failures} of {} checks failed", outcome.checks.len());
        Ok(Exit::Validation)
    } else {
        Ok(Exit::Ok)
    }
}

fn run(kind: ExperimentKind, args: RunArgs) -> Result<Exit, RunError> {
    let (file, text) = config::load(&args.config)?;
    let overrides = Overrides {
        kind: Some(kind),
        seed: args.seed,
        n_trials: args.trials,
        grid_size: args.grid,
        validate: args.validate,
        quick: args.quick,
    };
    let (file, outcome) = with_workers(args.workers, || run_config(file, &text, &overrides))??;
    let out = args
        .out
        .or_else(|| file.experiment.output_path.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", kind.name())));
    finish(&outcome, &out)
}

fn plot(args: PlotArgs) -> Result<Exit, RunError> {
    let parsed = report::read_report(&args.report).map_err(RunError::Io)?;
    let script_path = args.out.unwrap_or_else(|| args.report.with_extension("gp"));
    let image = args.report.with_extension("svg");
    let script = emit_plot_script(
        &parsed,
        &relative_reference(&args.report, &script_path),
        &relative_reference(&image, &script_path),
        args.style,
    )
    .map_err(|e| RunError::Io(e.to_string()))?;
    std::fs::write(&script_path, script)
        .map_err(|e| RunError::Io(format!("cannot write {}: {e}", script_path.display())))?;
    println!("wrote {}", script_path.display());
    Ok(Exit::Ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::SweepTau(a) => run(ExperimentKind::SweepTau, a),
        Command::Optimize(a) => run(ExperimentKind::Optimize, a),
        Command::SweepSnr(a) => run(ExperimentKind::SweepSnr, a),
        Command::Uncertainty(a) => run(ExperimentKind::Uncertainty, a),
        Command::Validate(a) => run(ExperimentKind::Validate, a),
        Command::Fisher(a) => run(ExperimentKind::Fisher, a),
        Command::Plot(a) => plot(a),
        Command::Rerun(a) => with_workers(a.workers, || rerun_report(&a.report))
            .and_then(|r| r)
            .and_then(|outcome| finish(&outcome, &a.out)),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit() as u8)
        }
    }
}
