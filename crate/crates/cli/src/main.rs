use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use varboot::Method;
use varboot_cli::analyze::{analyze, AnalysisSettings, AnalyzeOptions, DEFAULT_BOOTSTRAP};
use varboot_cli::reproduce::{run_figure, write_outputs, Figure, Scale};
use varboot_cli::simulate::simulate;
use varboot_cli::{CliError, Result};

#[derive(Parser)]
#[command(name = "varboot", version, about = "Bootstrap uncertainty of variance partitioning")]
struct Cli {
    /// Worker threads (changes speed only, never results).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Partition a community table between environmental and spatial predictors.
    Analyze(AnalyzeArgs),
    /// Re-run a simulation study and check its trends.
    Reproduce(ReproduceArgs),
    /// Generate a synthetic dataset from a scenario document.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    community: PathBuf,
    #[arg(long)]
    env: PathBuf,
    #[arg(long)]
    spatial: PathBuf,
    #[arg(long, default_value = "cca", value_parser = parse_method)]
    method: Method,
    #[arg(long, default_value_t = DEFAULT_BOOTSTRAP)]
    bootstrap: usize,
    #[arg(long)]
    seed: u64,
    /// Analyse ln(1 + N) (default for cca).
    #[arg(long, conflicts_with = "no_log1p")]
    log1p: bool,
    /// Analyse raw abundances (default for rda).
    #[arg(long)]
    no_log1p: bool,
    /// Expand two coordinate columns into x, y, x^2, xy, y^2.
    #[arg(long)]
    trend_surface: bool,
    /// Record wall-clock runtime in the JSON report.
    #[arg(long)]
    timing: bool,
    /// JSON report path; without it the JSON goes to stdout and the text to stderr.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReproduceArgs {
    #[arg(value_parser = |s: &str| s.parse::<Figure>())]
    figure: Figure,
    #[arg(long, default_value = "desk", value_parser = |s: &str| s.parse::<Scale>())]
    scale: Scale,
    #[arg(long)]
    seed: u64,
    /// Override the replicate count set by --scale.
    #[arg(long)]
    bootstrap: Option<usize>,
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario document (`key = value` lines, `[species]` sections).
    config: PathBuf,
    /// Output prefix; writes <prefix>_community.csv and <prefix>_env.csv.
    #[arg(long)]
    out: PathBuf,
}

fn parse_method(s: &str) -> std::result::Result<Method, String> {
    s.parse::<Method>().map_err(|e| e.to_string())
}

fn run_analyze(a: AnalyzeArgs) -> Result<()> {
    let start = Instant::now();
    let mut settings = AnalysisSettings::new(a.method, a.bootstrap, a.seed);
    if a.log1p {
        settings.log1p = true;
    }
    if a.no_log1p {
        settings.log1p = false;
    }
    settings.timing = a.timing;
    let report = analyze(&AnalyzeOptions {
        community: a.community,
        env: a.env,
        spatial: a.spatial,
        trend_surface: a.trend_surface,
        settings,
    })?;
    let json = format!("{}\n", report.to_json());
    let text = report.to_text(start.elapsed().as_secs_f64());
    match a.out {
        Some(path) => {
            std::fs::write(&path, json).map_err(|e| CliError::io(&path, e))?;
            print!("{text}");
        }
        None => {
            print!("{json}");
            eprint!("{text}");
        }
    }
    Ok(())
}

fn run_reproduce(a: ReproduceArgs) -> Result<()> {
    let start = Instant::now();
    let replicates = a.bootstrap.unwrap_or_else(|| a.scale.replicates());
    let run = run_figure(a.figure, a.seed, replicates)?;
    let (paths, summary) = write_outputs(&run, a.scale, a.seed, replicates, &a.out)?;
    for c in &summary.checks {
        println!("[{}] {} ({})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    println!(
        "wrote {}, {}, {} in {:.1} s",
        paths.csv.display(),
        paths.svg.display(),
        paths.json.display(),
        start.elapsed().as_secs_f64()
    );
    if summary.passed {
        Ok(())
    } else {
        let names: Vec<&str> = run.failed_checks().iter().map(|c| c.name.as_str()).collect();
        Err(CliError::Acceptance(names.join("; ")))
    }
}

fn run_simulate(a: SimulateArgs) -> Result<()> {
    let text = std::fs::read_to_string(&a.config).map_err(|e| CliError::io(&a.config, e))?;
    let (cfg, files) = simulate(&text, &a.config, &a.out)?;
    println!(
        "wrote {} sites x {} species to {} and {}",
        cfg.n_sites,
        cfg.niches.len(),
        files.community.display(),
        files.env.display()
    );
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    if let Some(k) = cli.threads {
        if k == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot start thread pool: {e}")))?;
    }
    match cli.command {
        Command::Analyze(a) => run_analyze(a),
        Command::Reproduce(a) => run_reproduce(a),
        Command::Simulate(a) => run_simulate(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
