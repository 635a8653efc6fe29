//! `proxgrad`: experiment runner for proximal gradient methods with
//! extrapolation and restart.
//!
//! Exit codes: 0 success, 2 usage error, 3 numerical failure, 4 iteration
//! cap reached before the configured convergence test fired.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use proxgrad_cli::config::expand_config_args;
use proxgrad_cli::{run_experiment, run_table1, CliError, ExperimentConfig, Family, ScheduleSpec};

#[derive(Parser)]
#[command(
    name = "proxgrad",
    about = "Proximal gradient experiments: LASSO, l1-logistic regression, simplex QP",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write trace.csv, manifest.txt, rate.txt.
    Run(RunArgs),
    /// Compare pg_e, fista and pg over a batch of random QP instances.
    Table1(TableArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Optional config file with `key = value` lines mirroring the flags;
    /// command-line flags override it.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Convergence tolerance (duality gap or relative successive change).
    #[arg(long)]
    tol: Option<f64>,

    /// Iteration cap.
    #[arg(long)]
    max_iter: Option<usize>,

    /// Instance seed (base seed in batch mode).
    #[arg(long)]
    seed: Option<u64>,

    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Problem family: lasso, logistic or qp.
    #[arg(long)]
    family: Option<String>,

    /// Dimension preset: desk or paper.
    #[arg(long)]
    preset: Option<String>,

    /// Sample count (regression families).
    #[arg(short)]
    m: Option<usize>,

    /// Variable count.
    #[arg(short)]
    n: Option<usize>,

    /// Ground-truth sparsity (regression families).
    #[arg(long)]
    sparsity: Option<usize>,

    /// Regularization weight.
    #[arg(long)]
    lambda: Option<f64>,

    /// Simplex sum override (qp).
    #[arg(long)]
    s_sum: Option<f64>,

    /// Extrapolation schedule: none | fista | fista-r | fista-ar |
    /// fista-both | constant <beta> | constant-frac <frac>.
    #[arg(long, num_args = 1..=2)]
    schedule: Option<Vec<String>>,

    /// Fixed-restart interval.
    #[arg(long = "K")]
    restart_interval: Option<usize>,

    /// Lyapunov weight for the trace's H column (default: midpoint of the
    /// admissible window).
    #[arg(long)]
    alpha: Option<f64>,

    /// Write the generated instance next to the trace.
    #[arg(long)]
    save_instance: bool,

    /// Load an instance file instead of generating one.
    #[arg(long)]
    instance: Option<PathBuf>,
}

#[derive(Args)]
struct TableArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// QP dimension.
    #[arg(short)]
    n: Option<usize>,

    /// Number of random instances.
    #[arg(long)]
    instances: Option<usize>,
}

fn main() -> ExitCode {
    let args = match expand_config_args(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            // clap renders its own message; keep its exit code semantics
            // for --help/--version.
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(2),
            };
        }
    };

    let outcome = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Table1(args) => cmd_table(args),
    };
    match outcome {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

fn cmd_run(args: RunArgs) -> Result<ExitCode, CliError> {
    let family = match (&args.family, &args.instance) {
        (Some(f), _) => Family::parse(f)?,
        // The family is recovered from the file header after loading; use
        // a placeholder that only affects generated dims.
        (None, Some(_)) => Family::Lasso,
        (None, None) => {
            return Err(CliError::Usage(
                "--family is required unless --instance is given".into(),
            ))
        }
    };

    let mut config = match args.preset.as_deref() {
        None | Some("desk") => ExperimentConfig::desk(family),
        Some("paper") => ExperimentConfig::paper(family),
        Some(other) => {
            return Err(CliError::Usage(format!(
                "unknown preset {other:?} (expected desk or paper)"
            )))
        }
    };

    if let Some(m) = args.m {
        config.m = m;
    }
    if let Some(n) = args.n {
        config.n = n;
    }
    if let Some(s) = args.sparsity {
        config.sparsity = s;
    }
    if let Some(l) = args.lambda {
        config.lambda = l;
    }
    config.simplex_sum = args.s_sum;
    if let Some(tokens) = &args.schedule {
        config.schedule = ScheduleSpec::parse(tokens)?;
    }
    if let Some(k) = args.restart_interval {
        config.restart_interval = k;
    }
    if let Some(t) = args.common.tol {
        config.tol = t;
    }
    if let Some(mi) = args.common.max_iter {
        config.max_iter = mi;
    }
    config.alpha = args.alpha;
    if let Some(seed) = args.common.seed {
        config.seed = seed;
    }
    if let Some(out) = args.common.out {
        config.out_dir = out;
    }
    config.save_instance = args.save_instance;
    config.load_instance = args.instance.clone();
    if let Some(path) = &args.instance {
        // Termination protocol must match the loaded family.
        let text = fs::read_to_string(path)?;
        let loaded = proxgrad::problems::instance_from_text(&text)?;
        config.family = Family::parse(loaded.family())?;
    }

    let outcome = run_experiment(&config)?;
    let last = outcome.result.trace.last().expect("nonempty trace");
    println!(
        "{} | schedule {} | {} iterations | termination {} | F = {:.9e}",
        outcome.instance.family(),
        config.schedule.label(),
        outcome.result.iterations,
        outcome.result.termination_reason.as_str(),
        last.f_value,
    );
    println!(
        "wrote {} {} {}",
        outcome.trace_path.display(),
        outcome.manifest_path.display(),
        outcome.rate_path.display()
    );
    Ok(if outcome.hit_cap {
        ExitCode::from(4)
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_table(args: TableArgs) -> Result<ExitCode, CliError> {
    let mut config = ExperimentConfig::desk(Family::Qp);
    if let Some(n) = args.n {
        config.n = n;
    }
    if let Some(i) = args.instances {
        config.instances = i;
    }
    if let Some(t) = args.common.tol {
        config.tol = t;
    }
    if let Some(mi) = args.common.max_iter {
        config.max_iter = mi;
    }
    if let Some(seed) = args.common.seed {
        config.seed = seed;
    }
    if let Some(out) = args.common.out {
        config.out_dir = out;
    }

    let summary = run_table1(&config)?;
    for a in &summary.algos {
        println!(
            "{:>6}: mean iter {:8.1} | mean fval {:12.4} | completed {} | failures {}",
            a.algorithm, a.mean_iterations, a.mean_final_objective, a.completed, a.failures
        );
    }
    println!("wrote {}", config.out_dir.join("table1.csv").display());
    Ok(ExitCode::SUCCESS)
}
