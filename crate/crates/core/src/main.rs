//! `optrec` — drive the recovery experiments from the command line.
//!
//! Exit codes: 0 on success, 2 for invalid configuration or arguments,
//! 3 for numerical failures.

use clap::{Args, Parser, Subcommand, ValueEnum};
use optrec::harness::{
    run_cheb_demo, run_noisy_experiment, run_rate_experiment, run_regularization_comparison,
    run_single_recover, ExperimentConfig, ExperimentKind, NoiseConfig, OutputFormat,
    ScheduleChoice,
};
use optrec::{Error, Result};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "optrec",
    version,
    about = "Recover functions from point samples by regularized least squares over splines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recovery error versus sample count, against the mesh benchmark h^s
    Rate(RunArgs),
    /// The same data solved with and without regularization
    CompareReg(RunArgs),
    /// Recovery error as the injected noise budget grows
    Noisy(RunArgs),
    /// Plane-geometry demo: slice and inflated-set radius curves
    ChebDemo(RunArgs),
    /// One recovery run with its near-optimality certificate
    Recover(RunArgs),
}

impl Command {
    fn kind(&self) -> ExperimentKind {
        match self {
            Command::Rate(_) => ExperimentKind::Rate,
            Command::CompareReg(_) => ExperimentKind::CompareReg,
            Command::Noisy(_) => ExperimentKind::Noisy,
            Command::ChebDemo(_) => ExperimentKind::ChebDemo,
            Command::Recover(_) => ExperimentKind::Recover,
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::Rate(a)
            | Command::CompareReg(a)
            | Command::Noisy(a)
            | Command::ChebDemo(a)
            | Command::Recover(a) => a,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// JSON config file; the flags below override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// Target id: quarter_sqrt, linear, constant:<v>, spline:<path>
    #[arg(long)]
    target: Option<String>,
    /// Smoothness exponent of the model ball
    #[arg(long)]
    p: Option<f64>,
    /// Comma-separated sample counts, strictly increasing
    #[arg(long = "m", value_delimiter = ',', value_name = "A,B,C")]
    m: Option<Vec<usize>>,
    /// Space dimension of an explicit schedule (requires --mu)
    #[arg(long)]
    n: Option<usize>,
    /// Regularization weight of an explicit schedule (requires --n)
    #[arg(long)]
    mu: Option<f64>,
    /// Data-term exponent of the powered loss
    #[arg(long)]
    alpha: Option<f64>,
    /// Penalty exponent of the powered loss (defaults to p)
    #[arg(long)]
    beta: Option<f64>,
    /// Data-term weight of the noise-aware loss, in (0, 1]
    #[arg(long)]
    tau: Option<f64>,
    /// Noise budget in empirical norm, in [0, 1]
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Parameter schedule (an explicit pair comes from --n/--mu instead)
    #[arg(long, value_enum)]
    schedule: Option<ScheduleArg>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Output file (directory for cheb-demo CSVs); stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScheduleArg {
    Practical,
    Theoretical,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

fn build_config(kind: ExperimentKind, args: &RunArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_path(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.experiment = kind;
    if let Some(target) = &args.target {
        cfg.target = target.clone();
    }
    if let Some(p) = args.p {
        cfg.p = p;
    }
    if let Some(m) = &args.m {
        cfg.m_list = m.clone();
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(alpha) = args.alpha {
        cfg.alpha = alpha;
    }
    if let Some(beta) = args.beta {
        cfg.beta = Some(beta);
    }
    match (args.n, args.mu) {
        (Some(n), Some(mu)) => {
            if args.schedule.is_some() {
                return Err(Error::Config(
                    "--schedule conflicts with the explicit --n/--mu pair".into(),
                ));
            }
            cfg.schedule = ScheduleChoice::Explicit { n, mu };
        }
        (None, None) => {}
        _ => {
            return Err(Error::Config(
                "an explicit schedule needs both --n and --mu".into(),
            ))
        }
    }
    if let Some(schedule) = args.schedule {
        cfg.schedule = match schedule {
            ScheduleArg::Practical => ScheduleChoice::Practical,
            ScheduleArg::Theoretical => ScheduleChoice::Theoretical,
        };
    }
    if args.gamma.is_some() || args.tau.is_some() {
        let mut noise = cfg.noise.unwrap_or(NoiseConfig {
            gamma: 0.0,
            tau: 0.5,
        });
        if let Some(gamma) = args.gamma {
            noise.gamma = gamma;
        }
        if let Some(tau) = args.tau {
            noise.tau = tau;
        }
        cfg.noise = Some(noise);
    }
    if let Some(format) = args.format {
        cfg.format = match format {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        };
    }
    if let Some(out) = &args.out {
        cfg.output = Some(out.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Write to the configured output file, or print to stdout.
fn emit(cfg: &ExperimentConfig, text: &str) -> Result<()> {
    match &cfg.output {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(path, text)?;
        }
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
        }
    }
    Ok(())
}

fn run(kind: ExperimentKind, args: &RunArgs) -> Result<()> {
    let cfg = build_config(kind, args)?;
    match kind {
        ExperimentKind::Rate => {
            let report = run_rate_experiment(&cfg)?;
            let text = match cfg.format {
                OutputFormat::Csv => report.to_csv(),
                OutputFormat::Json => report.to_json(),
            };
            emit(&cfg, &text)
        }
        ExperimentKind::CompareReg => {
            let report = run_regularization_comparison(&cfg)?;
            let text = match cfg.format {
                OutputFormat::Csv => report.to_csv(),
                OutputFormat::Json => report.to_json(),
            };
            emit(&cfg, &text)
        }
        ExperimentKind::Noisy => {
            let report = run_noisy_experiment(&cfg)?;
            let text = match cfg.format {
                OutputFormat::Csv => report.to_csv(),
                OutputFormat::Json => report.to_json(),
            };
            emit(&cfg, &text)
        }
        ExperimentKind::ChebDemo => {
            let report = run_cheb_demo(&cfg)?;
            match cfg.format {
                OutputFormat::Json => emit(&cfg, &report.to_json()),
                OutputFormat::Csv => match &cfg.output {
                    Some(dir) => {
                        for path in report.write_to(dir)? {
                            println!("wrote {}", path.display());
                        }
                        Ok(())
                    }
                    None => {
                        println!("# slice radius");
                        print!("{}", report.slice_csv());
                        for (i, (w_hat, _)) in report.curves.iter().enumerate() {
                            println!("\n# inflated radius, w_hat = {w_hat}");
                            print!("{}", report.curve_csv(i));
                        }
                        Ok(())
                    }
                },
            }
        }
        ExperimentKind::Recover => {
            let report = run_single_recover(&cfg)?;
            let text = match cfg.format {
                OutputFormat::Csv => report.to_csv(),
                OutputFormat::Json => report.to_json(),
            };
            emit(&cfg, &text)
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let kind = cli.command.kind();
    if let Err(err) = run(kind, cli.command.args()) {
        eprintln!("error: {err}");
        let code = match err {
            Error::NumericalFailure { .. } | Error::DegenerateCertificate(_) => 3,
            _ => 2,
        };
        std::process::exit(code);
    }
}
