use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use primecurve_cli::config::{parse_profile, ExperimentConfig, ExperimentKind};
use primecurve_cli::runner;

#[derive(Parser)]
#[command(
    name = "primecurve",
    version,
    about = "Prime gap curvature, singular series averages, and near-progression censuses",
    after_help = "Exit codes: 0 all checks pass, 1 check failure, 2 usage error, 3 resource error."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Total curvature K_N against its reference bounds on a dyadic ladder
    Curvature(CommonArgs),
    /// Sign changes of p_{n+1}^2 - p_n p_{n+2} per dyadic index block
    SignChanges(CommonArgs),
    /// Window sums of |Delta_n| / p_n against their bracketing references
    DeltaSum(CommonArgs),
    /// Average of the singular product over the offset-pair fan
    SingularSum(CommonArgs),
    /// Exact census of near-progression prime triples
    Census(CommonArgs),
    /// Indices with moderate gap but non-negligible second difference
    BSet(CommonArgs),
    /// The scattered construction: intervals, density, block boundaries
    Scattered(CommonArgs),
    /// Run every verification criterion and report pass/fail
    VerifyAll(CommonArgs),
}

impl Command {
    fn split(self) -> (ExperimentKind, CommonArgs) {
        match self {
            Command::Curvature(a) => (ExperimentKind::Curvature, a),
            Command::SignChanges(a) => (ExperimentKind::SignChanges, a),
            Command::DeltaSum(a) => (ExperimentKind::DeltaSum, a),
            Command::SingularSum(a) => (ExperimentKind::SingularSum, a),
            Command::Census(a) => (ExperimentKind::Census, a),
            Command::BSet(a) => (ExperimentKind::BSet, a),
            Command::Scattered(a) => (ExperimentKind::Scattered, a),
            Command::VerifyAll(a) => (ExperimentKind::VerifyAll, a),
        }
    }
}

#[derive(Args)]
struct CommonArgs {
    /// JSON experiment config; the flags below override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// Progression modulus
    #[arg(long)]
    q: Option<u64>,
    /// Progression residue
    #[arg(long)]
    a: Option<u64>,
    /// Index budget N
    #[arg(long = "N")]
    n: Option<usize>,
    /// Range limit x
    #[arg(long)]
    x: Option<u64>,
    /// Window length H
    #[arg(long = "H")]
    h: Option<u64>,
    /// Relative defect threshold in (0, 1]
    #[arg(long)]
    alpha: Option<f64>,
    /// Density profile: constant:<d> | reciprocal-log | power-log:<c>:<beta> | table:<file>
    #[arg(long)]
    profile: Option<String>,
    /// Density threshold x0 (overrides the profile's own)
    #[arg(long)]
    x0: Option<f64>,
    /// Depth of the scattered construction
    #[arg(long)]
    lmax: Option<usize>,
    /// Write the report table as CSV
    #[arg(long)]
    out_csv: Option<PathBuf>,
    /// Write the full report as JSON
    #[arg(long)]
    out_json: Option<PathBuf>,
    /// Worker threads (0 = auto)
    #[arg(long)]
    workers: Option<usize>,
    /// Directory for the binary sieve cache
    #[arg(long)]
    cache: Option<PathBuf>,
}

impl CommonArgs {
    fn into_config(self, kind: ExperimentKind) -> primecurve::Result<ExperimentConfig> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        config.kind = kind;
        if let Some(q) = self.q {
            config.q = q;
        }
        if let Some(a) = self.a {
            config.a = a;
        }
        if let Some(n) = self.n {
            config.n = n;
        }
        if let Some(x) = self.x {
            config.x = x;
        }
        if let Some(h) = self.h {
            config.h = h;
        }
        if let Some(alpha) = self.alpha {
            config.alpha = alpha;
        }
        if let Some(spec) = &self.profile {
            config.profile.kind = parse_profile(spec)?;
        }
        if let Some(x0) = self.x0 {
            config.profile.x0 = x0;
        }
        if let Some(lmax) = self.lmax {
            config.lmax = lmax;
        }
        if self.out_csv.is_some() {
            config.out_csv = self.out_csv;
        }
        if self.out_json.is_some() {
            config.out_json = self.out_json;
        }
        if let Some(workers) = self.workers {
            config.workers = workers;
        }
        if self.cache.is_some() {
            config.cache = self.cache;
        }
        Ok(config)
    }
}

fn main() -> ExitCode {
    let (kind, args) = Cli::parse().command.split();
    let config = match args.into_config(kind) {
        Ok(config) => config,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match runner::run(&config) {
        Ok(report) => {
            print!("{}", report.render_human());
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(runner::exit_code(&e))
        }
    }
}
