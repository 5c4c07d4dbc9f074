use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anatomy_cli::config::{CommandKind, ExperimentConfig};
use anatomy_cli::experiments::run;
use anatomy_core::harness::Scale;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "anatomy", version, about = "Weighted random integers, permutations and their limit laws")]
struct Cli {
    /// Worker threads for exact scans (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for report.json, CSV tables and timing.json.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print the JSON report to stdout instead of the main CSV table.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sieved S(x) against the predicted asymptotic.
    #[command(alias = "sum")]
    SieveSum(ExpArgs),
    /// Prime-sum and prime-power growth conditions.
    Conditions(ExpArgs),
    /// Draw integers from the weighted measure.
    Sample(ExpArgs),
    /// Exact law of a statistic by a full scan.
    ExactDist(ExpArgs),
    /// Omega against the normal limit.
    EkCompare(ExpArgs),
    /// Largest prime against the Poisson-Dirichlet limit.
    PdCompare(ExpArgs),
    /// Smooth-number probabilities against rho_theta.
    Smooth(ExpArgs),
    /// Exponents of small primes against their limit laws.
    SmallPrime(ExpArgs),
    /// Polynomial-regime partition sums and saddle points.
    PolyAsym(ExpArgs),
    /// Polynomial-regime Omega mean and typical prime.
    PolyTypical(ExpArgs),
    /// Cycle structure under Ewens-type measures.
    Ewens(ExpArgs),
    /// Tabulate rho_theta.
    Dickman(ExpArgs),
    /// Run the acceptance suite.
    Selftest(SelftestArgs),
    /// Run an experiment described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args, Default)]
struct ExpArgs {
    /// Weight spec, e.g. theta_omega:2, powerfree:2, poly_log:1,1.
    #[arg(long)]
    weight: Option<String>,
    /// One or more x values (comma separated, 1e6 notation accepted).
    #[arg(long, value_delimiter = ',')]
    x: Vec<String>,
    /// Statistic: big_omega, small_omega, nu:P, smooth:Y, identity.
    #[arg(long)]
    statistic: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
    /// Use an exact scan or enumeration instead of sampling.
    #[arg(long)]
    exact: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Polynomial-regime scale K.
    #[arg(long)]
    k: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    u: Vec<f64>,
    #[arg(long)]
    umax: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    primes: Vec<u64>,
    #[arg(long)]
    kmax: Option<u32>,
    /// Fail (exit 3) when the headline metric exceeds this.
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long, default_value = "desk")]
    scale: String,
    /// Write a JUnit XML result file.
    #[arg(long)]
    junit: Option<PathBuf>,
}

fn config_from(kind: CommandKind, a: ExpArgs) -> Result<ExperimentConfig, String> {
    let mut c = ExperimentConfig::new(kind);
    c.weight = a.weight;
    c.x = a
        .x
        .iter()
        .map(|s| anatomy_core::arith::parse_count(s).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    c.statistic = a.statistic;
    c.samples = a.samples;
    c.exact = a.exact;
    c.seed = a.seed;
    c.theta = a.theta;
    c.gamma = a.gamma;
    c.k = a.k;
    c.n = a.n;
    c.u = a.u;
    c.u_max = a.umax;
    c.step = a.step;
    c.primes = a.primes;
    c.kmax = a.kmax;
    c.tolerance = a.tolerance;
    Ok(c)
}

fn build_config(cmd: Command) -> Result<ExperimentConfig, String> {
    use Command::*;
    let (kind, args) = match cmd {
        SieveSum(a) => (CommandKind::SieveSum, a),
        Conditions(a) => (CommandKind::Conditions, a),
        Sample(a) => (CommandKind::Sample, a),
        ExactDist(a) => (CommandKind::ExactDist, a),
        EkCompare(a) => (CommandKind::EkCompare, a),
        PdCompare(a) => (CommandKind::PdCompare, a),
        Smooth(a) => (CommandKind::Smooth, a),
        SmallPrime(a) => (CommandKind::SmallPrime, a),
        PolyAsym(a) => (CommandKind::PolyAsym, a),
        PolyTypical(a) => (CommandKind::PolyTypical, a),
        Ewens(a) => (CommandKind::Ewens, a),
        Dickman(a) => (CommandKind::Dickman, a),
        Selftest(s) => {
            let mut c = ExperimentConfig::new(CommandKind::Selftest);
            c.scale = Some(s.scale.parse::<Scale>().map_err(|e| e.to_string())?);
            c.junit = s.junit;
            return Ok(c);
        }
        Run { config } => {
            let text = std::fs::read_to_string(&config).map_err(|e| format!("{}: {e}", config.display()))?;
            return ExperimentConfig::from_json(&text).map_err(|e| e.to_string());
        }
    };
    config_from(kind, args)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let mut cfg = match build_config(cli.command) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if cli.out.is_some() {
        cfg.output = cli.out;
    }
    let start = Instant::now();
    let report = match run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let seconds = start.elapsed().as_secs_f64();
    if let Some(dir) = &cfg.output {
        if let Err(e) = report.write_dir(dir, seconds) {
            eprintln!("error: writing {}: {e}", dir.display());
            return ExitCode::from(1);
        }
    }
    if cli.json {
        print!("{}", report.to_json());
    } else if cfg.command == CommandKind::Selftest {
        for row in &report.tables[0].rows {
            let passed = row[2].to_string() == "1";
            println!("[{}] C{:0>2} {}: {}", if passed { "PASS" } else { "FAIL" }, row[0].to_string(), row[1], row[3]);
        }
    } else if let Some(t) = report.tables.first() {
        print!("{}", t.to_csv_string());
    }
    let failed = report.failed_checks();
    for c in &failed {
        eprintln!("FAILED: {} = {} (tolerance {})", c.name, c.value, c.tolerance);
    }
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    }
}
