//! `bilevel` — solve, inspect and cross-check robust bilevel selection and
//! knapsack instances.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bilevel_cli::commands::{self, Algorithm, FamilyName, GenerateKind, GenerateOptions, LeaderChoice};
use bilevel_cli::format::{parse_instance, Problem};
use bilevel_cli::{exit, CliError};
use bilevel_core::rational::parse_pq;
use bilevel_core::{Policy, Rational};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bilevel", version, about = "Robust bilevel selection and knapsack solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PolicyArg {
    Opt,
    Pess,
}

impl From<PolicyArg> for Policy {
    fn from(p: PolicyArg) -> Policy {
        match p {
            PolicyArg::Opt => Policy::Optimistic,
            PolicyArg::Pess => Policy::Pessimistic,
        }
    }
}

#[derive(clap::Args)]
struct Common {
    /// Instance file.
    file: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: OutputFormat,
    /// Overrides the tie-breaking policy stored in the file.
    #[arg(long, value_enum)]
    policy: Option<PolicyArg>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance.
    Solve {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        algorithm: Option<Algorithm>,
        /// Maximum number of leader subsets for exhaustive enumeration.
        #[arg(long)]
        budget: Option<u128>,
    },
    /// Worst case for a fixed leader decision.
    Adversary {
        #[command(flatten)]
        common: Common,
        /// Leader item ids (binary leader), comma separated.
        #[arg(long, value_delimiter = ',', conflicts_with = "amount")]
        leader: Option<Vec<u32>>,
        /// Leader mass (continuous leader) or capacity (knapsack), as p/q.
        #[arg(long)]
        amount: Option<String>,
    },
    /// Solve with the 2-approximation.
    Approx {
        #[command(flatten)]
        common: Common,
    },
    /// Solve exactly by enumeration (or prefix guessing).
    Exact {
        #[command(flatten)]
        common: Common,
        /// `enum` (default) or `prefix-xp`.
        #[arg(long, value_enum)]
        algorithm: Option<Algorithm>,
        /// Maximum number of leader subsets to enumerate before giving up.
        #[arg(long)]
        budget: Option<u128>,
    },
    /// Compare an algorithm with the brute-force oracle on random instances.
    OracleCheck {
        #[arg(long, value_enum)]
        algorithm: Algorithm,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        /// Oracle subset and scenario budget.
        #[arg(long)]
        budget: Option<u128>,
        #[arg(long, value_enum, default_value = "json")]
        format: OutputFormat,
    },
    /// Generate an instance file.
    Generate {
        #[arg(long, value_enum, default_value = "rbsp")]
        kind: GenerateKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of items.
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, value_enum, default_value = "discrete")]
        uncertainty: FamilyName,
        /// Scenarios (discrete) or values per item (du).
        #[arg(long, default_value_t = 2)]
        set_size: usize,
        /// Make leader and follower items disjoint.
        #[arg(long)]
        disjoint: bool,
        /// Draw non-negative leader costs.
        #[arg(long)]
        nonneg: bool,
        /// Graph for vertex-cover instances: a cycle, clique, path or star named by letter and size (C5, K4, P6, S3).
        #[arg(long)]
        graph: Option<String>,
        #[arg(long, value_enum, default_value = "pess")]
        policy: PolicyArg,
        /// Write to a file instead of standard output.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Print the breakpoints of the leader's objective function.
    PlfDump {
        #[command(flatten)]
        common: Common,
    },
}

fn load(common: &Common) -> Result<Problem, CliError> {
    let text = read(&common.file)?;
    let mut problem = parse_instance(&text)?;
    if let (Some(p), Problem::Selection { instance, .. }) = (common.policy, &mut problem) {
        *instance = instance.with_policy(p.into());
    }
    Ok(problem)
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn rational(s: &str) -> Result<Rational, CliError> {
    parse_pq(s).map_err(|e| CliError::Usage(format!("--amount: {e}")))
}

fn emit<T: serde::Serialize>(value: &T, text: impl FnOnce() -> String, format: OutputFormat) {
    match format {
        OutputFormat::Json => println!("{}", serde_json::to_string_pretty(value).expect("results serialise")),
        OutputFormat::Text => print!("{}", text()),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve { common, algorithm, budget } => {
            let env = commands::solve(&load(&common)?, algorithm, budget)?;
            emit(&env, || env.to_text(), common.format);
        }
        Command::Approx { common } => {
            let env = commands::solve(&load(&common)?, Some(Algorithm::Approx2), None)?;
            emit(&env, || env.to_text(), common.format);
        }
        Command::Exact { common, algorithm, budget } => {
            let algorithm = algorithm.unwrap_or(Algorithm::Enum);
            if !matches!(algorithm, Algorithm::Enum | Algorithm::PrefixXp) {
                return Err(CliError::Usage("exact runs enum or prefix-xp".into()));
            }
            let env = commands::solve(&load(&common)?, Some(algorithm), budget)?;
            emit(&env, || env.to_text(), common.format);
        }
        Command::Adversary { common, leader, amount } => {
            let choice = match (leader, amount) {
                (Some(ids), None) => LeaderChoice::Set(ids),
                (None, Some(a)) => LeaderChoice::Amount(rational(&a)?),
                (None, None) => LeaderChoice::Set(Vec::new()),
                (Some(_), Some(_)) => unreachable!("clap rejects both"),
            };
            let env = commands::adversary(&load(&common)?, &choice)?;
            emit(&env, || env.to_text(), common.format);
        }
        Command::PlfDump { common } => print!("{}", commands::plf_dump(&load(&common)?)?),
        Command::OracleCheck { algorithm, seed, trials, budget, format } => {
            let report = commands::oracle_check(algorithm, seed, trials, budget)?;
            emit(&report, || report.to_text(), format);
        }
        Command::Generate { kind, seed, n, uncertainty, set_size, disjoint, nonneg, graph, policy, output } => {
            let opts = GenerateOptions {
                kind,
                seed,
                n,
                family: uncertainty,
                set_size,
                disjoint,
                nonneg,
                graph,
                policy: policy.into(),
            };
            let text = commands::generate(&opts)?;
            match output {
                Some(path) => std::fs::write(&path, text)
                    .map_err(|source| CliError::Io { path: path.display().to_string(), source })?,
                None => print!("{text}"),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::from(exit::OK),
        Err(e) => {
            if let CliError::Mismatch { counterexample, .. } = &e {
                print!("{counterexample}");
            }
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
