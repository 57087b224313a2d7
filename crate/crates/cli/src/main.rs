mod bench;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use pathcover::generate::{gen_set_a, gen_set_c};
use pathcover::io::{read_instance, write_instance};
use pathcover::oracle::{enumerate_best, ORACLE_MAX_NODES};
use pathcover::separation::MwisMode;
use pathcover::{solve, CutLevel, GenError, Instance, SolveConfig};

use bench::{parse_grid, BenchOptions};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {msg}")]
    Io { path: PathBuf, msg: String },
    #[error("{0}")]
    Mismatch(String),
    #[error("{0}")]
    Guard(String),
    #[error(transparent)]
    Solver(#[from] pathcover::SolverError),
    #[error(transparent)]
    Gen(GenError),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Mismatch(_) => 4,
            CliError::Guard(_) => 5,
            CliError::Solver(_) | CliError::Gen(_) => 1,
        }
    }
}

impl From<GenError> for CliError {
    fn from(e: GenError) -> Self {
        match e {
            GenError::Parameter(msg) => CliError::Usage(msg),
            other => CliError::Gen(other),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "pathcover",
    version,
    about = "Maximum-coverage path covers with mandatory arcs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Set {
    A,
    C,
}

#[derive(Clone, Copy, ValueEnum)]
enum Cuts {
    Ipc,
    Agrc,
    Rc,
}

impl From<Cuts> for CutLevel {
    fn from(c: Cuts) -> Self {
        match c {
            Cuts::Ipc => CutLevel::Ipc,
            Cuts::Agrc => CutLevel::Agrc,
            Cuts::Rc => CutLevel::Rc,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mwis {
    Greedy,
    Exact,
}

impl From<Mwis> for MwisMode {
    fn from(m: Mwis) -> Self {
        match m {
            Mwis::Greedy => MwisMode::Greedy,
            Mwis::Exact => MwisMode::Exact,
        }
    }
}

#[derive(clap::Args)]
struct SolveArgs {
    /// Highest cut class to separate.
    #[arg(long, value_enum, default_value = "ipc")]
    cuts: Cuts,
    /// Independent-set routine behind A-GRC and RC separation.
    #[arg(long, value_enum, default_value = "greedy")]
    mwis: Mwis,
    /// Wall-clock limit in seconds.
    #[arg(long, value_parser = seconds)]
    time_limit: Option<Duration>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SolveArgs {
    fn config(&self) -> SolveConfig {
        SolveConfig {
            cuts: self.cuts.into(),
            mwis: self.mwis.into(),
            time_limit: self.time_limit,
            seed: self.seed,
            ..SolveConfig::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance.
    Gen {
        #[arg(long, value_enum)]
        set: Set,
        #[arg(long)]
        n: usize,
        /// Arc probability (set a) or density target (set c).
        #[arg(long, value_parser = probability)]
        pa: f64,
        /// Mandatory-arc probability (set a) or sparsity target (set c).
        #[arg(long, value_parser = probability)]
        pac: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve an instance file and print the report as key=value lines.
    Solve {
        file: PathBuf,
        #[command(flatten)]
        args: SolveArgs,
    },
    /// Compare the solver against exhaustive enumeration.
    Verify {
        file: PathBuf,
        /// Variants to check; all of them when omitted.
        #[arg(long, value_enum, value_delimiter = ',')]
        cuts: Vec<Cuts>,
        /// Drops the last incumbent path before comparing.
        #[arg(long, hide = true)]
        corrupt_incumbent: bool,
    },
    /// Run a generated instance grid and print per-group averages.
    Bench {
        /// `SET:N,..:PA,..:PAC,..`; may be repeated.
        #[arg(long, required = true)]
        grid: Vec<String>,
        /// Instances per grid cell.
        #[arg(long, default_value_t = 5)]
        seeds: u64,
        /// First instance seed.
        #[arg(long, default_value_t = 0)]
        seed_base: u64,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "ipc,agrc,rc")]
        variants: Vec<Cuts>,
        #[arg(long, value_enum, default_value = "greedy")]
        mwis: Mwis,
        /// Per-solve wall-clock limit in seconds.
        #[arg(long, value_parser = seconds, default_value = "60")]
        time_limit: Duration,
        /// CSV destination; printed after the table when omitted.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn probability(s: &str) -> Result<f64, String> {
    let p: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(format!("{p} is not a probability in [0, 1]"))
    }
}

fn seconds(s: &str) -> Result<Duration, String> {
    let t: f64 = s.parse().map_err(|e| format!("{e}"))?;
    Duration::try_from_secs_f64(t).map_err(|e| format!("{e}"))
}

fn load(path: &Path) -> Result<Instance, CliError> {
    let io = |msg: String| CliError::Io {
        path: path.to_path_buf(),
        msg,
    };
    let text = fs::read_to_string(path).map_err(|e| io(e.to_string()))?;
    read_instance(&text).map_err(|e| io(e.to_string()))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io {
            path: p.to_path_buf(),
            msg: e.to_string(),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_gen(
    set: Set,
    n: usize,
    pa: f64,
    pac: f64,
    seed: u64,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let inst = match set {
        Set::A => gen_set_a(n, pa, pac, seed)?,
        Set::C => gen_set_c(n, pa, pac, seed)?,
    };
    write_out(out, &write_instance(&inst))
}

fn cmd_verify(file: &Path, cuts: &[Cuts], corrupt: bool) -> Result<(), CliError> {
    let inst = load(file)?;
    if inst.n() > ORACLE_MAX_NODES {
        return Err(CliError::Guard(format!(
            "instance has {} nodes; verification is limited to {ORACLE_MAX_NODES}",
            inst.n()
        )));
    }
    let oracle = enumerate_best(&inst)?;
    let levels: Vec<CutLevel> = if cuts.is_empty() {
        CutLevel::VARIANTS.to_vec()
    } else {
        cuts.iter().map(|&c| c.into()).collect()
    };
    let mut failed = Vec::new();
    for level in levels {
        let cfg = SolveConfig {
            cuts: level,
            ..SolveConfig::default()
        };
        let mut report = solve(&inst, &cfg)?;
        if corrupt {
            if let Some(p) = report.paths.pop() {
                report.covered -= p.len();
            }
        }
        let got = (report.covered, report.paths.len());
        let want = (oracle.covered, oracle.paths);
        let verdict = if got == want { "match" } else { "MISMATCH" };
        println!(
            "variant={level} nodes={} paths={} oracle.nodes={} oracle.paths={} {verdict}",
            got.0, got.1, want.0, want.1
        );
        if got != want {
            failed.push(level.name());
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Mismatch(format!(
            "solver disagrees with the oracle for {}",
            failed.join(", ")
        )))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gen {
            set,
            n,
            pa,
            pac,
            seed,
            out,
        } => cmd_gen(set, n, pa, pac, seed, out.as_deref()),
        Command::Solve { file, args } => {
            let inst = load(&file)?;
            let report = solve(&inst, &args.config())?;
            print!("{}", report.to_record());
            Ok(())
        }
        Command::Verify {
            file,
            cuts,
            corrupt_incumbent,
        } => cmd_verify(&file, &cuts, corrupt_incumbent),
        Command::Bench {
            grid,
            seeds,
            seed_base,
            variants,
            mwis,
            time_limit,
            csv,
        } => {
            let cells = grid
                .iter()
                .map(|g| parse_grid(g))
                .collect::<Result<Vec<_>, _>>()?
                .concat();
            let opts = BenchOptions {
                seeds,
                seed_base,
                variants: variants.into_iter().map(CutLevel::from).collect(),
                mwis: mwis.into(),
                time_limit,
            };
            let rows = bench::run(&cells, &opts)?;
            print!("{}", bench::table(&rows));
            let csv_text = bench::to_csv(&rows);
            match csv {
                Some(path) => write_out(Some(&path), &csv_text),
                None => {
                    println!();
                    write_out(None, &csv_text)
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
