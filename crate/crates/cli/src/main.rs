//! `fcone`: command-line surface over the fcone-core library.
//!
//! Exit codes: `0` success, `1` mathematical refutation (with a
//! certificate in the artifact), `2` usage or input error, `3` budget
//! exhaustion (the run is resumable where a checkpoint applies).

mod artifact;
mod cmds;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "fcone",
    version,
    about = "Exact certificates for F-nef divisor classes, cyclic lifts, and design cones"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check bracket nonnegativity of a function on a cyclic group.
    Fnef {
        #[command(subcommand)]
        sub: FnefCmd,
    },
    /// Lift an integer F-nef divisor to a cyclic group and verify it.
    Lift(LiftArgs),
    /// Build stratal boundary-effectivity certificates for a symmetric class.
    Certify(CertifyArgs),
    /// Exhaustive support-lattice searches.
    Strongf {
        #[command(subcommand)]
        sub: StrongfCmd,
    },
    /// Pairwise balanced design reports.
    Pbd {
        #[command(subcommand)]
        sub: PbdCmd,
    },
    /// Exact rational linear programming.
    Lp {
        #[command(subcommand)]
        sub: LpCmd,
    },
    /// Reproduce a verification suite end to end.
    Repro(ReproArgs),
}

#[derive(Subcommand, Debug)]
enum FnefCmd {
    /// Scan every bracket of the function and report the first violation.
    Check(FnefCheckArgs),
}

#[derive(Args, Debug)]
struct FnefCheckArgs {
    /// Order of the cyclic group.
    #[arg(long)]
    modulus: i64,
    /// `standard`, `total`, or a path to a function JSON file.
    #[arg(long = "fn")]
    function: String,
    /// Write the JSON artifact here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct LiftArgs {
    /// Number of markings; the group is the product of the first n-1 primes.
    #[arg(long)]
    n: usize,
    /// Divisor JSON file: { "n", "coeff": [ {"subset", "value"} ] }.
    #[arg(long)]
    divisor: PathBuf,
    /// Comma-separated primes; must be the first n-1 primes when given.
    #[arg(long, value_delimiter = ',')]
    primes: Option<Vec<i64>>,
    /// Supertotal multiplier; defaults to twice the largest coefficient.
    #[arg(long)]
    multiplier: Option<i64>,
    /// Write the JSON artifact here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CertifyArgs {
    /// Number of markings.
    #[arg(long)]
    n: u32,
    /// Size-profile JSON: array of n+1 rationals, or { "n", "values" }.
    #[arg(long = "symmetric-fn")]
    symmetric_fn: PathBuf,
    /// Only certify strict partitions (no repeated parts); skips the ascent.
    #[arg(long)]
    strict_only: bool,
    /// Write the JSON artifact here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum StrongfCmd {
    /// Walk every coordinate support, checking the design/criticality dichotomy.
    Verify(StrongfVerifyArgs),
}

#[derive(Args, Debug)]
struct StrongfVerifyArgs {
    /// Number of markings (4 through 8).
    #[arg(long)]
    n: usize,
    /// Checkpoint file, replayed on start and appended as orbits finish.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Worker threads (falls back to FCONE_THREADS; execution is sequential
    /// so results never depend on this value).
    #[arg(long)]
    threads: Option<usize>,
    /// Stop after this many fresh nodes; the checkpoint makes the run resumable.
    #[arg(long)]
    node_budget: Option<u64>,
    /// Checkpoint records per fsync batch.
    #[arg(long, default_value_t = 10_000)]
    batch: usize,
    /// Keep every k-th node for the re-verification sample.
    #[arg(long, default_value_t = 997)]
    sample_stride: u64,
    /// Write the JSON artifact here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum PbdCmd {
    /// Enumerate the extremal effective designs up to relabeling.
    Rays(PbdRaysArgs),
    /// Emit the (11,5,2)-biplane and optionally separate it from the F-curve cone.
    Biplane(PbdBiplaneArgs),
}

#[derive(Args, Debug)]
struct PbdRaysArgs {
    /// Number of markings (4 through 7).
    #[arg(long)]
    n: usize,
    /// Abort double description when an intermediate cone exceeds this many rays.
    #[arg(long, default_value_t = 500_000)]
    max_rays: usize,
    /// Write the JSON artifact here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PbdBiplaneArgs {
    /// Also compute an F-nef functional separating the biplane from the cone.
    #[arg(long)]
    separate: bool,
    /// Write the JSON artifact here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum LpCmd {
    /// Solve or decide feasibility of a rational system, with certificates.
    Solve(LpSolveArgs),
}

#[derive(Args, Debug)]
struct LpSolveArgs {
    /// System JSON: { "vars", "rows", "objective"? }.
    system: PathBuf,
    /// Write the JSON artifact here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReproArgs {
    /// Suite name; `desk` runs every desk-scale acceptance criterion.
    #[arg(long)]
    suite: String,
    /// Scratch directory for checkpoints and other intermediate files.
    #[arg(long)]
    scratch: Option<PathBuf>,
    /// Write the JSON artifact here.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Process outcome with the documented exit-code contract.
pub enum Outcome {
    /// The requested check or computation succeeded.
    Success,
    /// The queried mathematical statement is refuted; the artifact holds
    /// the certificate.
    Refuted,
}

/// Failures that do not produce a mathematical verdict.
pub enum Failure {
    /// Bad flags, malformed input files, unsupported parameters.
    Usage(String),
    /// A budget ran out; rerun with a checkpoint or a larger budget.
    Budget(String),
}

pub type CmdResult = Result<Outcome, Failure>;

fn exit_of(result: CmdResult) -> ExitCode {
    match result {
        Ok(Outcome::Success) => ExitCode::from(0),
        Ok(Outcome::Refuted) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("budget exhausted: {msg}");
            ExitCode::from(3)
        }
    }
}

/// `--threads` flag with the FCONE_THREADS fallback; recorded in artifacts
/// but never consulted by the sequential kernels.
fn resolve_threads(flag: Option<usize>) -> usize {
    flag.or_else(|| std::env::var("FCONE_THREADS").ok().and_then(|v| v.parse().ok()))
        .unwrap_or(1)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fnef { sub: FnefCmd::Check(args) } => {
            cmds::fnef_check(args.modulus, &args.function, args.out.as_deref())
        }
        Command::Lift(args) => cmds::lift(
            args.n,
            &args.divisor,
            args.primes.as_deref(),
            args.multiplier,
            args.out.as_deref(),
        ),
        Command::Certify(args) => {
            cmds::certify(args.n, &args.symmetric_fn, args.strict_only, args.out.as_deref())
        }
        Command::Strongf { sub: StrongfCmd::Verify(args) } => {
            let threads = resolve_threads(args.threads);
            cmds::strongf_verify(
                args.n,
                args.checkpoint.as_deref(),
                threads,
                args.node_budget,
                args.batch,
                args.sample_stride,
                args.out.as_deref(),
            )
        }
        Command::Pbd { sub: PbdCmd::Rays(args) } => {
            cmds::pbd_rays(args.n, args.max_rays, args.out.as_deref())
        }
        Command::Pbd { sub: PbdCmd::Biplane(args) } => {
            cmds::pbd_biplane(args.separate, args.out.as_deref())
        }
        Command::Lp { sub: LpCmd::Solve(args) } => {
            cmds::lp_solve(&args.system, args.out.as_deref())
        }
        Command::Repro(args) => {
            cmds::repro(&args.suite, args.scratch.as_deref(), args.out.as_deref())
        }
    };
    exit_of(result)
}
