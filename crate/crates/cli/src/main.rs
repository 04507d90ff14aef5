//! `lrcmr`: build, verify and analyse cyclic maximally recoverable codes.
//!
//! Exit status: 0 when every check passes, 1 when a verified property
//! fails (the report carries a witness), 2 on invalid input or unmet
//! hypotheses.

mod commands;
mod render;

use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "lrcmr", version, about = "Cyclic maximally recoverable codes")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads for enumerations (default: all cores).
    #[arg(long, global = true, env = "LRCMR_JOBS")]
    pub jobs: Option<usize>,
    /// Report every runtime as 0 so that output is byte-reproducible.
    #[arg(long, global = true)]
    pub no_timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// The cyclic family given by its root set.
    CyclicMr,
    /// The quasi-cyclic family given by an explicit parity-check matrix.
    QuasiCyclicMr,
}

#[derive(Args, Debug, Clone)]
pub struct ParamArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub b: u32,
    #[arg(long)]
    pub r: u64,
    #[arg(long)]
    pub delta: u64,
    /// Exponent of the first global row of the quasi-cyclic family.
    #[arg(long)]
    pub s: Option<u64>,
}

/// Locality parameters; taken from the code file when omitted.
#[derive(Args, Debug, Clone)]
pub struct LocalityArgs {
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long)]
    pub delta: Option<usize>,
}

#[derive(Subcommand)]
pub enum Command {
    /// Build a code and write it to a file.
    Construct {
        #[arg(long, value_enum)]
        family: Family,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, short = 'o')]
        output: std::path::PathBuf,
    },
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Minimum distance of a stored code.
    Mindist {
        #[arg(long)]
        code: std::path::PathBuf,
        #[arg(long, value_enum, default_value_t = DistMethod::Auto)]
        method: DistMethod,
        /// Stop searching above this weight.
        #[arg(long)]
        cap: Option<usize>,
    },
    #[command(subcommand)]
    Bounds(BoundsCommand),
    #[command(subcommand)]
    Equiv(EquivCommand),
    /// Repair erasures locally, falling back to global decoding.
    Repair {
        #[arg(long)]
        code: std::path::PathBuf,
        /// Comma-separated symbols, `?` for an erasure.
        #[arg(long)]
        word: String,
        #[command(flatten)]
        locality: LocalityArgs,
    },
    /// Run the acceptance criteria (`all` or a number from 1 to 11).
    Repro {
        #[arg(default_value = "all")]
        target: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistMethod {
    Auto,
    Subsets,
    Codewords,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Definition,
    Fastpath,
    Both,
    Sampled,
}

#[derive(Subcommand)]
pub enum VerifyCommand {
    /// Check that a partition into repair sets exists.
    Locality {
        #[arg(long)]
        code: std::path::PathBuf,
        #[command(flatten)]
        locality: LocalityArgs,
    },
    /// Check maximal recoverability.
    Mr {
        #[arg(long)]
        code: std::path::PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Both)]
        mode: ModeArg,
        #[command(flatten)]
        locality: LocalityArgs,
        /// Patterns drawn in sampled mode.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = lrcmr::repro::SAMPLE_SEED)]
        seed: u64,
    },
    /// Check closure under cyclic shift.
    Cyclic {
        #[arg(long)]
        code: std::path::PathBuf,
    },
    /// Check the Singleton-type bound and the field-size bound.
    Optimal {
        #[arg(long)]
        code: std::path::PathBuf,
        #[command(flatten)]
        locality: LocalityArgs,
    },
}

#[derive(Subcommand)]
pub enum BoundsCommand {
    /// Field-size lower bound for optimal LRCs, with a verdict when `--q` is given.
    Field {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        r: u64,
        #[arg(long)]
        delta: u64,
        #[arg(long)]
        q: Option<u64>,
    },
    /// Length upper bounds from prior work.
    Length {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        d: u64,
        #[arg(long)]
        r: u64,
        #[arg(long)]
        delta: u64,
        #[arg(long)]
        k: u64,
    },
    /// Field-size verdicts for every cyclic-family parameter set up to a field size.
    Sweep {
        #[arg(long, default_value_t = 64)]
        max_field: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PermKind {
    Multiplier,
    Psi,
}

#[derive(Subcommand)]
pub enum EquivCommand {
    /// Explicit block permutation making the quasi-cyclic family cyclic.
    Sufficient {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Necessary-condition report for the quasi-cyclic family.
    Necessary {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Build a permutation and optionally apply it to a code.
    BuildPerm {
        #[arg(long, value_enum)]
        kind: PermKind,
        #[arg(long)]
        n: usize,
        /// Multiplier, or comma-separated per-group multipliers.
        #[arg(long)]
        t: String,
        #[arg(long)]
        a: Option<usize>,
        /// Comma-separated offsets (block maps only).
        #[arg(long)]
        z: Option<String>,
        #[arg(long)]
        code: Option<std::path::PathBuf>,
        #[arg(long, short = 'o')]
        output: Option<std::path::PathBuf>,
    },
    /// Exhaustive search over block maps.
    Search {
        #[arg(long)]
        code: std::path::PathBuf,
        #[arg(long)]
        a: usize,
        #[arg(long)]
        limit: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs.filter(|&j| j > 0) {
        // only fails if a pool already exists, which cannot happen this early
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    let start = Instant::now();
    match commands::dispatch(&cli.command) {
        Ok(mut reply) => {
            reply.report.runtime_ms = start.elapsed().as_millis() as u64;
            if cli.no_timing {
                render::zero_timings(&mut reply);
            }
            print!("{}", render::render(&reply, cli.format));
            ExitCode::from(reply.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            let report =
                lrcmr::io::RunReport::new(commands::name(&cli.command), serde_json::Value::Null)
                    .results(serde_json::json!({ "error": format!("{e:#}") }));
            let reply = commands::Reply::failed(report);
            print!("{}", render::render(&reply, cli.format));
            ExitCode::from(2)
        }
    }
}
