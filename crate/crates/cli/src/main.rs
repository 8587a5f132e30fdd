use std::path::PathBuf;
use std::process::ExitCode;

use blockext_core::ext::ExtMode;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

mod cache;
mod commands;
mod error;
mod spec_file;

use commands::Overrides;
use error::{exit, CliError, ErrorDocument};

/// Ext groups, characters and good subsets for blocks O(D x| E)e_phi with
/// abelian defect group D.
#[derive(Debug, Parser)]
#[command(name = "blockext", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// p-adic working precision N of the oracle
    #[arg(long, global = true, env = "BLOCKEXT_PRECISION")]
    precision: Option<u32>,
    /// cap on |E| during permutation closure
    #[arg(long, global = true, env = "BLOCKEXT_ORDER_BOUND")]
    order_bound: Option<usize>,
    /// cap on the number of candidate sets enumerated
    #[arg(long, global = true, env = "BLOCKEXT_ENUM_BOUND")]
    enum_bound: Option<u128>,
    /// cap on the cochain dimension handled by the oracle
    #[arg(long, global = true, env = "BLOCKEXT_SIZE_GUARD")]
    size_guard: Option<usize>,
    /// how Ext is computed: closed, oracle or crosscheck
    #[arg(long, global = true, env = "BLOCKEXT_MODE")]
    mode: Option<ExtMode>,
    /// worker threads for pair evaluation
    #[arg(long, global = true, env = "BLOCKEXT_JOBS")]
    jobs: Option<usize>,
    /// directory for the on-disk Ext memo
    #[arg(long, global = true, env = "BLOCKEXT_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// include wall-clock timing in the output
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a spec and report Z, D_1, D_2 and assumption flags
    Validate { spec: PathBuf },
    /// List Irr(B) with degrees and the decomposition matrix
    Chars { spec: PathBuf },
    /// Compute Ext^degree between two block characters
    Ext {
        spec: PathBuf,
        first: usize,
        second: usize,
        #[arg(long, short, default_value_t = 2)]
        degree: u32,
    },
    /// Enumerate good sets and compare with the predicted ones
    Goodsets { spec: PathBuf },
    /// Run every check on a spec or a directory of specs
    Verify {
        path: PathBuf,
        /// write golden files instead of comparing against them
        #[arg(long)]
        bless: bool,
    },
}

fn print<T: Serialize>(doc: &T) {
    println!("{}", serde_json::to_string_pretty(doc).expect("documents serialize"));
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let g = cli.global;
    if let Some(jobs) = g.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Usage(format!("--jobs: {e}")))?;
    }
    let over = Overrides {
        precision: g.precision,
        order_bound: g.order_bound,
        enum_bound: g.enum_bound,
        size_guard: g.size_guard,
        mode: g.mode,
        cache_dir: g.cache_dir,
        timing: g.timing,
    };
    match cli.command {
        Command::Validate { spec } => print(&commands::cmd_validate(&spec, &over)?),
        Command::Chars { spec } => print(&commands::cmd_chars(&spec, &over)?),
        Command::Ext { spec, first, second, degree } => print(&commands::cmd_ext(&spec, &over, first, second, degree)?),
        Command::Goodsets { spec } => print(&commands::cmd_goodsets(&spec, &over)?),
        Command::Verify { path, bless } => {
            let (doc, passed) = commands::cmd_verify(&path, &over, bless)?;
            print(&doc);
            if !passed {
                return Ok(exit::VERIFICATION_FAILED);
            }
        }
    }
    Ok(exit::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::INPUT_ERROR } else { exit::SUCCESS };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            print(&ErrorDocument::from(&e));
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
