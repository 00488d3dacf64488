mod cache;
mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::cache::Cache;

#[derive(Parser, Debug)]
#[command(name = "pointring", version, about = "Graphical calculus for n points on the projective line")]
pub struct Cli {
    #[command(flatten)]
    pub config: Config,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Config {
    /// seed for every randomized step
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// worker threads (0: one per core)
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
    /// memory budget in MB for exact linear algebra
    #[arg(long = "memory-mb", global = true, default_value_t = 4096)]
    pub memory_mb: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// cache directory (default: $POINTRING_CACHE_DIR or ./.pointring-cache)
    #[arg(long = "cache-dir", global = true)]
    pub cache_dir: Option<PathBuf>,
    /// neither read nor write the cache
    #[arg(long = "no-cache", global = true)]
    pub no_cache: bool,
    /// recompute and overwrite cached results
    #[arg(long, global = true)]
    pub refresh: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Gens {
    Simple,
    Simplest,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Over {
    Z,
    Q,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum MatrixKind {
    /// Sym²V → W
    Mult,
    /// V⊗V → W
    Tensor,
    /// simple binomial relations in V⊗V
    Simple,
    /// simplest binomial relations in V⊗V
    Simplest,
    /// W̃ → W
    WtildeToW,
    /// merging relations in W̃
    Merging,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// dimensions of V, W and friends
    Dims { n: usize },
    /// straighten a graph or vector (JSON file, '-' for stdin) to the planar basis
    Straighten { input: PathBuf },
    /// verify the identities I1, I2, I3 and the square identity
    Identities,
    /// compare the binomial relations with the relation lattices
    Span {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Gens::Simple)]
        gens: Gens,
        /// exact lattice comparison
        #[arg(long, value_enum)]
        over: Option<Over>,
        /// ranks modulo these primes (2 allowed)
        #[arg(long = "mod", num_args = 1.., value_delimiter = ',')]
        primes: Vec<u64>,
    },
    /// do the merging relations span the kernel of W̃ → W
    MergeSpan {
        #[arg(long)]
        n: usize,
        #[arg(long = "mod", num_args = 1.., value_delimiter = ',', default_values_t = [3u64, 5, 7])]
        primes: Vec<u64>,
    },
    /// dimension of W′ against W
    Wprime {
        #[arg(long)]
        n: usize,
        #[arg(long = "mod", num_args = 1.., value_delimiter = ',', default_values_t = [3u64])]
        primes: Vec<u64>,
    },
    /// quasi-planar equivalence classes and the ±2 comparison
    QpCensus {
        #[arg(long)]
        n: usize,
    },
    /// reduce an allowable graph to allowable quasi-planar graphs
    Reduce { input: PathBuf },
    /// reduce every graph of some cycle types plus random graphs
    ReduceCensus {
        #[arg(long, default_value_t = 10)]
        n: usize,
        /// cycle types like 3+3+4; repeatable
        #[arg(long = "type", value_delimiter = ',')]
        types: Vec<String>,
        #[arg(long, default_value_t = 10_000)]
        random: usize,
    },
    /// lift merging relations of a partitioned term to colored terms
    Lift {
        input: PathBuf,
        /// merge only these two pieces, as i,j
        #[arg(long, value_delimiter = ',')]
        merge: Option<Vec<usize>>,
    },
    /// the single cubic relation at six points
    CubicN6,
    /// odd cycle exchange against merging (n ≥ 12; an experiment)
    Exchange {
        #[arg(long, default_value_t = 12)]
        n: usize,
        #[arg(long = "mod", default_value_t = 3)]
        prime: u64,
    },
    /// write a matrix in sparse text format
    Export {
        #[arg(long, value_enum)]
        matrix: MatrixKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if cli.config.workers > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.config.workers).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let cache = if cli.config.no_cache {
        None
    } else {
        Some(Cache::new(cli.config.cache_dir.clone().unwrap_or_else(Cache::default_dir), cli.config.refresh))
    };
    match commands::run(&cli.command, &cli.config, cache.as_ref()) {
        Ok(report) => {
            match cli.config.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report).expect("report serializes")),
                Format::Text => print!("{}", report.to_text()),
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
