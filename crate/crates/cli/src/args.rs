use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "ruinlab", version, about = "Ruin probabilities of the double-on-win, halve-on-loss strategy")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output file; standard output if absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads. Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Rational arithmetic throughout.
    #[arg(long, global = true, conflicts_with = "fast")]
    pub exact: bool,
    /// Double precision (the default).
    #[arg(long, global = true)]
    pub fast: bool,
    #[arg(long, global = true, env = "RUINLAB_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
}

impl GlobalArgs {
    pub fn mode(&self) -> Mode {
        if self.exact {
            Mode::Exact
        } else {
            Mode::Fast
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Fast,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// f_n(., p) as a step function on [x_lo, x_hi].
    Grid(GridArgs),
    /// Exact coefficients of f_n(x, .) and a table over p in [0, 1/2].
    Poly(PolyArgs),
    /// Monte Carlo estimate of the probability of ruin within n rounds.
    Mc(McArgs),
    /// Fractions of paths doomed, ruined and still alive at a horizon.
    Eventual(EventualArgs),
    /// Local exponent of 1 - f near x = 2.
    Holder(HolderArgs),
    /// Histogram of the first k binary digits of S.
    Digits(DigitsArgs),
    /// Monotone coupling of two win probabilities.
    Couple(CoupleArgs),
    /// Doom threshold scan for the generalized strategy.
    Scan(ScanArgs),
    /// Block decomposition of S.
    Blocks(BlocksArgs),
    /// Pathwise identities on random paths.
    Verify(VerifyArgs),
    /// Plateau estimates of f at fixed p.
    Plateau(PlateauArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GridArgs {
    /// Win probability, as "n/d" or a decimal.
    #[arg(long)]
    pub p: String,
    #[arg(long)]
    pub n: u32,
    #[arg(long, default_value = "2")]
    pub x_lo: String,
    #[arg(long, default_value = "6")]
    pub x_hi: String,
    #[arg(long, default_value_t = ruinlab::ruinrec::DEFAULT_BREAKPOINT_BUDGET)]
    pub budget: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PolyArgs {
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub n: u32,
    #[arg(long, default_value_t = 11)]
    pub p_samples: u32,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct McArgs {
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub n: u64,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EventualArgs {
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 500)]
    pub horizon: u64,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct HolderArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 4)]
    pub k_lo: u32,
    #[arg(long, default_value_t = 10)]
    pub k_hi: u32,
    /// Recursion depth; `k_hi + 16` if absent.
    #[arg(long)]
    pub n: Option<u32>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DigitsArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 3)]
    pub k: u32,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 32)]
    pub guard_bits: u32,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CoupleArgs {
    #[arg(long, default_value = "3")]
    pub x: String,
    #[arg(long)]
    pub p1: f64,
    #[arg(long)]
    pub p2: f64,
    #[arg(long, default_value_t = 300)]
    pub horizon: u64,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ScanArgs {
    #[arg(long)]
    pub rho: f64,
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub x_lo: f64,
    #[arg(long)]
    pub x_hi: f64,
    #[arg(long, default_value_t = 0.05)]
    pub x_step: f64,
    #[arg(long, default_value_t = 300)]
    pub horizon: u64,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BlocksArgs {
    #[arg(long)]
    pub p: f64,
    /// Blocks per sample.
    #[arg(long, default_value_t = 8)]
    pub count: usize,
    #[arg(long, default_value_t = 10)]
    pub samples: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long, default_value = "3")]
    pub x: String,
    #[arg(long, default_value_t = 0.3)]
    pub p: f64,
    #[arg(long, default_value_t = 200)]
    pub steps: u64,
    #[arg(long, default_value_t = 1000)]
    pub paths: u64,
    /// Window width for the Z-chain check.
    #[arg(long, default_value_t = 3)]
    pub k: u32,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PlateauArgs {
    /// Starting fortunes, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub x: Vec<String>,
    #[arg(long)]
    pub p: String,
    #[arg(long, default_value = "0.000001")]
    pub tol: String,
    #[arg(long, default_value_t = 512)]
    pub n_cap: u32,
}
