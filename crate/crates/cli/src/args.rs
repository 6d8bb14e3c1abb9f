use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spl_core::Theta;

#[derive(Parser, Debug)]
#[command(name = "spl", version, about = "Shifted primes with large common prime factors")]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Directory holding the persisted sieve. Defaults to $SPL_CACHE_DIR or ./cache.
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,

    /// Worker threads.
    #[arg(long, global = true, default_value_t = default_workers(), value_parser = clap::value_parser!(u32).range(1..))]
    pub workers: u32,

    /// Write results here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Record format for experiment output.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Sieve at least this far, even if the command needs less.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(2..))]
    pub sieve_limit: Option<u64>,
}

fn default_workers() -> u32 {
    std::thread::available_parallelism().map_or(1, |n| n.get() as u32)
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Manage the persisted sieve.
    #[command(subcommand)]
    Sieve(SieveCommand),

    /// Shifted-prime counting functions.
    #[command(subcommand)]
    Count(CountCommand),

    /// M(t): primes p <= t with every h·p + 1 prime.
    Msim {
        #[arg(long)]
        t: u64,
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        shifts: Vec<i64>,
    },

    /// The weighted tuple sum W_{g,ℓ}(z).
    Wsum {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        ell: u32,
        #[arg(long)]
        z: u64,
        /// Also report the Hölder split and check the inequality.
        #[arg(long)]
        holder: bool,
    },

    /// Dickman's ρ and the thresholds derived from it.
    Dickman {
        #[command(subcommand)]
        command: DickmanCommand,

        /// Grid spacing; 1/step must be an integer.
        #[arg(long, global = true, default_value_t = spl_core::dickman::DEFAULT_STEP)]
        step: f64,
    },

    /// Check an identity numerically; exits 3 when it does not hold.
    #[command(subcommand)]
    Verify(VerifyCommand),

    /// Run an experiment and emit records.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
}

#[derive(Subcommand, Debug)]
pub enum SieveCommand {
    /// Build (or reuse) the cached sieve up to --limit.
    Build {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        limit: u64,
    },
}

#[derive(Args, Debug, Clone, Copy)]
pub struct SingleCount {
    #[arg(long)]
    pub x: u64,
    #[arg(long)]
    pub theta: Theta,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodArg {
    Oracle,
    Fast,
    Both,
}

#[derive(Subcommand, Debug)]
pub enum CountCommand {
    /// T_θ(x): primes p <= x with P⁺(p−1) >= p^θ.
    T(SingleCount),
    /// T'_θ(x): primes p <= x with P⁺(p−1) >= x^θ.
    Tprime(SingleCount),
    /// T^c_θ(x): primes p <= x with P⁺(p−1) <= p^θ.
    Tc(SingleCount),
    /// T_{k,θ}(x): ordered prime k-tuples sharing a large prime factor of their shifts.
    Tk {
        #[arg(long)]
        x: u64,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        theta: Theta,
        #[arg(long, value_enum, default_value_t = MethodArg::Fast)]
        method: MethodArg,
        /// Also print the number of unordered tuples.
        #[arg(long)]
        unordered: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum DickmanCommand {
    /// ρ(u).
    Rho {
        #[arg(long)]
        u: f64,
    },
    /// Root of θ − 4∫_{1/θ−1}^{1/θ} ρ(t)/t dt.
    Theta1,
    /// Root of θ − 4ρ(1/θ).
    Theta2,
    /// 1 − ρ(1/θ).
    Density {
        #[arg(long)]
        theta: Theta,
    },
}

#[derive(Subcommand, Debug)]
pub enum VerifyCommand {
    /// Partial summation for Σ p^{−k} over the window.
    Abel {
        #[arg(long)]
        x: u64,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        theta: Theta,
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        shifts: Vec<i64>,
    },
    /// ∏_{p|h}(1 + L/p) = Σ_{d|h} μ²(d) L^{ω(d)}/d for 2 <= h <= hmax.
    Mobius {
        #[arg(long)]
        hmax: u64,
        #[arg(long = "L", id = "big_l")]
        big_l: u64,
    },
}

#[derive(Subcommand, Debug)]
pub enum ExperimentCommand {
    /// T_{k,θ}(x)(ln x)²/x^{1−θ(k−1)} over an x grid.
    Ratio {
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long, default_value = "1/4")]
        theta: Theta,
        #[arg(long, value_delimiter = ',', default_value = "10000,100000,1000000")]
        x_grid: Vec<u64>,
    },
    /// T_θ/π and T'_θ/π against 1 − ρ(1/θ).
    Density {
        #[arg(long, default_value = "1/2")]
        theta: Theta,
        #[arg(long, value_delimiter = ',', default_value = "100000,1000000,10000000")]
        x_grid: Vec<u64>,
    },
    /// The chain S(x) <= majorant <= box sum and the sorted-tuple form.
    Rearrange {
        #[arg(long, default_value_t = 1000)]
        x: u64,
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long, default_value = "1/4")]
        theta: Theta,
    },
    /// Σ_{q≡1 (p)} 1/q against its heuristic and Brun–Titchmarsh sizes.
    Apsum {
        #[arg(long, default_value_t = 10_000_000)]
        x: u64,
        #[arg(long, value_delimiter = ',', default_value = "3,7,31,101,1009,3001")]
        p_list: Vec<u64>,
    },
}
