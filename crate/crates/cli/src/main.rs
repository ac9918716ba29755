//! `mseregion`: boundary sweeps, convexity scans, weighted sum-MSE
//! minimization, region sampling and segment tests from the command line.
//!
//! Exit codes: 0 success (or no witness), 1 a check failed, 2 input error,
//! 3 nonconvexity witness found.

mod commands;
mod error;
mod input;
mod manifest;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "mseregion", version, about = "MSE region analysis for MMSE multiple-access channels")]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct ChannelArgs {
    /// Channel matrix as JSON {"n", "k", "entries"}.
    #[arg(long, conflicts_with_all = ["h1", "h2"])]
    pub channels: Option<PathBuf>,
    /// Inline channel of user 1, comma-separated "re+imi" entries.
    #[arg(long, requires = "h2", allow_hyphen_values = true)]
    pub h1: Option<String>,
    /// Inline channel of user 2.
    #[arg(long, requires = "h1", allow_hyphen_values = true)]
    pub h2: Option<String>,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct SystemArgs {
    /// Total transmit power P_Tx.
    #[arg(long, default_value_t = 10.0)]
    pub power: f64,
    /// Noise variance.
    #[arg(long, default_value_t = 1.0)]
    pub sigma2: f64,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct SeedArg {
    /// Random seed; falls back to MSEREGION_SEED, then 0.
    #[arg(long, env = "MSEREGION_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sweep the two-user boundary and write it as CSV.
    Boundary {
        #[command(flatten)]
        channels: ChannelArgs,
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, default_value_t = 101)]
        samples: usize,
        /// CSV destination (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write a gnuplot script for the curve (needs --out).
        #[arg(long, requires = "out")]
        plot: Option<PathBuf>,
    },
    /// Certify boundary convexity on random two-user channels.
    ConvexityScan {
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        /// Receive antennas.
        #[arg(long = "dim", default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
        dim: u64,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long, default_value_t = 101)]
        grid: usize,
        /// Draw h2 as a multiple of h1.
        #[arg(long)]
        colinear: bool,
        #[command(flatten)]
        system: SystemArgs,
        /// Draw sigma^2 from [0.1, 10] and P_Tx from [1, 100] per trial
        /// (log-uniform) instead of using --sigma2/--power.
        #[arg(long)]
        random_config: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproduce the three-user nonconvexity instance.
    Counterexample {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 64)]
        starts: usize,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long, default_value_t = 9)]
        steps: usize,
        /// Also sample the region on a grid and write it as CSV.
        #[arg(long)]
        region_csv: Option<PathBuf>,
        #[arg(long, default_value_t = 50)]
        grid: usize,
        /// gnuplot script for the region and the segment (needs --region-csv).
        #[arg(long, requires = "region_csv")]
        plot: Option<PathBuf>,
    },
    /// Enumerate stationary points of the weighted sum-MSE.
    Wsmse {
        #[command(flatten)]
        channels: ChannelArgs,
        /// Comma-separated weights, one per user.
        #[arg(long)]
        weights: String,
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, default_value_t = 64)]
        starts: usize,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Test whether the segment between two MSE tuples leaves the region.
    Segment {
        #[command(flatten)]
        channels: ChannelArgs,
        #[command(flatten)]
        system: SystemArgs,
        /// First endpoint, comma-separated MSEs.
        #[arg(long)]
        a: String,
        /// Second endpoint.
        #[arg(long)]
        b: String,
        #[arg(long, default_value_t = 9)]
        steps: usize,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample the region on a power grid or at random powers.
    Region {
        #[command(flatten)]
        channels: ChannelArgs,
        #[command(flatten)]
        system: SystemArgs,
        /// Grid resolution R: powers i * P_Tx / R with sum i <= R.
        #[arg(long, conflicts_with = "random", required_unless_present = "random")]
        grid: Option<usize>,
        /// Number of uniform random power draws.
        #[arg(long)]
        random: Option<usize>,
        #[command(flatten)]
        seed: SeedArg,
        /// CSV destination; the manifest goes next to it.
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> error::CliResult<error::Outcome> {
    use commands as c;
    match cli.command {
        Command::Boundary { channels, system, samples, out, plot } => {
            c::boundary(&channels, system, samples, out.as_deref(), plot.as_deref())
        }
        Command::ConvexityScan {
            trials,
            dim,
            seed,
            grid,
            colinear,
            system,
            random_config,
            out,
        } => c::convexity_scan(&c::ScanArgs {
            trials: trials as usize,
            dim: dim as usize,
            seed: seed.seed,
            grid,
            colinear,
            system,
            random_config,
            out,
        }),
        Command::Counterexample { out, starts, seed, steps, region_csv, grid, plot } => {
            c::counterexample(&c::CounterexampleArgs {
                out,
                starts,
                seed: seed.seed,
                steps,
                region_csv,
                grid,
                plot,
            })
        }
        Command::Wsmse { channels, weights, system, starts, seed, out } => {
            c::wsmse(&channels, &weights, system, starts, seed.seed, out.as_deref())
        }
        Command::Segment { channels, system, a, b, steps, seed, out } => {
            c::segment(&channels, system, &a, &b, steps, seed.seed, out.as_deref())
        }
        Command::Region { channels, system, grid, random, seed, out } => {
            c::region(&channels, system, grid, random, seed.seed, &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.into()).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(error::EXIT_FAILED);
        }
    }
    match run(cli) {
        Ok(outcome) => ExitCode::from(outcome.code()),
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
