use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polydist::rational::check_unit_interval;
use polydist::{parse_rational, Rational};

mod commands;
mod report;

/// Parametric triplet and quartet distances between partially resolved trees.
#[derive(Parser, Debug)]
#[command(name = "polydist", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Distance between two trees.
    Dist {
        #[command(subcommand)]
        which: DistKind,
    },
    /// Lower and upper bounds on the Hausdorff distance between two trees.
    HausdorffBounds(BoundsArgs),
    /// Best-of-profile median, optionally refined or checked exhaustively.
    Consensus(ConsensusArgs),
    /// Greedily resolve a tree against a profile.
    Refine(RefineArgs),
    /// Enumerate all trees on n taxa.
    Enumerate(EnumerateArgs),
    /// Expected distance between two uniformly random trees.
    Expected(ExpectedArgs),
    /// Check the fast algorithms against brute force on random inputs.
    Selftest(SelftestArgs),
}

#[derive(Subcommand, Debug)]
enum DistKind {
    /// Parametric triplet distance (rooted trees).
    Triplet(DistArgs),
    /// Parametric quartet distance (unrooted trees).
    Quartet(DistArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Fast,
    Brute,
    Approx,
}

#[derive(Args, Debug)]
struct DistArgs {
    /// Newick files holding two trees in total.
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// Weight of triplets (quartets) resolved in only one tree.
    #[arg(long, default_value = "1/2", value_parser = parse_p)]
    p: Rational,
    /// Read the trees as unrooted.
    #[arg(long)]
    unrooted: bool,
    /// Triplets: fast (default) or brute. Quartets: brute (default), approx,
    /// or fast (approximation with the quadratic shared-quartet count).
    #[arg(long, value_enum)]
    method: Option<Method>,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[arg(required = true)]
    files: Vec<PathBuf>,
    #[arg(long)]
    unrooted: bool,
    /// Also compute the exact Hausdorff distance when the two refinement
    /// counts multiply to at most this many pairs.
    #[arg(long, default_value_t = 10_000)]
    cap: u128,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct ConsensusArgs {
    /// Newick files holding the profile.
    #[arg(required = true)]
    files: Vec<PathBuf>,
    #[arg(long, default_value = "1/2", value_parser = parse_p)]
    p: Rational,
    #[arg(long)]
    unrooted: bool,
    /// Greedily resolve the best profile member.
    #[arg(long)]
    refine: bool,
    /// Also search all trees for an optimal median (small n only).
    #[arg(long)]
    exhaustive: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct RefineArgs {
    /// Newick file holding the tree to resolve.
    tree: PathBuf,
    /// Newick files holding the profile.
    #[arg(required = true)]
    profile: Vec<PathBuf>,
    #[arg(long, default_value = "2/3", value_parser = parse_p)]
    p: Rational,
    #[arg(long)]
    unrooted: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct EnumerateArgs {
    /// Number of taxa.
    #[arg(long)]
    n: usize,
    #[arg(long)]
    unrooted: bool,
    /// Print every tree.
    #[arg(long)]
    list: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct ExpectedArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value = "1/2", value_parser = parse_p)]
    p: Rational,
    #[arg(long)]
    unrooted: bool,
    /// Also estimate the expectation from this many sampled pairs.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct SelftestArgs {
    /// Random pairs per check.
    #[arg(long, default_value_t = 100)]
    pairs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

fn parse_p(s: &str) -> Result<Rational, String> {
    let p = parse_rational(s).map_err(|e| e.to_string())?;
    check_unit_interval(&p).map_err(|e| e.to_string())?;
    Ok(p)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (outcome, json) = match cli.command {
        Command::Dist { which: DistKind::Triplet(a) } => (commands::dist_triplet(&a), a.json),
        Command::Dist { which: DistKind::Quartet(a) } => (commands::dist_quartet(&a), a.json),
        Command::HausdorffBounds(a) => (commands::hausdorff(&a), a.json),
        Command::Consensus(a) => (commands::consensus(&a), a.json),
        Command::Refine(a) => (commands::refine(&a), a.json),
        Command::Enumerate(a) => (commands::enumerate(&a), a.json),
        Command::Expected(a) => (commands::expected(&a), a.json),
        Command::Selftest(a) => (commands::selftest(&a), a.json),
    };
    match outcome {
        Ok((report, success)) => {
            if json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.to_text());
            }
            if success {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
