use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

mod commands;

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "ncover",
    version,
    about = "Classify affine groups V ⋊ H as basic or non-basic for normal 2-coverings"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Args, Serialize)]
pub struct Options {
    /// Output format [default: json; table for `field`].
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
    /// Worker threads for scans and suites.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    #[serde(skip)]
    pub threads: Option<u64>,
    /// Omit the timestamp so identical runs produce identical bytes.
    #[arg(long, global = true)]
    pub deterministic: bool,
    /// Seed for the randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Largest group built by closure or as a permutation group.
    #[arg(long, global = true, env = "NCOVER_CAP", value_parser = clap::value_parser!(u64).range(1..))]
    pub cap: Option<u64>,
    /// Largest group whose subgroup structure is searched.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub lattice_cap: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteArg {
    Thm11,
    Thm12,
    Thm39,
    Dim2,
    Dim3,
    Su3,
    Lemmas,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase", tag = "subcommand")]
pub enum Command {
    /// Classify every subgroup of ΓL₁(q) for q in range.
    Scan {
        #[arg(long, default_value_t = 1)]
        dim: u32,
        #[arg(long, default_value_t = 2)]
        qmin: u32,
        #[arg(long)]
        qmax: u32,
    },
    /// Classify one subgroup (d, j, i) of ΓL₁(q), or the group generated by --gens.
    Check(Target),
    /// Brute-force normal covering numbers for one group.
    Gamma(GammaTarget),
    /// Run a verification suite.
    Verify {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        /// Largest q for the dimension-1 scans.
        #[arg(long)]
        qmax: Option<u32>,
        /// Largest q for brute-force checks in dimension 1.
        #[arg(long)]
        oracle_qmax: Option<u32>,
    },
    /// Structural checks on SU₃(q0) acting on F_{q0²}³.
    Su3 {
        #[arg(long)]
        q0: u32,
    },
    /// Recompute every dimension-1 record of a JSON report and compare.
    Recheck {
        #[arg(long)]
        report: PathBuf,
    },
    /// Print the field table of F_{p^f}.
    Field {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        f: u32,
    },
}

#[derive(Debug, Args, Serialize)]
pub struct Target {
    #[arg(long)]
    pub q: u32,
    #[arg(long, required_unless_present = "gens")]
    pub d: Option<u32>,
    #[arg(long, required_unless_present = "gens")]
    pub j: Option<u32>,
    #[arg(long, required_unless_present = "gens")]
    pub i: Option<u32>,
    /// Generator-spec file: one element per line, `s; row; row; ...`.
    #[arg(long, conflicts_with_all = ["d", "j", "i"])]
    pub gens: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct GammaTarget {
    #[command(flatten)]
    pub target: Target,
    /// Largest covering number searched for matrix groups.
    #[arg(long, default_value_t = 3)]
    pub kmax: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
