//! `mtc`: construct, verify and analyze exact modular data.
//!
//! Exit codes: 0 success, 1 negative finding, 2 usage or format error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "mtc", version, about = "Exact modular data workbench")]
pub struct Cli {
    /// Machine-readable JSON reports instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Print extra detail in text mode.
    #[arg(short, long, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a zoo member and write it as JSON.
    Construct {
        #[command(subcommand)]
        family: Family,
        /// Output file; standard output when absent.
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
    /// Check the premodular axioms, and modularity when the file claims it.
    Verify { path: PathBuf },
    /// Run analysis predicates on a data file.
    Analyze {
        path: PathBuf,
        /// Predicates to run; a default set when none are given.
        #[arg(long = "predicate", short = 'P', value_enum)]
        predicates: Vec<Predicate>,
        /// Prime `p` for the dimension-shape predicates.
        #[arg(long)]
        p: Option<u64>,
        /// Square-free cofactor `m` for the dimension-shape predicates.
        #[arg(long)]
        m: Option<u64>,
    },
    /// Z_2 condensation bookkeeping for a boson.
    Condense {
        path: PathBuf,
        /// Name of the boson label.
        #[arg(long)]
        boson: String,
    },
    /// Counting and classification enumerations.
    #[command(group(ArgGroup::new("what").required(true).args(["metaplectic_count", "cyclic_classes"])))]
    Enumerate {
        /// Count metaplectic data of dimension 8N (N odd).
        #[arg(long = "metaplectic-count", value_name = "N")]
        metaplectic_count: Option<u64>,
        /// Classes of cyclic modular data on Z_n up to relabelling.
        #[arg(long = "cyclic-classes", value_name = "n")]
        cyclic_classes: Option<u64>,
    },
    /// Search for a label bijection identifying two data files.
    Compare { left: PathBuf, right: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum Family {
    /// Pointed data on Z_n with q(j) = exp(2πi a j²/n); n ≡ 2 mod 4 adds a semion factor.
    Cyclic {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        a: i64,
        /// Sign of the semion twist when n ≡ 2 mod 4.
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        semion: i8,
    },
    /// Semion data with twist ±i.
    Semion {
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        sign: i8,
    },
    /// Ising data with θ_σ = exp(2πi ν/16).
    Ising {
        #[arg(long, allow_negative_numbers = true)]
        nu: i64,
    },
    /// Even metaplectic data of dimension 8N.
    Metaplectic {
        #[arg(long = "N", value_name = "N")]
        n: u64,
    },
    /// Deligne product of two data files.
    Deligne {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
    },
    /// The premodular data on Z_2 × Z_2 with fourth-root twists.
    Z2z2Family,
    /// Character ring of the dihedral group of order 2m.
    DihedralRing {
        #[arg(long)]
        m: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Predicate {
    /// Strictly weakly integral implies 4 | D.
    Swi,
    /// Pointedness criteria for D = p^k m (needs --p, --m).
    Pointedness,
    Semion,
    Ising,
    TannakianZ2,
    Primality,
    Metaplectic,
    /// Classification disjunction for D = p²m or p³m (needs --p, --m).
    Theorem,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(outcome) => {
            print!("{}", outcome.text);
            ExitCode::from(if outcome.positive { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
