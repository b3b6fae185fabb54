//! `fninf`: command-line front end for the F_{n,inf} toolkit.
//!
//! Every command prints one JSON report (`--format text` prints a short
//! human summary instead). Exit status: 0 ok, 1 fail or not certified,
//! 2 usage or input errors.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use fninf_core::Rational;

#[derive(Parser, Debug)]
#[command(
    name = "fninf",
    version,
    about = "Exact computations in the Thompson groups F_{n,inf}"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output style.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Add wall-clock time to the report (makes output nondeterministic).
    #[arg(long, global = true)]
    pub timing: bool,

    /// Also write the resulting map as plain PL map JSON to this file.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Residue of an n-adic rational modulo n-1.
    Phi {
        #[arg(long)]
        n: u32,
        #[arg(allow_hyphen_values = true)]
        x: Rational,
    },
    /// Write t0 = k / (n^t (n^s - 1)) with (n-1) | k.
    Decompose {
        #[arg(long)]
        n: u32,
        #[arg(allow_hyphen_values = true)]
        t0: Rational,
    },
    /// Evaluate a map at a point.
    Eval {
        map: PathBuf,
        #[arg(allow_hyphen_values = true)]
        x: Rational,
    },
    /// Apply A, then B.
    Compose { a: PathBuf, b: PathBuf },
    /// Inverse map.
    Invert { map: PathBuf },
    /// Membership in F_{n,inf}, with every violated condition.
    Member {
        #[arg(long)]
        n: u32,
        map: PathBuf,
    },
    /// The characters mu1, nu1 at t0 and mu2, nu2 at infinity.
    Chars {
        #[arg(long)]
        n: u32,
        #[arg(long, allow_hyphen_values = true)]
        t0: Rational,
        map: PathBuf,
    },
    /// A member of F_{n,inf} through the given points, "(x,y);(x,y);...".
    Interpolate {
        #[arg(long)]
        n: u32,
        #[arg(long, allow_hyphen_values = true)]
        pairs: String,
    },
    /// A member sending t1 to t2 that translates near t1.
    Transport {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u64,
        #[arg(long, allow_hyphen_values = true)]
        t1: Rational,
        #[arg(long, allow_hyphen_values = true)]
        t2: Rational,
    },
    /// A member fixing t0 with right slope different from 1.
    FixedSlope {
        #[arg(long)]
        n: u32,
        #[arg(long, allow_hyphen_values = true)]
        t0: Rational,
    },
    /// Fixed point of a decreasing map.
    Fixpoint { map: PathBuf },
    /// Extend a right half-line map to an element commuting with H.
    Extend {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        h: PathBuf,
        right: PathBuf,
    },
    /// A verified conjugator g with g^-1 M2 g = M1.
    ConjugateInvolutions {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        h: PathBuf,
        m1: PathBuf,
        m2: PathBuf,
    },
    /// Class of k t in Z/k(n-1), t the fixed point of M.
    Invariant {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u64,
        m: PathBuf,
    },
    /// Whether the fixed point of M lies in (1/2) Z[1/n].
    HalfLattice {
        #[arg(long)]
        n: u32,
        m: PathBuf,
    },
    /// Evaluate a word such as "g(0) t(2)^-1".
    WordEval {
        #[arg(long)]
        n: u32,
        #[arg(allow_hyphen_values = true)]
        word: String,
    },
    /// Write a member as a word in g(i) and t(n-1).
    Factorize {
        #[arg(long)]
        n: u32,
        map: PathBuf,
    },
    /// Check (theta rho)^2 = id on every generator of F_{n,inf}.
    VerifyExotic {
        #[arg(long)]
        n: u32,
        /// Symmetric base map on [0,1].
        #[arg(long, required_unless_present = "theta", conflicts_with = "theta")]
        f1: Option<PathBuf>,
        /// Theta spec JSON: {"w": "...", "f1": map}.
        #[arg(long)]
        theta: Option<PathBuf>,
    },
    /// Run the randomized property suites.
    Selftest {
        #[arg(long, default_value_t = fninf_core::suites::DEFAULT_SEED)]
        seed: u64,
        /// Run only this suite.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=8))]
        suite: Option<u8>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let mut report = match commands::run(&cli) {
        Ok(r) => r,
        Err(commands::InputError(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    if cli.timing {
        report.timing_ms = Some(start.elapsed().as_millis());
    }
    match cli.format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&report.to_json()).expect("report serializes")
        ),
        Format::Text => println!("{}: {}\n{}", report.command, report.status, report.summary),
    }
    ExitCode::from(report.status.exit_code() as u8)
}
