//! `ffda`: command-line front end for exact Diophantine approximation over
//! F_q((1/z)).
//!
//! Exit codes: 0 success, 1 usage or input error, 2 a guaranteed property
//! failed to hold, 3 a budget or precision refusal.

mod commands;
mod emit;
mod inputs;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ffda::{ErrorClass, Field};

use emit::Format;

#[derive(Parser, Debug)]
#[command(name = "ffda", version, about = "Exact Diophantine approximation over F_q((1/z))")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Base field, e.g. `q=2`, `q=3`, `q=2^2;mod=[1,1,1]`.
    #[arg(long, global = true, env = "FFDA_FIELD", default_value = "q=2")]
    pub field: String,
    #[arg(long, global = true, env = "FFDA_FORMAT", value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Seed for generated partial quotients and random draws.
    #[arg(long, global = true, env = "FFDA_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (results are identical for every value).
    #[arg(long, global = true, env = "FFDA_PAR", default_value_t = 1)]
    pub par: usize,
    /// Write output here instead of stdout.
    #[arg(long, global = true, env = "FFDA_OUT")]
    pub out: Option<PathBuf>,
    /// Working precision (coefficients below `z^0`) for series inputs.
    #[arg(long, global = true, env = "FFDA_PREC", default_value_t = 64)]
    pub prec: i64,
}

/// A matrix, or the `1 x 1` matrix `(α)`.
#[derive(Args, Debug, Clone)]
pub struct MatrixInput {
    /// Row-major nested list of Laurent values, or `@file`.
    #[arg(long, conflicts_with = "alpha")]
    pub matrix: Option<String>,
    /// α spec such as `all:z`, `mono:k`, `pqspec:z,z^2`.
    #[arg(long)]
    pub alpha: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Continued fraction expansions.
    Cf {
        #[command(subcommand)]
        action: CfAction,
    },
    /// Ostrowski numeration.
    Ostrowski {
        #[command(subcommand)]
        action: OstrowskiAction,
    },
    /// Dirichlet solutions, best approximations and exponents.
    Approx {
        #[command(subcommand)]
        action: ApproxAction,
    },
    /// Transference and Kronecker solvers.
    Transfer {
        #[command(subcommand)]
        action: TransferAction,
    },
    /// The explicit construction with prescribed exponents.
    Construct {
        #[arg(long)]
        omega: String,
        #[arg(long)]
        nu: String,
        #[arg(long)]
        levels: usize,
        /// Checks to run: `upper`, `lower`.
        #[arg(long, value_delimiter = ',', default_value = "upper,lower")]
        verify: Vec<String>,
        /// Lower-bound checks only for `‖V_n‖ <= q^this`.
        #[arg(long, default_value_t = 12)]
        lower_max_deg: i64,
        /// Also check that `θ` avoids the lattice up to this degree.
        #[arg(long)]
        lattice: Option<usize>,
    },
    /// Singular-on-average statistics.
    Singular {
        #[arg(long)]
        alpha: String,
        #[arg(long = "N")]
        n: usize,
        /// Constant `c`, as `a/b` or `2^-k`.
        #[arg(long, default_value = "1/8")]
        c: String,
        /// Cross-check every scale against exhaustive search.
        #[arg(long)]
        oracle: bool,
    },
    /// Badly approximable targets and Cantor constructions.
    Bad {
        #[command(subcommand)]
        action: BadAction,
    },
}

#[derive(Subcommand, Debug)]
pub enum CfAction {
    /// Rows `(k, A_k, P_k, Q_k, deg Q_k)`.
    Expand {
        #[arg(long)]
        source: String,
        #[arg(long)]
        max_k: usize,
    },
    /// Check the convergent identities at every `k <= max_k`.
    Verify {
        #[arg(long)]
        source: String,
        #[arg(long)]
        max_k: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum OstrowskiAction {
    /// Digits of `β` in the unit ball.
    Expand {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
        #[arg(long)]
        depth: usize,
    },
    /// Digits of a polynomial `Q = Σ B_{i+1} Q_i`.
    Decompose {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        poly: String,
    },
    /// All cylinders of the given depth.
    Cylinders {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        depth: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum ApproxAction {
    Dirichlet {
        #[command(flatten)]
        input: MatrixInput,
        /// Target `|<A^T u>| < q^-c` with `e n < -c m`.
        #[arg(long, default_value_t = 1)]
        c: usize,
    },
    Bestseq {
        #[command(flatten)]
        input: MatrixInput,
        #[arg(long, default_value = "q^5")]
        height: String,
    },
    Exponents {
        #[command(flatten)]
        input: MatrixInput,
        #[arg(long)]
        theta: Option<String>,
        #[arg(long, default_value = "q^5")]
        height: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum TransferAction {
    /// Whether `M(y) >= q^-t` for all nonzero `‖y‖ <= q^s`.
    Check {
        #[command(flatten)]
        input: MatrixInput,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        t: usize,
    },
    /// Find `x` with `‖x‖ <= q^t` and `|<Ax - θ>| <= q^-s`.
    Solve {
        #[command(flatten)]
        input: MatrixInput,
        #[arg(long)]
        theta: String,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        t: usize,
    },
    /// Search `x` with `|<Ax - θ>| <= q^-eps` up to degree `bound`.
    Kronecker {
        #[command(flatten)]
        input: MatrixInput,
        #[arg(long)]
        theta: String,
        #[arg(long)]
        eps: i64,
        #[arg(long)]
        bound: usize,
    },
    /// Rank of the group `A^T F_q[z]^n + F_q[z]^m` for an exact matrix.
    Rank {
        #[command(flatten)]
        input: MatrixInput,
    },
}

#[derive(Subcommand, Debug)]
pub enum BadAction {
    /// Minimum of `‖x‖^(m/n) |<Ax - θ>|` over a height window.
    Certify {
        #[command(flatten)]
        input: MatrixInput,
        /// Target; defaults to zero.
        #[arg(long)]
        theta: Option<String>,
        #[arg(long, default_value = "q^-1")]
        epsilon: String,
        #[arg(long, default_value_t = 1)]
        h0: usize,
        #[arg(long)]
        h1: usize,
    },
    /// Survivor tree over best-approximation rows (`1 x 1`) or explicit rows.
    Survivors {
        #[arg(long, conflicts_with = "rows")]
        alpha: Option<String>,
        /// Explicit rows as a nested list of polynomial vectors.
        #[arg(long)]
        rows: Option<String>,
        #[arg(long, default_value_t = 2)]
        l: u32,
        #[arg(long)]
        depth: usize,
        /// Threshold `δ = q^-delta`.
        #[arg(long, default_value_t = 1)]
        delta: u32,
    },
    /// The covering construction over Ostrowski cylinders.
    Cover {
        #[arg(long)]
        alpha: String,
        #[arg(long = "K", default_value_t = 1)]
        k0: usize,
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 2)]
        levels: usize,
        /// `M` with `ln M > λ` for the dimension exponent.
        #[arg(long = "M")]
        m: Option<f64>,
    },
}

fn emit(report: &emit::Report, g: &Global, f: &Field) -> io::Result<()> {
    match &g.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            report.write(g.format, f, &mut w)?;
            w.flush()
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            report.write(g.format, f, &mut w)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let field = match ffda::text::parse_field(&cli.global.field) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: --field: {e}");
            return ExitCode::from(1);
        }
    };
    match commands::run(&cli.cmd, &cli.global, &field) {
        Ok(report) => {
            if let Err(e) = emit(&report, &cli.global, &field) {
                if e.kind() == io::ErrorKind::BrokenPipe {
                    return ExitCode::SUCCESS;
                }
                eprintln!("error: writing output: {e}");
                return ExitCode::from(1);
            }
            match &report.defect {
                Some(msg) => {
                    eprintln!("defect: {msg}");
                    ExitCode::from(2)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.class() {
                ErrorClass::Input => 1,
                ErrorClass::Defect => 2,
                ErrorClass::Refusal => 3,
            })
        }
    }
}
