use std::path::PathBuf;

use bernoulli_core::exact::SignConvention;
use bernoulli_core::Precision;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "bernzeta", version, about = "Bernoulli numbers, their continuation, zeta values and polynomial zeros")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Working precision in mantissa bits: 53, 128, 256 or 512.
    #[arg(long, global = true, env = "BERNZETA_PRECISION")]
    pub precision: Option<u32>,
    /// Expansion parameter of the continuation series.
    #[arg(long, global = true, env = "BERNZETA_W")]
    pub w: Option<f64>,
    /// Relative stopping tolerance of the continuation series.
    #[arg(long, global = true, env = "BERNZETA_TOL", default_value_t = 1e-12)]
    pub tol: f64,
    /// Sign convention for Bernoulli numbers and polynomials.
    #[arg(long, global = true, env = "BERNZETA_CONVENTION")]
    pub convention: Option<Convention>,
    #[arg(long, global = true, env = "BERNZETA_FORMAT", default_value = "table")]
    pub format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true, env = "BERNZETA_OUT")]
    pub out: Option<PathBuf>,
    /// Seed for the root finder's starting-point jitter.
    #[arg(long, global = true, env = "BERNZETA_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Include the degree-80 checks.
    #[arg(long, global = true, env = "BERNZETA_SLOW")]
    pub slow: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    Classical,
    Woon,
}

impl From<Convention> for SignConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Classical => SignConvention::Classical,
            Convention::Woon => SignConvention::Woon,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZetaMethod {
    Nested,
    Oracle,
    Odd,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact B_n in both conventions.
    Bernoulli { n: usize },
    /// Row sum S_n of the operator tree.
    Tree {
        n: usize,
        /// List every term of the row.
        #[arg(long)]
        dump: bool,
    },
    /// ζ(s) for real s.
    Zeta {
        #[arg(allow_hyphen_values = true)]
        s: f64,
        #[arg(long, value_enum, default_value = "nested")]
        method: ZetaMethod,
    },
    /// Coefficients of the continued polynomial B(s, w).
    Bpoly { s: f64 },
    /// All zeros of B_n(w).
    Zeros { n: usize },
    /// Real and complex zero counts: formula, computed and tabulated.
    Counts { n_max: usize },
    /// Follow the zeros of B(s, w) from s0 to s1.
    Flow {
        s0: f64,
        s1: f64,
        #[arg(long, default_value_t = 0.01)]
        ds: f64,
    },
    /// Run the golden suite.
    Verify,
}

impl Global {
    /// Requested precision, or `fallback` when none was given.
    pub fn precision_or(&self, fallback: Precision) -> Result<Precision, String> {
        match self.precision {
            None => Ok(fallback),
            Some(b) => Precision::from_bits(b).ok_or_else(|| format!("unsupported precision {b}; use 53, 128, 256 or 512")),
        }
    }

    /// Options are checked before any computation starts.
    pub fn validate(&self) -> Result<(), String> {
        self.precision_or(Precision::P53)?;
        if let Some(w) = self.w {
            if !(w.is_finite() && w > 0.0) {
                return Err(format!("--w must be positive, got {w}"));
            }
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(format!("--tol must be positive, got {}", self.tol));
        }
        Ok(())
    }
}
