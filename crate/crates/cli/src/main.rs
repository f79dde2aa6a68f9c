use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fracrev::{Rational, Variant};

mod commands;
mod parse;

/// Analytic XX spin chains with fractional revival.
#[derive(Debug, Parser)]
#[command(name = "fracrev", version, about)]
struct Cli {
    /// Tolerance for checks (must be positive).
    #[arg(long, global = true, value_parser = parse::positive_f64)]
    tol: Option<f64>,

    /// Output format where a command supports both.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Odd,
    Even,
    DualHahn,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Odd => Variant::OddN,
            VariantArg::Even => Variant::EvenN,
            VariantArg::DualHahn => Variant::DualHahn,
        }
    }
}

#[derive(Debug, Clone, Args)]
struct ModelArgs {
    /// Bi-lattice offset a, as p/q.
    #[arg(short = 'a', allow_hyphen_values = true, value_parser = parse::rational)]
    a: Option<Rational>,

    /// Bi-lattice offset c, as p/q.
    #[arg(short = 'c', allow_hyphen_values = true, value_parser = parse::rational)]
    c: Option<Rational>,

    /// Chain length; the chain has N + 1 sites.
    #[arg(short = 'N')]
    n: Option<usize>,

    /// Coupling family (default: odd or even from N).
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
}

#[derive(Debug, Clone, Args)]
struct SolutionArgs {
    #[arg(long)]
    alpha1: Option<i64>,

    #[arg(long, allow_hyphen_values = true)]
    beta1: Option<i64>,

    #[arg(long, allow_hyphen_values = true)]
    beta2: Option<i64>,

    /// Expected gamma2 - gamma1; checked against the betas.
    #[arg(long, allow_hyphen_values = true)]
    dgamma: Option<i64>,

    /// Revival time over pi (with -a and -c).
    #[arg(long)]
    t_over_pi: Option<i64>,

    /// 4 theta / pi as p/q (with -a and -c).
    #[arg(long, value_parser = parse::rational)]
    theta: Option<Rational>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Enumerate integer solutions of the FR condition.
    Search {
        #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u32).range(1..))]
        alpha1_max: u32,

        /// Upper bound on beta1 (default 8 alpha1).
        #[arg(long)]
        beta1_max: Option<i64>,

        /// Keep only solutions with a PST schedule.
        #[arg(long)]
        pst_only: bool,

        /// Keep only solutions with 4 theta / pi equal to p/q.
        #[arg(long, value_parser = parse::rational)]
        theta: Option<Rational>,
    },
    /// Coupling table for (a, c, N).
    Build {
        #[command(flatten)]
        model: ModelArgs,

        /// Also write the normalised profile CSV here.
        #[arg(long)]
        plot_data: Option<PathBuf>,
    },
    /// Certify FR (and optionally PST and the block form) for a solution.
    Verify {
        #[command(flatten)]
        model: ModelArgs,

        #[command(flatten)]
        solution: SolutionArgs,

        /// Load the coupling table from CSV instead of computing it.
        #[arg(long)]
        from_csv: Option<PathBuf>,

        /// Also check PST at q T.
        #[arg(long)]
        pst: bool,

        /// Also check the block form of exp(-i T J).
        #[arg(long)]
        block: bool,

        /// Edit the table before verifying, e.g. J3*1.01 or B2=4.5.
        #[arg(long = "override", value_parser = parse::override_spec)]
        overrides: Vec<parse::Override>,
    },
    /// Time series of the site amplitudes from site 0.
    Evolve {
        #[command(flatten)]
        model: ModelArgs,

        #[arg(long)]
        from_csv: Option<PathBuf>,

        /// Final time, e.g. 12pi.
        #[arg(long, value_parser = parse::angle)]
        t_max: f64,

        #[arg(long, default_value_t = 601, value_parser = clap::value_parser!(u64).range(2..))]
        samples: u64,
    },
    /// Remove the top level of an odd chain.
    Surgery {
        #[command(flatten)]
        model: ModelArgs,

        /// Compare with the closed-form even chain and the expected spectrum.
        #[arg(long)]
        check: bool,
    },
    /// Isospectral deformation by V(sigma).
    Deform {
        #[command(flatten)]
        model: ModelArgs,

        #[arg(long)]
        from_csv: Option<PathBuf>,

        /// Deformation angle, e.g. pi/6.
        #[arg(long, value_parser = parse::angle, allow_hyphen_values = true, conflicts_with = "alpha", required_unless_present = "alpha")]
        sigma: Option<f64>,

        /// Para-Racah alpha in [0, 1].
        #[arg(long, value_parser = parse::unit_interval)]
        alpha: Option<f64>,

        /// Write {sigma, alpha, parity} here (default: next to --out).
        #[arg(long)]
        sidecar: Option<PathBuf>,

        /// Compare the closed form with the full conjugation.
        #[arg(long)]
        check: bool,
    },
    /// JSON summary of a model.
    Report {
        #[command(flatten)]
        model: ModelArgs,

        /// Revival time over pi; searched for when absent.
        #[arg(long)]
        alpha1: Option<i64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
