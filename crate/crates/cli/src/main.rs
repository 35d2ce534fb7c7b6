//! `qindex`: tetrahedron indices, lattice sums for the 3D index, state
//! integrals and their Fourier coefficients, and the verification suites.

mod commands;
mod suites;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use qindex_core::Error;

/// Exit codes.
pub mod exit {
    pub const USAGE: u8 = 2;
    pub const INPUT: u8 = 3;
    pub const DIVERGENCE: u8 = 4;
    pub const VERIFICATION: u8 = 5;
}

const MAX_Q: f64 = 0.3;
const MAX_ORDER: i64 = 64;

#[derive(Parser, Debug)]
#[command(name = "qindex", version, about = "3D index lattice sums, state integrals and identity checks")]
struct Cli {
    /// Worker threads for grid evaluations and lattice shells.
    #[arg(long, global = true, env = "QINDEX_THREADS")]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Output::Json)]
    output: Output,
    /// Allow |q| > 0.3.
    #[arg(long, global = true)]
    unsafe_q: bool,
    /// Allow truncation orders above 64 half-units.
    #[arg(long, global = true)]
    unsafe_order: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Json,
    Table,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tetrahedron index I_Δ(m,e)(q) as an exact truncated series.
    Tetindex {
        #[arg(allow_hyphen_values = true)]
        m: i64,
        #[arg(allow_hyphen_values = true)]
        e: i64,
        /// Truncation order in half-units of q.
        #[arg(long, default_value_t = 20)]
        order: i64,
        /// Print I^Δ(m,e)(q) = (−q)^e I_Δ(m,e)(q²) instead.
        #[arg(long)]
        hat: bool,
    },
    /// Lattice sum for the 3D index at one key.
    Index3d {
        /// Builtin fixture name or path to a gluing JSON file.
        source: String,
        #[arg(allow_hyphen_values = true)]
        m: i64,
        #[arg(allow_hyphen_values = true)]
        e: i64,
        /// Truncation order in half-units of q.
        #[arg(long, default_value_t = 24)]
        order: i64,
        #[arg(long, value_enum, default_value_t = ConventionArg::Derived)]
        convention: ConventionArg,
        /// Shell cap of the lattice enumeration.
        #[arg(long, default_value_t = qindex_core::index3d::DEFAULT_SHELL_CAP)]
        cap: i64,
    },
    /// State integral at one peripheral point (s, t).
    Integral {
        source: String,
        #[command(flatten)]
        q: QArg,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        s: Complex64,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        t: Complex64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Use the hand-derived integrand of the fixture instead of compiling one.
        #[arg(long)]
        hand: bool,
    },
    /// Fourier coefficients of the state integral on the unit torus.
    Fourier {
        source: String,
        #[command(flatten)]
        q: QArg,
        #[arg(long, default_value_t = 2)]
        mmax: i64,
        #[arg(long, default_value_t = 2)]
        emax: i64,
        #[arg(long, default_value_t = 32)]
        grid: usize,
        #[arg(long, default_value_t = 1e-11)]
        tol: f64,
    },
    /// Singularity rays of the compiled integrand.
    Rays { source: String },
    /// Runs a verification suite; exits 5 on failure.
    Verify(VerifyArgs),
    /// Builtin worked examples.
    Examples {
        #[command(subcommand)]
        action: ExamplesAction,
    },
}

#[derive(Args, Debug)]
pub struct QArg {
    /// Nome q, real or complex such as `0.1+0.05i`.
    #[arg(long, default_value = "0.1", allow_hyphen_values = true)]
    pub q: Complex64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    OncePerPoint,
    PerTetrahedron,
    Derived,
    /// Probe all placements against Fourier coefficients at q = 0.1.
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    PentagonSeries,
    Symmetries,
    Dopsum,
    Psi0,
    Inversion,
    PentagonIntegral,
    Thm2,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Series order in whole powers of q (series suites) or the lattice
    /// order in half-units (thm2).
    #[arg(long)]
    pub order: Option<i64>,
    /// Range bound on the integer labels.
    #[arg(long)]
    pub bound: Option<i64>,
    /// Random samples per nome.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Nome for the numerical suites; the default runs the suite's own set.
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<Complex64>,
    /// Fixtures for thm2.
    #[arg(long, value_delimiter = ',', default_value = "fig8,m003")]
    pub fixtures: Vec<String>,
    /// Torus grid for thm2.
    #[arg(long, default_value_t = 32)]
    pub grid: usize,
}

#[derive(Subcommand, Debug)]
enum ExamplesAction {
    List,
    Run { name: String },
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: exit::USAGE, message: message.into() }
    }

    pub fn input(message: impl Into<String>) -> Self {
        Self { code: exit::INPUT, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::MalformedInput(_) | Error::InconsistentData(_) | Error::InvalidArgument(_) | Error::NoQuadFound | Error::SingularSystem(_) => exit::INPUT,
            Error::PoleProximity(_)
            | Error::NoStrictAngles { .. }
            | Error::NonConvergent(_)
            | Error::AmbiguousConvention(_)
            | Error::PinchDetected(_)
            | Error::NoConvergence { .. } => exit::DIVERGENCE,
        };
        Self { code, message: e.to_string() }
    }
}

/// A command's result: JSON and its table rendering, plus whether a check
/// inside it failed.
pub struct Report {
    pub json: serde_json::Value,
    pub table: String,
    pub passed: bool,
}

fn check_q(q: Complex64, allow: bool) -> Result<(), Failure> {
    if !allow && q.norm() > MAX_Q {
        return Err(Failure::usage(format!("|q| = {} exceeds {MAX_Q}; pass --unsafe-q to override", q.norm())));
    }
    Ok(())
}

fn check_order(order: i64, allow: bool) -> Result<(), Failure> {
    if !allow && order > MAX_ORDER {
        return Err(Failure::usage(format!("order {order} exceeds {MAX_ORDER}; pass --unsafe-order to override")));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<Report, Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::usage("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::usage(e.to_string()))?;
    }
    match cli.command {
        Command::Tetindex { m, e, order, hat } => {
            check_order(order, cli.unsafe_order)?;
            commands::tetindex(m, e, order, hat)
        }
        Command::Index3d { source, m, e, order, convention, cap } => {
            check_order(order, cli.unsafe_order)?;
            commands::index3d(&source, (m, e), order, convention, cap)
        }
        Command::Integral { source, q, s, t, tol, hand } => {
            check_q(q.q, cli.unsafe_q)?;
            commands::integral(&source, q.q, s, t, tol, hand)
        }
        Command::Fourier { source, q, mmax, emax, grid, tol } => {
            check_q(q.q, cli.unsafe_q)?;
            if q.q.im != 0.0 {
                return Err(Failure::usage("fourier needs a real nome"));
            }
            commands::fourier(&source, q.q.re, mmax, emax, grid, tol)
        }
        Command::Rays { source } => commands::rays(&source),
        Command::Verify(args) => {
            if let Some(q) = args.q {
                check_q(q, cli.unsafe_q)?;
            }
            if args.suite == Suite::Thm2 {
                check_order(args.order.unwrap_or(0), cli.unsafe_order)?;
            }
            suites::verify(&args)
        }
        Command::Examples { action: ExamplesAction::List } => Ok(suites::list_examples()),
        Command::Examples { action: ExamplesAction::Run { name } } => suites::run_example(&name),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output = cli.output;
    match run(cli) {
        Ok(report) => {
            match output {
                Output::Json => println!("{}", serde_json::to_string_pretty(&report.json).expect("report serializes")),
                Output::Table => print!("{}", report.table),
            }
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(exit::VERIFICATION)
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
