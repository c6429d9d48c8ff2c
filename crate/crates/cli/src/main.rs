use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;

use lfock::dump::{state_dump, StateRequest};
use lfock::figures::{self, FIG1_ALPHAS, FIG1_GRID, FIG2_LAMBDAS, FIG3_LAMBDAS, XI_GRID};
use lfock::params::{parse_basis, parse_complex, parse_grid, parse_truncation, BasisChoice, Grid};
use lfock::states::Truncation;
use lfock::sweep::SweepResult;
use lfock::{verify, Error};

const EXIT_USAGE: u8 = 1;
const EXIT_VERIFY: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(
    name = "lfock",
    version,
    about = "Deformed Fock basis states: figure sweeps, state dumps, verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mandel Q of lambda-coherent states (lambda basis) over a lambda grid.
    Fig1 {
        /// Coherent amplitude `re[,im]`; repeat for several series.
        #[arg(long = "alpha", value_parser = complex_arg, allow_hyphen_values = true)]
        alphas: Vec<C64>,
        /// Lambda grid `min:max:steps`.
        #[arg(long, value_parser = grid_arg)]
        grid: Option<Grid>,
        #[command(flatten)]
        output: Output,
    },
    /// Quadrature variances of lambda-squeezed states over a |xi| grid.
    Fig2 {
        #[command(flatten)]
        sweep: SqueezeSweep,
        #[command(flatten)]
        output: Output,
    },
    /// Mandel Q of lambda-squeezed states, lambda basis by default.
    Fig3a {
        #[command(flatten)]
        sweep: SqueezeSweep,
        #[arg(long, value_parser = basis_arg)]
        basis: Option<BasisChoice>,
        #[command(flatten)]
        output: Output,
    },
    /// Mandel Q of lambda-squeezed states, standard basis by default.
    Fig3b {
        #[command(flatten)]
        sweep: SqueezeSweep,
        #[arg(long, value_parser = basis_arg)]
        basis: Option<BasisChoice>,
        #[command(flatten)]
        output: Output,
    },
    /// Dump a state's coefficients in the standard and lambda bases.
    State {
        /// lambda_ket, lambda_cs, lambda_ss, squeezed_vacuum, f1, f2 or canonical.
        kind: String,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        lambda: f64,
        #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
        alpha: Option<C64>,
        #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
        xi: Option<C64>,
        /// Basis index for lambda_ket.
        #[arg(long, default_value_t = 0)]
        n: usize,
        /// `N` or `auto`.
        #[arg(long, value_parser = truncation_arg)]
        truncation: Option<Truncation>,
        #[command(flatten)]
        output: Output,
    },
    /// Run the oracle-equivalence suites (`all` or one suite name).
    Verify {
        #[arg(default_value = "all")]
        suite: String,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args)]
struct SqueezeSweep {
    /// Deformation parameter; repeat for several series.
    #[arg(long = "lambda", allow_hyphen_values = true)]
    lambdas: Vec<f64>,
    /// |xi| grid `min:max:steps`.
    #[arg(long, value_parser = grid_arg)]
    grid: Option<Grid>,
}

#[derive(Args)]
struct Output {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn complex_arg(s: &str) -> Result<C64, String> {
    parse_complex(s).map_err(|e| e.to_string())
}

fn grid_arg(s: &str) -> Result<Grid, String> {
    parse_grid(s).map_err(|e| e.to_string())
}

fn basis_arg(s: &str) -> Result<BasisChoice, String> {
    parse_basis(s).map_err(|e| e.to_string())
}

fn truncation_arg(s: &str) -> Result<Truncation, String> {
    parse_truncation(s).map_err(|e| e.to_string())
}

enum Failure {
    Lib(Error),
    Io(io::Error),
    Verify,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn emit(text: &str, out: &Option<PathBuf>) -> io::Result<()> {
    match out {
        Some(path) => fs::write(path, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn emit_sweep(result: &SweepResult, output: &Output) -> Result<(), Failure> {
    let text = match output.format {
        Format::Csv => result.to_csv()?,
        Format::Json => result.to_json()?,
    };
    Ok(emit(&text, &output.out)?)
}

fn or_default(lambdas: Vec<f64>, default: &[f64]) -> Vec<f64> {
    if lambdas.is_empty() {
        default.to_vec()
    } else {
        lambdas
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Fig1 {
            alphas,
            grid,
            output,
        } => {
            let alphas = if alphas.is_empty() {
                FIG1_ALPHAS.iter().map(|&a| C64::new(a, 0.0)).collect()
            } else {
                alphas
            };
            emit_sweep(&figures::fig1(&alphas, grid.unwrap_or(FIG1_GRID))?, &output)
        }
        Command::Fig2 { sweep, output } => {
            let lambdas = or_default(sweep.lambdas, &FIG2_LAMBDAS);
            emit_sweep(
                &figures::fig2(&lambdas, sweep.grid.unwrap_or(XI_GRID))?,
                &output,
            )
        }
        Command::Fig3a {
            sweep,
            basis,
            output,
        } => fig3(sweep, basis.unwrap_or(BasisChoice::Lambda), &output),
        Command::Fig3b {
            sweep,
            basis,
            output,
        } => fig3(sweep, basis.unwrap_or(BasisChoice::Standard), &output),
        Command::State {
            kind,
            lambda,
            alpha,
            xi,
            n,
            truncation,
            output,
        } => {
            let req = StateRequest {
                lambda,
                alpha: alpha.unwrap_or_default(),
                xi: xi.unwrap_or_default(),
                n,
                truncation: truncation.unwrap_or(Truncation::Auto),
            };
            emit_sweep(&state_dump(&kind, &req)?, &output)
        }
        Command::Verify { suite, output } => {
            let reports = verify::run(&suite)?;
            let text = match output.format {
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(&reports).expect("reports serialize");
                    s.push('\n');
                    s
                }
                Format::Csv => {
                    let mut s = String::from("suite,status,checks,max_err,failures\n");
                    for r in &reports {
                        let status = if r.passed() { "pass" } else { "fail" };
                        s.push_str(&format!(
                            "{},{status},{},{:e},{}\n",
                            r.name,
                            r.checks,
                            r.max_err,
                            r.failures.len()
                        ));
                    }
                    s
                }
            };
            for r in &reports {
                let status = if r.passed() { "PASS" } else { "FAIL" };
                eprintln!(
                    "{:<12} {status}  checks={:<6} max_err={:e}",
                    r.name, r.checks, r.max_err
                );
                for f in &r.failures {
                    eprintln!("    {f}");
                }
            }
            emit(&text, &output.out)?;
            if reports.iter().all(|r| r.passed()) {
                Ok(())
            } else {
                Err(Failure::Verify)
            }
        }
    }
}

fn fig3(sweep: SqueezeSweep, basis: BasisChoice, output: &Output) -> Result<(), Failure> {
    let lambdas = or_default(sweep.lambdas, &FIG3_LAMBDAS);
    emit_sweep(
        &figures::fig3(basis, &lambdas, sweep.grid.unwrap_or(XI_GRID))?,
        output,
    )
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify) => ExitCode::from(EXIT_VERIFY),
        Err(Failure::Io(e)) => {
            eprintln!("lfock: {e}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("lfock: {e}");
            ExitCode::from(if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_USAGE
            })
        }
    }
}
