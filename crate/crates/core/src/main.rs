use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use logcoef_lab::audit::audit_corpus;
use logcoef_lab::bounds::{maximize, BoundObjective, DEFAULT_GRID_STEP, DEFAULT_ROUNDS};
use logcoef_lab::coefficients::{grunsky_table, log_coefficients, odd_grunsky};
use logcoef_lab::corpus::{build_corpus, CorpusSpec};
use logcoef_lab::scan::{report, scan, theorem_guard, ReportFormat, DEFAULT_N_MAX};
use logcoef_lab::zoo::{realize, Family, FamilySpec};

const EXIT_GUARD: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "logcoef-lab", version, about = "Logarithmic and Grunsky coefficient toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FamilyArgs {
    /// identity, koebe, halfplane, genKoebe or starlikePow
    #[arg(long)]
    family: String,
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
}

impl FamilyArgs {
    fn spec(&self) -> logcoef_lab::Result<FamilySpec> {
        let mut spec = FamilySpec::new(Family::parse(&self.family)?);
        spec.theta = self.theta;
        spec.beta = self.beta;
        Ok(spec)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print γ_1..γ_N of a family member.
    Logcoef {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        n: usize,
        /// Truncation order (default N + 1).
        #[arg(long)]
        order: Option<usize>,
    },
    /// Print the Grunsky table of a family member.
    Grunsky {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        pmax: usize,
        /// Odd-index table of the square-root transform.
        #[arg(long)]
        odd: bool,
        #[arg(long)]
        order: Option<usize>,
    },
    /// Identity and inequality residual report over a corpus.
    Verify {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Overrides the config order.
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grid maximization of phi or psi over its domain.
    Maximize {
        #[arg(long)]
        objective: String,
        #[arg(long, default_value_t = DEFAULT_GRID_STEP)]
        grid: f64,
        #[arg(long, default_value_t = DEFAULT_ROUNDS)]
        rounds: u32,
    },
    /// Scan |γ_n| - |γ_{n-1}| against 1/sqrt(2n - 1) over a corpus.
    Scan {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_N_MAX)]
        nmax: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
        format: ReportFormat,
    },
}

enum Failure {
    Usage(String),
    Guard(String),
}

impl From<logcoef_lab::Error> for Failure {
    fn from(e: logcoef_lab::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn load_config(path: Option<&Path>) -> logcoef_lab::Result<CorpusSpec> {
    match path {
        Some(p) => CorpusSpec::from_file(p),
        None => Ok(CorpusSpec::default()),
    }
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, bytes).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| Failure::Usage(e.to_string())),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Logcoef { family, n, order } => {
            let f = realize(&family.spec()?, order.unwrap_or(n + 1))?;
            let gamma = log_coefficients(&f, n)?;
            let mut text = String::from("n,re,im,abs\n");
            for (k, g) in gamma.gamma.iter().enumerate() {
                text.push_str(&format!("{},{},{},{}\n", k + 1, g.re, g.im, g.norm()));
            }
            emit(None, text.as_bytes())
        }
        Command::Grunsky {
            family,
            pmax,
            odd,
            order,
        } => {
            let spec = family.spec()?;
            let table = if odd {
                odd_grunsky(&realize(&spec, order.unwrap_or(pmax + 1))?, pmax)?
            } else {
                grunsky_table(&realize(&spec, order.unwrap_or(2 * pmax + 1))?, pmax)?
            };
            let mut text = String::from("p,q,re,im\n");
            for (p, q, w) in table.entries() {
                text.push_str(&format!("{p},{q},{},{}\n", w.re, w.im));
            }
            emit(None, text.as_bytes())
        }
        Command::Verify {
            config,
            tol,
            order,
            out,
        } => {
            let spec = load_config(config.as_deref())?;
            let corpus = build_corpus(&spec)?;
            let report = audit_corpus(&corpus, order.unwrap_or(spec.order), tol, spec.seed);
            let mut bytes = serde_json::to_vec_pretty(&report.records)
                .map_err(|e| Failure::Usage(e.to_string()))?;
            bytes.push(b'\n');
            emit(out.as_deref(), &bytes)?;

            for s in &report.skipped {
                eprintln!("skipped {}: {}", s.function_id, s.reason);
            }
            for (id, worst) in report.worst_by_relation() {
                eprintln!("{id:>20}  worst residual {worst:e}");
            }
            let failed = report.records.iter().filter(|r| !r.residual.pass).count();
            if failed > 0 {
                return Err(Failure::Guard(format!("{failed} residual(s) above tolerance")));
            }
            Ok(())
        }
        Command::Maximize {
            objective,
            grid,
            rounds,
        } => {
            let obj = BoundObjective::parse(&objective)?;
            let result = maximize(&obj, grid, rounds)?;
            let mut bytes = serde_json::to_vec_pretty(&result).map_err(|e| Failure::Usage(e.to_string()))?;
            bytes.push(b'\n');
            emit(None, &bytes)
        }
        Command::Scan {
            config,
            nmax,
            out,
            format,
        } => {
            let spec = load_config(config.as_deref())?;
            spec.validate_for(nmax)?;
            let corpus = build_corpus(&spec)?;
            let output = scan(&corpus, nmax, spec.order)?;
            emit(out.as_deref(), &report(&output.records, format)?)?;

            for s in &output.skipped {
                eprintln!("skipped {}: {}", s.function_id, s.reason);
            }
            let guard = theorem_guard(&output.records);
            if let Some(d) = guard.max_d3 {
                eprintln!("max d_3 = {d} (bound {})", 1.0 / 5f64.sqrt());
            }
            if let Some(d) = guard.max_d4 {
                eprintln!("max d_4 = {d} (bound {})", 1.0 / 7f64.sqrt());
            }
            for (n, s) in &guard.min_slack_by_n {
                eprintln!("n = {n}: min slack {s}");
            }
            if !guard.passed() {
                for r in &guard.violations {
                    eprintln!("violation {} n = {}: d_n = {} > {}", r.function_id, r.n, r.d_n, r.bound);
                }
                return Err(Failure::Guard(format!(
                    "{} record(s) exceed the proved bounds",
                    guard.violations.len()
                )));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Guard(msg)) => {
            eprintln!("guard failure: {msg}");
            ExitCode::from(EXIT_GUARD)
        }
    }
}
