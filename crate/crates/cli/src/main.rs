mod config;
mod verify;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hecke_core::chars::residue_symbol;
use hecke_core::moments::{moment_scan, MomentReport};
use hecke_core::numeric::zeta_k;
use hecke_core::products::{a_k, leading_constant_4_at, VerificationRow, DEFAULT_TRUNCATION, LEADING_DENOMINATOR};
use hecke_core::{Error, GInt};
use num_complex::Complex64;
use serde::Serialize;

use config::{parse_x, RunConfig};

#[derive(Parser)]
#[command(name = "hecke", version, about = "Quadratic Hecke L-values over Z[i]")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the quadratic residue symbol (a/n).
    Symbol {
        #[arg(long, allow_hyphen_values = true)]
        a: GInt,
        #[arg(long, allow_hyphen_values = true)]
        n: GInt,
    },
    /// Run a verification suite; exits 1 if any row fails.
    Verify(VerifyArgs),
    /// Scan moments of central values and write CSV, JSON and a gnuplot script.
    Moments(MomentsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Gauss,
    Poisson,
    Zseries,
    Afe,
}

#[derive(Args)]
struct VerifyArgs {
    suite: Suite,
    /// Norm bound for d (gauss) or for the Z-series box (zseries).
    #[arg(long)]
    nmax: Option<u64>,
    /// Prime norm bound for the prime-power Gauss sums.
    #[arg(long, default_value_t = 100)]
    pmax: u64,
    /// Random (a, p) pairs for the symbol check.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Norm bound for d in the afe suite.
    #[arg(long, default_value_t = 2000)]
    dmax: u64,
    /// Smoothing length X for the poisson suite.
    #[arg(long, default_value_t = 50.0)]
    x: f64,
    /// Truncation tolerance (afe) or identity tolerance (poisson).
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Print every row, not only failures and summaries.
    #[arg(long)]
    verbose: bool,
}

#[derive(Args)]
struct MomentsArgs {
    /// key = value file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated X grid.
    #[arg(long, value_delimiter = ',', value_parser = parse_x)]
    grid: Option<Vec<u64>>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Sum over primary d only.
    #[arg(long)]
    primary_only: bool,
    /// Allow X up to 1e5 (hours of compute).
    #[arg(long)]
    stretch: bool,
    /// Fill the seconds column.
    #[arg(long)]
    timing: bool,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    no_json: bool,
    #[arg(long)]
    no_plot: bool,
    #[arg(long)]
    seed: Option<u64>,
    /// Print a_4, zeta_K(2) and C_4 and exit.
    #[arg(long)]
    constants: bool,
}

enum Failure {
    Core(Error),
    Usage(String),
    Io(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn code(f: &Failure) -> u8 {
    match f {
        Failure::Verification => 1,
        Failure::Usage(_) | Failure::Io(_) => 2,
        Failure::Core(Error::Tolerance { .. } | Error::Overflow(_) | Error::Quadrature(_)) => 3,
        Failure::Core(_) => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Symbol { a, n } => residue_symbol(a, n).map(|s| println!("{s}")).map_err(Failure::from),
        Cmd::Verify(args) => run_verify(args),
        Cmd::Moments(args) => run_moments(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Core(e) => eprintln!("error: {e}"),
                Failure::Usage(m) | Failure::Io(m) => eprintln!("error: {m}"),
                Failure::Verification => {}
            }
            ExitCode::from(code(&f))
        }
    }
}

fn pool(workers: Option<usize>) -> Result<rayon::ThreadPool, Failure> {
    let n = workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if n == 0 {
        return Err(Failure::Usage("need at least one worker".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn fmt_c(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{:.12e}", z.re)
    } else {
        format!("{:.12e}{:+.12e}i", z.re, z.im)
    }
}

fn print_rows(rows: &[VerificationRow], verbose: bool) -> bool {
    let mut names: Vec<&str> = Vec::new();
    for r in rows {
        if !names.contains(&r.identity.as_str()) {
            names.push(&r.identity);
        }
    }
    for r in rows {
        if verbose || !r.pass {
            println!(
                "{} | {} | {} | {} | {:.3e} | {:.0e} | {}",
                r.identity,
                r.parameters,
                fmt_c(r.direct),
                fmt_c(r.closed),
                r.diff,
                r.tolerance,
                if r.pass { "pass" } else { "FAIL" }
            );
        }
    }
    let mut ok = true;
    for name in names {
        let group: Vec<&VerificationRow> = rows.iter().filter(|r| r.identity == name).collect();
        let worst = group.iter().map(|r| r.diff).fold(0.0, f64::max);
        let fails = group.iter().filter(|r| !r.pass).count();
        ok &= fails == 0;
        println!(
            "{name}: {} rows, max diff {worst:.3e}, tol {:.0e}, {}",
            group.len(),
            group[0].tolerance,
            if fails == 0 { "PASS".to_string() } else { format!("FAIL ({fails})") }
        );
    }
    ok
}

fn run_verify(a: VerifyArgs) -> Result<(), Failure> {
    let rows = pool(a.workers)?.install(|| match a.suite {
        Suite::Gauss => verify::gauss_suite(a.nmax.unwrap_or(500), a.pmax, a.samples, a.seed),
        Suite::Poisson => verify::poisson_suite(a.x, a.tol.unwrap_or(1e-6)),
        Suite::Zseries => verify::zseries_suite(a.nmax.unwrap_or(10_000)),
        Suite::Afe => verify::afe_suite(a.dmax, a.tol.unwrap_or(1e-8)),
    })?;
    if matches!(a.suite, Suite::Afe) {
        let worst = rows
            .iter()
            .map(|r| (r.direct - r.closed).norm() / (1.0 - r.closed.re.abs()))
            .fold(0.0, f64::max);
        println!("max |L1^2 - L2| = {worst:.3e}");
    }
    if print_rows(&rows, a.verbose) {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

#[derive(Serialize)]
struct RunOutput<'a> {
    run: &'a RunConfig,
    report: &'a MomentReport,
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn plot_script() -> &'static str {
    "set datafile separator ','\n\
     set key top right\n\
     set xlabel 'log X'\n\
     set ylabel 'S4 / (C4 X log^10 X)'\n\
     plot 'moments.csv' every ::1 using (log($1)):7 with linespoints title 'ratio4'\n"
}

fn print_constants() -> Result<(), Failure> {
    let a4 = a_k(4.0, DEFAULT_TRUNCATION)?;
    let c4 = leading_constant_4_at(DEFAULT_TRUNCATION)?;
    let z2 = zeta_k(Complex64::new(2.0, 0.0))?.re;
    println!(
        "a4 = {:.15e}  (primes N(p) <= {}, |log tail| <= {:.2e})",
        a4.value.re, a4.truncation, a4.log_tail_bound
    );
    println!("zeta_K(2) = {z2:.15}  (zeta(2) L(2, chi_-4))");
    println!(
        "C4 = pi a4 / ({LEADING_DENOMINATOR} zeta_K(2)) (pi/4)^10 = {:.15e}  (|log tail| <= {:.2e})",
        c4.value.re, c4.log_tail_bound
    );
    Ok(())
}

fn run_moments(a: MomentsArgs) -> Result<(), Failure> {
    if a.constants {
        return print_constants();
    }
    let mut run = RunConfig::default();
    if let Some(path) = &a.config {
        let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        run.apply_text(&text).map_err(Failure::Usage)?;
    }
    if let Some(g) = a.grid {
        run.grid = g;
    }
    if let Some(t) = a.tol {
        run.tol = t;
    }
    if let Some(w) = a.workers {
        run.workers = w;
    }
    if let Some(o) = a.out {
        run.out = o;
    }
    if let Some(s) = a.seed {
        run.seed = s;
    }
    run.primary_only |= a.primary_only;
    run.stretch |= a.stretch;
    run.timing |= a.timing;
    run.json &= !a.no_json;
    run.plot &= !a.no_plot;
    let report = moment_scan(&run.scan())?;
    fs::create_dir_all(&run.out).map_err(|e| Failure::Io(format!("{}: {e}", run.out.display())))?;
    let csv = report.to_csv();
    write(&run.out.join("moments.csv"), &csv)?;
    write(&run.out.join("moments.cfg"), &run.to_text())?;
    if run.json {
        let json = serde_json::to_string_pretty(&RunOutput { run: &run, report: &report })
            .map_err(|e| Failure::Io(e.to_string()))?;
        write(&run.out.join("moments.json"), &json)?;
    }
    if run.plot {
        write(&run.out.join("moments.gp"), plot_script())?;
    }
    print!("{csv}");
    println!("# {}", report.note);
    Ok(())
}
