use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use qfourier::experiments::{self, Config, DualSpec, Report, Subcommand};
use qfourier::Error;

/// Seeded verification experiments for Fourier analysis on compact quantum group duals.
///
/// Exit status: 0 when every check passes, 1 when a check fails, 2 on usage errors.
#[derive(Debug, Parser)]
#[command(name = "qfourier", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Base seed; required for every stochastic experiment and for `all`.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Trial count (default depends on the experiment).
    #[arg(long, global = true)]
    trials: Option<usize>,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Deformation parameter for SU_q(2), in (0, 1).
    #[arg(long, global = true, default_value_t = 0.5)]
    q: f64,

    /// Highest irrep index (default depends on the experiment).
    #[arg(long, global = true)]
    kmax: Option<usize>,

    /// One of trivial, zN, s3, su2, suq2, oNplus (default depends on the experiment).
    #[arg(long, global = true, value_parser = parse_dual)]
    dual: Option<DualSpec>,

    /// Largest matrix size for gaussian-norms (sizes double from 1).
    #[arg(long, global = true, default_value_t = 256)]
    nmax: usize,

    /// Gauss–Legendre nodes of the SU(2) quadrature.
    #[arg(long, global = true, default_value_t = 8)]
    resolution: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, clap::Subcommand)]
enum Command {
    /// Schur-Gram norm against the ℓ² formula.
    Plancherel,
    /// Pairing against the Gram inner product.
    Pairing,
    /// Dual-side convolution against group convolution, associativity and unit.
    ConvolveCheck,
    /// ℓ² invariance under Haar-random unitary families.
    RandomizeL2,
    /// Contractions as averages of four unitaries.
    FourUnitary,
    /// f_B as half the sum of four unitary randomizations.
    BallDecomposition,
    /// Expected operator norms of real Gaussian matrices.
    GaussianNorms,
    /// Gaussian double integral against its prediction.
    HelgasonGaussian,
    /// Largest L¹ norm over random unitary families against ℓ².
    HelgasonInstance,
    /// Coefficient L^∞ and L¹ bounds on SU(2).
    Lemma35,
    /// Block norms of T_B for multipliers in the unit ball.
    TbContraction,
    /// Haar-state identity for the pairing with a multiplier family.
    HxIdentity,
    /// Trace norm as a supremum over unitaries.
    TraceDuality,
    /// ℓ² norm of central families.
    CentralSum,
    /// The SU_q(2) geometric-series chain.
    CorollarySuq2,
    /// Quantum-dimension growth table.
    Growth,
    /// L¹ norms of SU(2) characters.
    Characters,
    /// Empirical cotype-2 ratios on finite groups.
    Cotype2,
    /// Every experiment above.
    All,
}

impl Command {
    fn subcommand(self) -> Subcommand {
        match self {
            Command::Plancherel => Subcommand::Plancherel,
            Command::Pairing => Subcommand::Pairing,
            Command::ConvolveCheck => Subcommand::ConvolveCheck,
            Command::RandomizeL2 => Subcommand::RandomizeL2,
            Command::FourUnitary => Subcommand::FourUnitary,
            Command::BallDecomposition => Subcommand::BallDecomposition,
            Command::GaussianNorms => Subcommand::GaussianNorms,
            Command::HelgasonGaussian => Subcommand::HelgasonGaussian,
            Command::HelgasonInstance => Subcommand::HelgasonInstance,
            Command::Lemma35 => Subcommand::Lemma35,
            Command::TbContraction => Subcommand::TbContraction,
            Command::HxIdentity => Subcommand::HxIdentity,
            Command::TraceDuality => Subcommand::TraceDuality,
            Command::CentralSum => Subcommand::CentralSum,
            Command::CorollarySuq2 => Subcommand::CorollarySuq2,
            Command::Growth => Subcommand::Growth,
            Command::Characters => Subcommand::Characters,
            Command::Cotype2 => Subcommand::Cotype2,
            Command::All => Subcommand::All,
        }
    }
}

fn parse_dual(s: &str) -> Result<DualSpec, Error> {
    s.parse()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = Config {
        seed: cli.seed,
        trials: cli.trials,
        q: cli.q,
        kmax: cli.kmax,
        dual: cli.dual,
        nmax: cli.nmax,
        resolution: cli.resolution,
    };
    let report = match experiments::run(cli.command.subcommand(), &config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Config(_) | Error::Domain(_) | Error::InvalidDual(_) | Error::InvalidGroup(_) => 2,
                _ => 1,
            };
            return ExitCode::from(code);
        }
    };

    let body = match cli.format {
        Format::Json => match report.to_json() {
            Ok(s) => s + "\n",
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
        },
        Format::Csv => report.to_csv(),
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, body) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
            print_summary(&report, &mut std::io::stdout());
        }
        None => {
            print!("{body}");
            print_summary(&report, &mut std::io::stderr());
        }
    }

    if report.verdict.pass {
        ExitCode::SUCCESS
    } else {
        eprintln!("failing records:");
        for r in report.failing_records() {
            eprintln!("  {r}");
        }
        ExitCode::from(1)
    }
}

fn print_summary(report: &Report, w: &mut dyn std::io::Write) {
    let _ = writeln!(w, "{:<20} {:<28} result", "subcommand", "check");
    for r in &report.records {
        let sub = r["subcommand"].as_str().unwrap_or("?");
        let check = r["check"].as_str().unwrap_or("?");
        let pass = r["pass"].as_bool().unwrap_or(false);
        let _ = writeln!(w, "{:<20} {:<28} {}", sub, check, if pass { "pass" } else { "FAIL" });
    }
    let _ = writeln!(
        w,
        "{} checks, {} failed, {} ms, hash {}",
        report.verdict.checks,
        report.verdict.failures.len(),
        report.sidecar.elapsed_ms,
        report.sidecar.content_hash
    );
}
