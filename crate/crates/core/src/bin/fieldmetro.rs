use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fieldmetro::engine::PovmFamily;
use fieldmetro::scan::{self, ReportFormat, ScanConfig};
use fieldmetro::{Backend, Error};

#[derive(Parser)]
#[command(version, about = "Multi-parameter field estimation with GHZ-type probes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Total variances of all strategies over a range of N
    Scan(Common),
    /// Cross-route and measurement checks on small registers
    Validate(Common),
    /// QFIM of the probe by every available route
    Qfim(Single),
    /// Classical information of the realistic measurements
    Fim(Single),
    /// Positivity and completeness of the realistic measurements
    PovmCheck(Single),
}

#[derive(Args, Clone)]
struct Common {
    /// Field phases x,y,z
    #[arg(long, value_delimiter = ',')]
    phi: Option<Vec<f64>>,
    /// Particle numbers
    #[arg(long, value_delimiter = ',')]
    n_list: Option<Vec<usize>>,
    /// GHZ projector phases a,b,c (searched when absent)
    #[arg(long, value_delimiter = ',')]
    deltas: Option<Vec<f64>>,
    /// Measurement families: 1 (GHZ projectors), 2 (Pauli strings)
    #[arg(long, value_delimiter = ',')]
    povm: Option<Vec<u8>>,
    #[arg(long, value_enum, default_value = "auto")]
    backend: BackendArg,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

#[derive(Args)]
struct Single {
    /// Particle number
    #[arg(short, long)]
    n: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Dense,
    Superposition,
    Auto,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

fn triple(v: &[f64], flag: &str) -> Result<[f64; 3], Error> {
    <[f64; 3]>::try_from(v)
        .map_err(|_| Error::Config(format!("--{flag} takes three comma-separated values")))
}

fn config(c: &Common) -> Result<ScanConfig, Error> {
    let mut cfg = ScanConfig::default();
    if let Some(p) = &c.phi {
        cfg.phi = triple(p, "phi")?;
    }
    if let Some(n) = &c.n_list {
        cfg.n_values = n.clone();
    }
    cfg.deltas = c.deltas.as_deref().map(|d| triple(d, "deltas")).transpose()?;
    if let Some(f) = &c.povm {
        cfg.povm_families = f
            .iter()
            .map(|&x| match x {
                1 => Ok(PovmFamily::GhzProjectors),
                2 => Ok(PovmFamily::PauliStrings),
                _ => Err(Error::Config(format!("unknown measurement family {x}"))),
            })
            .collect::<Result<_, _>>()?;
    }
    cfg.backend = match c.backend {
        BackendArg::Dense => Backend::Dense,
        BackendArg::Superposition => Backend::Superposition,
        BackendArg::Auto => Backend::Auto,
    };
    cfg.output_path = c.out.clone();
    cfg.format = match c.format {
        FormatArg::Csv => ReportFormat::Csv,
        FormatArg::Json => ReportFormat::Json,
    };
    Ok(cfg)
}

fn run(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::Scan(c) => {
            let cfg = config(&c)?;
            let records = scan::run_scan(&cfg)?;
            scan::emit_report(&records, &cfg)?;
            Ok(true)
        }
        Command::Validate(c) => {
            let report = scan::validate(&config(&c)?)?;
            print!("{}", report.render());
            Ok(report.passed())
        }
        Command::Qfim(s) => {
            print!("{}", scan::qfim_summary(s.n, config(&s.common)?.phi)?);
            Ok(true)
        }
        Command::Fim(s) => {
            print!("{}", scan::fim_summary(s.n, &config(&s.common)?)?);
            Ok(true)
        }
        Command::PovmCheck(s) => {
            let report = scan::povm_check(s.n, &config(&s.common)?)?;
            print!("{}", report.render());
            Ok(report.passed())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
