use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rotor_interferometer_cli::{execute, Category, CliError, Kind, RawConfig, RunConfig};

#[derive(Parser)]
#[command(
    name = "rotor-interferometer",
    version,
    about = "Anti-symmetrized kicked-rotor interferometer simulations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Interferometer output for one configuration
    Echo(Common),
    /// Momentum populations after every kick
    MomentumHistory(Common),
    /// Output against the period detuning ε
    ScanEps(Common),
    /// Output against the initial momentum p₀
    ScanP0(Common),
    /// Output against the acceleration a
    ScanAccel(Common),
    /// Finite-pulse output against ε around a Talbot multiple
    FiniteScan(Common),
    /// Narrowest finite-pulse resonance for each N
    TauMinSweep(Common),
    /// δ-kick resonance width against N with a power-law fit
    FitScaling(Common),
    /// Finite-pulse resonance offset at several Talbot multiples
    PeakShift(Common),
}

#[derive(Args)]
struct Common {
    /// Key-value config file, or a JSON sidecar from an earlier run
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV output path; the sidecar goes next to it with a .json extension
    #[arg(long)]
    out: Option<PathBuf>,
    /// Samples per scan
    #[arg(long)]
    points: Option<u64>,
    /// Scan range `lo,hi` in the units of the CSV control column
    #[arg(long, allow_hyphen_values = true)]
    range: Option<String>,
    /// Worker threads
    #[arg(long)]
    parallel: Option<u64>,
    /// Any config key, e.g. `--set n=32 --set phi_d=0.5`
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Command {
    fn split(self) -> (Kind, Common) {
        match self {
            Command::Echo(c) => (Kind::Echo, c),
            Command::MomentumHistory(c) => (Kind::MomentumHistory, c),
            Command::ScanEps(c) => (Kind::ScanEps, c),
            Command::ScanP0(c) => (Kind::ScanP0, c),
            Command::ScanAccel(c) => (Kind::ScanAccel, c),
            Command::FiniteScan(c) => (Kind::FiniteScan, c),
            Command::TauMinSweep(c) => (Kind::TauMinSweep, c),
            Command::FitScaling(c) => (Kind::FitScaling, c),
            Command::PeakShift(c) => (Kind::PeakShift, c),
        }
    }
}

fn resolve(kind: Kind, args: &Common) -> Result<RunConfig, CliError> {
    let mut raw = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::io(&path.display().to_string(), e))?;
            RawConfig::parse(&text)?
        }
        None => RawConfig::default(),
    };
    for assignment in &args.set {
        raw.set_assignment(assignment)?;
    }
    if let Some(p) = args.points {
        raw.set("points", p.to_string());
    }
    if let Some(r) = &args.range {
        raw.set("range", r.clone());
    }
    if let Some(t) = args.parallel {
        raw.set("parallel", t.to_string());
    }
    RunConfig::resolve(kind, &raw)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::new(Category::Usage, e.to_string().trim_end());
            eprintln!("{}", err.to_json());
            return err.exit_code();
        }
    };
    let (kind, args) = cli.command.split();
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{kind}.csv")));
    match resolve(kind, &args).and_then(|cfg| execute(&cfg, &out)) {
        Ok(sidecar) => {
            println!("wrote {} and {}", out.display(), sidecar.display());
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("{}", err.to_json());
            err.exit_code()
        }
    }
}
