use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nhcoupler::commands::{self, Command, Dataset, RunError};
use nhcoupler::config::{parse_config, ConfigError, OutputFormat, RunConfig};
use nhcoupler::output::write_table;
use nhcoupler::selftest::run_selftest;
use nhcoupler::Execution;

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_INVARIANT: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "nhcoupler", version, about = "Non-Hermitian two-qubit coupler: spectra, EPs, dynamics, nonreciprocity")]
struct Cli {
    /// TOML run configuration; missing keys take the Fig. 2 defaults.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output file (single-table commands) or directory (figures, oracle).
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Override one config key, e.g. `--set circuit.gamma_a=130`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Worker threads for parallel sweeps. Output does not depend on it.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// Eigenvalues along the [sweep] axis.
    Spectrum,
    /// Eigenvalues over the [scan] plane.
    Scan2d,
    /// Degeneracies along [sweep] (ep.mode = "1d") or EPs over [scan].
    Epfind,
    /// No-jump populations from [evolve].
    Evolve,
    /// Directional couplings over the [scan] plane.
    Nonrecip,
    /// P2 - P1 over time for each [sweep] value.
    Asym,
    /// Effective model against the resolved single-excitation models.
    Oracle,
    Fig2,
    Fig3,
    Fig4a,
    Fig4b,
    Fig5,
    Fig6,
    Fig7,
    /// Invariant checks on seeded random circuits.
    Selftest,
}

impl Cmd {
    fn command(self) -> Option<Command> {
        Some(match self {
            Cmd::Spectrum => Command::Spectrum,
            Cmd::Scan2d => Command::Scan2d,
            Cmd::Epfind => Command::EpFind,
            Cmd::Evolve => Command::Evolve,
            Cmd::Nonrecip => Command::Nonrecip,
            Cmd::Asym => Command::Asym,
            Cmd::Oracle => Command::Oracle,
            Cmd::Fig2 => Command::Fig2,
            Cmd::Fig3 => Command::Fig3,
            Cmd::Fig4a => Command::Fig4a,
            Cmd::Fig4b => Command::Fig4b,
            Cmd::Fig5 => Command::Fig5,
            Cmd::Fig6 => Command::Fig6,
            Cmd::Fig7 => Command::Fig7,
            Cmd::Selftest => return None,
        })
    }
}

enum Failure {
    Config(String),
    Numerical(String),
    Invariant(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        match e {
            RunError::Config(c) => c.into(),
            RunError::Numerical(n) => Failure::Numerical(n.to_string()),
        }
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let (text, name) = match &cli.config {
        Some(p) => (
            fs::read_to_string(p).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?,
            p.display().to_string(),
        ),
        None => (String::new(), "<defaults>".to_string()),
    };
    let mut cfg = parse_config(&text, &name, &cli.set)?;
    if let Some(f) = cli.format {
        cfg.format = match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        };
    }
    if let Some(out) = &cli.out {
        cfg.output = Some(out.display().to_string());
    }
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::Config("--threads must be >= 1".into()));
        }
        cfg.threads = Some(n);
    }
    for w in cfg.unit_sanity() {
        log::warn!("{} = {} {}", w.key, w.value, w.message);
    }
    Ok(cfg)
}

fn execution(threads: Option<usize>) -> Result<Execution, Failure> {
    #[cfg(feature = "parallel")]
    {
        if let Some(n) = threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| Failure::Config(format!("thread pool: {e}")))?;
        }
        Ok(Execution::Parallel)
    }
    #[cfg(not(feature = "parallel"))]
    {
        if threads.is_some_and(|n| n > 1) {
            log::warn!("built without the `parallel` feature; running sequentially");
        }
        Ok(Execution::Sequential)
    }
}

fn write_file(path: &Path, format: OutputFormat, d: &Dataset) -> Result<(), Failure> {
    let io_err = |e: io::Error| Failure::Config(format!("{}: {e}", path.display()));
    if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err)?;
    }
    let f = fs::File::create(path).map_err(io_err)?;
    let mut w = io::BufWriter::new(f);
    write_table(&mut w, format, &d.header, &d.table).map_err(io_err)?;
    w.flush().map_err(io_err)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn emit(command: Command, cfg: &RunConfig, datasets: &[Dataset]) -> Result<(), Failure> {
    let format = cfg.format;
    if datasets.len() == 1 && !command.is_figure() {
        return match &cfg.output {
            Some(p) => write_file(Path::new(p), format, &datasets[0]),
            None => {
                let stdout = io::stdout();
                let mut lock = stdout.lock();
                write_table(&mut lock, format, &datasets[0].header, &datasets[0].table)
                    .and_then(|_| lock.flush())
                    .map_err(|e| Failure::Config(format!("stdout: {e}")))
            }
        };
    }
    let dir = cfg
        .output
        .as_ref()
        .map_or_else(|| PathBuf::from("out").join(command.name()), PathBuf::from);
    for d in datasets {
        write_file(&dir.join(format!("{}.{}", d.name, format.extension())), format, d)?;
    }
    Ok(())
}

fn selftest(cfg: &RunConfig, exec: Execution) -> Result<(), Failure> {
    let checks = run_selftest(cfg.seed, cfg.selftest.draws, exec);
    let mut out = String::new();
    for c in &checks {
        out.push_str(&c.line());
        out.push('\n');
    }
    if let Some(p) = &cfg.output {
        fs::write(p, &out).map_err(|e| Failure::Config(format!("{p}: {e}")))?;
    }
    print!("{out}");
    let failed: Vec<_> = checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Invariant(format!("failed checks: {}", failed.join(", "))))
    }
}

fn main_inner(cli: &Cli) -> Result<(), Failure> {
    let cfg = load_config(cli)?;
    let exec = execution(cfg.threads)?;
    match cli.command.command() {
        None => selftest(&cfg, exec),
        Some(c) => {
            let datasets = commands::run(c, &cfg, exec)?;
            emit(c, &cfg, &datasets)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match main_inner(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(EXIT_NUMERICAL)
        }
        Err(Failure::Invariant(m)) => {
            eprintln!("selftest: {m}");
            ExitCode::from(EXIT_INVARIANT)
        }
    }
}
