//! `interface-dyn`: run simulations, dispersion checks and operator oracles.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 run halted by a guard.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use interface_dyn::dynamics::state_derivative;
use interface_dyn::diagnostics::diagnose;
use interface_dyn::scenarios_io::{make_scenario, write_snapshot, CsvSink};
use interface_dyn::singular_ops::oracles::operator_oracles;
use interface_dyn::stepper::{measure_dispersion, run};
use interface_dyn::{Params, RunConfig, ScenarioKind, ScenarioSpec, Snapshot};

const THREADS_ENV: &str = "INTERFACE_DYN_THREADS";

#[derive(Parser, Debug)]
#[command(name = "interface-dyn", version, about = "2-D interface dynamics by boundary integrals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a configured simulation and write diag.csv and snapshots.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides `output_dir` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measure the standing-wave frequency of a small cosine perturbation.
    Dispersion {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 1.0)]
        g: f64,
        #[arg(long, default_value_t = 128)]
        n: usize,
        #[arg(long = "t-end", default_value_t = 20.0)]
        t_end: f64,
        #[arg(long, default_value_t = 0.02)]
        dt: f64,
    },
    /// Check the quadrature against closed-form circle and flat-line results.
    Operators {
        #[arg(long, default_value_t = 64)]
        n: usize,
    },
    /// Write the initial state of a named scenario as a snapshot CSV.
    ScenarioDump {
        #[arg(long)]
        name: String,
        #[arg(long, default_value_t = 128)]
        n: usize,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Halted,
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("{THREADS_ENV} must be a non-negative integer, got `{v}`")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn cmd_run(config: &Path, out: Option<PathBuf>) -> Result<(), Failure> {
    let cfg = RunConfig::load(config)?;
    let dir = out
        .or_else(|| cfg.output_dir.clone())
        .ok_or_else(|| Failure::Usage("no output directory: pass --out or set output_dir".into()))?;
    let initial = make_scenario(&cfg.scenario, cfg.n, cfg.params.uniformity_tol)?;
    let mut sink = CsvSink::create(&dir)?;
    fs::write(dir.join("config.txt"), cfg.serialize()).map_err(|e| format!("{}: {e}", dir.display()))?;
    let report = run(&initial, &cfg.params, &cfg.step, &mut sink)?;
    sink.flush()?;

    let mut o = io::stdout().lock();
    writeln!(o, "outcome={}", report.outcome.name())?;
    writeln!(o, "t={:e}", report.final_state.t)?;
    writeln!(o, "steps={}", report.steps)?;
    if let Some(r) = &report.last_record {
        writeln!(o, "energy={:e}", r.energy)?;
        writeln!(o, "min_sigma={:e}", r.min_sigma)?;
        writeln!(o, "arc_chord={:e}", r.arc_chord)?;
        writeln!(o, "mean_omega={:e}", r.mean_omega)?;
    }
    writeln!(o, "out_dir={}", dir.display())?;
    if report.outcome.is_completed() {
        Ok(())
    } else {
        Err(Failure::Halted)
    }
}

fn cmd_dispersion(k: u32, g: f64, n: usize, t_end: f64, dt: f64) -> Result<(), Failure> {
    let r = measure_dispersion(k, g, n, t_end, dt)?;
    let mut o = io::stdout().lock();
    writeln!(o, "k={}", r.k)?;
    writeln!(o, "omega={:.12e}", r.omega)?;
    writeln!(o, "expected={:.12e}", r.expected)?;
    writeln!(o, "rel_error={:e}", r.rel_error)?;
    writeln!(o, "crossings={}", r.crossings)?;
    Ok(())
}

fn cmd_operators(n: usize) -> Result<(), Failure> {
    let results = operator_oracles(n)?;
    let mut o = io::stdout().lock();
    for r in &results {
        writeln!(o, "{}={:e}", r.name, r.error)?;
    }
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed()).map(|r| r.name).collect();
    writeln!(o, "pass={}", failed.is_empty())?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Usage(format!("oracles above tolerance: {}", failed.join(", "))))
    }
}

fn cmd_scenario_dump(name: &str, n: usize, out: Option<PathBuf>) -> Result<(), Failure> {
    let kind: ScenarioKind = name.parse()?;
    let params = Params::default();
    let state = make_scenario(&ScenarioSpec::named(kind), n, params.uniformity_tol)?;
    let deriv = state_derivative(&state, &params)?;
    let (_, sigma) = diagnose(&state, &deriv, Default::default(), &params)?;
    let snap = Snapshot::from_state(&state, &deriv, &sigma);
    match out {
        Some(path) => {
            let mut f = io::BufWriter::new(fs::File::create(&path).map_err(|e| format!("{}: {e}", path.display()))?);
            write_snapshot(&snap, &mut f)?;
            f.flush()?;
        }
        None => write_snapshot(&snap, &mut io::stdout().lock())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = configure_threads().and_then(|_| match cli.command {
        Command::Run { config, out } => cmd_run(&config, out),
        Command::Dispersion { k, g, n, t_end, dt } => cmd_dispersion(k, g, n, t_end, dt),
        Command::Operators { n } => cmd_operators(n),
        Command::ScenarioDump { name, n, out } => cmd_scenario_dump(&name, n, out),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Halted) => ExitCode::from(2),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
