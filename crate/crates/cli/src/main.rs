//! `imprand` command-line tool.
//!
//! Exit codes: 0 success, 1 parse or I/O error, 2 model invariant
//! violation, 3 deficiency at or above the threshold.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use imprand::analysis::{
    check_running_average, default_battery, deficiency_summary, estimate_interval, gamma_family, run_battery, scan_battery, scan_summary, write_trajectory_csv, BatteryConfig,
    DeficiencyReport, SequencePrefix,
};
use imprand::files::{load_battery, load_gamble, load_model_unchecked, load_pmfs, load_process, load_system_or_model};
use imprand::lower::CoherenceReport;
use imprand::martingale::{classify_process, Classification, MultiplierProcess, SelectionProcess};
use imprand::sequence::{generate, read_sequence, write_sequence, GeneratorKind, GeneratorSpec};
use imprand::{check_coherence, pointwise_leq, probe_gambles, Error, ForecastingSystem, Rational};

#[derive(Parser)]
#[command(name = "imprand", version, about = "Randomness testing of sequences against imprecise forecasting systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Iid,
    Cyclic,
    Adversarial,
}

#[derive(Subcommand)]
enum Command {
    /// Run a strategy battery along a sequence and report its deficiency.
    Analyze {
        /// System file, or a model file used as a stationary system.
        #[arg(long)]
        system: PathBuf,
        /// Battery file; the default battery when omitted.
        #[arg(long)]
        battery: Option<PathBuf>,
        #[arg(long)]
        sequence: PathBuf,
        #[arg(long, default_value_t = 10.0)]
        threshold_bits: f64,
        /// Output path, standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// `csv` writes the exact trajectory, `json` a deficiency report.
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Use exact capitals for the JSON report as well.
        #[arg(long)]
        exact: bool,
    },
    /// Estimate the expectation interval of a gamble along a sequence.
    EstimateInterval {
        #[arg(long)]
        gamble: PathBuf,
        #[arg(long)]
        sequence: PathBuf,
        #[arg(long, default_value = "1/16")]
        grid_step: Rational,
        #[arg(long, default_value_t = 10.0)]
        threshold_bits: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// `json` writes the full estimate, `csv` the per-grid-point table.
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Generate a sequence file.
    Generate {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Mass functions file for `iid` (first entry) and `cyclic`.
        #[arg(long)]
        models: Option<PathBuf>,
        /// System for `adversarial`.
        #[arg(long)]
        system: Option<PathBuf>,
        /// Battery for `adversarial`; the default battery when omitted.
        #[arg(long)]
        battery: Option<PathBuf>,
        #[arg(long)]
        length: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check coherence of a model, classify a process, or compare systems.
    Verify {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        system: Option<PathBuf>,
        #[arg(long)]
        process: Option<PathBuf>,
        /// Check that `--system` (or `--model`) is pointwise below this one.
        #[arg(long)]
        leq: Option<PathBuf>,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        /// Seeded probe gambles in addition to the indicators.
        #[arg(long, default_value_t = 24)]
        probes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Selected running averages of a gamble and its forecast increments.
    Average {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        gamble: PathBuf,
        #[arg(long)]
        sequence: PathBuf,
        /// `all` or `residue:m:i`.
        #[arg(long, default_value = "all")]
        selection: SelectionProcess,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: if e.is_invariant_violation() { 2 } else { 1 }, message: e.to_string() }
    }
}

fn io_failure(path: &str, e: io::Error) -> Failure {
    Failure { code: 1, message: format!("{path}: {e}") }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(f) = configure_threads() {
        eprintln!("imprand: {}", f.message);
        return ExitCode::from(f.code);
    }
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("imprand: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

#[cfg(feature = "parallel")]
fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("IMPRAND_THREADS") else {
        return Ok(());
    };
    let n: usize = value.trim().parse().map_err(|_| Failure { code: 1, message: format!("IMPRAND_THREADS={value:?} is not a thread count") })?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure { code: 1, message: e.to_string() })
}

#[cfg(not(feature = "parallel"))]
fn configure_threads() -> Result<(), Failure> {
    Ok(())
}

/// Buffered output to a file or standard output.
fn output(out: &Option<PathBuf>) -> Result<(Box<dyn Write>, String), Failure> {
    match out {
        Some(p) => {
            let name = p.display().to_string();
            let file = File::create(p).map_err(|e| io_failure(&name, e))?;
            Ok((Box::new(BufWriter::new(file)), name))
        }
        None => Ok((Box::new(BufWriter::new(io::stdout().lock())), "<stdout>".into())),
    }
}

fn write_json<T: Serialize>(value: &T, out: &Option<PathBuf>) -> Result<(), Failure> {
    let (mut w, name) = output(out)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Failure { code: 1, message: format!("{name}: {e}") })?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| io_failure(&name, e))
}

fn read_prefix(path: &Path, sys: &ForecastingSystem) -> Result<SequencePrefix, Failure> {
    Ok(read_sequence(path, Some(sys.space()))?)
}

fn battery_for(path: &Option<PathBuf>, sys: &ForecastingSystem) -> Result<Vec<MultiplierProcess>, Failure> {
    Ok(match path {
        Some(p) => load_battery(p, sys)?,
        None => default_battery(sys, &BatteryConfig::default())?,
    })
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Analyze { system, battery, sequence, threshold_bits, out, format, exact } => {
            if threshold_bits.is_nan() || threshold_bits <= 0.0 {
                return Err(Error::InvalidArgument(format!("--threshold-bits {threshold_bits} must be positive")).into());
            }
            let sys = load_system_or_model(&system)?;
            let battery = battery_for(&battery, &sys)?;
            let prefix = read_prefix(&sequence, &sys)?;
            let (deficiency, report): (f64, Option<DeficiencyReport>) = if format == Format::Csv {
                let traj = run_battery(&prefix, &sys, &battery)?;
                let (mut w, name) = output(&out)?;
                write_trajectory_csv(&traj, &mut w).and_then(|_| w.flush()).map_err(|e| io_failure(&name, e))?;
                (traj.deficiency_bits, None)
            } else if exact {
                let traj = run_battery(&prefix, &sys, &battery)?;
                (traj.deficiency_bits, Some(deficiency_summary(std::slice::from_ref(&traj))))
            } else {
                let scan = scan_battery(&prefix, &sys, &battery)?;
                (scan.deficiency_bits, Some(scan_summary(std::slice::from_ref(&scan))))
            };
            let exceeded = deficiency >= threshold_bits;
            if let Some(report) = report {
                let value = json!({
                    "engine": if exact { "exact" } else { "scan" },
                    "length": prefix.len(),
                    "strategies": battery.len(),
                    "threshold_bits": threshold_bits,
                    "deficiency_bits": deficiency,
                    "exceeded": exceeded,
                    "summary": report.rows,
                });
                write_json(&value, &out)?;
            }
            eprintln!("deficiency {deficiency:.6} bits over {} steps with {} strategies (threshold {threshold_bits})", prefix.len(), battery.len());
            Ok(if exceeded { 3 } else { 0 })
        }
        Command::EstimateInterval { gamble, sequence, grid_step, threshold_bits, out, format } => {
            let f = load_gamble(&gamble)?;
            let prefix = read_sequence(&sequence, Some(f.space()))?;
            let est = estimate_interval(&prefix, &f, gamma_family(&f).as_ref(), threshold_bits, &grid_step)?;
            match format {
                Format::Json => write_json(&est, &out)?,
                Format::Csv => {
                    let (mut w, name) = output(&out)?;
                    let write = |w: &mut Box<dyn Write>| -> io::Result<()> {
                        writeln!(w, "gamma,lower_bits,lower_repaired_bits,upper_bits,upper_repaired_bits")?;
                        for (l, u) in est.lower_side.iter().zip(&est.upper_side) {
                            writeln!(w, "{},{},{},{},{}", l.gamma, l.deficiency_bits, l.repaired_bits, u.deficiency_bits, u.repaired_bits)?;
                        }
                        w.flush()
                    };
                    write(&mut w).map_err(|e| io_failure(&name, e))?;
                }
            }
            eprintln!("accepted interval [{}, {}]{}", est.lo_accept, est.hi_accept, if est.crossed { " (endpoints crossed and were swapped)" } else { "" });
            Ok(0)
        }
        Command::Generate { kind, models, system, battery, length, seed, out } => {
            let need = |p: &Option<PathBuf>, flag: &str| p.clone().ok_or_else(|| Failure { code: 1, message: format!("--kind {kind:?} needs --{flag}").to_lowercase() });
            let kind = match kind {
                Kind::Iid => GeneratorKind::Iid(load_pmfs(&need(&models, "models")?)?.remove(0)),
                Kind::Cyclic => GeneratorKind::Cyclic(load_pmfs(&need(&models, "models")?)?),
                Kind::Adversarial => {
                    let sys = load_system_or_model(&need(&system, "system")?)?;
                    let battery = battery_for(&battery, &sys)?;
                    GeneratorKind::Adversarial { sys, battery }
                }
            };
            let prefix = generate(&GeneratorSpec { kind, length, seed })?;
            match &out {
                Some(p) => write_sequence(&prefix, p)?,
                None => {
                    let mut stdout = io::stdout().lock();
                    stdout.write_all(imprand::sequence::format_sequence(&prefix).as_bytes()).and_then(|_| stdout.flush()).map_err(|e| io_failure("<stdout>", e))?;
                }
            }
            Ok(0)
        }
        Command::Verify { model, system, process, leq, depth, probes, seed, out } => verify(model, system, process, leq, depth, probes, seed, out),
        Command::Average { system, gamble, sequence, selection, out } => {
            let sys = load_system_or_model(&system)?;
            let f = load_gamble(&gamble)?;
            let prefix = read_prefix(&sequence, &sys)?;
            let report = check_running_average(&prefix, &f, &selection, &sys)?;
            write_json(&report, &out)?;
            Ok(0)
        }
    }
}

#[derive(Serialize)]
struct VerifyReport {
    violations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    model_error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coherence: Option<CoherenceReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    classification: Option<Classification>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pointwise_leq: Option<bool>,
}

#[allow(clippy::too_many_arguments)]
fn verify(model: Option<PathBuf>, system: Option<PathBuf>, process: Option<PathBuf>, leq: Option<PathBuf>, depth: usize, probes: usize, seed: u64, out: Option<PathBuf>) -> Outcome {
    if model.is_none() && system.is_none() {
        return Err(Failure { code: 1, message: "verify needs --model or --system".into() });
    }
    let mut report = VerifyReport { violations: 0, model_error: None, coherence: None, classification: None, pointwise_leq: None };
    let mut invalid_model = false;
    let mut sys = None;
    if let Some(path) = &model {
        let e = load_model_unchecked(path)?;
        if let Err(err) = e.validate() {
            report.model_error = Some(err.to_string());
            report.violations += 1;
            invalid_model = true;
        }
        let coherence = check_coherence(&e, &probe_gambles(e.space(), probes, seed))?;
        report.violations += coherence.violations.len();
        report.coherence = Some(coherence);
        if !invalid_model && system.is_none() {
            sys = Some(ForecastingSystem::stationary(e)?);
        }
    }
    if let Some(path) = &system {
        sys = Some(load_system_or_model(path)?);
    }
    if let Some(path) = &process {
        let Some(sys) = &sys else {
            return Err(Failure { code: 2, message: "cannot classify a process under an invalid model".into() });
        };
        let p = load_process(path, Some(sys))?;
        let c = classify_process(&p, sys, depth)?;
        report.violations += c.witnesses.len();
        report.classification = Some(c);
    }
    if let Some(path) = &leq {
        let Some(sys) = &sys else {
            return Err(Failure { code: 2, message: "cannot compare an invalid model".into() });
        };
        let other = load_system_or_model(path)?;
        let ok = pointwise_leq(sys, &other, depth, &probe_gambles(sys.space(), probes, seed))?;
        if !ok {
            report.violations += 1;
        }
        report.pointwise_leq = Some(ok);
    }
    write_json(&report, &out)?;
    eprintln!("{} violation(s)", report.violations);
    Ok(if report.violations == 0 { 0 } else { 2 })
}
