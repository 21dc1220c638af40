//! `gapower`: run geometric and cross-vector power analyses over scenario
//! files, emit decomposition tables and plot-ready waveform data.
//!
//! Exit codes: 0 on success, 2 on parse/validation errors, 3 on numeric
//! failures (singular voltage, resonant circuit), 1 otherwise.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use gapower_core::report::{decomposition_csv, human_table, json_lines, waveform_csv};
use gapower_core::scenario::{
    analyze_with_artifacts, builtin, waveform_artifacts, Scenario, TheorySelection,
};
use gapower_core::{AnalysisMode, Error};

/// Environment variable naming the default output directory.
const OUT_DIR_ENV: &str = "GAPOWER_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "gapower",
    about = "Geometric-algebra power analysis over scenario files",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TheoryArg {
    Gapot,
    Cv,
    Both,
}

impl From<TheoryArg> for TheorySelection {
    fn from(value: TheoryArg) -> TheorySelection {
        match value {
            TheoryArg::Gapot => TheorySelection::Gapot,
            TheoryArg::Cv => TheorySelection::Cv,
            TheoryArg::Both => TheorySelection::Both,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    JsonLines,
}

#[derive(Subcommand)]
enum Command {
    /// Analyse one or more scenarios and write report files.
    Run {
        /// Scenario files, or built-in scenario names.
        #[arg(required = true)]
        scenarios: Vec<String>,
        /// Which theory to run.
        #[arg(long, value_enum, default_value = "gapot")]
        theory: TheoryArg,
        /// Output directory (default: $GAPOWER_OUT_DIR or the working directory).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Machine output format.
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
    },
    /// Parse a scenario file and report every invariant violation.
    Validate {
        scenario: String,
    },
    /// List the built-in scenarios.
    ListScenarios,
    /// Write per-component waveform CSVs (`t,phase1,...`) for a scenario.
    EmitWaveforms {
        scenario: String,
        #[arg(long, value_enum, default_value = "gapot")]
        theory: TheoryArg,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Samples per fundamental period in the emitted waveforms.
        #[arg(long, default_value_t = 1024)]
        samples_per_period: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn io(message: String) -> Failure {
        Failure { code: 1, message }
    }
}

impl From<Error> for Failure {
    fn from(error: Error) -> Failure {
        let code = match &error {
            Error::InvalidScenario(_)
            | Error::ScenarioParse(_)
            | Error::DuplicateHarmonicOrder { .. }
            | Error::ZeroHarmonicOrder
            | Error::MixedBaseFrequency { .. }
            | Error::EmptySignal
            | Error::InvalidBaseFrequency { .. }
            | Error::SinglePhaseInstantaneous
            | Error::NotThreePhase(_)
            | Error::PhaseCountMismatch { .. }
            | Error::InvalidCircuitParameter(_)
            | Error::TheoryUnsupported(_) => 2,
            Error::NearZeroVector { .. }
            | Error::NearZeroVoltage { .. }
            | Error::ResonantSingularity { .. }
            | Error::ZeroSignal { .. } => 3,
            _ => 1,
        };
        Failure { code, message: error.to_string() }
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Run { scenarios, theory, out, format } => {
            run(&scenarios, theory.into(), out, format)
        }
        Command::Validate { scenario } => validate(&scenario),
        Command::ListScenarios => {
            for (name, source) in builtin::all() {
                let scenario = Scenario::from_toml(source).expect("built-ins parse");
                println!("{name}\t{}", scenario.description);
            }
            Ok(())
        }
        Command::EmitWaveforms { scenario, theory, out, samples_per_period } => {
            emit_waveforms(&scenario, theory.into(), out, samples_per_period)
        }
    }
}

/// A scenario argument is a built-in name or a file path.
fn load_scenario(arg: &str) -> Result<Scenario, Failure> {
    if let Some(scenario) = builtin::by_name(arg) {
        return Ok(scenario);
    }
    let path = Path::new(arg);
    if !path.exists() {
        return Err(Failure {
            code: 2,
            message: format!(
                "'{arg}' is neither a built-in scenario ({}) nor an existing file",
                builtin::all()
                    .iter()
                    .map(|(n, _)| *n)
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        });
    }
    let source = std::fs::read_to_string(path)
        .map_err(|e| Failure::io(format!("reading {arg}: {e}")))?;
    Ok(Scenario::from_toml(&source)?)
}

fn output_dir(out: Option<PathBuf>) -> PathBuf {
    out.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

/// Write through a temporary file in the target directory, then rename, so
/// partially written reports never appear under the final name.
fn write_atomic(path: &Path, contents: &str) -> Result<(), Failure> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    std::fs::create_dir_all(dir)
        .map_err(|e| Failure::io(format!("creating {}: {e}", dir.display())))?;
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents)
        .map_err(|e| Failure::io(format!("writing {}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path)
        .map_err(|e| Failure::io(format!("renaming to {}: {e}", path.display())))?;
    Ok(())
}

fn run(
    scenario_args: &[String],
    theory: TheorySelection,
    out: Option<PathBuf>,
    format: FormatArg,
) -> Result<(), Failure> {
    let out_dir = output_dir(out);
    let scenarios: Vec<Scenario> = scenario_args
        .iter()
        .map(|arg| load_scenario(arg))
        .collect::<Result<_, _>>()?;

    // scenarios are independent; analyse them in parallel and print in
    // input order
    let mut results: Vec<Option<Result<String, Failure>>> = Vec::new();
    results.resize_with(scenarios.len(), || None);
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for scenario in &scenarios {
            let out_dir = &out_dir;
            handles.push(scope.spawn(move || run_one(scenario, theory, out_dir, format)));
        }
        for (slot, handle) in results.iter_mut().zip(handles) {
            *slot = Some(handle.join().expect("analysis thread panicked"));
        }
    });

    let mut failure: Option<Failure> = None;
    for result in results.into_iter().flatten() {
        match result {
            Ok(table) => print!("{table}"),
            Err(e) => {
                eprintln!("error: {}", e.message);
                let worse = match &failure {
                    Some(old) => e.code > old.code,
                    None => true,
                };
                if worse {
                    failure = Some(e);
                }
            }
        }
    }
    match failure {
        Some(f) => Err(Failure { code: f.code, message: "one or more scenarios failed".into() }),
        None => Ok(()),
    }
}

fn run_one(
    scenario: &Scenario,
    theory: TheorySelection,
    out_dir: &Path,
    format: FormatArg,
) -> Result<String, Failure> {
    let (analysis, _) = analyze_with_artifacts(scenario, theory)?;
    let mut table = String::new();
    match format {
        FormatArg::Csv => {
            for report in [&analysis.gapot, &analysis.cv].into_iter().flatten() {
                let path = out_dir.join(format!("{}.{}.csv", analysis.scenario, report.theory));
                write_atomic(&path, &decomposition_csv(&analysis, report))?;
            }
        }
        FormatArg::JsonLines => {
            let path = out_dir.join(format!("{}.jsonl", analysis.scenario));
            write_atomic(&path, &json_lines(&analysis))?;
        }
    }
    for report in [&analysis.gapot, &analysis.cv].into_iter().flatten() {
        table.push_str(&human_table(&analysis, report));
    }
    if let Some(delta) = analysis.instantaneous_equivalence_delta {
        table.push_str(&format!(
            "  instantaneous geometric vs cross-vector split: max gap {delta:.3e}\n"
        ));
    }
    Ok(table)
}

fn validate(arg: &str) -> Result<(), Failure> {
    let scenario = load_scenario(arg)?;
    let issues = scenario.validation_issues();
    if issues.is_empty() {
        println!("{}: ok", scenario.name);
        Ok(())
    } else {
        for issue in &issues {
            println!("{}: {issue}", scenario.name);
        }
        Err(Failure {
            code: 2,
            message: format!("{} validation issue(s)", issues.len()),
        })
    }
}

fn emit_waveforms(
    arg: &str,
    theory: TheorySelection,
    out: Option<PathBuf>,
    samples_per_period: usize,
) -> Result<(), Failure> {
    if samples_per_period == 0 {
        return Err(Failure { code: 2, message: "--samples-per-period must be positive".into() });
    }
    let scenario = load_scenario(arg)?;
    let out_dir = output_dir(out);
    let artifacts = waveform_artifacts(&scenario, theory)?;
    let averaged = artifacts.mode == AnalysisMode::Averaged;

    if let Some(decomposition) = &artifacts.decomposition {
        for (name, traj) in decomposition.components() {
            let path = out_dir.join(format!("{}.gapot.{name}.csv", scenario.name));
            write_atomic(&path, &waveform_csv(traj, averaged, samples_per_period))?;
            println!("wrote {}", path.display());
        }
    }
    if let Some(cv) = &artifacts.cv {
        for (name, waves) in [("i_p", cv.parallel()), ("i_q", cv.quadrature())] {
            let period = 2.0 * std::f64::consts::PI / cv.base_omega();
            let mut csv = String::from("t,phase1,phase2,phase3\n");
            for j in 0..samples_per_period {
                let t = period * j as f64 / samples_per_period as f64;
                csv.push_str(&gapower_core::report::machine_number(t));
                for wave in waves {
                    csv.push(',');
                    csv.push_str(&gapower_core::report::machine_number(wave.eval(t)));
                }
                csv.push('\n');
            }
            let path = out_dir.join(format!("{}.cv.{name}.csv", scenario.name));
            write_atomic(&path, &csv)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}
