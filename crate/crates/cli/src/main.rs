//! Command-line front end: one subcommand per scenario, plus `run` for a
//! configuration file, `verify` for the check suite, `presets` and `check`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use t2spec::error::Validate;
use t2spec::runner::{
    check_outputs, run_scenario, Overrides, RunManifest, RunOutcome, Scenario, ScenarioConfig, MANIFEST_FILE, PRESETS,
};
use t2spec::verify::GROUPS;
use t2spec::Error;

const EXIT_CONFIG: u8 = 1;
const EXIT_VERIFY: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "t2spec", version, about = "Two-qubit T2 spectroscopy maps and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Filter functions of the Ramsey and spin-echo protocols.
    Filters(RunArgs),
    /// White-noise bath with a spatial rate profile.
    Markov(RunArgs),
    /// Harmonic bath correlation map (gapped or gapless dispersion).
    HarmonicMap(RunArgs),
    /// Gapless harmonic bath map with the scaling collapse.
    GaplessMap(RunArgs),
    /// Cattaneo medium correlation map.
    DiffusiveMap(RunArgs),
    /// NV probes above a Cattaneo medium.
    NvMap(RunArgs),
    /// Parametrically driven mode occupations.
    Parametric(RunArgs),
    /// Run the verification suite, optionally restricted to some groups.
    Verify(VerifyArgs),
    /// Run whatever scenario the configuration file names.
    Run(RunArgs),
    /// List the shipped presets.
    Presets,
    /// Compare the files in an output directory with its manifest checksums.
    Check {
        /// Directory holding a manifest.
        dir: PathBuf,
    },
}

#[derive(Args, Debug, Clone, Default)]
struct RunArgs {
    /// TOML configuration file; its keys override the preset.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Named parameter set used as the base configuration.
    #[arg(long)]
    preset: Option<String>,
    /// Output directory.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    workers: Option<usize>,
    /// Relative quadrature tolerance (check tolerance for `verify`).
    #[arg(long)]
    tol: Option<f64>,
    /// Print the resolved configuration as TOML and exit.
    #[arg(long)]
    print_config: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Check groups to run; all when omitted.
    #[arg(value_name = "GROUP")]
    groups: Vec<String>,
}

/// A failure with the process exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Io(_)) {
            EXIT_IO
        } else {
            EXIT_CONFIG
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn load(scenario: Option<Scenario>, args: &RunArgs) -> Result<ScenarioConfig, Failure> {
    let text = match &args.config {
        Some(path) => Some(fs::read_to_string(path).map_err(|e| Failure {
            code: EXIT_IO,
            message: format!("cannot read {}: {e}", path.display()),
        })?),
        None => None,
    };
    let overrides = Overrides {
        scenario,
        preset: args.preset.clone(),
        out_dir: args.out_dir.clone(),
        workers: args.workers,
        tol: args.tol,
    };
    Ok(ScenarioConfig::load(text.as_deref(), &overrides)?)
}

fn print_summary(outcome: &RunOutcome, dir: &Path) {
    let m = &outcome.manifest;
    println!(
        "{} (preset {}) finished in {:.2} s, output in {}",
        m.scenario,
        m.preset,
        m.wall_time_seconds,
        dir.display()
    );
    for rec in &m.outputs {
        match rec.rows {
            Some(rows) => println!("  {} ({rows} rows)", rec.file),
            None => println!("  {}", rec.file),
        }
    }
    if !m.all_converged {
        println!(
            "  warning: {} cells stopped at the quadrature budget; see {MANIFEST_FILE}",
            m.convergence_warnings.len()
        );
    }
    if let Some(report) = &outcome.verify_report {
        for c in report.checks.iter().filter(|c| !c.passed) {
            let detail = match (&c.error, c.measured) {
                (Some(err), _) => err.clone(),
                (None, Some(v)) => format!("measured {v:e}, tolerance {:e}", c.tolerance),
                (None, None) => format!("tolerance {:e}", c.tolerance),
            };
            println!("  FAIL {}/{}: {detail}", c.group, c.name);
        }
        println!("  checks passed: {}, failed: {}", report.passed, report.failed);
    }
}

fn execute(scenario: Option<Scenario>, args: &RunArgs, groups: Option<Vec<String>>) -> Result<(), Failure> {
    let mut cfg = load(scenario, args)?;
    if let Some(groups) = groups.filter(|g| !g.is_empty()) {
        cfg.verify.groups = groups;
        cfg.validate().map_err(Error::Invalid)?;
    }
    if args.print_config {
        print!("{}", cfg.to_toml()?);
        return Ok(());
    }
    let outcome = run_scenario(&cfg)?;
    print_summary(&outcome, &cfg.out_dir);
    if outcome.verification_passed() {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_VERIFY,
            message: "verification failed".to_string(),
        })
    }
}

fn check(dir: &Path) -> Result<(), Failure> {
    let path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Failure {
        code: EXIT_IO,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    let manifest: RunManifest = serde_json::from_str(&text).map_err(|e| Failure {
        code: EXIT_CONFIG,
        message: format!("malformed manifest {}: {e}", path.display()),
    })?;
    let bad = check_outputs(&manifest, dir)?;
    if bad.is_empty() {
        println!("{} outputs match {MANIFEST_FILE}", manifest.outputs.len());
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_VERIFY,
            message: format!("checksum mismatch: {}", bad.join(", ")),
        })
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Filters(a) => execute(Some(Scenario::Filters), &a, None),
        Command::Markov(a) => execute(Some(Scenario::Markov), &a, None),
        Command::HarmonicMap(a) => execute(Some(Scenario::HarmonicMap), &a, None),
        Command::GaplessMap(a) => execute(Some(Scenario::GaplessMap), &a, None),
        Command::DiffusiveMap(a) => execute(Some(Scenario::DiffusiveMap), &a, None),
        Command::NvMap(a) => execute(Some(Scenario::NvMap), &a, None),
        Command::Parametric(a) => execute(Some(Scenario::Parametric), &a, None),
        Command::Verify(v) => execute(Some(Scenario::Verify), &v.run, Some(v.groups)),
        Command::Run(a) => {
            if a.config.is_none() {
                return Err(Failure {
                    code: EXIT_CONFIG,
                    message: "`run` needs --config".to_string(),
                });
            }
            execute(None, &a, None)
        }
        Command::Presets => {
            for (name, description) in PRESETS {
                println!("{name:<22} {description}");
            }
            println!("verify groups: {}", GROUPS.join(", "));
            Ok(())
        }
        Command::Check { dir } => check(&dir),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
