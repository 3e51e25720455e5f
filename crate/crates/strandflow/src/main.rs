//! Command-line front end for the strand circulating-current solver.
//!
//! Three subcommands cover the pipeline: `solve` runs one scenario and
//! writes currents, losses, and waveforms; `sweep` runs the scenario
//! across a list of end-winding ratios, writes the loss curve, and
//! verifies the inverse-square law (exit code 4 when a check fails, with
//! the data still written); `check` validates a scenario — geometry,
//! layout, maps, flux dimensions — without solving anything.
//!
//! Exit codes: 0 success, 2 configuration or validation error, 3 solver
//! failure, 4 failed verdict (outputs are still written), 1 I/O error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use strandflow::assembly::assemble_phase_from_description;
use strandflow::error::Error;
use strandflow::losses::reconstruct_waveforms;
use strandflow::report::{
    write_currents_csv, write_losses_text, write_sweep_csv, write_verdict_text,
    write_waveforms_csv,
};
use strandflow::scenario::{load_scenario, solve_scenario, sweep_scenario, Scenario};
use strandflow::sweep::{verify_property, VerifyTolerances};
use strandflow::winding::validate_winding;
use strandflow::Regime;

#[derive(Parser)]
#[command(
    name = "strandflow",
    version,
    about = "Circulating currents and losses in parallel-stranded windings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one scenario and write currents.csv, losses.txt, waveforms.csv.
    Solve(SolveArgs),
    /// Sweep the end-winding ratio, write sweep.csv and verdict.txt, and
    /// verify the inverse-square loss law (exit 4 on violation).
    Sweep(SweepArgs),
    /// Validate a scenario without solving: geometry, layout, strand maps,
    /// and flux dimensions.
    Check(CheckArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Scenario file (TOML).
    #[arg(long)]
    scenario: PathBuf,
    /// Override the impedance regime from the scenario (`diagonal` or `full`).
    #[arg(long)]
    regime: Option<String>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Override the number of time samples per fundamental period.
    #[arg(long)]
    samples: Option<u32>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated end-winding ratios to sweep (each >= 1, at least
    /// three for the verdict). In the full regime the law is asymptotic:
    /// start the window at 2 or above for a meaningful verdict.
    #[arg(long)]
    alphas: String,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    common: CommonArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Check(args) => cmd_check(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

/// Maps error variants onto the documented exit codes; sweep-point
/// wrappers are classified by their underlying cause.
fn exit_code(err: &Error) -> u8 {
    match err {
        Error::SingularSystem { .. } | Error::ResidualTooLarge { .. } => 3,
        Error::SweepPoint { source, .. } => exit_code(source),
        Error::Io { .. } => 1,
        _ => 2,
    }
}

fn load_with_overrides(common: &CommonArgs) -> Result<Scenario, Error> {
    let mut scenario = load_scenario(&common.scenario)?;
    if let Some(spelling) = &common.regime {
        scenario.regime = Regime::parse(spelling)?;
    }
    Ok(scenario)
}

fn ensure_dir(dir: &Path) -> Result<(), Error> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn plural(n: u64, noun: &str) -> String {
    let s = if n == 1 { "" } else { "s" };
    format!("{n} {noun}{s}")
}

fn parse_alphas(text: &str) -> Result<Vec<f64>, Error> {
    let mut alphas = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let value: f64 = part.parse().map_err(|_| {
            Error::Config(format!("cannot parse `{part}` as an end-winding ratio"))
        })?;
        alphas.push(value);
    }
    if alphas.is_empty() {
        return Err(Error::Config("no end-winding ratios given".into()));
    }
    Ok(alphas)
}

fn cmd_solve(args: SolveArgs) -> Result<ExitCode, Error> {
    let mut scenario = load_with_overrides(&args.common)?;
    if let Some(samples) = args.samples {
        if samples == 0 {
            return Err(Error::Config("samples must be positive".into()));
        }
        scenario.samples_per_period = samples;
    }
    let out = solve_scenario(&scenario)?;
    let waveforms = reconstruct_waveforms(&out.set, scenario.samples_per_period)?;

    ensure_dir(&args.out)?;
    write_currents_csv(&args.out.join("currents.csv"), &out.set)?;
    write_losses_text(&args.out.join("losses.txt"), &out.report)?;
    write_waveforms_csv(&args.out.join("waveforms.csv"), &waveforms)?;

    let (worst_strand, worst_rms) = out.report.per_strand.max_rms();
    println!(
        "solved {}: {}, {}, {} regime",
        args.common.scenario.display(),
        plural(out.set.n_strands() as u64, "strand"),
        plural(u64::from(out.n_harmonics), "harmonic"),
        out.regime.name()
    );
    println!(
        "losses: total {:.6e} W, share {:.6e} W, circulating excess {:.6e} W",
        out.report.p_cc,
        out.report.p_cc0,
        out.report.p_cc - out.report.p_cc0
    );
    println!("worst strand: {worst_strand} at {worst_rms:.6e} A rms");
    println!("{}", out.detection);
    println!("wrote {}", args.out.join("currents.csv").display());
    println!("wrote {}", args.out.join("losses.txt").display());
    println!("wrote {}", args.out.join("waveforms.csv").display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep(args: SweepArgs) -> Result<ExitCode, Error> {
    let scenario = load_with_overrides(&args.common)?;
    let alphas = parse_alphas(&args.alphas)?;
    let result = sweep_scenario(&scenario, &alphas)?;

    ensure_dir(&args.out)?;
    write_sweep_csv(&args.out.join("sweep.csv"), &result)?;
    println!(
        "swept {} end-winding ratios ({} regime)",
        result.points.len(),
        result.regime.name()
    );
    println!(
        "fit: P_CC = {:.6e} * inv_alpha_sq + {:.6e}  (r^2 = {:.9})",
        result.fit.slope, result.fit.intercept, result.fit.r_squared
    );
    println!("wrote {}", args.out.join("sweep.csv").display());

    let tolerances = VerifyTolerances::for_regime(result.regime);
    let verdict = verify_property(&result, &tolerances)?;
    write_verdict_text(&args.out.join("verdict.txt"), &verdict)?;
    println!("wrote {}", args.out.join("verdict.txt").display());
    print!("{verdict}");
    if verdict.passed {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(4))
    }
}

fn cmd_check(args: CheckArgs) -> Result<ExitCode, Error> {
    let scenario = load_with_overrides(&args.common)?;
    let desc = scenario.winding()?;
    let report = validate_winding(&desc);
    if !report.is_valid() {
        println!("{report}");
        eprintln!("error: scenario failed winding validation");
        return Ok(ExitCode::from(2));
    }
    // Dimension audit: the impedance assembly and the flux source must be
    // mutually consistent, without running any solve.
    let phase = assemble_phase_from_description(&desc)?;
    let field = scenario.load_field(&desc)?;
    let n_harmonics = scenario.effective_n_harmonics(&field)?;
    println!(
        "scenario ok: {}, {} in phase, {}, {} regime",
        plural(phase.n_strands as u64, "strand"),
        plural(desc.maps().len() as u64, "slot"),
        plural(u64::from(n_harmonics), "harmonic"),
        scenario.regime.name()
    );
    println!("winding validation: no violations");
    Ok(ExitCode::SUCCESS)
}
