//! `collapse-photons`: batch scenario runner for the collapse-photons
//! library. Scenarios are described by line-oriented config files; each run
//! prints a summary block and writes a self-describing CSV artifact.

mod config;
mod output;
mod scenarios;
mod validate;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use config::{parse_config, Kind, ScenarioConfig};
use scenarios::Overrides;

#[derive(Parser)]
#[command(
    name = "collapse-photons",
    version,
    about = "Collapse-model photon phenomenology: scenario runner and oracle validator"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Energy-gain kernel f(k1) over a wavenumber grid
    EnergyGain(RunArgs),
    /// First-order photon loss for a laser pulse, with excitation spectrum
    LaserLoss(RunArgs),
    /// Anomalous-excitation spectrum and rates
    Excitation(RunArgs),
    /// Cosmic blackbody spectral distortion
    Cosmology(RunArgs),
    /// Off-diagonal decay of an N-photon superposition
    Superposition(RunArgs),
    /// Direct truncated-Fock master-equation integration
    FockSim(RunArgs),
    /// Run the oracle cross-check suite
    Validate(ValidateArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario config file
    #[arg(long)]
    config: PathBuf,
    /// CSV output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// RNG seed for Monte-Carlo components
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Exit nonzero on any validity flag
    #[arg(long)]
    strict: bool,
    /// Quadrature tolerance override
    #[arg(long)]
    tol: Option<f64>,
    /// Monte-Carlo sample-count override
    #[arg(long)]
    samples: Option<u64>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Optional config; must name the `validate` kind when given
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    strict: bool,
    /// Quadrature tolerance for the oracle checks
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Monte-Carlo samples per oracle check
    #[arg(long, default_value_t = 400_000)]
    samples: u64,
}

fn load_config(path: &PathBuf, expected: Kind) -> Result<ScenarioConfig> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(errors) => {
            for e in &errors {
                eprintln!("config error: {e}");
            }
            bail!("{} config error(s) in {}", errors.len(), path.display());
        }
    };
    if cfg.kind != expected {
        bail!(
            "config {} declares kind {}, but the {} subcommand was invoked",
            path.display(),
            cfg.kind,
            expected
        );
    }
    Ok(cfg)
}

fn run_scenario(kind: Kind, args: &RunArgs) -> Result<bool> {
    let cfg = load_config(&args.config, kind)?;
    let ov = Overrides {
        seed: args.seed,
        tol: args.tol,
        samples: args.samples,
    };
    let out = scenarios::run(&cfg, &ov)?;
    for line in &out.summary {
        println!("{line}");
    }
    for flag in &out.flags {
        println!("flag: {flag}");
    }
    let rendered = out.csv.render();
    match &args.out {
        Some(path) => fs::write(path, rendered)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{rendered}"),
    }
    Ok(args.strict && !out.flags.is_empty())
}

fn run_validate(args: &ValidateArgs) -> Result<bool> {
    if let Some(path) = &args.config {
        load_config(path, Kind::Validate)?;
    }
    let checks = validate::run_suite(args.seed, args.samples, args.tol)?;
    let mut failed = 0;
    for c in &checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        println!("[{status}] {} — {}", c.name, c.detail);
        if !c.passed {
            failed += 1;
        }
    }
    println!("{} checks, {} failed", checks.len(), failed);
    Ok(failed > 0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.cmd {
        Cmd::EnergyGain(a) => run_scenario(Kind::EnergyGain, a),
        Cmd::LaserLoss(a) => run_scenario(Kind::LaserLoss, a),
        Cmd::Excitation(a) => run_scenario(Kind::Excitation, a),
        Cmd::Cosmology(a) => run_scenario(Kind::Cosmology, a),
        Cmd::Superposition(a) => run_scenario(Kind::Superposition, a),
        Cmd::FockSim(a) => run_scenario(Kind::FockSim, a),
        Cmd::Validate(a) => run_validate(a),
    };
    match outcome {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
