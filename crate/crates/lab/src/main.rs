use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use eps_core::algebra::{build_sn_hamiltonian, build_wigner_hamiltonian, HamiltonianSpec};
use eps_lab::{io, ExperimentName, ScenarioConfig};

/// Extended-phase-space Wigner dynamics laboratory.
///
/// Exit status: 0 on success, 2 when an experiment's built-in tolerance check
/// fails, 1 on any error.
#[derive(Debug, Parser)]
#[command(name = "eps-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an experiment described by a scenario file.
    Run {
        /// Scenario file (TOML).
        config: PathBuf,
        /// Experiment, overriding the one in the file: compare-gauges,
        /// transient, convergence, drude-sweep or algebra-selftest.
        #[arg(long)]
        experiment: Option<String>,
        /// Output directory, overriding `output.dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed for randomized checks, overriding `seed`.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print an extended Hamiltonian as sorted (monomial, coefficient) JSON.
    Hamiltonian {
        /// Scenario file supplying parameters and drive.
        config: PathBuf,
        #[arg(long, value_enum, default_value = "wigner")]
        picture: Picture,
        #[arg(long, value_enum, default_value = "a")]
        gauge: GaugeArg,
        /// Time at which the coefficients are evaluated.
        #[arg(long, default_value_t = 0.0)]
        t: f64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Picture {
    Sn,
    Wigner,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GaugeArg {
    A,
    Phi,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn execute(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Run { config, experiment, out, seed } => {
            let mut cfg = ScenarioConfig::load(&config)?;
            if seed.is_some() {
                cfg.seed = seed;
            }
            let requested = experiment
                .map(|name| {
                    ExperimentName::parse(&name).with_context(|| {
                        let known: Vec<&str> = ExperimentName::ALL.iter().map(|e| e.as_str()).collect();
                        format!("unknown experiment `{name}` (expected one of: {})", known.join(", "))
                    })
                })
                .transpose()?;
            let experiment = cfg.resolve_experiment(requested)?;
            let out_dir = out.unwrap_or_else(|| cfg.output.dir.clone());
            let outcome = eps_lab::run(&cfg, experiment, &out_dir)?;
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            println!("{}: {}", experiment, if outcome.passed { "PASS" } else { "FAIL" });
            Ok(outcome.passed)
        }
        Command::Hamiltonian { config, picture, gauge, t } => {
            let cfg = ScenarioConfig::load(&config)?;
            let (params, drive) = (cfg.physical_params(), cfg.harmonic_drive());
            let spec = match gauge {
                GaugeArg::A => HamiltonianSpec::kanai_a_gauge(params, drive),
                GaugeArg::Phi => HamiltonianSpec::kanai_phi_gauge(params, drive),
            };
            let h = match picture {
                Picture::Sn => build_sn_hamiltonian(&spec, t)?,
                Picture::Wigner => build_wigner_hamiltonian(&spec, t)?,
            };
            print!("{}", io::to_json(&io::hamiltonian_terms(&h))?);
            Ok(true)
        }
    }
}
