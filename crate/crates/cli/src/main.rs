//! `sqswap`: prepare the target chain, run a detection pipeline, or emit sweep data.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical invariant violated.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sqswap_core::detect::{certify_full_entanglement, fidelity_witness, reverse_report, GateNoise, WitnessReport};
use sqswap_core::estimator::Acquisition;
use sqswap_core::noise::noisy_state;
use sqswap_core::protocol::target_state;
use sqswap_core::qstate::QuantumState;
use sqswap_core::{Error, NoiseParams};

#[derive(Debug, Parser)]
#[command(name = "sqswap", version, about = "Entangled-chain preparation and verification experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Summarize the ideal target state.
    Prepare(Common),
    /// Run one detection pipeline and write its report.
    Witness {
        #[arg(long, value_enum)]
        method: MethodArg,
        #[command(flatten)]
        common: Common,
    },
    /// Emit the data behind one figure panel.
    Sweep {
        #[arg(long, value_enum)]
        figure: FigureArg,
        #[command(flatten)]
        common: Common,
    },
}

/// Noise flags left unset take the perfect value, or for `sweep` the panel's
/// documented fixed value.
#[derive(Debug, Clone, Args)]
struct Common {
    /// Number of qubits (even).
    #[arg(long, default_value_t = 10)]
    n: usize,
    /// Probability that each preparation flip is correct.
    #[arg(long)]
    p_sf: Option<f64>,
    /// Probability that a single-site readout is correct.
    #[arg(long)]
    p_ms: Option<f64>,
    /// Probability that the entangling step succeeds; per pulse for `--method reverse`.
    #[arg(long)]
    p_es: Option<f64>,
    /// White-noise weight mixed into the final state.
    #[arg(long)]
    p_white: Option<f64>,
    /// Shots per measurement setting; exact expectations when absent.
    #[arg(long)]
    shots: Option<usize>,
    /// Required whenever `--shots` is given.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum MethodArg {
    Fidelity,
    Homogeneous,
    Reverse,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum FigureArg {
    Fig5a,
    Fig5b,
    Fig5c,
    Hubbard,
}

/// Everything that determines an output file, embedded in it.
#[derive(Debug, Serialize)]
struct RunConfig {
    subcommand: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    method: Option<MethodArg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    figure: Option<FigureArg>,
    n: usize,
    noise: NoiseParams,
    shots: Option<usize>,
    seed: Option<u64>,
    format: Format,
}

impl RunConfig {
    fn new(subcommand: &'static str, common: &Common, noise: NoiseParams, format: Format) -> Self {
        Self { subcommand, method: None, figure: None, n: common.n, noise, shots: common.shots, seed: common.seed, format }
    }
}

/// Failure with its exit code.
#[derive(Debug)]
enum Failure {
    Config(String),
    Numerical(String),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Numerical(_) | Error::NotNormalized(_) | Error::InvalidDensityMatrix(_) | Error::ExpectationOutOfRange(_) => {
                Self::Numerical(e.to_string())
            }
            _ => Self::Config(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e)
    }
}

impl Common {
    /// Unset flags fall back to `base`.
    fn noise_over(&self, base: NoiseParams) -> NoiseParams {
        NoiseParams {
            p_white: self.p_white.unwrap_or(base.p_white),
            p_sf: self.p_sf.unwrap_or(base.p_sf),
            p_ms: self.p_ms.unwrap_or(base.p_ms),
            p_es: self.p_es.unwrap_or(base.p_es),
        }
    }

    fn noise(&self) -> NoiseParams {
        self.noise_over(NoiseParams::default())
    }

    fn acquisition(&self) -> Result<Acquisition<f64>, Failure> {
        let acq = match (self.shots, self.seed) {
            (None, _) => Acquisition::exact(),
            (Some(0), _) => return Err(Failure::Config("--shots must be at least 1".into())),
            (Some(m), Some(seed)) => Acquisition::sampled(m, seed),
            (Some(_), None) => return Err(Failure::Config("--seed is required with --shots".into())),
        };
        Ok(acq.with_readout(self.noise().p_ms))
    }

    fn check(&self) -> Result<(), Failure> {
        self.noise().validate()?;
        if self.n % 2 == 1 {
            return Err(Error::OddQubitCount(self.n).into());
        }
        Ok(())
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Prepare(common) => {
            common.check()?;
            let config = RunConfig::new("prepare", &common, common.noise(), common.format.unwrap_or(Format::Json));
            let summary = output::prepare_summary(common.n)?;
            output::emit_prepare(&config, &summary, common.out.as_deref())
        }
        Command::Witness { method, common } => {
            common.check()?;
            let report = witness(method, &common)?;
            let config = RunConfig {
                method: Some(method),
                ..RunConfig::new("witness", &common, common.noise(), common.format.unwrap_or(Format::Json))
            };
            output::emit_witness(&config, &report, common.out.as_deref())
        }
        Command::Sweep { figure, common } => {
            common.check()?;
            if matches!(figure, FigureArg::Hubbard) && common.shots.is_some() {
                return Err(Failure::Config("the hubbard sweep is exact; drop --shots".into()));
            }
            common.acquisition()?;
            let base = output::figure(figure).map(|f| f.fixed()).unwrap_or_default();
            let config = RunConfig {
                figure: Some(figure),
                ..RunConfig::new("sweep", &common, common.noise_over(base), common.format.unwrap_or(Format::Csv))
            };
            output::emit_sweep(&config, common.out.as_deref())
        }
    }
}

fn witness(method: MethodArg, common: &Common) -> Result<WitnessReport, Failure> {
    let acq = common.acquisition()?;
    let noise = common.noise();
    let noiseless_prep = noise.p_sf == 1.0 && noise.p_es == 1.0 && noise.p_white == 0.0;
    match method {
        MethodArg::Reverse => {
            if noise.p_sf != 1.0 || noise.p_white != 0.0 {
                return Err(Failure::Config("reverse evolution models gate noise (--p-es) and readout (--p-ms) only".into()));
            }
            let gates = if noise.p_es == 1.0 { GateNoise::noiseless() } else { GateNoise::depolarizing(1.0 - noise.p_es) };
            Ok(reverse_report(common.n, &gates, &acq)?)
        }
        _ if noiseless_prep => run_detector(method, &target_state::<f64>(common.n)?, &acq),
        _ => run_detector(method, &noisy_state(common.n, &noise)?, &acq),
    }
}

fn run_detector<S: QuantumState<f64> + Sync>(method: MethodArg, state: &S, acq: &Acquisition<f64>) -> Result<WitnessReport, Failure> {
    Ok(match method {
        MethodArg::Fidelity => fidelity_witness(state, acq)?,
        MethodArg::Homogeneous => certify_full_entanglement(state, acq)?,
        MethodArg::Reverse => unreachable!("handled by the caller"),
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
