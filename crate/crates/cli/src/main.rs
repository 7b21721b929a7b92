use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ain_cli::commands::{cmd_report, cmd_scalar, cmd_sweep, cmd_verify, VerifyHooks};
use ain_cli::config::{Format, SnrGrid};
use ain_cli::output::Sink;
use ain_cli::{CliError, CliResult, ExperimentConfig};

/// Simulator for aligned interference neutralization over a two-user
/// interference channel with an instantaneous relay.
#[derive(Parser)]
#[command(name = "ainsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify beam construction and cancellation over seeded channels.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, hide = true)]
        inject_singular: bool,
    },
    /// Sweep SNR for one or more scenarios and fit DoF slopes.
    Sweep(RunArgs),
    /// Run the single-antenna integer scheme over a power grid.
    Scalar(RunArgs),
    /// Summarize a result file written by `sweep` or `scalar`.
    Report {
        /// CSV or JSON result file.
        path: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Key = value configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Antennas per node (multiple of 4 for the relay scheme).
    #[arg(long)]
    m: Option<usize>,
    /// SNR (or power, for `scalar`) grid in dB as start:stop:step.
    #[arg(long)]
    snr: Option<SnrGrid>,
    /// Comma-separated: ain_relay, no_relay_zf, tdma, two_antenna_relay.
    #[arg(long)]
    scenario: Option<String>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<Format>,
    /// Relay mode: genie, zf_forward or hard_decision.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Channel draws per grid point.
    #[arg(long)]
    channels: Option<usize>,
    /// QPSK symbols per channel and grid point for error rates.
    #[arg(long)]
    noise: Option<usize>,
    /// Integer symbols per power point (`scalar`).
    #[arg(long)]
    symbols: Option<usize>,
    /// Maximum enumerated constellation tuples (`scalar`).
    #[arg(long)]
    budget: Option<u64>,
    /// Use diversity-optimized first-part beams.
    #[arg(long)]
    diversity: bool,
    /// Write the resolved configuration to this file.
    #[arg(long)]
    save_config: Option<PathBuf>,
}

impl RunArgs {
    fn resolve(&self) -> CliResult<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        let overrides: [(&str, Option<String>); 13] = [
            ("seed", self.seed.map(|v| v.to_string())),
            ("m", self.m.map(|v| v.to_string())),
            ("snr", self.snr.map(|v| v.to_string())),
            ("scenario", self.scenario.clone()),
            ("out", self.out.as_ref().map(|p| p.display().to_string())),
            ("format", self.format.map(|f| f.to_string())),
            ("mode", self.mode.clone()),
            ("epsilon", self.epsilon.map(|v| v.to_string())),
            ("gamma", self.gamma.map(|v| v.to_string())),
            ("channels", self.channels.map(|v| v.to_string())),
            ("noise", self.noise.map(|v| v.to_string())),
            ("symbols", self.symbols.map(|v| v.to_string())),
            ("budget", self.budget.map(|v| v.to_string())),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                cfg.set(key, &v)?;
            }
        }
        if self.diversity {
            cfg.diversity = true;
        }
        if let Some(p) = &self.save_config {
            Sink::open(Some(p))?.commit(cfg.to_string().as_bytes())?;
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Verify { run, inject_singular } => {
            let cfg = run.resolve()?;
            print!("{}", cmd_verify(&cfg, VerifyHooks { inject_singular })?);
        }
        Command::Sweep(run) => {
            let cfg = run.resolve()?;
            for line in cmd_sweep(&cfg)? {
                eprintln!("{line}");
            }
        }
        Command::Scalar(run) => cmd_scalar(&run.resolve()?)?,
        Command::Report { path } => print!("{}", cmd_report(&path)?),
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ainsim: {e}");
            if let CliError::Invariant(_) = e {
                println!("fail");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
