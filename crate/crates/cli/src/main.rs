use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod error;
mod output;

use config::RunConfig;
use error::CliError;
use output::Output;

/// Performance models for multinode quantum computers.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    /// TOML config (or JSON with a `.json` extension); defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Root seed; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Converter preset; overrides the config.
    #[arg(long, global = true)]
    preset: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Heralded-pair rate and infidelity versus Pe or pump power.
    M2oSweep,
    /// Nested purification trajectory.
    Distill,
    /// Teleported CX: gate time and process fidelity.
    Gate {
        /// Ideal Bell pair and noiseless local gates.
        #[arg(long)]
        perfect_ep: bool,
    },
    /// Benchmark success region over link time and infidelity.
    Gap,
    /// Quantum volume on the two-node device.
    Qv,
    /// Roofline bounds with distillation shifts.
    Roofline,
    /// PEC versus circuit-knitting sampling overhead.
    Qcpa,
    /// Phase-estimation errors and depth models.
    Dqpe,
    /// Link layers followed by the configured analysis.
    Pipeline,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::M2oSweep => "m2o-sweep",
            Command::Distill => "distill",
            Command::Gate { .. } => "gate",
            Command::Gap => "gap",
            Command::Qv => "qv",
            Command::Roofline => "roofline",
            Command::Qcpa => "qcpa",
            Command::Dqpe => "dqpe",
            Command::Pipeline => "pipeline",
        }
    }
}

fn run(cli: Cli) -> Result<PathBuf, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => config::parse_config(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(p) = cli.preset {
        cfg.preset = p;
    }
    cfg.validate()?;
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    let mut out = Output::create(&cli.out)?;
    match &cli.command {
        Command::M2oSweep => commands::m2o_sweep(&cfg, &mut out)?,
        Command::Distill => commands::distill(&cfg, &mut out)?,
        Command::Gate { perfect_ep } => commands::gate(&cfg, *perfect_ep, &mut out)?,
        Command::Gap => commands::gap(&cfg, None, &mut out)?,
        Command::Qv => {
            let link = if cfg.qv.use_link { Some(commands::pipeline_link(&cfg)?.link) } else { None };
            commands::qv(&cfg, link.as_ref(), &mut out)?
        }
        Command::Roofline => commands::roofline(&cfg, None, &mut out)?,
        Command::Qcpa => commands::qcpa(&cfg, None, &mut out)?,
        Command::Dqpe => commands::dqpe(&cfg, &mut out)?,
        Command::Pipeline => commands::pipeline(&cfg, &mut out)?,
    }
    out.finish(cli.command.name(), &cfg)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(manifest) => {
            println!("{}", manifest.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
