mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use toml::Value;

use commands::CliError;
use config::Config;

/// Coverage, channel and SINR experiments for LiFi attocell networks with angle-diversity
/// receivers. Every command writes CSV files and a JSON manifest to `output.dir`.
#[derive(Parser, Debug)]
#[command(name = "attocell", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML configuration file with flat `section.key` entries.
    #[arg(long, global = true, env = "ATTOCELL_CONFIG")]
    config: Option<PathBuf>,

    /// Override one config key; repeatable. The value is parsed as TOML.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Output directory (`output.dir`).
    #[arg(long, global = true)]
    out: Option<String>,

    /// Random seed (`sim.seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Users per run (`sim.n_samples`); for fov-bound, Monte-Carlo positions (`fov.mc_samples`).
    #[arg(long, global = true)]
    samples: Option<u64>,

    /// Combiner, or a comma-separated list for sweeps: EGC, SBC, MRC, MRC-P.
    #[arg(long, global = true, value_delimiter = ',')]
    combiner: Vec<String>,

    /// Cell mode: ss or ds.
    #[arg(long, global = true)]
    mode: Option<String>,

    /// Comma-separated noise PSDs in A^2/Hz (`phy.n0_list`).
    #[arg(long = "n0-list", global = true, value_delimiter = ',')]
    n0_list: Vec<f64>,

    /// Transmitter bandwidth in Hz (`phy.b_t_hz`).
    #[arg(long, global = true)]
    bt: Option<f64>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Analytic FOV lower bound per PD count, with a Monte-Carlo check.
    FovBound,
    /// Footprints of every PD on the ceiling plane and the visibility probability.
    Coverage,
    /// Received power at fixed poses split by reflection order.
    ChannelProfile,
    /// Receiver bandwidth against PD count.
    Bandwidth,
    /// One Monte-Carlo run at `adr.n_pd`, `phy.combiner` and `phy.n0`.
    Simulate,
    /// Monte-Carlo runs over PD counts, combiners and noise levels on shared users.
    Sweep,
    /// Print every config key with its effective value and description.
    Keys,
}

fn build_config(cli: &Cli) -> Result<Config, config::ConfigError> {
    let mut cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    for a in &cli.set {
        cfg.set_assignment(a)?;
    }
    let int = |v: u64| Value::Integer(v as i64);
    if let Some(dir) = &cli.out {
        cfg.set("output.dir", Value::String(dir.clone()))?;
    }
    if let Some(seed) = cli.seed {
        cfg.set("sim.seed", int(seed))?;
    }
    if let Some(n) = cli.samples {
        let key = match cli.command {
            Command::FovBound => "fov.mc_samples",
            _ => "sim.n_samples",
        };
        cfg.set(key, int(n))?;
    }
    if let Some(first) = cli.combiner.first() {
        cfg.set("phy.combiner", Value::String(first.clone()))?;
        let all = cli.combiner.iter().cloned().map(Value::String).collect();
        cfg.set("phy.combiners", Value::Array(all))?;
    }
    if let Some(mode) = &cli.mode {
        cfg.set("cell.mode", Value::String(mode.clone()))?;
        cfg.set("fov.modes", Value::Array(vec![Value::String(mode.clone())]))?;
    }
    if !cli.n0_list.is_empty() {
        let all = cli.n0_list.iter().map(|v| Value::Float(*v)).collect();
        cfg.set("phy.n0_list", Value::Array(all))?;
        if let [only] = cli.n0_list[..] {
            cfg.set("phy.n0", Value::Float(only))?;
        }
    }
    if let Some(bt) = cli.bt {
        cfg.set("phy.b_t_hz", Value::Float(bt))?;
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let cfg = build_config(cli)?;
    let report = match cli.command {
        Command::FovBound => commands::fov_bound(&cfg)?,
        Command::Coverage => commands::coverage(&cfg)?,
        Command::ChannelProfile => commands::channel_profile(&cfg)?,
        Command::Bandwidth => commands::bandwidth(&cfg)?,
        Command::Simulate => commands::simulate(&cfg)?,
        Command::Sweep => commands::sweep(&cfg)?,
        Command::Keys => {
            for (key, about) in config::KEYS {
                println!("{key} = {}  # {about}", cfg.value(key));
            }
            return Ok(Vec::new());
        }
    };
    let dir = PathBuf::from(cfg.str("output.dir"));
    output::write_report(&dir, &report, &cfg)
        .map_err(|e| CliError::Runtime(format!("writing outputs to {}: {e}", dir.display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
