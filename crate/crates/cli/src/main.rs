//! `dissctl`: config-driven experiments on switchable-noise control systems.
//!
//! Exit codes: 0 ok, 1 i/o error, 2 config error, 3 infeasible transfer,
//! 4 numeric failure.

mod artifacts;
mod catalog;
mod config;
mod tasks;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::anyhow;
use clap::{Parser, Subcommand, ValueEnum};
use dissctl::bath::{BathSpec, Statistics};
use dissctl::protocols::Reachability;

use config::{LoadedConfig, Origin};
use tasks::{Failure, RunOptions};

#[derive(Parser)]
#[command(name = "dissctl", version, about = "Optimal control and reachability with switchable noise")]
struct Cli {
    /// Worker threads for optimizer restarts (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config and write its artifacts.
    Run {
        /// Config file, or the name of a bundled config.
        #[arg(long)]
        config: String,
        /// Output directory (default: runs/<name>).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides optimizer.restarts.
        #[arg(long)]
        restarts: Option<usize>,
    },
    /// List the bundled configs.
    List,
    /// Parse and check a config, or every bundled config when none is given.
    Validate {
        #[arg(long)]
        config: Option<String>,
    },
    /// Damping rate, Lamb shift and occupation of an ohmic bath.
    Bath {
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        cutoff: f64,
        #[arg(long, value_enum, default_value = "boson")]
        statistics: StatArg,
        /// Transition frequencies (repeatable).
        #[arg(long = "omega", required = true, allow_negative_numbers = true)]
        omegas: Vec<f64>,
        /// Writes bath.csv here instead of printing.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reachability verdict for the transfer in a config.
    Reach {
        #[arg(long)]
        config: String,
        /// Writes verdict.json here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StatArg {
    Boson,
    Fermion,
}

fn load(spec: &str) -> Result<LoadedConfig, Failure> {
    let path = Path::new(spec);
    if path.exists() {
        return LoadedConfig::from_path(path).map_err(Failure::Config);
    }
    match catalog::find(spec) {
        Some((name, text)) => {
            LoadedConfig::parse(text, Origin::Bundled).map_err(|e| Failure::Config(e.context(format!("bundled {name}"))))
        }
        None => Err(Failure::Config(anyhow!("no config file or bundled config named '{spec}'"))),
    }
}

fn validate_one(loaded: &LoadedConfig) -> Result<String, Failure> {
    let check_files = matches!(loaded.origin, Origin::File(_));
    let prep = tasks::prepare(loaded, check_files)?;
    let note = match prep {
        Some(p) if p.instances.is_empty() => " (needs its target file at run time)",
        _ => "",
    };
    Ok(format!("ok {}{note}", loaded.config.name))
}

fn execute(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.workers {
        if n == 0 {
            return Err(Failure::Config(anyhow!("--workers must be at least 1")));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Config(anyhow!("worker pool: {e}")))?;
    }
    match cli.command {
        Command::Run { config, out, seed, restarts } => {
            let loaded = load(&config)?;
            let out = out.unwrap_or_else(|| PathBuf::from("runs").join(&loaded.config.name));
            let summary = tasks::run(&loaded, &RunOptions { out: &out, seed, restarts })?;
            for l in summary.lines {
                println!("{l}");
            }
        }
        Command::List => {
            for (name, text) in catalog::BUNDLED {
                let c = LoadedConfig::parse(text, Origin::Bundled).map_err(Failure::Config)?;
                println!("{name}\t{}\t{}", serde_json::to_value(c.config.task).unwrap_or_default().as_str().unwrap_or(""), c.config.description);
            }
        }
        Command::Validate { config: Some(spec) } => println!("{}", validate_one(&load(&spec)?)?),
        Command::Validate { config: None } => {
            let mut first_err = None;
            for (name, text) in catalog::BUNDLED {
                match LoadedConfig::parse(text, Origin::Bundled).map_err(Failure::Config).and_then(|c| validate_one(&c)) {
                    Ok(line) => println!("{line}"),
                    Err(e) => {
                        eprintln!("{name}: {e}");
                        first_err.get_or_insert(e);
                    }
                }
            }
            if let Some(e) = first_err {
                return Err(e);
            }
        }
        Command::Bath { beta, cutoff, statistics, omegas, out } => {
            let statistics = match statistics {
                StatArg::Boson => Statistics::Boson,
                StatArg::Fermion => Statistics::Fermion,
            };
            let spec = BathSpec { beta, cutoff, statistics, transition: omegas[0] };
            spec.validate().map_err(|e| Failure::Config(e.into()))?;
            let csv = tasks::bath_rows(&spec, &omegas)?;
            match out {
                Some(dir) => {
                    std::fs::create_dir_all(&dir).map_err(|e| Failure::Io(e.into()))?;
                    artifacts::write_atomic(&dir.join("bath.csv"), csv.as_bytes()).map_err(Failure::Io)?;
                }
                None => print!("{csv}"),
            }
        }
        Command::Reach { config, out } => {
            let loaded = load(&config)?;
            let prep = tasks::prepare(&loaded, true)?
                .ok_or_else(|| Failure::Config(anyhow!("config task has no transfer to classify")))?;
            let verdicts = tasks::verdicts(&loaded, &prep)?
                .ok_or_else(|| Failure::Config(anyhow!("no reachability classification for this model; add [reachability]")))?;
            let value = if let [(_, one)] = verdicts.as_slice() {
                serde_json::to_value(one)
            } else {
                serde_json::to_value(verdicts.iter().map(|(l, v)| (l, v)).collect::<std::collections::BTreeMap<_, _>>())
            };
            let text = value.and_then(|v| serde_json::to_string_pretty(&v)).map_err(|e| Failure::Io(e.into()))?;
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir).map_err(|e| Failure::Io(e.into()))?;
                artifacts::write_atomic(&dir.join("verdict.json"), format!("{text}\n").as_bytes()).map_err(Failure::Io)?;
            }
            println!("{text}");
            if let Some((label, v)) = verdicts.iter().find(|(_, v)| v.reachable == Reachability::No) {
                return Err(Failure::Infeasible(format!("{label}: {}", v.reason)));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dissctl: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
