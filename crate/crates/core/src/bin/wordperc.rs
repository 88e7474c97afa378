use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use wordperc::harness::{run_experiment, write_outputs, ExperimentConfig, ExperimentKind, HarnessError};
use wordperc::kv::KvMap;
use wordperc::sampler::parse_seed;

/// Experiments on word percolation in truncated long-range lattices.
#[derive(Debug, Parser)]
#[command(name = "wordperc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Flat `key = value` config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Base seed, decimal or 0x-hex; replica r uses seed + r.
    #[arg(long, global = true, value_parser = parse_seed)]
    seed: Option<u64>,

    #[arg(long, global = true)]
    replicas: Option<u64>,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
}

#[derive(Debug, Subcommand, Clone, Copy)]
enum Command {
    /// Growth algorithm success estimates.
    Growth,
    /// Slice exploration on the renormalized lattice.
    Slice,
    /// Exhaustive check of the starting gadget.
    Gadget,
    /// Crossing tail of oriented site percolation.
    Oriented,
    /// Black-vertex coupling on the slab.
    Slab,
    /// Fold isomorphism check.
    Iso,
    /// Words seen from the origin in a window.
    Words,
}

impl Command {
    fn kind(self) -> ExperimentKind {
        match self {
            Command::Growth => ExperimentKind::Growth,
            Command::Slice => ExperimentKind::Slice,
            Command::Gadget => ExperimentKind::Gadget,
            Command::Oriented => ExperimentKind::Oriented,
            Command::Slab => ExperimentKind::Slab,
            Command::Iso => ExperimentKind::Iso,
            Command::Words => ExperimentKind::Words,
        }
    }
}

fn run(cli: &Cli) -> Result<(), HarnessError> {
    let params = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
            KvMap::parse(&text).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?
        }
        None => KvMap::new(),
    };
    let mut cfg = ExperimentConfig::new(cli.command.kind(), params)?;
    if let Some(seed) = cli.seed {
        cfg.seed_base = seed;
    }
    if let Some(r) = cli.replicas {
        cfg.replicas = r;
    }
    let out = run_experiment(&cfg)?;
    let written = write_outputs(cfg.kind, &out, &cli.out)?;
    for line in &out.summary {
        println!("{line}");
    }
    for path in written {
        eprintln!("wrote {}", path.display());
    }
    if let Some(first) = out.violations.first() {
        return Err(HarnessError::Invariant(format!("{first} ({} total)", out.violations.len())));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wordperc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
