use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use ulamlab::experiment::{diagnostic, exit_code, run_and_write, Command, ExperimentConfig, Format, Sweep};
use ulamlab::Error;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CommandArg {
    Correct,
    Stabilize,
    InduceCompress,
    Rolli,
    Quasimorphism,
    Deform,
    WitnessScan,
}

impl From<CommandArg> for Command {
    fn from(c: CommandArg) -> Self {
        match c {
            CommandArg::Correct => Command::Correct,
            CommandArg::Stabilize => Command::Stabilize,
            CommandArg::InduceCompress => Command::InduceCompress,
            CommandArg::Rolli => Command::Rolli,
            CommandArg::Quasimorphism => Command::Quasimorphism,
            CommandArg::Deform => Command::Deform,
            CommandArg::WitnessScan => Command::WitnessScan,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

/// Seeded experiments on quasi-representations of groups.
#[derive(Debug, Parser)]
#[command(name = "ulamlab", version)]
struct Cli {
    command: CommandArg,
    /// JSON experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Group recipe, e.g. cyclic:7, dihedral:4, symmetric:3, file:table.txt.
    #[arg(long)]
    group: Option<String>,
    #[arg(long)]
    dim: Option<usize>,
    /// One value or a comma-separated sweep.
    #[arg(long, value_delimiter = ',')]
    delta: Option<Vec<f64>>,
    /// One value or a comma-separated sweep of circle scales.
    #[arg(long, value_delimiter = ',')]
    t: Option<Vec<f64>>,
    #[arg(long)]
    trunc: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Report file; the report goes to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

fn sweep(v: Vec<f64>) -> Sweep {
    if v.len() == 1 {
        Sweep::One(v[0])
    } else {
        Sweep::Many(v)
    }
}

fn build_config(cli: Cli) -> Result<ExperimentConfig, Error> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::read(path)?,
        None => ExperimentConfig::default(),
    };
    let command = Command::from(cli.command);
    match config.command {
        Some(c) if c != command => {
            return Err(Error::Usage(format!("config is for command {c}, but {command} was requested")));
        }
        _ => config.command = Some(command),
    }
    if let Some(g) = cli.group {
        config.group = Some(g);
    }
    if let Some(d) = cli.dim {
        config.dim = Some(d);
    }
    if let Some(v) = cli.delta {
        config.delta = Some(sweep(v));
    }
    if let Some(v) = cli.t {
        config.t = Some(sweep(v));
    }
    if let Some(l) = cli.trunc {
        config.trunc = Some(l);
    }
    if let Some(s) = cli.seed {
        config.seed = s;
    }
    if let Some(o) = cli.out {
        config.out = Some(o);
    }
    if let Some(f) = cli.format {
        config.format = match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        };
    }
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = build_config(cli).and_then(|config| {
        let text = run_and_write(&config)?;
        if config.out.is_none() {
            print!("{text}");
        }
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", serde_json::to_string_pretty(&diagnostic(&e)).expect("diagnostic serialises"));
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
