mod commands;
mod io;
mod output;
mod presets;

use clap::{Parser, Subcommand};
use commands::Global;
use sptchan::observables::Length;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "sptchan", version, about = "Symmetry-protected topological phases under quantum channels")]
struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Commutation and phase tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Output file, or directory for commands with several outputs.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overwrite existing outputs.
    #[arg(long, global = true)]
    force: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pattern of zeros, complexity and endomorphism orbit of a Z_n×Z_n class.
    Cohomology {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        k: i64,
        /// Integer matrix `a,b,c,d`.
        #[arg(long, allow_hyphen_values = true)]
        endo: Option<String>,
    },
    /// Random injective MPS in a chosen class.
    RandomState {
        /// Moduli, e.g. `4,4`.
        #[arg(long)]
        group: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        bond: usize,
        /// Physical dimension; defaults to the group order.
        #[arg(long)]
        dim: Option<usize>,
    },
    /// Virtual commutator phases and matched class of a state.
    Invariant {
        #[arg(long)]
        state: String,
    },
    /// Weak, strong and twisted symmetry of a channel.
    Classify {
        #[arg(long)]
        channel: String,
        #[arg(long)]
        group: String,
        #[arg(long, default_value = "builtin:regular")]
        rep: String,
        #[arg(long)]
        time: Option<f64>,
    },
    /// Table of string-order parameters.
    StringTable {
        #[arg(long)]
        state: String,
        #[arg(long)]
        channel: Option<String>,
        #[arg(long, default_value = "inf")]
        length: Length,
        #[arg(long)]
        time: Option<f64>,
    },
    /// Pattern of zeros read off a state, optionally after a channel.
    Pattern {
        #[arg(long)]
        state: String,
        #[arg(long)]
        channel: Option<String>,
        #[arg(long)]
        time: Option<f64>,
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
    /// Symmetry-resolved irrep probabilities of the half chain.
    Irreps {
        #[arg(long)]
        state: String,
        #[arg(long)]
        channel: Option<String>,
        #[arg(long, default_value = "inf")]
        length: Length,
        #[arg(long)]
        time: Option<f64>,
    },
    /// A string order parameter under repeated application of a channel.
    Timeseries {
        #[arg(long)]
        state: String,
        #[arg(long)]
        channel: String,
        #[arg(long)]
        steps: usize,
        /// Group element `a,b` of the string.
        #[arg(long)]
        element: Option<String>,
        #[arg(long)]
        time: Option<f64>,
    },
    /// Write a channel or Lindbladian in the JSON file format.
    ExportChannel {
        #[arg(long)]
        channel: String,
    },
    /// Regenerate a named data set into `--out` (default `results/<name>`).
    RunPreset { name: String },
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let global = Global { seed: cli.seed, tol: cli.tol, out: cli.out, force: cli.force };
    if let Some(t) = global.tol {
        if !(t.is_finite() && t > 0.0) {
            anyhow::bail!("--tol must be a positive number, got {t}");
        }
    }
    match cli.command {
        Command::Cohomology { n, k, endo } => commands::cohomology(&global, n, k, endo.as_deref()),
        Command::RandomState { group, k, bond, dim } => commands::random_state(&global, &group, k, bond, dim),
        Command::Invariant { state } => commands::invariant(&global, &state),
        Command::Classify { channel, group, rep, time } => commands::classify(&global, &channel, &group, &rep, time),
        Command::StringTable { state, channel, length, time } => {
            commands::string_table_cmd(&global, &state, channel.as_deref(), length, time)
        }
        Command::Pattern { state, channel, time, samples } => {
            commands::pattern(&global, &state, channel.as_deref(), time, samples)
        }
        Command::Irreps { state, channel, length, time } => {
            commands::irreps(&global, &state, channel.as_deref(), length, time)
        }
        Command::Timeseries { state, channel, steps, element, time } => {
            commands::timeseries(&global, &state, &channel, steps, element.as_deref(), time)
        }
        Command::ExportChannel { channel } => commands::export_channel(&global, &channel),
        Command::RunPreset { name } => {
            let dir = global.out.clone().unwrap_or_else(|| PathBuf::from("results").join(&name));
            let manifest = presets::run_preset(&global, &name, &dir)?;
            for o in &manifest.outputs {
                println!("{}  {}", o.sha256, dir.join(&o.path).display());
            }
            Ok(())
        }
    }
}

/// 3 for numerical failures, 2 for everything else.
fn exit_code(err: &anyhow::Error) -> u8 {
    let numerical = err.chain().any(|e| e.downcast_ref::<sptchan::Error>().is_some_and(|e| e.is_numerical()));
    if numerical {
        3
    } else {
        2
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
