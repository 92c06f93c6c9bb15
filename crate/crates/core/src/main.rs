use std::io::{Read, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use msk::scenario::{darboux_scenario, parse_scenario, run, ModelSpec, RunOptions};

#[derive(Parser)]
#[command(name = "msk", version, about = "Exact multisymplectic geometry on coordinate charts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Run the tasks of a scenario file ("-" reads standard input).
    Run {
        scenario: String,
        /// Run only the task with this id.
        #[arg(long)]
        task: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Seed for randomized tasks; overrides the scenario's own seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Record per-task wall-clock time in the report.
        #[arg(long)]
        timing: bool,
    },
    /// Print a ready-to-run scenario for the canonical model on k-forms over an n-dimensional base.
    Darboux {
        #[arg(long)]
        base_dim: usize,
        #[arg(long)]
        degree: usize,
        /// Base coordinates (among x1..xn) that are vertical for the fibration of the base.
        #[arg(long, value_delimiter = ',', requires = "horizontal")]
        fiber_coords: Vec<String>,
        /// Keep only forms vanishing on r vertical arguments.
        #[arg(long, requires = "fiber_coords")]
        horizontal: Option<usize>,
    },
}

const USAGE_ERROR: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { scenario, task, format, seed, timing } => {
            let text = match read_input(&scenario) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("msk: cannot read {scenario}: {e}");
                    return ExitCode::from(USAGE_ERROR);
                }
            };
            let parsed = match parse_scenario(&text) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("msk: {scenario}: {e}");
                    return ExitCode::from(USAGE_ERROR);
                }
            };
            let report = match run(&parsed, &RunOptions { seed, task, timing }) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("msk: {e}");
                    return ExitCode::from(USAGE_ERROR);
                }
            };
            let rendered = match format {
                Format::Json => report.to_json(),
                Format::Text => report.to_text(),
            };
            if std::io::stdout().write_all(rendered.as_bytes()).is_err() {
                return ExitCode::from(USAGE_ERROR);
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Command::Darboux { base_dim, degree, fiber_coords, horizontal } => {
            let spec = ModelSpec { base_dim, degree, fiber_coords, horizontal };
            match darboux_scenario(&spec) {
                Ok(s) => {
                    print!("{}", s.to_json());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("msk: {e}");
                    ExitCode::from(USAGE_ERROR)
                }
            }
        }
    }
}

fn read_input(path: &str) -> std::io::Result<String> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path)
    }
}
