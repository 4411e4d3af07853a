//! Command-line entry point. Exit codes: 0 success or convergence, 1 usage
//! error, 2 validation error, 3 numerical blow-up.

mod commands;
mod config;

use clap::{Parser, Subcommand};
use rank1flow::geometry::RadialGrid;
use rank1flow::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "rank1flow", version, about = "Curvature and normalized Ricci-DeTurck flow laboratory for rank-1 noncompact symmetric spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Golden table of the model catalog up to parameter max-m.
    Models {
        #[arg(long = "max-m")]
        max_m: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Admissibility windows of one model.
    Admissibility {
        #[arg(long)]
        family: String,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Largest curvature-operator eigenvalue against the catalog.
    Spectrum {
        #[arg(long)]
        family: String,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form background oracles and the engine residual on a radius.
    Background {
        #[arg(long)]
        family: String,
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = 0.5)]
        rmin: f64,
        #[arg(long, default_value_t = 6.0)]
        rmax: f64,
        #[arg(long, default_value_t = 0.03125)]
        dr: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Normalized Ricci-DeTurck flow run from a config file.
    Flow {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Relative volume and the volume-derivative identity of initial data.
    Volume {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Batch of stability Rayleigh quotients on random test tensors.
    Stability {
        #[arg(long)]
        family: String,
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = -4.0)]
        rmin: f64,
        #[arg(long, default_value_t = 4.0)]
        rmax: f64,
        #[arg(long, default_value_t = 0.03125)]
        dr: f64,
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}

fn validation_code(err: &Error) -> u8 {
    match err {
        Error::BlowUp { .. } => 3,
        _ => 2,
    }
}

fn dispatch(command: Command) -> Result<(), (u8, String)> {
    let as_validation = |e: Error| (validation_code(&e), e.to_string());
    match command {
        Command::Models { max_m, out } => {
            let csv = commands::models_csv(max_m).map_err(as_validation)?;
            write_output(out.as_deref(), &csv)
        }
        Command::Admissibility { family, m, out } => {
            let spec = commands::model_from_flags(&family, m).map_err(as_validation)?;
            write_output(out.as_deref(), &commands::admissibility_csv(&spec))
        }
        Command::Spectrum { family, m, out } => {
            let spec = commands::model_from_flags(&family, m).map_err(as_validation)?;
            let csv = commands::spectrum_csv(&spec).map_err(as_validation)?;
            write_output(out.as_deref(), &csv)
        }
        Command::Background { family, m, rmin, rmax, dr, out } => {
            let spec = commands::model_from_flags(&family, m).map_err(as_validation)?;
            let grid = RadialGrid::new(rmin, rmax, dr).map_err(as_validation)?;
            let csv = commands::background_csv(&spec, grid).map_err(as_validation)?;
            write_output(out.as_deref(), &csv)
        }
        Command::Flow { config, out } => {
            let text = read_config(&config)?;
            let parsed = config::parse_flow_config(&text).map_err(as_validation)?;
            match commands::flow_csv(&parsed) {
                Ok(csv) => write_output(out.as_deref(), &csv),
                Err((err, Some(partial))) => {
                    // Surface the rows recorded before the failure.
                    write_output(out.as_deref(), &partial)?;
                    Err((validation_code(&err), err.to_string()))
                }
                Err((err, None)) => Err(as_validation(err)),
            }
        }
        Command::Volume { config, out } => {
            let text = read_config(&config)?;
            let parsed = config::parse_flow_config(&text).map_err(as_validation)?;
            let csv = commands::volume_csv(&parsed).map_err(as_validation)?;
            write_output(out.as_deref(), &csv)
        }
        Command::Stability { family, m, rmin, rmax, dr, count, seed, out } => {
            let spec = commands::model_from_flags(&family, m).map_err(as_validation)?;
            let grid = RadialGrid::new(rmin, rmax, dr).map_err(as_validation)?;
            let csv = commands::stability_csv(&spec, grid, count, seed).map_err(as_validation)?;
            write_output(out.as_deref(), &csv)
        }
    }
}

fn read_config(path: &std::path::Path) -> Result<String, (u8, String)> {
    std::fs::read_to_string(path)
        .map_err(|e| (1, format!("cannot read config {}: {e}", path.display())))
}

fn write_output(path: Option<&std::path::Path>, content: &str) -> Result<(), (u8, String)> {
    match path {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(p) => std::fs::write(p, content)
            .map_err(|e| (1, format!("cannot write {}: {e}", p.display()))),
    }
}
