use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use talagrand_kit::run::{self, ClassKind, Command, Format, GridSize, Params, RunConfig};
use talagrand_kit::Error;

/// Numerical checks of the sharpened Talagrand inequality.
///
/// Exit status: 0 pass, 1 violation found, 2 invalid input.
#[derive(Parser, Debug)]
#[command(version, allow_negative_numbers = true)]
struct Cli {
    /// Command to run; may instead come from --config.
    command: Option<Command>,
    /// JSON config file (a config or a previous report); flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "L")]
    l: Option<f64>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    /// Atom probabilities, comma-separated.
    #[arg(long, value_delimiter = ',')]
    atoms: Option<Vec<f64>>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    u_grid: Option<Vec<f64>>,
    /// L values for phi-scan, comma-separated.
    #[arg(long, value_delimiter = ',')]
    l_grid: Option<Vec<f64>>,
    /// Grid size, `PxR` or `N`.
    #[arg(long)]
    grid: Option<GridSize>,
    #[arg(long)]
    gap_tol: Option<f64>,
    #[arg(long)]
    confidence: Option<f64>,
    #[arg(long, value_enum)]
    class: Option<ClassKind>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    override_enumeration_guard: bool,
}

impl Cli {
    fn params(&self) -> Params {
        Params {
            l: self.l,
            m: self.m,
            n: self.n,
            atoms: self.atoms.clone(),
            trials: self.trials,
            seed: self.seed,
            u_grid: self.u_grid.clone(),
            l_grid: self.l_grid.clone(),
            grid: self.grid,
            gap_tol: self.gap_tol,
            confidence: self.confidence,
            class: self.class,
            override_enumeration_guard: self.override_enumeration_guard.then_some(true),
            out: self.out.clone(),
            format: self.format,
        }
    }

    fn config(&self) -> Result<RunConfig, Error> {
        let base = match &self.config {
            Some(path) => Some(RunConfig::from_json(&std::fs::read_to_string(path)?)?),
            None => None,
        };
        let command = self
            .command
            .or(base.as_ref().map(|b| b.command))
            .ok_or(Error::Config {
                field: "command".into(),
                reason: "missing (give it as an argument or in --config)".into(),
            })?;
        let params = base.map(|b| b.params).unwrap_or_default().overlay(self.params());
        Ok(RunConfig { command, params })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = cli.config().and_then(|cfg| run::run_and_emit(&cfg));
    match outcome {
        Ok((report, path)) => {
            let status = if report.pass { "pass" } else { "violation" };
            match path {
                Some(p) => eprintln!("{status}: report written to {}", p.display()),
                None => eprintln!("{status}"),
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
