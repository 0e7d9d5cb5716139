//! Argument parsing and dispatch for the `eol` binary.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::commands;

#[derive(Debug, Parser)]
#[command(name = "eol", version, about = "Obstructions to desingularizing Einstein orbifolds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the identity suite and print a pass/fail table.
    Verify {
        /// Run only checks whose name contains this string.
        #[arg(long)]
        filter: Option<String>,
        /// Quadrature order for sphere integrals.
        #[arg(long, default_value_t = eol_core::quadrature::DEFAULT_ORDER)]
        order: usize,
        #[arg(long)]
        json: bool,
    },
    /// Radial and Killing obstructions of a scenario.
    Obstruct {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// First-order curvature blocks of the bubble and orbifold terms.
    Curvature {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Taub-type flux of the scenario's fields against one vector field.
    Taub {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, value_enum)]
        field: Field,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        radius: f64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Field {
    Radial,
    #[value(name = "y1+")]
    Y1Plus,
    #[value(name = "y2+")]
    Y2Plus,
    #[value(name = "y3+")]
    Y3Plus,
    #[value(name = "y1-")]
    Y1Minus,
    #[value(name = "y2-")]
    Y2Minus,
    #[value(name = "y3-")]
    Y3Minus,
}

impl Field {
    pub fn name(self) -> &'static str {
        match self {
            Field::Radial => "radial",
            Field::Y1Plus => "y1+",
            Field::Y2Plus => "y2+",
            Field::Y3Plus => "y3+",
            Field::Y1Minus => "y1-",
            Field::Y2Minus => "y2-",
            Field::Y3Minus => "y3-",
        }
    }
}

pub fn run(cli: Cli) -> ExitCode {
    let result = match &cli.command {
        Command::Verify { filter, order, json } => commands::verify(filter.as_deref(), *order, *json),
        Command::Obstruct { scenario, json } => commands::obstruct(scenario, *json),
        Command::Curvature { scenario, json } => commands::curvature(scenario, *json),
        Command::Taub {
            scenario,
            field,
            radius,
            json,
        } => commands::taub(scenario, field.name(), *radius, *json),
    };
    match result {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("eol: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
