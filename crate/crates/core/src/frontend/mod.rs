//! The `.pbip` system-description language: parsing and canonical printing.

mod lexer;
mod parser;
mod printer;

use crate::diag::Diagnostic;
use crate::logic::Formula;
use crate::model::SystemModel;

pub use parser::{parse_formula_with, parse_model_in};
pub use printer::{format_formula, pretty_print};

/// Parses a model; diagnostics refer to the file name `<input>`.
pub fn parse_model(text: &str) -> Result<SystemModel, Vec<Diagnostic>> {
    parse_model_in(text, "<input>")
}

/// Parses a standalone formula; unbound identifiers become free variables.
pub fn parse_formula(text: &str) -> Result<Formula, Diagnostic> {
    parse_formula_with(text, &[])
}
