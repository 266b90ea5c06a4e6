//! Command-line front end: circuit files in, JSON reports out.

pub mod circuit;
pub mod error;
pub mod report;
pub mod selftest;

pub use circuit::{parse_circuit, Circuit, CircuitFile, Query, QueryKind, FORMAT_VERSION};
pub use error::{exit, CliError};
pub use report::{run, RunReport};

use relstate_core::Tol;

/// Apply `name=value` tolerance overrides on top of the defaults.
pub fn tolerances(overrides: &[String]) -> Result<Tol, CliError> {
    let mut tol = Tol::default();
    for o in overrides {
        let bad = |message: String| CliError::Validation { field: format!("--tol {o}"), message };
        let (name, value) = o.split_once('=').ok_or_else(|| bad("expected name=value".into()))?;
        let v: f64 = value.trim().parse().map_err(|_| bad(format!("`{value}` is not a number")))?;
        if !tol.set(name.trim(), v) {
            let names = relstate_core::tolerance::TOLERANCE_NAMES.join(", ");
            return Err(bad(format!("unknown tolerance or non-positive value (names: tol, {names})")));
        }
    }
    Ok(tol)
}
