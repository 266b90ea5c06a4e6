//! The `selftest` verb: the core acceptance checks plus report determinism.

use relstate_core::{run_all, CriterionResult, Tol};

use crate::circuit::parse_circuit;
use crate::report::run;

pub const FIXTURES: [(&str, &str); 2] = [
    ("measurement.toml", include_str!("../fixtures/measurement.toml")),
    ("quasi_classical.toml", include_str!("../fixtures/quasi_classical.toml")),
];

fn render(results: &[CriterionResult]) -> String {
    results.iter().map(|r| format!("{r}\n")).collect()
}

fn fixture_reports() -> Result<Vec<String>, String> {
    FIXTURES
        .iter()
        .map(|(name, text)| {
            let c = parse_circuit(text).map_err(|e| format!("{name}: {e}"))?;
            let r = run(&c, Tol::default()).map_err(|e| format!("{name}: {e}"))?;
            if r.exit_code() != 0 {
                return Err(format!("{name}: exit status {}", r.exit_code()));
            }
            r.to_json().map_err(|e| format!("{name}: {e}"))
        })
        .collect()
}

/// Runs checks 1 to 9 twice and the shipped fixtures twice; check 10 passes
/// when everything else passes and both rounds produce identical bytes.
pub fn selftest(seed: u64) -> Vec<CriterionResult> {
    let mut results = run_all(seed);
    let again = run_all(seed);
    let fixtures = (fixture_reports(), fixture_reports());

    let others_pass = results.iter().all(|r| r.passed);
    let same_checks = render(&results) == render(&again);
    let (passed, detail) = match fixtures {
        (Ok(a), Ok(b)) => {
            let same_reports = a == b;
            let bytes: usize = a.iter().map(String::len).sum();
            (
                others_pass && same_checks && same_reports,
                format!(
                    "checks 1-9 {}, repeated check output {}, {} fixture reports ({bytes} bytes) {}",
                    if others_pass { "pass" } else { "FAIL" },
                    if same_checks { "identical" } else { "DIFFERS" },
                    a.len(),
                    if same_reports { "identical" } else { "DIFFER" },
                ),
            )
        }
        (Err(e), _) | (_, Err(e)) => (false, format!("fixture failed: {e}")),
    };
    results.push(CriterionResult { id: 10, name: "CLI determinism", passed, detail });
    results
}
