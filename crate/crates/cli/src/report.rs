//! Executing a circuit and rendering the report.

use std::fmt::Write as _;

use relstate_core::oracle::{self, cross_validate};
use relstate_core::{
    autonomy_check, classical_branches, foliate, make_pvm, register_descriptor, relative_expectation,
    relative_heisenberg_state, sharp_in, simulate_bits, verify_classical_step, Autonomy, Axis, CMatrix, Gate64,
    Network, Observable, RecordKey, RecordSnapshot, RelativeFrame, Tol,
};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::circuit::{Circuit, FrameRef, Query, FORMAT_VERSION};
use crate::error::{core_exit_code, exit, CliError};

#[derive(Debug, Clone, Serialize)]
pub struct ErrorInfo {
    pub class: &'static str,
    pub exit_code: i32,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct QueryOutcome {
    pub index: usize,
    pub kind: &'static str,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Residuals {
    pub algebra: f64,
    pub oracle: f64,
    pub pvm_completeness: f64,
    pub within_tolerance: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub format_version: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub qubits: usize,
    pub steps: usize,
    pub tolerances: Map<String, Value>,
    pub residuals: Residuals,
    pub queries: Vec<QueryOutcome>,
}

impl RunReport {
    /// 0 when every query succeeded and all residuals are within tolerance.
    pub fn exit_code(&self) -> i32 {
        if let Some(e) = self.queries.iter().find_map(|q| q.error.as_ref()) {
            return e.exit_code;
        }
        if !self.residuals.within_tolerance {
            return exit::TOLERANCE;
        }
        exit::OK
    }

    /// Pretty JSON with every float rounded to 12 significant digits.
    pub fn to_json(&self) -> Result<String, CliError> {
        let mut v = serde_json::to_value(self).map_err(|e| CliError::Internal(e.to_string()))?;
        round_floats(&mut v);
        let mut s = serde_json::to_string_pretty(&v).map_err(|e| CliError::Internal(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        let r = &self.residuals;
        let _ = writeln!(out, "{} {}  qubits {}  steps {}", self.tool, self.version, self.qubits, self.steps);
        let _ = writeln!(
            out,
            "residuals  algebra {:.3e}  oracle {:.3e}  pvm {:.3e}  {}",
            r.algebra,
            r.oracle,
            r.pvm_completeness,
            if r.within_tolerance { "within tolerance" } else { "OUT OF TOLERANCE" }
        );
        if self.queries.is_empty() {
            let _ = writeln!(out, "no queries");
        }
        for q in &self.queries {
            let text = match (&q.result, &q.error) {
                (_, Some(e)) => format!("{} error: {}", e.class, e.message),
                (Some(v), None) => {
                    let mut v = v.clone();
                    round_floats(&mut v);
                    v.to_string()
                }
                (None, None) => String::new(),
            };
            let _ = writeln!(out, "{:>3}  {:<12} {:<5}  {}", q.index, q.kind, q.status, text);
        }
        out
    }
}

fn round_sig(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    let r: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().unwrap_or(0.0));
            *v = serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number);
        }
        Value::Array(a) => a.iter_mut().for_each(round_floats),
        Value::Object(m) => m.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn class_name(code: i32) -> &'static str {
    match code {
        exit::INPUT => "input",
        exit::TOLERANCE => "numerical",
        exit::PHYSICS => "physics",
        _ => "internal",
    }
}

/// A query failure; `partial` keeps whatever result was computed.
struct Failure {
    error: CliError,
    partial: Option<Value>,
}

impl<E: Into<CliError>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure { error: e.into(), partial: None }
    }
}

struct Context<'a> {
    circuit: &'a Circuit,
    timeline: Vec<Network>,
    snapshots: Vec<RecordSnapshot<f64>>,
}

impl Context<'_> {
    fn snapshot(&self, key: RecordKey) -> &RecordSnapshot<f64> {
        self.snapshots.iter().find(|s| s.key == key).expect("records are validated")
    }

    fn frame(&self, s: &Network, frames: &[FrameRef]) -> Result<Option<RelativeFrame<f64>>, CliError> {
        let mut acc: Option<RelativeFrame<f64>> = None;
        for f in frames {
            let snap = self.snapshot(f.record);
            let pvm = make_pvm(s, &snap.matrix, &f.record.to_string())?;
            let chosen = pvm
                .into_iter()
                .find(|p| p.label().is_some_and(|l| (l - f.value).abs() <= 1e-6))
                .ok_or_else(|| CliError::Validation {
                    field: format!("frame {}", f.record),
                    message: format!("{} is not an eigenvalue of the record", f.value),
                })?;
            acc = Some(match acc {
                None => chosen,
                Some(outer) => outer.compose(&chosen, s)?,
            });
        }
        Ok(acc)
    }

    fn answer(&self, q: &Query) -> Result<Value, Failure> {
        match q {
            Query::Expectation { observable, time, frames } => {
                let s = &self.timeline[*time];
                let a = observable.at(s)?;
                let mut out = json!({ "observable": observable.to_string(), "time": time });
                let v = match self.frame(s, frames)? {
                    None => s.expectation(&a)?,
                    Some(f) => {
                        out["frame"] = json!(f.describe());
                        out["weight"] = json!(f.weight);
                        relative_expectation(s, &a, &f)?
                    }
                };
                out["value"] = json!(v.re);
                if v.im.abs() > s.tolerances().general {
                    out["imag"] = json!(v.im);
                }
                Ok(out)
            }
            Query::Sharpness { observable, time, frames } => {
                let s = &self.timeline[*time];
                let a = observable.at(s)?;
                a.check_hermitian(s.tolerances().hermitian)?;
                let mut out = json!({ "observable": observable.to_string(), "time": time });
                let psi = match self.frame(s, frames)? {
                    None => s.heisenberg_state().clone(),
                    Some(f) => {
                        out["frame"] = json!(f.describe());
                        out["weight"] = json!(f.weight);
                        relative_heisenberg_state(s, &f)?
                    }
                };
                let (value, variance) = sharp_in(&psi, &a, s.tolerances().sharp);
                out["sharp"] = json!(value.is_some());
                out["value"] = json!(value);
                out["variance"] = json!(variance);
                Ok(out)
            }
            Query::Entanglement { a, b, time } => {
                let e = self.timeline[*time].are_entangled(*a, *b)?;
                Ok(json!({
                    "qubits": [a, b],
                    "time": time,
                    "entangled": e.entangled,
                    "witness": format!("{}{}", e.witness.0, e.witness.1),
                    "discrepancy": e.discrepancy,
                }))
            }
            Query::Foliate { record, qubits, time } => self.foliate(*record, qubits, *time),
            Query::Autonomy { step } => {
                let s = &self.timeline[*step];
                let g = &self.circuit.gates[*step];
                let snaps: Vec<_> = self.snapshots.iter().filter(|r| r.key.time <= *step).cloned().collect();
                let mut out = json!({
                    "step": step,
                    "gate": g.name(),
                    "records": snaps.iter().map(|r| r.key.to_string()).collect::<Vec<_>>(),
                });
                match autonomy_check(s, g, &snaps)? {
                    Autonomy::Preserving => out["classification"] = json!("PRESERVING"),
                    Autonomy::Destroying { record, commutator } => {
                        out["classification"] = json!("DESTROYING");
                        out["record"] = json!(record.to_string());
                        out["commutator"] = json!(commutator);
                    }
                }
                Ok(out)
            }
            Query::Classical { m, s, ancillas, from, to, function } => {
                self.classical(m, s, ancillas, *from, *to, function)
            }
        }
    }

    fn foliate(&self, record: RecordKey, qubits: &[usize], time: usize) -> Result<Value, Failure> {
        let s = &self.timeline[time];
        let snap = self.snapshot(record);
        let rep = foliate(s, qubits, &snap.matrix, &record.to_string())?;
        let tol = s.tolerances();
        let frames: Vec<Value> = rep
            .frames
            .iter()
            .enumerate()
            .map(|(k, f)| {
                let mut rel = Map::new();
                for (q, rels) in &rep.descriptors {
                    let v = if f.weight > tol.weight {
                        let vals: Vec<f64> = Axis::ALL
                            .iter()
                            .map(|&ax| relative_expectation(s, rels[k].component(ax), f).map(|c| c.re))
                            .collect::<Result<_, _>>()?;
                        json!(vals)
                    } else {
                        Value::Null
                    };
                    rel.insert(format!("q{q}"), v);
                }
                Ok(json!({ "label": f.label(), "weight": f.weight, "relative_expectations": rel }))
            })
            .collect::<Result<_, relstate_core::Error>>()?;
        let out = json!({
            "record": record.to_string(),
            "time": time,
            "foliated": rep.foliated_qubits(),
            "frames": frames,
            "algebra_residual": rep.max_algebra_residual(),
            "completeness_residual": rep.completeness_residual,
            "sum_rule_residual": rep.sum_rule_residual(s),
            "valid": rep.valid,
        });
        if !rep.valid {
            return Err(Failure {
                error: CliError::Tolerance(format!(
                    "foliation residuals out of tolerance (algebra {:.3e}, completeness {:.3e})",
                    rep.max_algebra_residual(),
                    rep.completeness_residual
                )),
                partial: Some(out),
            });
        }
        Ok(out)
    }

    fn classical(
        &self,
        m: &[usize],
        s_reg: &[usize],
        ancillas: &[usize],
        from: usize,
        to: usize,
        f: &relstate_core::ClassicalFunction,
    ) -> Result<Value, Failure> {
        let before = &self.timeline[from];
        let after = &self.timeline[to];
        let bm = register_descriptor(before, m)?;
        let bs = register_descriptor(before, s_reg)?;
        let branches = classical_branches(before, &bm, &bs)?;
        let frames: Vec<_> = branches.iter().map(|b| b.frame.clone()).collect();
        let rep = verify_classical_step(before, after, m, ancillas, f, &frames)?;
        let segment = &self.circuit.gates[from..to];

        let mut agree = true;
        let rows: Vec<Value> = branches
            .iter()
            .zip(&rep.branches)
            .map(|(b, step)| {
                let oracle = bit_oracle(self.circuit.n, segment, m, s_reg, b.value, b.j);
                if let Some(o) = oracle {
                    agree &= o as f64 == step.after.round();
                }
                json!({
                    "j": b.j,
                    "weight": step.weight,
                    "before": step.before,
                    "after": step.after,
                    "expected": step.expected,
                    "classical_oracle": oracle,
                    "ok": step.ok,
                })
            })
            .collect();
        let out = json!({
            "m": m,
            "s": s_reg,
            "from": from,
            "to": to,
            "function": f.table(),
            "branches": rows,
            "interacting_qubits": rep.interacting_qubits,
            "ok": rep.ok() && agree,
        });
        if rep.ok() && agree {
            return Ok(out);
        }
        let message = if rep.interacting_qubits.is_empty() {
            "branch values do not follow the classical function".to_string()
        } else {
            format!("step touches qubits outside the register: {:?}", rep.interacting_qubits)
        };
        Err(Failure { error: relstate_core::Error::PreconditionFailed(message).into(), partial: Some(out) })
    }
}

/// Run the gate segment on classical bits with M holding `v` and S holding
/// `j`; `None` if the segment has a non-classical gate.
fn bit_oracle(n: usize, gates: &[Gate64], m: &[usize], s: &[usize], v: f64, j: f64) -> Option<usize> {
    let (v, j) = (v.round() as usize, j.round() as usize);
    let mut bits = vec![false; n];
    for (k, &q) in m.iter().enumerate() {
        bits[q - 1] = v >> k & 1 == 1;
    }
    for (k, &q) in s.iter().enumerate() {
        bits[q - 1] = j >> k & 1 == 1;
    }
    simulate_bits(gates, &mut bits).ok()?;
    Some(m.iter().enumerate().map(|(k, &q)| (bits[q - 1] as usize) << k).sum())
}

/// Evolve the circuit, cross-check against the oracle and answer every query.
pub fn run(circuit: &Circuit, tol: Tol) -> Result<RunReport, CliError> {
    let s0 = Network::with_tolerances(circuit.n, tol)?;
    let timeline = s0.evolve(&circuit.gates)?;
    let snapshots: Vec<_> = circuit
        .records
        .iter()
        .map(|&key| RecordSnapshot { key, matrix: timeline[key.time].component(key.qubit, key.axis).clone() })
        .collect();

    let algebra = timeline.iter().map(Network::algebra_residual).fold(0.0, f64::max);
    let run = oracle::evolve(circuit.n, &oracle::initial_state(circuit.n), &circuit.gates, &tol)?;
    let oracle_residual =
        cross_validate(&run, &timeline, &Observable::all_components(circuit.n))?.max_residual;
    let mut pvm = 0.0f64;
    for snap in &snapshots {
        let s = &timeline[snap.key.time];
        let frames = make_pvm(s, &snap.matrix, &snap.key.to_string())?;
        let sum = frames.iter().fold(CMatrix::zeros(s.dim()), |acc, f| &acc + &f.projector);
        pvm = pvm.max(sum.dist(&s.identity()));
    }
    let residuals = Residuals {
        algebra,
        oracle: oracle_residual,
        pvm_completeness: pvm,
        within_tolerance: algebra <= tol.general && oracle_residual <= tol.oracle && pvm <= tol.general,
    };

    let ctx = Context { circuit, timeline, snapshots };
    let queries = circuit
        .queries
        .iter()
        .enumerate()
        .map(|(index, (kind, q))| match ctx.answer(q) {
            Ok(v) => QueryOutcome { index, kind: kind.name(), status: "ok", result: Some(v), error: None },
            Err(Failure { error, partial }) => {
                let code = match &error {
                    CliError::Core(e) => core_exit_code(e),
                    other => other.exit_code(),
                };
                QueryOutcome {
                    index,
                    kind: kind.name(),
                    status: "error",
                    result: partial,
                    error: Some(ErrorInfo { class: class_name(code), exit_code: code, message: error.to_string() }),
                }
            }
        })
        .collect();

    let tolerances = tol.entries().iter().map(|&(k, v)| (k.to_string(), json!(v))).collect();
    Ok(RunReport {
        format_version: FORMAT_VERSION,
        tool: "relstate",
        version: env!("CARGO_PKG_VERSION"),
        qubits: circuit.n,
        steps: circuit.gates.len(),
        tolerances,
        residuals,
        queries,
    })
}
