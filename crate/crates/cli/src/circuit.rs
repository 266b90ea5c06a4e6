//! Circuit files: TOML documents describing a network, its gates, record
//! snapshots and the queries to answer.
//!
//! ```toml
//! format_version = 1
//! qubits = 2
//!
//! [[gates]]
//! step = 0
//! kind = "H"
//! operands = [1]
//!
//! [[records]]
//! step = 1
//! qubit = 1
//! component = "z"
//!
//! [[queries]]
//! kind = "expectation"
//! observable = "q2z"
//! frame = { record = "q1z@1", value = 1 }
//! ```

use relstate_core::{
    check_f_coefficients, Axis, ClassicalFunction, Gate64, Observable, RecordKey, Tol, MAX_QUBITS,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitFile {
    pub format_version: u32,
    pub qubits: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub gates: Vec<GateSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub records: Vec<RecordSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub queries: Vec<QuerySpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateSpec {
    pub step: usize,
    pub kind: String,
    #[serde(default)]
    pub operands: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Rotation axis for `ROT` (normalised on load).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordSpec {
    pub step: usize,
    pub qubit: usize,
    pub component: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QueryKind {
    Expectation,
    Sharpness,
    Entanglement,
    Foliate,
    Autonomy,
    Classical,
}

impl QueryKind {
    pub fn name(self) -> &'static str {
        match self {
            QueryKind::Expectation => "expectation",
            QueryKind::Sharpness => "sharpness",
            QueryKind::Entanglement => "entanglement",
            QueryKind::Foliate => "foliate",
            QueryKind::Autonomy => "autonomy",
            QueryKind::Classical => "classical",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameSpec {
    pub record: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Frames {
    One(FrameSpec),
    Nested(Vec<FrameSpec>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionSpec {
    Named(String),
    Table(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuerySpec {
    pub kind: QueryKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observable: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubits: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ancillas: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<FunctionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<Frames>,
}

/// A record reference inside a query, resolved against the declared records.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameRef {
    pub record: RecordKey,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub enum Query {
    Expectation { observable: Observable<f64>, time: usize, frames: Vec<FrameRef> },
    Sharpness { observable: Observable<f64>, time: usize, frames: Vec<FrameRef> },
    Entanglement { a: usize, b: usize, time: usize },
    Foliate { record: RecordKey, qubits: Vec<usize>, time: usize },
    Autonomy { step: usize },
    Classical {
        m: Vec<usize>,
        s: Vec<usize>,
        ancillas: Vec<usize>,
        from: usize,
        to: usize,
        function: ClassicalFunction,
    },
}

/// A validated circuit.
#[derive(Debug, Clone)]
pub struct Circuit {
    pub n: usize,
    pub gates: Vec<Gate64>,
    pub records: Vec<RecordKey>,
    pub queries: Vec<(QueryKind, Query)>,
}

impl Circuit {
    /// Time after the last gate.
    pub fn final_time(&self) -> usize {
        self.gates.len()
    }
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Validation { field: field.into(), message: message.into() }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, col)
}

impl CircuitFile {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| {
            let location = match e.span() {
                Some(span) => {
                    let (line, col) = line_col(text, span.start);
                    format!("line {line}, column {col}")
                }
                None => "document".into(),
            };
            CliError::Parse { location, message: e.message().trim().to_string() }
        })
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Internal(e.to_string()))
    }

    pub fn validate(&self) -> Result<Circuit, CliError> {
        if self.format_version != FORMAT_VERSION {
            return Err(invalid(
                "format_version",
                format!("unsupported version {} (expected {FORMAT_VERSION})", self.format_version),
            ));
        }
        let n = self.qubits;
        if n == 0 || n > MAX_QUBITS {
            return Err(invalid("qubits", format!("must be between 1 and {MAX_QUBITS}, got {n}")));
        }

        let mut gates = Vec::with_capacity(self.gates.len());
        for (i, g) in self.gates.iter().enumerate() {
            if g.step != i {
                return Err(invalid(
                    format!("gates[{i}].step"),
                    format!("steps must be consecutive from 0; expected {i}, got {}", g.step),
                ));
            }
            let gate = g.to_gate(&format!("gates[{i}]"))?;
            gate.check_operands(n)
                .map_err(|e| invalid(format!("gates[{i}].operands"), e.to_string()))?;
            gates.push(gate);
        }

        let final_time = gates.len();
        let mut records = Vec::new();
        for (i, r) in self.records.iter().enumerate() {
            let field = format!("records[{i}]");
            if r.step > final_time {
                return Err(invalid(
                    format!("{field}.step"),
                    format!("step {} is after the last gate (final time {final_time})", r.step),
                ));
            }
            if r.qubit == 0 || r.qubit > n {
                return Err(invalid(format!("{field}.qubit"), format!("qubit {} outside 1..={n}", r.qubit)));
            }
            let axis = Axis::parse(&r.component)
                .ok_or_else(|| invalid(format!("{field}.component"), "expected x, y or z"))?;
            let key = RecordKey { qubit: r.qubit, axis, time: r.step };
            if records.contains(&key) {
                return Err(invalid(field, format!("duplicate record {key}")));
            }
            records.push(key);
        }

        let mut queries = Vec::with_capacity(self.queries.len());
        for (i, q) in self.queries.iter().enumerate() {
            queries.push((q.kind, q.to_query(&format!("queries[{i}]"), n, final_time, &records)?));
        }
        Ok(Circuit { n, gates, records, queries })
    }
}

impl GateSpec {
    fn need(&self, field: &str, name: &str, v: Option<f64>) -> Result<f64, CliError> {
        match v {
            Some(x) if x.is_finite() => Ok(x),
            Some(_) => Err(invalid(format!("{field}.{name}"), "must be finite")),
            None => Err(invalid(format!("{field}.{name}"), format!("{} requires {name}", self.kind))),
        }
    }

    fn arity(&self, field: &str, k: usize) -> Result<(), CliError> {
        if self.operands.len() != k {
            return Err(invalid(
                format!("{field}.operands"),
                format!("{} takes {k} operand(s), got {}", self.kind, self.operands.len()),
            ));
        }
        Ok(())
    }

    fn to_gate(&self, field: &str) -> Result<Gate64, CliError> {
        let o = &self.operands;
        let kind = self.kind.to_ascii_uppercase();
        let gate = match kind.as_str() {
            "I" => {
                self.arity(field, 0)?;
                Gate64::Identity
            }
            "NOT" => {
                self.arity(field, 1)?;
                Gate64::not(o[0])
            }
            "H" => {
                self.arity(field, 1)?;
                Gate64::h(o[0])
            }
            "CNOT" => {
                self.arity(field, 2)?;
                Gate64::cnot(o[0], o[1])
            }
            "CCNOT" => {
                self.arity(field, 3)?;
                Gate64::ccnot(o[0], o[1], o[2])
            }
            "RZ" => {
                self.arity(field, 1)?;
                Gate64::rz(o[0], self.need(field, "theta", self.theta)?)
            }
            "F" => {
                self.arity(field, 2)?;
                let c = [
                    self.need(field, "alpha", self.alpha)?,
                    self.need(field, "beta", self.beta)?,
                    self.need(field, "gamma", self.gamma)?,
                    self.need(field, "delta", self.delta)?,
                ];
                check_f_coefficients(c[0], c[1], c[2], c[3], Tol::default().unitary)
                    .map_err(|e| invalid(format!("{field}.alpha..delta"), e.to_string()))?;
                Gate64::F { m: o[0], s: o[1], alpha: c[0], beta: c[1], gamma: c[2], delta: c[3] }
            }
            "ROT" => {
                self.arity(field, 1)?;
                let axis = self.axis.ok_or_else(|| invalid(format!("{field}.axis"), "ROT requires axis"))?;
                let norm = axis.iter().map(|x| x * x).sum::<f64>().sqrt();
                if !(norm.is_finite() && norm > 0.0) {
                    return Err(invalid(format!("{field}.axis"), "axis must be a nonzero vector"));
                }
                Gate64::rotation(o[0], axis.map(|x| x / norm), self.need(field, "angle", self.angle)?)
            }
            other => {
                return Err(invalid(
                    format!("{field}.kind"),
                    format!("unknown gate `{other}` (I, NOT, H, CNOT, CCNOT, RZ, F, ROT)"),
                ))
            }
        };
        Ok(gate)
    }
}

/// Parse `q<k><axis>@<t>`.
pub fn parse_record_ref(text: &str) -> Option<RecordKey> {
    let (comp, time) = text.trim().split_once('@')?;
    let rest = comp.strip_prefix('q')?;
    let (idx, axis) = rest.split_at(rest.len().checked_sub(1)?);
    Some(RecordKey { qubit: idx.parse().ok()?, axis: Axis::parse(axis)?, time: time.parse().ok()? })
}

impl QuerySpec {
    fn time(&self, field: &str, final_time: usize) -> Result<usize, CliError> {
        let t = self.time.unwrap_or(final_time);
        if t > final_time {
            return Err(invalid(format!("{field}.time"), format!("time {t} is after the final time {final_time}")));
        }
        Ok(t)
    }

    fn observable(&self, field: &str, n: usize) -> Result<Observable<f64>, CliError> {
        let text = self
            .observable
            .as_deref()
            .ok_or_else(|| invalid(format!("{field}.observable"), "required"))?;
        let o = Observable::parse(text).map_err(|e| invalid(format!("{field}.observable"), e.to_string()))?;
        if o.max_qubit() > n {
            return Err(invalid(format!("{field}.observable"), format!("refers to qubit {} of {n}", o.max_qubit())));
        }
        Ok(o)
    }

    fn record_key(field: &str, text: &str, records: &[RecordKey]) -> Result<RecordKey, CliError> {
        let key = parse_record_ref(text)
            .ok_or_else(|| invalid(field, format!("`{text}` is not a record reference like q1z@2")))?;
        if !records.contains(&key) {
            return Err(invalid(field, format!("no record {key} is declared")));
        }
        Ok(key)
    }

    fn frames(&self, field: &str, records: &[RecordKey]) -> Result<Vec<FrameRef>, CliError> {
        let specs: Vec<&FrameSpec> = match &self.frame {
            None => Vec::new(),
            Some(Frames::One(f)) => vec![f],
            Some(Frames::Nested(v)) => v.iter().collect(),
        };
        specs
            .into_iter()
            .enumerate()
            .map(|(k, f)| {
                Ok(FrameRef {
                    record: Self::record_key(&format!("{field}.frame[{k}].record"), &f.record, records)?,
                    value: f.value,
                })
            })
            .collect()
    }

    fn list(&self, field: &str, name: &str, v: &Option<Vec<usize>>) -> Result<Vec<usize>, CliError> {
        v.clone().ok_or_else(|| invalid(format!("{field}.{name}"), "required"))
    }

    fn to_query(
        &self,
        field: &str,
        n: usize,
        final_time: usize,
        records: &[RecordKey],
    ) -> Result<Query, CliError> {
        Ok(match self.kind {
            QueryKind::Expectation => Query::Expectation {
                observable: self.observable(field, n)?,
                time: self.time(field, final_time)?,
                frames: self.frames(field, records)?,
            },
            QueryKind::Sharpness => Query::Sharpness {
                observable: self.observable(field, n)?,
                time: self.time(field, final_time)?,
                frames: self.frames(field, records)?,
            },
            QueryKind::Entanglement => {
                let q = self.list(field, "qubits", &self.qubits)?;
                if q.len() != 2 {
                    return Err(invalid(format!("{field}.qubits"), "needs exactly two qubits"));
                }
                Query::Entanglement { a: q[0], b: q[1], time: self.time(field, final_time)? }
            }
            QueryKind::Foliate => {
                let text = self.record.as_deref().ok_or_else(|| invalid(format!("{field}.record"), "required"))?;
                let record = Self::record_key(&format!("{field}.record"), text, records)?;
                let time = self.time.unwrap_or(record.time);
                if time > final_time {
                    return Err(invalid(format!("{field}.time"), format!("time {time} is after the final time")));
                }
                Query::Foliate { record, qubits: self.list(field, "qubits", &self.qubits)?, time }
            }
            QueryKind::Autonomy => {
                let step = self.step.ok_or_else(|| invalid(format!("{field}.step"), "required"))?;
                if step >= final_time {
                    return Err(invalid(format!("{field}.step"), format!("no gate at step {step}")));
                }
                Query::Autonomy { step }
            }
            QueryKind::Classical => {
                let m = self.list(field, "m", &self.m)?;
                let s = self.list(field, "s", &self.s)?;
                let from = self.from.ok_or_else(|| invalid(format!("{field}.from"), "required"))?;
                let to = self.to.unwrap_or(final_time);
                if from > to || to > final_time {
                    return Err(invalid(
                        format!("{field}.to"),
                        format!("need from <= to <= {final_time}, got {from}..{to}"),
                    ));
                }
                let bits = m.len();
                let function = match &self.function {
                    None => return Err(invalid(format!("{field}.function"), "required")),
                    Some(FunctionSpec::Table(t)) => ClassicalFunction::new(bits, t.clone()),
                    Some(FunctionSpec::Named(name)) => match name.as_str() {
                        "identity" => ClassicalFunction::identity(bits),
                        "not" => ClassicalFunction::not_all(bits),
                        "increment" => ClassicalFunction::increment(bits),
                        other => {
                            return Err(invalid(
                                format!("{field}.function"),
                                format!("unknown function `{other}` (identity, not, increment, or a table)"),
                            ))
                        }
                    },
                }
                .map_err(|e| invalid(format!("{field}.function"), e.to_string()))?;
                Query::Classical {
                    m,
                    s,
                    ancillas: self.ancillas.clone().unwrap_or_default(),
                    from,
                    to,
                    function,
                }
            }
        })
    }
}

/// Parse and validate in one go.
pub fn parse_circuit(text: &str) -> Result<Circuit, CliError> {
    CircuitFile::from_toml(text)?.validate()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_refs() {
        assert_eq!(parse_record_ref("q1z@2"), Some(RecordKey { qubit: 1, axis: Axis::Z, time: 2 }));
        assert_eq!(parse_record_ref("q10x@0").unwrap().qubit, 10);
        for bad in ["q1z", "1z@2", "q1w@2", "qz@1", "q1z@-1"] {
            assert!(parse_record_ref(bad).is_none(), "{bad}");
        }
    }

    #[test]
    fn parse_error_location() {
        let err = CircuitFile::from_toml("format_version = 1\nqubits = \"two\"\n").unwrap_err();
        match err {
            CliError::Parse { location, .. } => assert!(location.starts_with("line 2"), "{location}"),
            other => panic!("{other:?}"),
        }
    }
}
