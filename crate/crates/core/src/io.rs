//! JSON interchange formats.
//!
//! Qubits are numbered from 1 in every file format and from 0 in the library.
//! Floats are written with 17 significant digits so that `f64` values survive
//! a write/read cycle bit for bit.

use std::io;

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

use crate::certifier::{CertificationReport, CertifierConfig, Obstruction};
use crate::error::{LmeError, Result};
use crate::phasecompiler::{PhaseCircuit, PhaseGate, PhaseTable};
use crate::qcore::{LocalUnitarySet, StateVector};
use crate::scalar::Mat2;

/// Inputs whose squared norm is within this of 1 are renormalized on load.
pub const INPUT_NORM_TOL: f64 = 1e-6;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    n: usize,
    amplitudes: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableFile {
    n: usize,
    alpha: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GateFile {
    qubits: Vec<usize>,
    phase: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitFile {
    n: usize,
    gates: Vec<GateFile>,
}

fn parse<'a, D: Deserialize<'a>>(text: &'a str, what: &str) -> Result<D> {
    serde_json::from_str(text).map_err(|e| LmeError::Parse(format!("{what}: {e}")))
}

pub fn state_to_json(state: &StateVector<f64>) -> Value {
    let file = StateFile { n: state.n(), amplitudes: state.amplitudes().iter().map(|a| [a.re, a.im]).collect() };
    serde_json::to_value(file).expect("plain data")
}

fn state_from_file(file: StateFile) -> Result<StateVector<f64>> {
    if file.n == 0 {
        return Err(LmeError::NoQubits);
    }
    let expected = 1usize.checked_shl(file.n as u32).filter(|_| file.n < 31).ok_or(LmeError::SizeLimit { qubits: file.n, limit: 30 })?;
    if file.amplitudes.len() != expected {
        return Err(LmeError::Parse(format!(
            "field `amplitudes` has {} entries, expected 2^{} = {expected}",
            file.amplitudes.len(),
            file.n
        )));
    }
    if file.amplitudes.iter().flatten().any(|v| !v.is_finite()) {
        return Err(LmeError::Parse("field `amplitudes` contains a non-finite value".into()));
    }
    let amps: Vec<Complex<f64>> = file.amplitudes.iter().map(|[re, im]| Complex::new(*re, *im)).collect();
    let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if (norm_sqr - 1.0).abs() > INPUT_NORM_TOL {
        return Err(LmeError::NotNormalized { norm_sqr });
    }
    StateVector::normalized(file.n, amps)
}

pub fn state_from_str(text: &str) -> Result<StateVector<f64>> {
    state_from_file(parse(text, "state file")?)
}

pub fn table_to_json(table: &PhaseTable<f64>) -> Value {
    serde_json::to_value(TableFile { n: table.n(), alpha: table.alpha().to_vec() }).expect("plain data")
}

fn table_from_file(file: TableFile) -> Result<PhaseTable<f64>> {
    if file.alpha.iter().any(|v| !v.is_finite()) {
        return Err(LmeError::Parse("field `alpha` contains a non-finite value".into()));
    }
    PhaseTable::from_phases(file.n, file.alpha)
}

pub fn table_from_str(text: &str) -> Result<PhaseTable<f64>> {
    table_from_file(parse(text, "phase table file")?)
}

pub fn circuit_to_json(circuit: &PhaseCircuit<f64>) -> Value {
    let gates = circuit
        .gates()
        .iter()
        .map(|g| GateFile { qubits: g.qubits.iter().map(|q| q + 1).collect(), phase: g.phase })
        .collect();
    serde_json::to_value(CircuitFile { n: circuit.n(), gates }).expect("plain data")
}

pub fn circuit_from_str(text: &str) -> Result<PhaseCircuit<f64>> {
    let file: CircuitFile = parse(text, "circuit file")?;
    let gates = file
        .gates
        .into_iter()
        .map(|g| {
            let qubits = g
                .qubits
                .iter()
                .map(|&q| q.checked_sub(1).ok_or_else(|| LmeError::MalformedCircuit("qubit labels start at 1".into())))
                .collect::<Result<Vec<_>>>()?;
            Ok(PhaseGate { qubits, phase: g.phase })
        })
        .collect::<Result<Vec<_>>>()?;
    PhaseCircuit::new(file.n, gates)
}

/// Contents of a file holding either a state or a phase table.
#[derive(Clone, Debug)]
pub enum StateOrTable {
    State(StateVector<f64>),
    Table(PhaseTable<f64>),
}

/// Accepts a state file (`amplitudes`) or a table file (`alpha`).
pub fn state_or_table_from_str(text: &str) -> Result<StateOrTable> {
    let value: Value = parse(text, "input file")?;
    let obj = value.as_object().ok_or_else(|| LmeError::Parse("input file: expected a JSON object".into()))?;
    match (obj.contains_key("amplitudes"), obj.contains_key("alpha")) {
        (true, false) => Ok(StateOrTable::State(state_from_str(text)?)),
        (false, true) => Ok(StateOrTable::Table(table_from_str(text)?)),
        (true, true) => Err(LmeError::Parse("input file has both `amplitudes` and `alpha`".into())),
        (false, false) => Err(LmeError::Parse("input file needs a field `amplitudes` or `alpha`".into())),
    }
}

/// Row-major `[[re, im] × 4]`.
pub fn mat2_to_json(m: &Mat2<f64>) -> Value {
    let entries: Vec<[f64; 2]> = [(0, 0), (0, 1), (1, 0), (1, 1)].iter().map(|&ij| [m[ij].re, m[ij].im]).collect();
    serde_json::to_value(entries).expect("plain data")
}

pub fn locals_to_json(locals: Option<&LocalUnitarySet<f64>>) -> Value {
    match locals {
        Some(l) => Value::Array(l.mats().iter().map(mat2_to_json).collect()),
        None => Value::Null,
    }
}

fn obstruction_to_json(o: &Obstruction<f64>) -> Value {
    let fits: Vec<Value> = o
        .fits
        .iter()
        .map(|f| {
            serde_json::json!({
                "pair": [f.sites.0 + 1, f.sites.1 + 1],
                "a": f.a, "b": f.b, "c": f.c, "d": f.d,
            })
        })
        .collect();
    serde_json::json!({
        "triple": [o.triple.0 + 1, o.triple.1 + 1, o.triple.2 + 1],
        "fits": fits,
        "inconsistency": o.inconsistency,
    })
}

pub fn certification_to_json(report: &CertificationReport<f64>, cfg: &CertifierConfig<f64>) -> Value {
    serde_json::json!({
        "verdict": report.verdict.as_str(),
        "method": report.method.as_str(),
        "flatness_residual": report.flatness_residual,
        "orthogonality_residual": report.orthogonality_residual,
        "witness_locals": locals_to_json(report.witness.as_ref()),
        "flattener_locals": locals_to_json(report.flattener.as_ref()),
        "restarts_used": report.restarts_used,
        "torus_phases": report.torus_phases,
        "obstruction": report.obstruction.as_ref().map(obstruction_to_json),
        "config": {
            "cert_tol": cfg.cert_tol,
            "verify_tol": cfg.verify_tol,
            "restarts": cfg.restarts,
            "max_iters": cfg.max_iters,
            "seed": cfg.seed,
            "torus_grid": cfg.torus_grid,
            "obstruction_tol": cfg.obstruction_tol,
            "angle_tol": cfg.angle_tol,
        },
    })
}

/// Pretty printing with floats in `{:.16e}` form; non-finite floats become `null`.
struct PreciseFormatter<'a>(PrettyFormatter<'a>);

impl Formatter for PreciseFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }
    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes with [`PreciseFormatter`], newline-terminated.
pub fn to_json_string<S: Serialize + ?Sized>(value: &S) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, PreciseFormatter(PrettyFormatter::with_indent(b"  ")));
    value.serialize(&mut ser).expect("serializing to memory");
    out.push(b'\n');
    String::from_utf8(out).expect("JSON is UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::random_state;

    #[test]
    fn state_round_trip_is_exact() {
        let s = random_state::<f64>(3, 4);
        let text = to_json_string(&state_to_json(&s));
        let back = state_from_str(&text).unwrap();
        assert_eq!(back.amplitudes(), s.amplitudes());
    }

    #[test]
    fn floats_use_seventeen_digits() {
        let text = to_json_string(&serde_json::json!({"x": 0.1, "y": f64::NAN, "k": 3}));
        assert!(text.contains("1.0000000000000001e-1") || text.contains("1.0000000000000000e-1"), "{text}");
        assert!(text.contains("\"y\": null"));
        assert!(text.contains("\"k\": 3"));
    }

    #[test]
    fn malformed_inputs_name_the_field() {
        let e = state_from_str(r#"{"n": 1}"#).unwrap_err().to_string();
        assert!(e.contains("amplitudes"), "{e}");
        let e = state_from_str(r#"{"n": 2, "amplitudes": [[1, 0]]}"#).unwrap_err().to_string();
        assert!(e.contains("amplitudes"), "{e}");
        let e = state_from_str(r#"{"n": 1, "amplitudes": [[1, 0], [0, 0]], "extra": 1}"#).unwrap_err().to_string();
        assert!(e.contains("extra"), "{e}");
        assert!(matches!(state_from_str(r#"{"n": 1, "amplitudes": [[1, 0], [1, 0]]}"#), Err(LmeError::NotNormalized { .. })));
    }

    #[test]
    fn near_normalized_input_is_renormalized() {
        let s = state_from_str(r#"{"n": 1, "amplitudes": [[0.7071068, 0], [0.7071068, 0]]}"#).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn circuit_labels_are_one_based() {
        let c = circuit_from_str(r#"{"n": 3, "gates": [{"qubits": [1, 3], "phase": 1.5}]}"#).unwrap();
        assert_eq!(c.gates()[0].qubits, vec![0, 2]);
        let v = circuit_to_json(&c);
        assert_eq!(v["gates"][0]["qubits"], serde_json::json!([1, 3]));
        assert!(circuit_from_str(r#"{"n": 3, "gates": [{"qubits": [0], "phase": 1.5}]}"#).is_err());
    }

    #[test]
    fn detects_input_kind() {
        assert!(matches!(state_or_table_from_str(r#"{"n": 1, "alpha": [0, 1]}"#), Ok(StateOrTable::Table(_))));
        assert!(matches!(
            state_or_table_from_str(r#"{"n": 1, "amplitudes": [[1, 0], [0, 0]]}"#),
            Ok(StateOrTable::State(_))
        ));
        assert!(state_or_table_from_str(r#"{"n": 1}"#).is_err());
    }
}
