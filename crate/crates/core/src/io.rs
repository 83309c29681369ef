//! File formats shared with the command-line tool.
//!
//! Correlation tables are JSON objects:
//!
//! ```text
//! {
//!   "encoding": "mixed-radix-copy1-lsd",
//!   "n_copies": 2,
//!   "scheme": "broadcast",
//!   "arities": { "inputs": [2, 2], "outputs": [2, 2] },
//!   "probs": [[[[...]]]],
//!   "provenance": { "strategies": ["chsh", "chsh"], "construction": "tensor", "nu": null }
//! }
//! ```
//!
//! `probs` is nested `[x][y][a][b]` over joint indices. A joint index packs
//! per-copy symbols in mixed radix with copy 1 as the least significant
//! digit. Probabilities are written with 17 significant digits so they read
//! back bit for bit.
//!
//! Every read error is reported as [`Error::Format`] with a JSON pointer to
//! the offending value.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::bell::{BellExpression, BoundResult, CorrelationTable, SchemeKind, Witness};
use crate::certify::{CertificationReport, SweepRow};
use crate::error::{Error, Result};
use crate::numfmt;
use crate::tol;

pub const ENCODING: &str = "mixed-radix-copy1-lsd";

/// Where a table came from. Purely informational on read.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    #[serde(default)]
    pub strategies: Vec<String>,
    #[serde(default)]
    pub construction: String,
    #[serde(default)]
    pub nu: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Arities {
    inputs: Vec<usize>,
    outputs: Vec<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TableIn {
    encoding: String,
    n_copies: usize,
    scheme: String,
    arities: Arities,
    probs: Vec<Vec<Vec<Vec<f64>>>>,
    #[serde(default)]
    provenance: Provenance,
}

#[derive(Serialize)]
struct TableOut<'a> {
    encoding: &'static str,
    n_copies: usize,
    scheme: &'static str,
    arities: Arities,
    probs: Vec<Vec<Vec<Vec<Exact>>>>,
    provenance: &'a Provenance,
}

/// A float written with 17 significant digits.
struct Exact(f64);

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let raw =
            RawValue::from_string(format!("{:.16e}", self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

fn format_error(pointer: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Format {
        pointer: pointer.into(),
        message: message.into(),
    }
}

fn pointer_of(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => {
                out.push('/');
                out.push_str(&key.replace('~', "~0").replace('/', "~1"));
            }
            Segment::Enum { variant } => out.push_str(&format!("/{variant}")),
            Segment::Unknown => out.push_str("/?"),
        }
    }
    out
}

fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(de).map_err(|e| {
        let pointer = pointer_of(e.path());
        format_error(pointer, e.into_inner().to_string())
    })?;
    Ok(value)
}

/// Serializes a table with its provenance.
pub fn table_to_json(table: &CorrelationTable, provenance: &Provenance) -> String {
    let nx = table.num_inputs();
    let na = table.num_outputs();
    let probs = (0..nx)
        .map(|x| {
            (0..nx)
                .map(|y| {
                    (0..na)
                        .map(|a| (0..na).map(|b| Exact(table.get(x, y, a, b))).collect())
                        .collect()
                })
                .collect()
        })
        .collect();
    let out = TableOut {
        encoding: ENCODING,
        n_copies: table.n_copies(),
        scheme: table.scheme().as_str(),
        arities: Arities {
            inputs: table.input_arities().to_vec(),
            outputs: table.output_arities().to_vec(),
        },
        probs,
        provenance,
    };
    let mut text = serde_json::to_string_pretty(&out).expect("table serializes");
    text.push('\n');
    text
}

/// Parses and validates a table file.
pub fn table_from_json(text: &str) -> Result<(CorrelationTable, Provenance)> {
    let t: TableIn = parse(text)?;
    if t.encoding != ENCODING {
        return Err(format_error(
            "/encoding",
            format!(
                "unsupported encoding {:?}, expected {ENCODING:?}",
                t.encoding
            ),
        ));
    }
    let scheme: SchemeKind = t
        .scheme
        .parse()
        .map_err(|_| format_error("/scheme", format!("unknown scheme {:?}", t.scheme)))?;
    let (inputs, outputs) = (t.arities.inputs, t.arities.outputs);
    if t.n_copies == 0 || t.n_copies > tol::MAX_COPIES {
        return Err(format_error(
            "/n_copies",
            format!("{} copies, expected 1..={}", t.n_copies, tol::MAX_COPIES),
        ));
    }
    if inputs.len() != t.n_copies {
        return Err(format_error(
            "/arities/inputs",
            format!("expected {} entries", t.n_copies),
        ));
    }
    if outputs.len() != t.n_copies {
        return Err(format_error(
            "/arities/outputs",
            format!("expected {} entries", t.n_copies),
        ));
    }
    for (name, list) in [("inputs", &inputs), ("outputs", &outputs)] {
        if let Some(k) = list.iter().position(|&v| v == 0) {
            return Err(format_error(
                format!("/arities/{name}/{k}"),
                "arity must be >= 1",
            ));
        }
    }
    if scheme == SchemeKind::Broadcast {
        if let Some(k) = inputs.iter().position(|&v| v != inputs[0]) {
            return Err(format_error(
                format!("/arities/inputs/{k}"),
                "broadcast copies need equal input arities",
            ));
        }
    }
    let nx = match scheme {
        SchemeKind::Broadcast => inputs[0],
        SchemeKind::PerCopy => inputs.iter().product(),
    };
    let na: usize = outputs.iter().product();

    let shape = |pointer: String, got: usize, want: usize| {
        if got == want {
            Ok(())
        } else {
            Err(format_error(
                pointer,
                format!("{got} entries, expected {want}"),
            ))
        }
    };
    shape("/probs".into(), t.probs.len(), nx)?;
    let mut flat = Vec::with_capacity(nx * nx * na * na);
    for (x, px) in t.probs.iter().enumerate() {
        shape(format!("/probs/{x}"), px.len(), nx)?;
        for (y, pxy) in px.iter().enumerate() {
            shape(format!("/probs/{x}/{y}"), pxy.len(), na)?;
            let mut sum = 0.0;
            for (a, pa) in pxy.iter().enumerate() {
                shape(format!("/probs/{x}/{y}/{a}"), pa.len(), na)?;
                for (b, &p) in pa.iter().enumerate() {
                    if !(-tol::ENTRY..=1.0 + tol::ENTRY).contains(&p) {
                        return Err(format_error(
                            format!("/probs/{x}/{y}/{a}/{b}"),
                            format!("probability {p} outside [0, 1]"),
                        ));
                    }
                    sum += p;
                }
                flat.extend_from_slice(pa);
            }
            if (sum - 1.0).abs() > tol::STRUCTURAL {
                return Err(format_error(
                    format!("/probs/{x}/{y}"),
                    format!("probabilities sum to {sum}, expected 1"),
                ));
            }
        }
    }
    let table = CorrelationTable::new(scheme, inputs, outputs, flat)
        .map_err(|e| format_error("", e.to_string()))?;
    Ok((table, t.provenance))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExpressionFile {
    m: usize,
    o: usize,
    coeffs: Vec<Vec<Vec<Vec<f64>>>>,
    #[serde(default)]
    label: String,
}

/// Serializes an expression as `{m, o, coeffs[x][y][a][b], label}`.
pub fn expression_to_json(expr: &BellExpression) -> String {
    let (m, o) = (expr.m(), expr.o());
    let coeffs = (0..m)
        .map(|x| {
            (0..m)
                .map(|y| {
                    (0..o)
                        .map(|a| (0..o).map(|b| expr.coeff(x, y, a, b)).collect())
                        .collect()
                })
                .collect()
        })
        .collect();
    let file = ExpressionFile {
        m,
        o,
        coeffs,
        label: expr.label().to_string(),
    };
    let mut text = serde_json::to_string_pretty(&file).expect("expression serializes");
    text.push('\n');
    text
}

pub fn expression_from_json(text: &str) -> Result<BellExpression> {
    let f: ExpressionFile = parse(text)?;
    if f.m == 0 {
        return Err(format_error("/m", "must be >= 1"));
    }
    if f.o == 0 {
        return Err(format_error("/o", "must be >= 1"));
    }
    let shape = |pointer: String, got: usize, want: usize| {
        if got == want {
            Ok(())
        } else {
            Err(format_error(
                pointer,
                format!("{got} entries, expected {want}"),
            ))
        }
    };
    shape("/coeffs".into(), f.coeffs.len(), f.m)?;
    let mut flat = Vec::with_capacity(f.m * f.m * f.o * f.o);
    for (x, cx) in f.coeffs.iter().enumerate() {
        shape(format!("/coeffs/{x}"), cx.len(), f.m)?;
        for (y, cxy) in cx.iter().enumerate() {
            shape(format!("/coeffs/{x}/{y}"), cxy.len(), f.o)?;
            for (a, ca) in cxy.iter().enumerate() {
                shape(format!("/coeffs/{x}/{y}/{a}"), ca.len(), f.o)?;
                flat.extend_from_slice(ca);
            }
        }
    }
    BellExpression::new(f.m, f.o, flat, f.label).map_err(|e| format_error("/coeffs", e.to_string()))
}

#[derive(Serialize)]
struct ReportOut<'a> {
    verdict: &'static str,
    copies: Vec<CopyOut>,
    diagnostics: &'a [String],
}

#[derive(Serialize)]
struct CopyOut {
    i: usize,
    value: Option<f64>,
    target: f64,
    margin: Option<f64>,
}

/// Report JSON: `{verdict, copies: [{i, value, target, margin}], diagnostics}`.
pub fn report_to_json(report: &CertificationReport) -> String {
    let out = ReportOut {
        verdict: report.verdict.as_str(),
        copies: report
            .copies
            .iter()
            .map(|c| CopyOut {
                i: c.i,
                value: c.value,
                target: c.target,
                margin: c.margin,
            })
            .collect(),
        diagnostics: &report.diagnostics,
    };
    let mut text = serde_json::to_string_pretty(&out).expect("report serializes");
    text.push('\n');
    text
}

/// CSV with header `nu,J1,...,Jn` and 12 significant digits.
pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let n = rows.first().map_or(0, |r| r.j.len());
    let mut out = String::from("nu");
    for i in 1..=n {
        out.push_str(&format!(",J{i}"));
    }
    out.push('\n');
    for row in rows {
        out.push_str(&numfmt::sig(row.nu, 12));
        for j in &row.j {
            out.push(',');
            out.push_str(&numfmt::sig(*j, 12));
        }
        out.push('\n');
    }
    out
}

/// Witness as JSON: deterministic assignments or eigenvector amplitudes as
/// `[re, im]` pairs.
pub fn witness_to_json(bound: &BoundResult) -> serde_json::Value {
    match &bound.witness {
        Witness::Deterministic { alice, bob } => serde_json::json!({
            "kind": "deterministic",
            "value": bound.value,
            "alice": alice,
            "bob": bob,
        }),
        Witness::Eigenvector {
            amplitudes,
            residual,
        } => serde_json::json!({
            "kind": "eigenvector",
            "value": bound.value,
            "residual": residual,
            "amplitudes": amplitudes.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
        }),
    }
}
