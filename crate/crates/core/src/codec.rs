//! JSON encoding of matrices, measures, interval sets and expression trees.
//!
//! Decoding is strict: unknown keys are rejected and every error carries the
//! path of the offending field (e.g. `model.inner.T.entries[3]`).

use serde_json::{json, Map, Value};

use crate::measure::{AcPiece, Atom};
use crate::nevanlinna::{Branch, Node};
use crate::{
    Complex64, ComplexMatrix, HermitianMatrix, Interval, IntervalSet, NevanlinnaFunction, OperatorMeasure, SLModel,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{path}: {message}")]
pub struct CodecError {
    pub path: String,
    pub message: String,
}

pub type CodecResult<T> = std::result::Result<T, CodecError>;

pub fn err<T>(path: &str, message: impl Into<String>) -> CodecResult<T> {
    Err(CodecError {
        path: path.to_string(),
        message: message.into(),
    })
}

pub fn child(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

pub fn index(path: &str, k: usize) -> String {
    format!("{path}[{k}]")
}

/// The object at `path`, with every key checked against `allowed`.
pub fn object<'a>(v: &'a Value, path: &str, allowed: &[&str]) -> CodecResult<&'a Map<String, Value>> {
    let Some(map) = v.as_object() else {
        return err(path, "expected an object");
    };
    if let Some(k) = map.keys().find(|k| !allowed.contains(&k.as_str())) {
        return err(
            &child(path, k),
            format!("unknown key (allowed: {})", allowed.join(", ")),
        );
    }
    Ok(map)
}

pub fn required<'a>(map: &'a Map<String, Value>, key: &str, path: &str) -> CodecResult<&'a Value> {
    match map.get(key) {
        Some(v) => Ok(v),
        None => err(&child(path, key), "missing required field"),
    }
}

pub fn number(v: &Value, path: &str) -> CodecResult<f64> {
    match v.as_f64() {
        Some(x) if x.is_finite() => Ok(x),
        _ => err(path, "expected a finite number"),
    }
}

/// A number, or one of the strings `"inf"` / `"-inf"`.
pub fn extended_number(v: &Value, path: &str) -> CodecResult<f64> {
    match v.as_str() {
        Some("inf") | Some("+inf") => Ok(f64::INFINITY),
        Some("-inf") => Ok(f64::NEG_INFINITY),
        Some(_) => err(path, "expected a number, \"inf\" or \"-inf\""),
        None => number(v, path),
    }
}

pub fn unsigned(v: &Value, path: &str) -> CodecResult<usize> {
    match v.as_u64() {
        Some(n) => Ok(n as usize),
        None => err(path, "expected a non-negative integer"),
    }
}

pub fn boolean(v: &Value, path: &str) -> CodecResult<bool> {
    match v.as_bool() {
        Some(b) => Ok(b),
        None => err(path, "expected true or false"),
    }
}

pub fn string<'a>(v: &'a Value, path: &str) -> CodecResult<&'a str> {
    match v.as_str() {
        Some(s) => Ok(s),
        None => err(path, "expected a string"),
    }
}

pub fn array<'a>(v: &'a Value, path: &str) -> CodecResult<&'a Vec<Value>> {
    match v.as_array() {
        Some(a) => Ok(a),
        None => err(path, "expected an array"),
    }
}

fn entry(v: &Value, path: &str) -> CodecResult<Complex64> {
    if let Some(pair) = v.as_array() {
        if pair.len() != 2 {
            return err(path, "complex entry must be [re, im]");
        }
        return Ok(Complex64::new(
            number(&pair[0], &index(path, 0))?,
            number(&pair[1], &index(path, 1))?,
        ));
    }
    Ok(Complex64::new(number(v, path)?, 0.0))
}

/// `{"dim": n, "entries": [...]}` or `{"rows": r, "cols": c, "entries": [...]}`,
/// entries row-major as `[re, im]` pairs or plain real numbers.
pub fn matrix_from_json(v: &Value, path: &str) -> CodecResult<ComplexMatrix> {
    let map = object(v, path, &["dim", "rows", "cols", "entries"])?;
    let (rows, cols) = match (map.get("dim"), map.get("rows"), map.get("cols")) {
        (Some(d), None, None) => {
            let n = unsigned(d, &child(path, "dim"))?;
            (n, n)
        }
        (None, Some(r), Some(c)) => (unsigned(r, &child(path, "rows"))?, unsigned(c, &child(path, "cols"))?),
        _ => return err(path, "give either \"dim\" or both \"rows\" and \"cols\""),
    };
    let epath = child(path, "entries");
    let entries = array(required(map, "entries", path)?, &epath)?;
    if entries.len() != rows * cols {
        return err(
            &epath,
            format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            ),
        );
    }
    let data = entries
        .iter()
        .enumerate()
        .map(|(k, e)| entry(e, &index(&epath, k)))
        .collect::<CodecResult<Vec<_>>>()?;
    ComplexMatrix::new(rows, cols, data).or_else(|e| err(path, e.to_string()))
}

fn entries_json(m: &ComplexMatrix) -> Value {
    Value::Array(m.entries().iter().map(|z| json!([z.re, z.im])).collect())
}

pub fn matrix_to_json(m: &ComplexMatrix) -> Value {
    if m.is_square() {
        json!({"dim": m.rows(), "entries": entries_json(m)})
    } else {
        json!({"rows": m.rows(), "cols": m.cols(), "entries": entries_json(m)})
    }
}

pub fn hermitian_from_json(v: &Value, path: &str) -> CodecResult<HermitianMatrix> {
    let m = matrix_from_json(v, path)?;
    HermitianMatrix::new(m).or_else(|e| err(path, e.to_string()))
}

pub fn hermitian_to_json(h: &HermitianMatrix) -> Value {
    matrix_to_json(h.as_matrix())
}

/// `{"dim": n, "atoms": [{"t", "weight"}], "ac": [{"a", "b", "density"}]}`.
pub fn measure_from_json(v: &Value, path: &str) -> CodecResult<OperatorMeasure> {
    let map = object(v, path, &["dim", "atoms", "ac"])?;
    let dim = unsigned(required(map, "dim", path)?, &child(path, "dim"))?;
    let mut atoms = Vec::new();
    if let Some(a) = map.get("atoms") {
        let apath = child(path, "atoms");
        for (k, item) in array(a, &apath)?.iter().enumerate() {
            let p = index(&apath, k);
            let m = object(item, &p, &["t", "weight"])?;
            atoms.push(Atom {
                t: number(required(m, "t", &p)?, &child(&p, "t"))?,
                weight: hermitian_from_json(required(m, "weight", &p)?, &child(&p, "weight"))?,
            });
        }
    }
    let mut ac = Vec::new();
    if let Some(a) = map.get("ac") {
        let apath = child(path, "ac");
        for (k, item) in array(a, &apath)?.iter().enumerate() {
            let p = index(&apath, k);
            let m = object(item, &p, &["a", "b", "density"])?;
            ac.push(AcPiece {
                a: number(required(m, "a", &p)?, &child(&p, "a"))?,
                b: number(required(m, "b", &p)?, &child(&p, "b"))?,
                density: hermitian_from_json(required(m, "density", &p)?, &child(&p, "density"))?,
            });
        }
    }
    OperatorMeasure::new(dim, atoms, ac).or_else(|e| err(path, e.to_string()))
}

pub fn measure_to_json(m: &OperatorMeasure) -> Value {
    json!({
        "dim": m.dim(),
        "atoms": m.atoms().iter().map(|a| json!({"t": a.t, "weight": hermitian_to_json(&a.weight)})).collect::<Vec<_>>(),
        "ac": m.ac_pieces().iter().map(|p| json!({"a": p.a, "b": p.b, "density": hermitian_to_json(&p.density)})).collect::<Vec<_>>(),
    })
}

/// `{"intervals": [{"a", "b", "cl", "cr"}]}`; closure flags default to true.
pub fn interval_set_from_json(v: &Value, path: &str) -> CodecResult<IntervalSet> {
    let map = object(v, path, &["intervals"])?;
    let ipath = child(path, "intervals");
    let mut parts = Vec::new();
    for (k, item) in array(required(map, "intervals", path)?, &ipath)?.iter().enumerate() {
        let p = index(&ipath, k);
        let m = object(item, &p, &["a", "b", "cl", "cr"])?;
        let a = extended_number(required(m, "a", &p)?, &child(&p, "a"))?;
        let b = extended_number(required(m, "b", &p)?, &child(&p, "b"))?;
        if a > b || a == f64::INFINITY || b == f64::NEG_INFINITY {
            return err(&p, "interval needs a <= b");
        }
        let flag = |key: &str| m.get(key).map_or(Ok(true), |x| boolean(x, &child(&p, key)));
        let (cl, cr) = (flag("cl")? && a.is_finite(), flag("cr")? && b.is_finite());
        if a == b && !(cl && cr) {
            return err(&p, "a degenerate interval must be closed on both sides");
        }
        parts.push(Interval::new(a, b, cl, cr));
    }
    Ok(IntervalSet::new(parts))
}

fn bound_json(x: f64) -> Value {
    if x == f64::INFINITY {
        json!("inf")
    } else if x == f64::NEG_INFINITY {
        json!("-inf")
    } else {
        json!(x)
    }
}

pub fn interval_set_to_json(s: &IntervalSet) -> Value {
    json!({
        "intervals": s.intervals().iter().map(|i| json!({
            "a": bound_json(i.a),
            "b": bound_json(i.b),
            "cl": i.closed_left,
            "cr": i.closed_right,
        })).collect::<Vec<_>>()
    })
}

/// Extension selected by an `"sl"` node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlExtension {
    Friedrichs,
    Krein,
    Neumann,
    Regularized,
}

impl SlExtension {
    pub fn parse(s: &str, path: &str) -> CodecResult<Self> {
        match s {
            "friedrichs" => Ok(SlExtension::Friedrichs),
            "krein" => Ok(SlExtension::Krein),
            "neumann" => Ok(SlExtension::Neumann),
            "regularized" => Ok(SlExtension::Regularized),
            _ => err(path, "extension must be one of friedrichs, krein, neumann, regularized"),
        }
    }

    pub fn function(self, m: &SLModel) -> NevanlinnaFunction {
        match self {
            SlExtension::Friedrichs => m.weyl(),
            SlExtension::Krein => m.krein_weyl(),
            SlExtension::Neumann => m.neumann_weyl(),
            SlExtension::Regularized => m.regularized_weyl(),
        }
    }
}

/// Decodes an `"sl"` node into the model and its selected extension.
pub fn sl_from_json(v: &Value, path: &str) -> CodecResult<(SLModel, SlExtension)> {
    let map = object(v, path, &["node", "T", "extension"])?;
    let t = hermitian_from_json(required(map, "T", path)?, &child(path, "T"))?;
    let ext = match map.get("extension") {
        Some(e) => SlExtension::parse(string(e, &child(path, "extension"))?, &child(path, "extension"))?,
        None => SlExtension::Friedrichs,
    };
    let model = SLModel::new(t).or_else(|e| err(&child(path, "T"), e.to_string()))?;
    Ok((model, ext))
}

pub fn node_kind<'a>(v: &'a Value, path: &str) -> CodecResult<&'a str> {
    let Some(map) = v.as_object() else {
        return err(path, "expected an object");
    };
    string(required(map, "node", path)?, &child(path, "node"))
}

pub fn function_from_json(v: &Value, path: &str) -> CodecResult<NevanlinnaFunction> {
    let kind = node_kind(v, path)?;
    let wrap = |r: crate::Result<NevanlinnaFunction>| r.or_else(|e| err(path, e.to_string()));
    let t_node = |allowed: &[&str]| -> CodecResult<HermitianMatrix> {
        let map = object(v, path, allowed)?;
        hermitian_from_json(required(map, "T", path)?, &child(path, "T"))
    };
    let inner = |map: &Map<String, Value>| function_from_json(required(map, "inner", path)?, &child(path, "inner"));
    match kind {
        "sqrt" => {
            let map = object(v, path, &["node", "T", "branch"])?;
            let t = hermitian_from_json(required(map, "T", path)?, &child(path, "T"))?;
            let branch = match map.get("branch") {
                None => Branch::Principal,
                Some(b) => match string(b, &child(path, "branch"))? {
                    "principal" => Branch::Principal,
                    "flipped" => Branch::Flipped,
                    _ => return err(&child(path, "branch"), "branch must be principal or flipped"),
                },
            };
            wrap(NevanlinnaFunction::sqrt_with_branch(t, branch))
        }
        "reg_sqrt" => wrap(NevanlinnaFunction::regularized_sqrt(t_node(&["node", "T"])?)),
        "krein_sl" => wrap(NevanlinnaFunction::krein_sl(t_node(&["node", "T"])?)),
        "neumann_sl" => wrap(NevanlinnaFunction::neumann_sl(t_node(&["node", "T"])?)),
        "sl" => {
            let (m, ext) = sl_from_json(v, path)?;
            Ok(ext.function(&m))
        }
        "krein" => {
            let map = object(v, path, &["node", "B", "inner"])?;
            let b = hermitian_from_json(required(map, "B", path)?, &child(path, "B"))?;
            wrap(NevanlinnaFunction::krein(b, inner(map)?))
        }
        "conj" => {
            let map = object(v, path, &["node", "R", "R0", "inner"])?;
            let r = matrix_from_json(required(map, "R", path)?, &child(path, "R"))?;
            let r0 = hermitian_from_json(required(map, "R0", path)?, &child(path, "R0"))?;
            wrap(NevanlinnaFunction::conjugation(r, r0, inner(map)?))
        }
        "sandwich" => {
            let map = object(v, path, &["node", "D", "inner"])?;
            let d = matrix_from_json(required(map, "D", path)?, &child(path, "D"))?;
            wrap(NevanlinnaFunction::sandwich(d, inner(map)?))
        }
        "sum" => {
            let map = object(v, path, &["node", "terms"])?;
            let tpath = child(path, "terms");
            let terms = array(required(map, "terms", path)?, &tpath)?
                .iter()
                .enumerate()
                .map(|(k, t)| function_from_json(t, &index(&tpath, k)))
                .collect::<CodecResult<Vec<_>>>()?;
            wrap(NevanlinnaFunction::direct_sum(terms))
        }
        "integral" => {
            let map = object(v, path, &["node", "C0", "C1", "measure"])?;
            let measure = measure_from_json(required(map, "measure", path)?, &child(path, "measure"))?;
            let n = measure.dim();
            let opt = |key: &str| match map.get(key) {
                Some(x) => hermitian_from_json(x, &child(path, key)),
                None => Ok(HermitianMatrix::zeros(n)),
            };
            wrap(NevanlinnaFunction::integral(opt("C0")?, opt("C1")?, measure))
        }
        other => err(
            &child(path, "node"),
            format!("unknown node \"{other}\" (expected sqrt, reg_sqrt, krein_sl, neumann_sl, sl, krein, conj, sandwich, sum, integral)"),
        ),
    }
}

pub fn function_to_json(f: &NevanlinnaFunction) -> Value {
    match f.node() {
        Node::Integral { c0, c1, measure } => json!({
            "node": "integral",
            "C0": hermitian_to_json(c0),
            "C1": hermitian_to_json(c1),
            "measure": measure_to_json(measure),
        }),
        Node::Sqrt { params, branch } => match branch {
            Branch::Principal => json!({"node": "sqrt", "T": hermitian_to_json(params.t())}),
            Branch::Flipped => json!({"node": "sqrt", "T": hermitian_to_json(params.t()), "branch": "flipped"}),
        },
        Node::RegularizedSqrt(p) => json!({"node": "reg_sqrt", "T": hermitian_to_json(p.t())}),
        Node::KreinSl(p) => json!({"node": "krein_sl", "T": hermitian_to_json(p.t())}),
        Node::NeumannSl(p) => json!({"node": "neumann_sl", "T": hermitian_to_json(p.t())}),
        Node::Krein { b, inner } => {
            json!({"node": "krein", "B": hermitian_to_json(b), "inner": function_to_json(inner)})
        }
        Node::Conjugation { r, r0, inner } => json!({
            "node": "conj",
            "R": matrix_to_json(r),
            "R0": hermitian_to_json(r0),
            "inner": function_to_json(inner),
        }),
        Node::Sandwich { d, inner } => {
            json!({"node": "sandwich", "D": matrix_to_json(d), "inner": function_to_json(inner)})
        }
        Node::DirectSum(terms) => {
            json!({"node": "sum", "terms": terms.iter().map(function_to_json).collect::<Vec<_>>()})
        }
    }
}
