//! Report assembly and rendering. JSON objects are key-sorted and floats use
//! the shortest round-trip decimal form, so identical inputs give identical
//! bytes.

use serde_json::{Map, Number, Value};
use weylkit::{Complex64, ComplexMatrix};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "json" => Some(Format::Json),
            "csv" => Some(Format::Csv),
            _ => None,
        }
    }
}

/// Plot-ready table: header row, data rows and trailing `# key,value` lines.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub footer: Vec<(String, String)>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            ..Table::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub task: String,
    pub config: Value,
    /// Task payload, flattened into the top level of the JSON report.
    pub result: Map<String, Value>,
    pub warnings: Vec<String>,
    pub table: Table,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut top = self.result.clone();
        top.insert("task".into(), Value::String(self.task.clone()));
        top.insert("config".into(), self.config.clone());
        top.insert(
            "warnings".into(),
            self.warnings.iter().cloned().map(Value::String).collect(),
        );
        top.insert("version".into(), Value::String(VERSION.into()));
        let mut s = String::new();
        write_pretty(&Value::Object(top), 0, &mut s);
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.table.header.join(","));
        out.push('\n');
        for row in &self.table.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        for (k, v) in &self.table.footer {
            out.push_str(&format!("# {k},{v}\n"));
        }
        for w in &self.warnings {
            out.push_str(&format!("# warning,{}\n", csv_field(w)));
        }
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }

    /// True when the payload carries `"passed": false`.
    pub fn failed(&self) -> bool {
        self.result.get("passed") == Some(&Value::Bool(false))
    }
}

/// Scalars, small objects of scalars and arrays of those.
fn is_compact(v: &Value) -> bool {
    match v {
        Value::Array(xs) => xs.iter().all(is_compact),
        Value::Object(m) => m.len() <= 4 && m.values().all(|x| !x.is_array() && !x.is_object()),
        _ => true,
    }
}

/// Objects one key per line; compact values stay on one line.
fn write_pretty(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize| "  ".repeat(n);
    if is_compact(v) {
        out.push_str(&v.to_string());
        return;
    }
    match v {
        Value::Object(map) => {
            out.push_str("{\n");
            for (k, (key, x)) in map.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write_pretty(x, indent + 1, out);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        Value::Array(xs) => {
            out.push_str("[\n");
            for (k, x) in xs.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_pretty(x, indent + 1, out);
                out.push_str(if k + 1 < xs.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        _ => out.push_str(&v.to_string()),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Shortest round-trip decimal; non-finite values become strings.
pub fn num(x: f64) -> Value {
    match Number::from_f64(x) {
        Some(n) => Value::Number(n),
        None if x.is_nan() => Value::String("nan".into()),
        None if x > 0.0 => Value::String("inf".into()),
        None => Value::String("-inf".into()),
    }
}

pub fn fmt(x: f64) -> String {
    match num(x) {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s,
        _ => unreachable!(),
    }
}

pub fn nums(xs: &[f64]) -> Value {
    xs.iter().copied().map(num).collect()
}

pub fn complex(z: Complex64) -> Value {
    Value::Array(vec![num(z.re), num(z.im)])
}

pub fn matrix(m: &ComplexMatrix) -> Value {
    let mut map = Map::new();
    map.insert("rows".into(), m.rows().into());
    map.insert("cols".into(), m.cols().into());
    map.insert("entries".into(), m.entries().iter().copied().map(complex).collect());
    Value::Object(map)
}

/// Row-major entries as interleaved `re, im` cells.
pub fn matrix_cells(m: &ComplexMatrix) -> Vec<String> {
    m.entries().iter().flat_map(|z| [fmt(z.re), fmt(z.im)]).collect()
}

/// `m_i_j_re, m_i_j_im` column names for an `n x n` matrix.
pub fn matrix_columns(prefix: &str, n: usize) -> Vec<String> {
    let mut cols = Vec::with_capacity(2 * n * n);
    for i in 0..n {
        for j in 0..n {
            cols.push(format!("{prefix}_{i}_{j}_re"));
            cols.push(format!("{prefix}_{i}_{j}_im"));
        }
    }
    cols
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_is_shortest_round_trip() {
        assert_eq!(fmt(0.1), "0.1");
        assert_eq!(fmt(1.0), "1.0");
        assert_eq!(fmt(1e-20), "1e-20");
        assert_eq!(fmt(f64::INFINITY), "inf");
        let x = 0.1 + 0.2;
        assert_eq!(fmt(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn json_keys_are_sorted() {
        let mut result = Map::new();
        result.insert("zeta".into(), 1.into());
        result.insert("alpha".into(), 2.into());
        let r = Report {
            task: "eval".into(),
            config: Value::Null,
            result,
            warnings: vec![],
            table: Table::default(),
        };
        let s = r.to_json();
        let keys: Vec<usize> = ["alpha", "config", "task", "version", "warnings", "zeta"]
            .iter()
            .map(|k| s.find(&format!("\"{k}\"")).unwrap())
            .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn flat_arrays_stay_on_one_line() {
        let mut s = String::new();
        write_pretty(
            &serde_json::json!({"a": [[1.0, 0.0], [2.0, 0.5]], "b": [{"c": 1}], "d": {"e": [1]}}),
            0,
            &mut s,
        );
        assert_eq!(
            s,
            "{\n  \"a\": [[1.0,0.0],[2.0,0.5]],\n  \"b\": [{\"c\":1}],\n  \"d\": {\n    \"e\": [1]\n  }\n}"
        );
        let parsed: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(parsed["a"][1][1], 0.5);
    }

    #[test]
    fn csv_quotes_fields_with_commas() {
        let r = Report {
            task: "spectrum".into(),
            config: Value::Null,
            result: Map::new(),
            warnings: vec!["a, b".into()],
            table: Table::new(&["t", "d"]),
        };
        assert_eq!(r.to_csv(), "t,d\n# warning,\"a, b\"\n");
    }
}
