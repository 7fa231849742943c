//! Tabular output in CSV or JSON.

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use chandisc::PureStateVector;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
    Json(Value),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) if x.is_nan() => "nan".into(),
            Cell::Num(x) if x.is_infinite() => if *x > 0.0 { "inf" } else { "-inf" }.into(),
            Cell::Num(x) => format!("{x:.11e}"),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Json(v) => Cell::Text(v.to_string()).csv(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_nan() => json!("nan"),
            Cell::Num(x) if x.is_infinite() => json!(if *x > 0.0 { "inf" } else { "-inf" }),
            Cell::Num(x) => json!(x),
            Cell::Int(n) => json!(n),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
            Cell::Json(v) => v.clone(),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: Vec<&'static str>) -> Self {
        Self { name: name.into(), columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// CSV tables are separated by a blank line; JSON is one object keyed by table name.
pub fn render(tables: &[Table], format: Format) -> String {
    match format {
        Format::Csv => tables
            .iter()
            .map(|t| {
                let mut out = t.columns.join(",");
                out.push('\n');
                for row in &t.rows {
                    out.push_str(&row.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
                    out.push('\n');
                }
                out
            })
            .collect::<Vec<_>>()
            .join("\n"),
        Format::Json => {
            let mut root = Map::new();
            for t in tables {
                let rows: Vec<Value> = t
                    .rows
                    .iter()
                    .map(|row| {
                        let obj: Map<String, Value> =
                            t.columns.iter().zip(row).map(|(c, v)| (c.to_string(), v.json())).collect();
                        Value::Object(obj)
                    })
                    .collect();
                root.insert(t.name.clone(), Value::Array(rows));
            }
            let mut s = serde_json::to_string_pretty(&Value::Object(root)).expect("json values serialise");
            s.push('\n');
            s
        }
    }
}

/// First 16 hex digits of the SHA-256 of the amplitudes (`re`, `im` as little-endian f64).
pub fn witness_hash(psi: &PureStateVector) -> String {
    let mut h = Sha256::new();
    for z in psi.amplitudes().iter() {
        h.update(z.re.to_le_bytes());
        h.update(z.im.to_le_bytes());
    }
    hex::encode(&h.finalize()[..8])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_cells() {
        assert_eq!(Cell::Num(2.0).csv(), "2.00000000000e0");
        assert_eq!(Cell::Num(f64::INFINITY).csv(), "inf");
        assert_eq!(Cell::Text("a,b".into()).csv(), "\"a,b\"");
    }

    #[test]
    fn json_round_trip_and_infinity() {
        let mut t = Table::new("t", vec!["x", "y"]);
        t.push(vec![Cell::Num(0.1), Cell::Num(f64::INFINITY)]);
        let v: Value = serde_json::from_str(&render(&[t], Format::Json)).unwrap();
        assert_eq!(v["t"][0]["x"], json!(0.1));
        assert_eq!(v["t"][0]["y"], json!("inf"));
    }

    #[test]
    fn hash_is_stable() {
        let psi = PureStateVector::maximally_entangled(2);
        assert_eq!(witness_hash(&psi), witness_hash(&psi.clone()));
        assert_eq!(witness_hash(&psi).len(), 16);
    }
}
