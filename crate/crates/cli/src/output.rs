//! CSV and JSON rendering.
//!
//! CSV: `#`-prefixed `key: value` metadata lines, a header row, then data
//! rows, `\n` terminated. Floats use 17 significant digits.
//! JSON: one object `{"meta": {...}, "data": ...}`.

use serde_json::{Map, Value};

/// Formats like C's `%.17g`: 17 significant digits, trailing zeros trimmed.
pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..17).contains(&exp) {
        return format!("{}e{}", trim_fraction(mantissa), exp);
    }
    let decimals = (16 - exp) as usize;
    trim_fraction(&format!("{x:.decimals$}")).to_string()
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => fmt_g17(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => Value::from(*x),
            Cell::Int(n) => Value::from(*n),
            Cell::Text(s) => Value::from(s.as_str()),
        }
    }
}

/// Ordered metadata entries shared by both formats.
#[derive(Debug, Clone, Default)]
pub struct Meta {
    entries: Vec<(String, Cell)>,
}

impl Meta {
    pub fn new(command: &str, seed: u64) -> Self {
        let mut meta = Self::default();
        meta.push("tool", Cell::Text(env!("CARGO_PKG_NAME").into()));
        meta.push("version", Cell::Text(env!("CARGO_PKG_VERSION").into()));
        meta.push("command", Cell::Text(command.into()));
        meta.push("seed", Cell::Int(seed));
        meta
    }

    pub fn push(&mut self, key: &str, value: Cell) {
        self.entries.push((key.into(), value));
    }

    fn json(&self) -> Value {
        let mut map = Map::new();
        for (k, v) in &self.entries {
            map.insert(k.clone(), v.json());
        }
        Value::Object(map)
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

pub fn render_csv(meta: &Meta, table: &Table) -> String {
    let mut out = String::new();
    for (k, v) in &meta.entries {
        out.push_str(&format!("# {k}: {}\n", v.csv()));
    }
    out.push_str(&table.columns.join(","));
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(Cell::csv).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn render_table_json(meta: &Meta, table: &Table) -> String {
    let data: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let mut obj = Map::new();
            for (col, cell) in table.columns.iter().zip(row) {
                obj.insert((*col).into(), cell.json());
            }
            Value::Object(obj)
        })
        .collect();
    render_json(meta, Value::Array(data))
}

pub fn render_json(meta: &Meta, data: Value) -> String {
    let mut root = Map::new();
    root.insert("meta".into(), meta.json());
    root.insert("data".into(), data);
    let mut s = serde_json::to_string_pretty(&Value::Object(root)).expect("serializable");
    s.push('\n');
    s
}
