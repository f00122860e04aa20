//! Rendering of command results as CSV or JSON text.

use serde::ser::{Serialize, SerializeMap, SerializeSeq, Serializer};
use serde_json::value::RawValue;

/// A JSON-like value whose floats always print with 17 significant digits.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Float(f64),
    Int(i64),
    Str(String),
    Bool(bool),
    Null,
    List(Vec<Value>),
    Object(Vec<(String, Value)>),
}

impl Value {
    pub fn str(s: impl Into<String>) -> Self {
        Value::Str(s.into())
    }

    pub fn opt_float(x: Option<f64>) -> Self {
        x.map_or(Value::Null, Value::Float)
    }

    pub fn object<K: Into<String>>(fields: impl IntoIterator<Item = (K, Value)>) -> Self {
        Value::Object(fields.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }

    fn is_scalar(&self) -> bool {
        !matches!(self, Value::List(_) | Value::Object(_))
    }

    fn csv_cell(&self) -> String {
        match self {
            Value::Float(x) => fmt_g17(*x),
            Value::Int(i) => i.to_string(),
            Value::Str(s) => csv_escape(s),
            Value::Bool(b) => b.to_string(),
            Value::Null => String::new(),
            Value::List(_) | Value::Object(_) => unreachable!("nested value in CSV cell"),
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Float(x)
    }
}

impl From<usize> for Value {
    fn from(n: usize) -> Self {
        Value::Int(n as i64)
    }
}

impl From<u64> for Value {
    fn from(n: u64) -> Self {
        Value::Int(n as i64)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        match self {
            // JSON has no representation for non-finite numbers
            Value::Float(x) if !x.is_finite() => ser.serialize_unit(),
            Value::Float(x) => {
                let raw = RawValue::from_string(fmt_g17(*x)).map_err(serde::ser::Error::custom)?;
                raw.serialize(ser)
            }
            Value::Int(i) => ser.serialize_i64(*i),
            Value::Str(s) => ser.serialize_str(s),
            Value::Bool(b) => ser.serialize_bool(*b),
            Value::Null => ser.serialize_unit(),
            Value::List(items) => {
                let mut seq = ser.serialize_seq(Some(items.len()))?;
                for v in items {
                    seq.serialize_element(v)?;
                }
                seq.end()
            }
            Value::Object(fields) => {
                let mut map = ser.serialize_map(Some(fields.len()))?;
                for (k, v) in fields {
                    map.serialize_entry(k, v)?;
                }
                map.end()
            }
        }
    }
}

/// `printf("%.17g")` formatting: shortest of fixed and exponent notation,
/// trailing zeros dropped.
pub fn fmt_g17(x: f64) -> String {
    const PRECISION: i32 = 17;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{:.*e}", (PRECISION - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..PRECISION).contains(&exp) {
        let decimals = (PRECISION - 1 - exp) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!(
            "{}e{}{:02}",
            trim_zeros(mantissa.to_string()),
            sign,
            exp.abs()
        )
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

/// The result of one command: either rows under a fixed header, or a single
/// record. `extra` fields appear only in JSON.
#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    Table(Table),
    Record(Vec<(String, Value)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub body: Body,
    pub extra: Vec<(String, Value)>,
    pub meta: Value,
}

impl Document {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let mut line = |cells: Vec<String>| {
            out.push_str(&cells.join(","));
            out.push('\n');
        };
        match &self.body {
            Body::Table(t) => {
                line(t.columns.iter().map(|c| c.to_string()).collect());
                for row in &t.rows {
                    line(row.iter().map(Value::csv_cell).collect());
                }
            }
            Body::Record(fields) => {
                let scalars: Vec<_> = fields.iter().filter(|(_, v)| v.is_scalar()).collect();
                line(scalars.iter().map(|(k, _)| csv_escape(k)).collect());
                line(scalars.iter().map(|(_, v)| v.csv_cell()).collect());
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut fields = match &self.body {
            Body::Table(t) => {
                let rows = t
                    .rows
                    .iter()
                    .map(|row| Value::object(t.columns.iter().copied().zip(row.iter().cloned())))
                    .collect();
                vec![("rows".to_string(), Value::List(rows))]
            }
            Body::Record(fields) => fields.clone(),
        };
        fields.extend(self.extra.iter().cloned());
        fields.push(("meta".into(), self.meta.clone()));
        let mut text =
            serde_json::to_string_pretty(&Value::Object(fields)).expect("values always serialize");
        text.push('\n');
        text
    }
}
