//! Columnar results and their CSV / JSON encodings.

use std::io::Write;

use serde_json::{json, Map, Value};

use crate::config::Format;

/// `%.12g`: twelve significant digits, trailing zeros dropped.
pub fn fmt_g12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.11e}", x);
    let (mant, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mant.to_string()), sign, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    t.to_string()
}

/// The value as it appears in CSV, read back.
fn rounded(x: f64) -> Value {
    if x.is_finite() {
        json!(fmt_g12(x).parse::<f64>().expect("formatted float parses"))
    } else {
        Value::Null
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Everything one command produces.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub command: &'static str,
    pub config_echo: String,
    pub table: Table,
    /// Named scalars for the summary line.
    pub summary: Vec<(&'static str, f64)>,
    /// Free-form lines printed after the payload (validate uses this).
    pub notes: Vec<String>,
}

impl RunReport {
    pub fn summary_line(&self) -> String {
        let mut s = String::from(self.command);
        for (k, v) in &self.summary {
            s.push(' ');
            s.push_str(k);
            s.push('=');
            s.push_str(&fmt_g12(*v));
        }
        s
    }

    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(&self.table.columns)?;
        for row in &self.table.rows {
            w.write_record(row.iter().map(|x| fmt_g12(*x)))?;
        }
        w.flush()
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .table
            .rows
            .iter()
            .map(|r| {
                let m: Map<String, Value> =
                    self.table.columns.iter().zip(r).map(|(c, x)| (c.to_string(), rounded(*x))).collect();
                Value::Object(m)
            })
            .collect();
        let summary: Map<String, Value> = self.summary.iter().map(|(k, v)| (k.to_string(), rounded(*v))).collect();
        json!({
            "command": self.command,
            "config": self.config_echo,
            "columns": self.table.columns,
            "rows": rows,
            "summary": summary,
            "notes": self.notes,
        })
    }

    pub fn write<W: Write>(&self, format: Format, mut out: W) -> std::io::Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => {
                serde_json::to_writer_pretty(&mut out, &self.to_json())?;
                out.write_all(b"\n")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_g12(std::f64::consts::PI), "3.14159265359");
        assert_eq!(fmt_g12(-std::f64::consts::PI), "-3.14159265359");
        assert_eq!(fmt_g12(1.0), "1");
        assert_eq!(fmt_g12(0.8), "0.8");
        assert_eq!(fmt_g12(1234.5), "1234.5");
        assert_eq!(fmt_g12(1e-7), "1e-07");
        assert_eq!(fmt_g12(2.5e-12), "2.5e-12");
        assert_eq!(fmt_g12(1e15), "1e+15");
        assert_eq!(fmt_g12(0.0001), "0.0001");
        assert_eq!(fmt_g12(999999999999.9), "1e+12");
        assert_eq!(fmt_g12(0.0), "0");
    }

    #[test]
    fn csv_uses_lf_and_header() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![1.0, 0.5]);
        let r = RunReport { command: "x", config_echo: String::new(), table: t, summary: vec![], notes: vec![] };
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b\n1,0.5\n");
    }
}
