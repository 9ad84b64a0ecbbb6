//! Tabular reports rendered as aligned text, CSV, or JSON lines.

use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

/// A report: free-form summary lines (text format only) and a table. Text
/// output leaves out the header of an empty table under a summary.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub summary: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            summary: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text(),
            Format::Csv => self.csv(),
            Format::Json => self.json_lines(),
        }
    }

    fn text(&self) -> String {
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(text_cell).collect())
            .collect();
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|k| {
                cells
                    .iter()
                    .map(|r| r[k].len())
                    .chain([self.columns[k].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |fields: &[String]| {
            let padded: Vec<String> = fields
                .iter()
                .zip(&widths)
                .map(|(f, w)| format!("{f:<w$}"))
                .collect();
            padded.join("  ").trim_end().to_string() + "\n"
        };
        let mut out: String = self.summary.iter().map(|s| format!("{s}\n")).collect();
        if cells.is_empty() && !out.is_empty() {
            return out;
        }
        out.push_str(&line(&self.columns));
        for r in &cells {
            out.push_str(&line(r));
        }
        out
    }

    fn csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r.iter().map(csv_cell)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8")
    }

    fn json_lines(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            let obj: Map<String, Value> = self.columns.iter().cloned().zip(r.iter().cloned()).collect();
            out.push_str(&Value::Object(obj).to_string());
            out.push('\n');
        }
        out
    }
}

/// Compact number for aligned text.
pub fn short_float(x: f64) -> String {
    if x == 0.0 || (1e-3..1e9).contains(&x.abs()) {
        let s = format!("{x:.6}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    } else {
        format!("{x:.4e}")
    }
}

fn text_cell(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::String(s) => s.clone(),
        Value::Number(n) if n.is_f64() => short_float(n.as_f64().unwrap_or(f64::NAN)),
        other => other.to_string(),
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// A float cell; non-finite values become null.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn sample() -> Table {
        let mut t = Table::new(&["metric", "rank", "residual"]);
        t.summary.push("two rows".into());
        t.push(vec![json!("total_blocks"), json!(6), num(1.5e-14)]);
        t.push(vec![json!("regs"), Value::Null, num(0.25)]);
        t
    }

    #[test]
    fn formats() {
        let t = sample();
        assert_eq!(
            t.render(Format::Text),
            "two rows\nmetric        rank  residual\ntotal_blocks  6     1.5000e-14\nregs          -     0.25\n"
        );
        assert_eq!(t.render(Format::Csv), "metric,rank,residual\ntotal_blocks,6,1.5e-14\nregs,,0.25\n");
        assert_eq!(
            t.render(Format::Json),
            "{\"metric\":\"total_blocks\",\"rank\":6,\"residual\":1.5e-14}\n{\"metric\":\"regs\",\"rank\":null,\"residual\":0.25}\n"
        );
    }
}
