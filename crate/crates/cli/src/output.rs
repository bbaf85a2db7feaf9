//! CSV and JSON rendering. Every output is built in memory first so that the
//! bytes depend only on the resolved config.

use dqd_core::Trajectory;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::{Format, RunConfig};

/// 17 significant digits, round-trip exact for f64.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_cell(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

/// A rectangular numeric table. Missing cells are empty in CSV and `null` in
/// JSON.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
    /// Trailing `# key=value` lines in CSV, top-level keys in JSON.
    pub footer: Vec<(String, Value)>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
            footer: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Option<f64>>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&c| fmt_cell(c)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        for (key, value) in &self.footer {
            let text = match value {
                Value::Number(n) => n.as_f64().map(fmt_num).unwrap_or_else(|| n.to_string()),
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            out.push_str(&format!("# {key}={text}\n"));
        }
        out
    }

    pub fn to_json(&self, meta: &RunConfig) -> String {
        let mut doc = Map::new();
        doc.insert("meta".into(), to_value(meta));
        doc.insert("columns".into(), to_value(&self.columns));
        doc.insert("rows".into(), to_value(&self.rows));
        for (key, value) in &self.footer {
            doc.insert(key.clone(), value.clone());
        }
        let mut text = serde_json::to_string_pretty(&Value::Object(doc))
            .expect("JSON values always serialize");
        text.push('\n');
        text
    }

    pub fn render(&self, format: Format, meta: &RunConfig) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(meta),
        }
    }
}

fn to_value<T: Serialize + ?Sized>(v: &T) -> Value {
    serde_json::to_value(v).expect("plain data always serializes")
}

/// Non-finite floats have no JSON representation; they become `null`.
pub fn json_number(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

const STATE_COLUMNS: [&str; 5] = ["rho11", "rho22", "re_rho12", "im_rho12", "abs_rho12"];

fn state_cells(rho: &dqd_core::DensityMatrix) -> [Option<f64>; 5] {
    [
        Some(rho.rho11.re),
        Some(rho.rho22.re),
        Some(rho.rho12.re),
        Some(rho.rho12.im),
        Some(rho.rho12.norm()),
    ]
}

/// Trajectory table. With both engines present the numeric columns carry a
/// `num_` prefix and the largest elementwise difference goes in the footer.
pub fn trajectory_table(
    primary: &Trajectory,
    numeric_extra: Option<&Trajectory>,
    max_abs_diff: Option<f64>,
) -> Table {
    let mut columns = vec!["t".to_string()];
    columns.extend(STATE_COLUMNS.iter().map(|c| c.to_string()));
    if numeric_extra.is_some() {
        columns.extend(STATE_COLUMNS.iter().map(|c| format!("num_{c}")));
    }
    let mut table = Table::new(columns);
    for (k, (t, rho)) in primary.iter().enumerate() {
        let mut row = vec![Some(t)];
        row.extend(state_cells(rho));
        if let Some(num) = numeric_extra {
            row.extend(state_cells(&num.states()[k]));
        }
        table.push(row);
    }
    if let Some(d) = max_abs_diff {
        table.footer.push(("max_abs_diff".into(), json_number(d)));
    }
    table
}
