//! Versioned CSV tables.
//!
//! Layout: `# multiflow-csv v1 <kind>`, then `# key=value` header comments,
//! the column row, data rows, and `# key=value` footer comments. Floats use
//! the shortest round-trip `{:e}` form, so identical inputs give identical
//! bytes.

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub kind: String,
    pub header: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub footer: Vec<(String, String)>,
}

impl Table {
    pub fn new(kind: &str, columns: &[&str]) -> Self {
        Self {
            kind: kind.into(),
            header: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            footer: Vec::new(),
        }
    }

    pub fn header(&mut self, key: &str, value: impl Into<String>) {
        self.header.push((key.into(), value.into()));
    }

    pub fn footer(&mut self, key: &str, value: impl Into<String>) {
        self.footer.push((key.into(), value.into()));
    }

    pub fn row(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> Result<String, CliError> {
        let mut out = format!("# multiflow-csv v{SCHEMA_VERSION} {}\n", self.kind);
        for (k, v) in &self.header {
            out.push_str(&format!("# {k}={v}\n"));
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let fail = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(&self.columns).map_err(fail)?;
        for r in &self.rows {
            w.write_record(r).map_err(fail)?;
        }
        let body = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        out.push_str(&String::from_utf8(body).expect("csv output is utf-8"));
        for (k, v) in &self.footer {
            out.push_str(&format!("# {k}={v}\n"));
        }
        Ok(out)
    }
}

/// Reads back a table produced by [`Table::render`].
pub fn parse(text: &str) -> Result<Table, CliError> {
    let bad = |m: &str| CliError::Io(format!("malformed multiflow csv: {m}"));
    let mut lines = text.lines();
    let first = lines.next().ok_or_else(|| bad("empty"))?;
    let kind = first
        .strip_prefix(&format!("# multiflow-csv v{SCHEMA_VERSION} "))
        .ok_or_else(|| bad("missing schema line"))?;
    let mut t = Table::new(kind, &[]);
    let mut seen_columns = false;
    for line in lines {
        if let Some(c) = line.strip_prefix("# ") {
            let (k, v) = c.split_once('=').ok_or_else(|| bad(line))?;
            let pair = (k.to_string(), v.to_string());
            if seen_columns { t.footer.push(pair) } else { t.header.push(pair) }
        } else {
            let cells: Vec<String> = line.split(',').map(str::to_string).collect();
            if seen_columns {
                if cells.len() != t.columns.len() {
                    return Err(bad(line));
                }
                t.rows.push(cells);
            } else {
                t.columns = cells;
                seen_columns = true;
            }
        }
    }
    Ok(t)
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        self.rows.iter().map(|r| r[i].parse().ok()).collect()
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.header.iter().chain(&self.footer).find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_and_parse() {
        let mut t = Table::new("demo", &["sigma", "ds"]);
        t.header("model", "q");
        t.row(vec![num(1e-6), num(2.0)]);
        t.row(vec![num(0.5), num(f64::INFINITY)]);
        t.footer("fit", num(1.25));
        let text = t.render().unwrap();
        assert_eq!(
            text,
            "# multiflow-csv v1 demo\n# model=q\nsigma,ds\n1e-6,2e0\n5e-1,inf\n# fit=1.25e0\n"
        );
        let back = parse(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.column("sigma").unwrap(), vec![1e-6, 0.5]);
        assert_eq!(back.meta("fit"), Some("1.25e0"));
    }

    #[test]
    fn formatting_round_trips() {
        for x in [0.1 + 0.2, -3.75e-300, 1.0 / 3.0, 6.02214076e23] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }
}
