//! Self-describing CSV reports.
//!
//! A report is a header row (every column name carries its unit in
//! brackets), numeric rows printed with 17 significant digits, and trailing
//! `#` comment lines holding the generator version, experiment kind, seed and
//! the complete resolved configuration. The footer alone reproduces the run.

use std::fmt::Write as _;
use std::path::Path;

use crate::config::ExperimentKind;

const CONFIG_MARKER: &str = "# --- config ---";

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    /// A real number, printed in `{:.16e}` form.
    Num(f64),
    /// A count.
    Count(u64),
    /// Free text.
    Text(String),
    /// No value.
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Count(v) => v.to_string(),
            Cell::Text(t) => t.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

/// A report ready to be written.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvReport {
    /// Experiment that produced the report.
    pub kind: ExperimentKind,
    /// Column names with units.
    pub columns: Vec<String>,
    /// Data rows, each as long as `columns`.
    pub rows: Vec<Vec<Cell>>,
    /// Seed of the run.
    pub seed: u64,
    /// Resolved configuration as TOML.
    pub config_toml: String,
}

impl CsvReport {
    /// An empty report with the given columns.
    pub fn new(kind: ExperimentKind, columns: Vec<String>, seed: u64, config_toml: String) -> Self {
        Self {
            kind,
            columns,
            rows: Vec::new(),
            seed,
            config_toml,
        }
    }

    /// Appends a row.
    ///
    /// # Panics
    /// If the row length differs from the column count.
    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width must match the header"
        );
        self.rows.push(row);
    }

    /// The full file contents.
    pub fn render(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)
            .expect("writing to memory cannot fail");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))
                .expect("writing to memory cannot fail");
        }
        let mut out = String::from_utf8(w.into_inner().expect("writing to memory cannot fail"))
            .expect("CSV is UTF-8");
        let _ = writeln!(
            out,
            "# generator = {} {}",
            env!("CARGO_PKG_NAME"),
            env!("CARGO_PKG_VERSION")
        );
        let _ = writeln!(out, "# kind = {}", self.kind.name());
        let _ = writeln!(out, "# seed = {}", self.seed);
        let _ = writeln!(out, "{CONFIG_MARKER}");
        for line in self.config_toml.lines() {
            if line.is_empty() {
                out.push_str("#\n");
            } else {
                let _ = writeln!(out, "# {line}");
            }
        }
        out
    }

    /// Writes the report to `path`.
    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.render())
    }
}

/// A report read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedReport {
    /// Header row.
    pub columns: Vec<String>,
    /// Data rows as text.
    pub rows: Vec<Vec<String>>,
    /// Experiment kind from the footer.
    pub kind: String,
    /// Seed from the footer.
    pub seed: u64,
    /// Configuration TOML from the footer.
    pub config_toml: String,
}

impl ParsedReport {
    /// Index of the column called `name`.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric values of column `index`, with empty cells as `None`.
    pub fn numbers(&self, index: usize) -> Result<Vec<Option<f64>>, String> {
        self.rows
            .iter()
            .map(|r| {
                let cell = r.get(index).map(String::as_str).unwrap_or("");
                if cell.is_empty() {
                    Ok(None)
                } else {
                    cell.parse()
                        .map(Some)
                        .map_err(|_| format!("`{cell}` in column {index} is not a number"))
                }
            })
            .collect()
    }
}

/// Parses report text.
pub fn parse_report(text: &str) -> Result<ParsedReport, String> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let columns: Vec<String> = reader
        .headers()
        .map_err(|e| e.to_string())?
        .iter()
        .map(str::to_string)
        .collect();
    let rows = reader
        .records()
        .map(|r| {
            r.map(|rec| rec.iter().map(str::to_string).collect())
                .map_err(|e| e.to_string())
        })
        .collect::<Result<Vec<Vec<String>>, String>>()?;
    let mut kind = None;
    let mut seed = None;
    let mut config = None::<String>;
    for line in text.lines().filter(|l| l.starts_with('#')) {
        if let Some(cfg) = config.as_mut() {
            cfg.push_str(line.strip_prefix("# ").unwrap_or(&line[1..]));
            cfg.push('\n');
        } else if line == CONFIG_MARKER {
            config = Some(String::new());
        } else if let Some(k) = line.strip_prefix("# kind = ") {
            kind = Some(k.to_string());
        } else if let Some(s) = line.strip_prefix("# seed = ") {
            seed = Some(
                s.parse()
                    .map_err(|_| format!("footer seed `{s}` is not an integer"))?,
            );
        }
    }
    Ok(ParsedReport {
        columns,
        rows,
        kind: kind.ok_or("report footer lacks `# kind = ...`")?,
        seed: seed.ok_or("report footer lacks `# seed = ...`")?,
        config_toml: config.ok_or("report footer lacks the configuration block")?,
    })
}

/// Reads and parses a report file.
pub fn read_report(path: &Path) -> Result<ParsedReport, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_report(&text).map_err(|e| format!("{}: {e}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut r = CsvReport::new(
            ExperimentKind::SweepTau,
            vec!["tau [1]".into(), "note [text]".into()],
            7,
            "a = 1\n\n[b]\nc = 2\n".into(),
        );
        r.push(vec![Cell::Num(0.1), Cell::Text("x, y".into())]);
        r.push(vec![Cell::Num(-2.5e-300), Cell::Empty]);
        let text = r.render();
        assert!(text.starts_with("tau [1],note [text]\n1.0000000000000001e-1,\"x, y\"\n"));
        let p = parse_report(&text).unwrap();
        assert_eq!(p.kind, "sweep_tau");
        assert_eq!(p.seed, 7);
        assert_eq!(p.config_toml, "a = 1\n\n[b]\nc = 2\n");
        assert_eq!(p.numbers(0).unwrap(), vec![Some(0.1), Some(-2.5e-300)]);
        assert_eq!(p.rows[1][1], "");
        assert_eq!(p.column("note [text]"), Some(1));
    }

    #[test]
    fn seventeen_digits_round_trip_exactly() {
        for v in [std::f64::consts::PI, 1.0 / 3.0, 0.1 + 0.2, 5e-324, f64::MAX] {
            let s = Cell::Num(v).render();
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
    }

    #[test]
    fn missing_footer_is_an_error() {
        assert!(parse_report("a\n1\n").is_err());
        assert!(parse_report("a\n1\n# kind = x\n# seed = q\n# --- config ---\n").is_err());
    }
}
