//! Numeric CSV tables with a trailing `#` metadata block.

use crate::config::RunConfig;
use crate::error::CliError;

/// Program name and version written into every output.
pub const TOOL: &str = concat!("ghost-opa ", env!("CARGO_PKG_VERSION"));

const CONFIG_PREFIX: &str = "config: ";

#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    /// `(name, unit)`; an empty unit is written as `[1]`.
    pub columns: Vec<(String, String)>,
    pub rows: Vec<Vec<f64>>,
    pub meta: Vec<(String, String)>,
}

impl CsvTable {
    pub fn new(columns: &[(&str, &str)]) -> Self {
        Self {
            columns: columns
                .iter()
                .map(|&(n, u)| (n.to_string(), u.to_string()))
                .collect(),
            rows: Vec::new(),
            meta: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width must match the header"
        );
        self.rows.push(row);
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.to_string(), value.to_string()));
    }

    /// Column by name.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|(n, _)| n == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Header, rows, then the metadata block: table metadata followed by the
    /// configuration echo.
    pub fn render(&self, command: &str, cfg: &RunConfig) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let header = self.columns.iter().map(|(n, u)| {
            let unit = if u.is_empty() { "1" } else { u };
            format!("{n}[{unit}]")
        });
        w.write_record(header).expect("writing to memory");
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format!("{v:e}")))
                .expect("writing to memory");
        }
        let mut out =
            String::from_utf8(w.into_inner().expect("flushing to memory")).expect("ASCII output");

        let mut push = |k: &str, v: &str| {
            out.push_str("# ");
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(v);
            out.push('\n');
        };
        push("tool", TOOL);
        push("command", command);
        push("config_sha256", &cfg.hash());
        push("seed", &cfg.seed.to_string());
        for (k, v) in &self.meta {
            push(k, v);
        }
        for line in cfg.echo().lines() {
            out.push_str("# ");
            out.push_str(CONFIG_PREFIX);
            out.push_str(line);
            out.push('\n');
        }
        out
    }

    /// Parses a rendered table back into columns, rows and metadata.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let bad = |m: String| CliError::Usage(format!("malformed table: {m}"));
        let mut r = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let columns = r
            .headers()
            .map_err(|e| bad(e.to_string()))?
            .iter()
            .map(|h| {
                let (name, rest) = h
                    .split_once('[')
                    .ok_or_else(|| bad(format!("header '{h}' lacks a unit")))?;
                let unit = rest
                    .strip_suffix(']')
                    .ok_or_else(|| bad(format!("header '{h}'")))?;
                Ok((
                    name.to_string(),
                    if unit == "1" {
                        String::new()
                    } else {
                        unit.to_string()
                    },
                ))
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            rows.push(
                rec.iter()
                    .map(|v| v.parse::<f64>().map_err(|_| bad(format!("value '{v}'"))))
                    .collect::<Result<Vec<_>, _>>()?,
            );
        }
        let meta = text
            .lines()
            .filter_map(|l| l.strip_prefix("# "))
            .filter(|l| !l.starts_with(CONFIG_PREFIX))
            .filter_map(|l| l.split_once(" = "))
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        Ok(Self {
            columns,
            rows,
            meta,
        })
    }
}

/// Rebuilds the configuration echoed into a rendered table.
pub fn config_from_table(text: &str) -> Result<RunConfig, CliError> {
    let echo: String = text
        .lines()
        .filter_map(|l| {
            l.strip_prefix("# ")
                .and_then(|l| l.strip_prefix(CONFIG_PREFIX))
        })
        .map(|l| format!("{l}\n"))
        .collect();
    if echo.is_empty() {
        return Err(CliError::Usage(
            "table carries no configuration block".into(),
        ));
    }
    RunConfig::from_text(&echo)
}
