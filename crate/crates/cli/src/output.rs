//! Report envelopes and their JSON / CSV renderings.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, Format};
use crate::fail::{CliError, CliResult};

/// Result of one command. `rows` are the CSV view; `records`, when present,
/// turn the JSON view into JSONL with the envelope on the first line.
#[derive(Debug, Default)]
pub struct Output {
    pub result: Value,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub records: Option<Vec<Value>>,
    /// Written out, then reported with exit status 3.
    pub violation: Option<String>,
}

impl Output {
    pub fn new(result: Value, columns: &[&'static str]) -> Self {
        Output {
            result,
            columns: columns.to_vec(),
            ..Default::default()
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }
}

pub fn envelope(cfg: &ExperimentConfig, result: &Value) -> Value {
    json!({
        "tool": "qrgraph",
        "version": qrgraph::VERSION,
        "config": cfg,
        "result": result,
    })
}

fn to_line<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("report serialises")
}

pub fn render_json(cfg: &ExperimentConfig, out: &Output) -> String {
    let env = envelope(cfg, &out.result);
    match &out.records {
        Some(records) => {
            let mut s = to_line(&env) + "\n";
            for r in records {
                s.push_str(&to_line(r));
                s.push('\n');
            }
            s
        }
        None => to_line(&env) + "\n",
    }
}

pub fn render_csv(out: &Output) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&out.columns).map_err(csv_err)?;
    for row in &out.rows {
        w.write_record(row).map_err(csv_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Invariant(format!("csv buffer: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Invariant(format!("csv: {e}"))
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text)
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

/// `path` with `suffix` appended to the full file name.
pub fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// JSON goes to `-o` or stdout. CSV goes to `-o` or stdout, and the JSON
/// envelope (without rows) to `<o>.json`, or to stderr without `-o`.
pub fn emit(cfg: &ExperimentConfig, out: &Output, target: Option<&Path>) -> CliResult<()> {
    match cfg.format {
        Format::Json => {
            let text = render_json(cfg, out);
            match target {
                Some(p) => write_text(p, &text),
                None => print_stdout(&text),
            }
        }
        Format::Csv => {
            let text = render_csv(out)?;
            let summary = to_line(&envelope(cfg, &out.result)) + "\n";
            match target {
                Some(p) => {
                    write_text(p, &text)?;
                    write_text(&sidecar(p, ".json"), &summary)
                }
                None => {
                    print_stdout(&text)?;
                    eprint!("{summary}");
                    Ok(())
                }
            }
        }
    }
}

pub fn print_stdout(text: &str) -> CliResult<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| CliError::Usage(format!("stdout: {e}")))
}

pub fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Shortest round-trip rendering, so CSV cells match the JSON numbers.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x}")
    } else {
        String::new()
    }
}
