//! Report structures and output plumbing.
//!
//! Every report embeds the tool version and the resolved configuration, so
//! result files are self-describing. `--json` selects machine output;
//! otherwise a short human summary is printed.

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;
use std::fs;
use std::io::Write;
use std::path::Path;

pub const TOOL: &str = "treealign";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Serialize)]
pub struct EvalReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: Value,
    pub corpus: f64,
    pub sentence_mean: f64,
    pub sentences: Vec<EvalSentence>,
}

#[derive(Debug, Serialize)]
pub struct EvalSentence {
    pub id: String,
    pub score: f64,
    pub weight: f64,
    pub n1: usize,
    pub n2: usize,
}

#[derive(Debug, Serialize)]
pub struct ParsevalReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: Value,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub matched: u64,
    pub pred: u64,
    pub gold: u64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub sentences: Vec<PrfSentence>,
}

#[derive(Debug, Serialize)]
pub struct PrfSentence {
    pub id: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub matched: u64,
    pub pred: u64,
    pub gold: u64,
}

#[derive(Debug, Serialize)]
pub struct BoundaryReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: Value,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub matched: u64,
    pub hyp: u64,
    #[serde(rename = "ref")]
    pub reference: u64,
    pub sentences: Vec<PrfSentence>,
}

#[derive(Debug, Serialize)]
pub struct MiouReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: Value,
    pub miou: f64,
    pub sentences: Vec<MiouSentence>,
}

#[derive(Debug, Serialize)]
pub struct MiouSentence {
    pub id: String,
    pub miou: f64,
}

#[derive(Debug, Serialize)]
pub struct ValidateReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: Value,
    pub records: usize,
    pub invalid: usize,
    pub violations: Vec<ValidateFinding>,
}

#[derive(Debug, Serialize)]
pub struct ValidateFinding {
    pub id: String,
    pub line: usize,
    pub message: String,
}

/// Per-sentence alignment export.
#[derive(Debug, Serialize)]
pub struct AlignmentRecord {
    pub id: String,
    pub score: f64,
    pub n1: usize,
    pub n2: usize,
    pub pairs: Vec<AlignmentPairRecord>,
}

#[derive(Debug, Serialize)]
pub struct AlignmentPairRecord {
    pub t1_path: Vec<usize>,
    pub t2_path: Vec<usize>,
    pub iou: f64,
}

/// Writes `content` to `out` or stdout.
pub fn emit(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, content).with_context(|| format!("cannot write {}", path.display()))
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(content.as_bytes())?;
            Ok(())
        }
    }
}

pub fn emit_json<T: Serialize>(out: Option<&Path>, report: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    emit(out, &text)
}

/// Serializes records as JSON lines.
pub fn to_jsonl<T: Serialize>(records: &[T]) -> Result<String> {
    let mut text = String::new();
    for r in records {
        text.push_str(&serde_json::to_string(r)?);
        text.push('\n');
    }
    Ok(text)
}
