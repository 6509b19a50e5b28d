//! File formats: bracketed parse lines, time-tree JSONL, boundary files,
//! and candidate sets.
//!
//! Numbers are serialized with the shortest round-trip decimal
//! representation, so writing and re-reading a tree reproduces coordinates
//! bit-exactly.

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;

use treealign_core::bracketed::BracketedTree;
use treealign_core::interval::Interval;
use treealign_core::segeval::SpanSet;
use treealign_core::tree::{
    remove_gaps_with_epsilon, BoundarySequence, SegmentNode, SegmentTree, Unit, WordSpan,
};

/// One node of the time-tree wire format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JsonNode {
    pub label: String,
    pub start: f64,
    pub end: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<JsonNode>,
}

/// A time-tree JSONL record: a root node with an optional id.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JsonTreeRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(flatten)]
    pub root: JsonNode,
}

pub fn node_to_json(node: &SegmentNode) -> JsonNode {
    JsonNode {
        label: node.label().to_string(),
        start: node.interval().start(),
        end: node.interval().end(),
        children: node.children().iter().map(node_to_json).collect(),
    }
}

pub fn tree_to_record(tree: &SegmentTree, id: Option<String>) -> JsonTreeRecord {
    JsonTreeRecord {
        id,
        root: node_to_json(tree.root()),
    }
}

pub fn json_to_node(node: &JsonNode, eps: f64) -> Result<SegmentNode> {
    let interval = Interval::with_epsilon(node.start, node.end, eps)
        .map_err(|e| anyhow!("node '{}': {e}", node.label))?;
    let children = node
        .children
        .iter()
        .map(|c| json_to_node(c, eps))
        .collect::<Result<Vec<_>>>()?;
    Ok(SegmentNode::new(node.label.clone(), interval, children))
}

pub fn record_to_tree(record: &JsonTreeRecord, eps: f64) -> Result<SegmentTree> {
    Ok(SegmentTree::new(
        json_to_node(&record.root, eps)?,
        Unit::Seconds,
    ))
}

/// A parsed record paired with its id (explicit or 1-based line number).
#[derive(Debug, Clone)]
pub struct Record<T> {
    pub id: String,
    pub explicit_id: bool,
    pub line: usize,
    pub value: T,
}

/// Reads time-tree JSONL; ids default to 1-based line numbers.
pub fn read_tree_file(path: &Path, eps: f64) -> Result<Vec<Record<SegmentTree>>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: JsonTreeRecord = serde_json::from_str(line)
            .with_context(|| format!("{}:{}: invalid tree record", path.display(), lineno + 1))?;
        let tree = record_to_tree(&record, eps)
            .with_context(|| format!("{}:{}", path.display(), lineno + 1))?;
        out.push(Record {
            id: record
                .id
                .clone()
                .unwrap_or_else(|| (lineno + 1).to_string()),
            explicit_id: record.id.is_some(),
            line: lineno + 1,
            value: tree,
        });
    }
    Ok(out)
}

/// Reads bracketed parse lines (one tree per line).
pub fn read_bracketed_file(
    path: &Path,
    strip_suffixes: bool,
) -> Result<Vec<Record<BracketedTree>>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut tree = BracketedTree::parse(line)
            .map_err(|e| anyhow!("{}:{}: {e}", path.display(), lineno + 1))?;
        if strip_suffixes {
            tree = tree.strip_label_suffixes();
        }
        out.push(Record {
            id: (lineno + 1).to_string(),
            explicit_id: false,
            line: lineno + 1,
            value: tree,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JsonWordSpan {
    pub word: String,
    pub start: f64,
    pub end: f64,
}

/// Reads a boundary file into gapless boundary sequences. JSONL (one
/// `[{"word","start","end"}, ...]` array per line) and 3-column text
/// (`word start end`, blank line between utterances) are auto-detected.
/// Inter-word silence is removed, each word keeping its duration.
pub fn read_boundary_file(path: &Path, eps: f64) -> Result<Vec<Record<BoundarySequence>>> {
    let records = read_word_spans(path)?;
    records
        .into_iter()
        .map(|r| {
            let bounds = spans_to_bounds(r.value, eps)
                .with_context(|| format!("{}: utterance at line {}", path.display(), r.line))?;
            Ok(Record {
                id: r.id,
                explicit_id: r.explicit_id,
                line: r.line,
                value: bounds,
            })
        })
        .collect()
}

/// Reads the same formats as raw span sets: gaps between words are kept,
/// as segmentation proposals are compared span by span.
pub fn read_span_file(path: &Path, eps: f64) -> Result<Vec<Record<SpanSet>>> {
    let records = read_word_spans(path)?;
    records
        .into_iter()
        .map(|r| {
            let spans = r
                .value
                .iter()
                .map(|s| {
                    Interval::with_epsilon(s.start, s.end, eps)
                        .map_err(|e| anyhow!("word '{}': {e}", s.word))
                })
                .collect::<Result<Vec<_>>>()
                .and_then(|spans| Ok(SpanSet::with_epsilon(spans, eps)?))
                .with_context(|| format!("{}: utterance at line {}", path.display(), r.line))?;
            Ok(Record {
                id: r.id,
                explicit_id: r.explicit_id,
                line: r.line,
                value: spans,
            })
        })
        .collect()
}

fn read_word_spans(path: &Path) -> Result<Vec<Record<Vec<WordSpan>>>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let jsonl = text
        .lines()
        .find(|l| !l.trim().is_empty())
        .map(|l| l.trim_start().starts_with('['))
        .unwrap_or(true);
    if jsonl {
        read_boundary_jsonl(path, &text)
    } else {
        read_boundary_text(path, &text)
    }
}

fn spans_to_bounds(spans: Vec<WordSpan>, eps: f64) -> Result<BoundarySequence> {
    if spans.is_empty() {
        bail!("utterance has no words");
    }
    Ok(remove_gaps_with_epsilon(&spans, eps)?)
}

fn read_boundary_jsonl(path: &Path, text: &str) -> Result<Vec<Record<Vec<WordSpan>>>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let spans: Vec<JsonWordSpan> = serde_json::from_str(line).with_context(|| {
            format!("{}:{}: invalid boundary record", path.display(), lineno + 1)
        })?;
        let spans: Vec<WordSpan> = spans
            .into_iter()
            .map(|s| WordSpan {
                word: s.word,
                start: s.start,
                end: s.end,
            })
            .collect();
        out.push(Record {
            id: (lineno + 1).to_string(),
            explicit_id: false,
            line: lineno + 1,
            value: spans,
        });
    }
    Ok(out)
}

fn read_boundary_text(path: &Path, text: &str) -> Result<Vec<Record<Vec<WordSpan>>>> {
    let mut out: Vec<Record<Vec<WordSpan>>> = Vec::new();
    let mut spans: Vec<WordSpan> = Vec::new();
    let mut block_start = 1usize;
    let flush = |spans: &mut Vec<WordSpan>, line: usize, out: &mut Vec<Record<Vec<WordSpan>>>| {
        if spans.is_empty() {
            return;
        }
        out.push(Record {
            id: (out.len() + 1).to_string(),
            explicit_id: false,
            line,
            value: std::mem::take(spans),
        });
    };
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            flush(&mut spans, block_start, &mut out);
            block_start = lineno + 2;
            continue;
        }
        let mut parts = line.split_whitespace();
        let word = parts
            .next()
            .ok_or_else(|| anyhow!("{}:{}: empty row", path.display(), lineno + 1))?;
        let start: f64 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| anyhow!("{}:{}: bad start time", path.display(), lineno + 1))?;
        let end: f64 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| anyhow!("{}:{}: bad end time", path.display(), lineno + 1))?;
        if parts.next().is_some() {
            bail!("{}:{}: expected 3 columns", path.display(), lineno + 1);
        }
        spans.push(WordSpan {
            word: word.to_string(),
            start,
            end,
        });
    }
    flush(&mut spans, block_start, &mut out);
    Ok(out)
}

pub fn bounds_to_spans(bounds: &BoundarySequence) -> Vec<JsonWordSpan> {
    (0..bounds.len())
        .map(|i| JsonWordSpan {
            word: bounds.words()[i].clone(),
            start: bounds.boundaries()[i],
            end: bounds.boundaries()[i + 1],
        })
        .collect()
}

/// One candidate in an MBR candidate set: a segmentation or a parse.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonCandidate {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spans: Option<Vec<JsonSpan>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tree: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JsonSpan {
    pub start: f64,
    pub end: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JsonCandidateSet {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub candidates: Vec<JsonCandidate>,
}

pub fn read_candidate_file(path: &Path) -> Result<Vec<Record<JsonCandidateSet>>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let set: JsonCandidateSet = serde_json::from_str(line).with_context(|| {
            format!(
                "{}:{}: invalid candidate record",
                path.display(),
                lineno + 1
            )
        })?;
        out.push(Record {
            id: set.id.clone().unwrap_or_else(|| (lineno + 1).to_string()),
            explicit_id: set.id.is_some(),
            line: lineno + 1,
            value: set,
        });
    }
    Ok(out)
}
