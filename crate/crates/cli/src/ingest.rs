//! Corpus loading: paired gold/predicted files with validation.

use anyhow::{bail, Result};
use std::path::Path;

use treealign_core::tree::{project_text, Granularity, SegmentTree};

use crate::formats::{read_bracketed_file, read_tree_file, Record};

/// An id-matched gold/predicted tree pair.
#[derive(Debug, Clone)]
pub struct CorpusPair {
    pub id: String,
    pub gold: SegmentTree,
    pub pred: SegmentTree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    /// Time-tree JSONL.
    Trees,
    /// Bracketed parse lines projected to unit-length segments.
    Brackets(Granularity),
}

pub struct LoadOptions {
    pub format: CorpusFormat,
    pub epsilon: f64,
    pub skip_invalid: bool,
    pub strip_suffixes: bool,
    pub quiet: bool,
}

/// Loads and pairs a corpus. Records pair by line order, or by id when both
/// files carry explicit ids on every record. Each tree is validated on
/// load; failures are fatal unless `skip_invalid` drops the pair with a
/// warning.
pub fn load_corpus(gold: &Path, pred: &Path, opts: &LoadOptions) -> Result<Vec<CorpusPair>> {
    let (gold_records, pred_records) = match opts.format {
        CorpusFormat::Trees => (
            read_tree_file(gold, opts.epsilon)?,
            read_tree_file(pred, opts.epsilon)?,
        ),
        CorpusFormat::Brackets(granularity) => (
            project_records(read_bracketed_file(gold, opts.strip_suffixes)?, granularity)?,
            project_records(read_bracketed_file(pred, opts.strip_suffixes)?, granularity)?,
        ),
    };
    let paired = pair_records(gold_records, pred_records)?;
    let mut out = Vec::with_capacity(paired.len());
    for (id, gold_rec, pred_rec) in paired {
        let mut invalid = false;
        for (which, rec) in [("gold", &gold_rec), ("pred", &pred_rec)] {
            let violations = rec.value.validate_with_epsilon(opts.epsilon);
            if !violations.is_empty() {
                let msg = format!(
                    "record {id} ({which} line {}): invalid segment tree: {}",
                    rec.line,
                    violations
                        .iter()
                        .map(|v| v.to_string())
                        .collect::<Vec<_>>()
                        .join("; ")
                );
                if opts.skip_invalid {
                    if !opts.quiet {
                        eprintln!("warning: skipping {msg}");
                    }
                    invalid = true;
                } else {
                    bail!("{msg}");
                }
            }
        }
        if invalid {
            continue;
        }
        let env_iou = gold_rec.value.envelope().iou(&pred_rec.value.envelope());
        if env_iou < 0.9 && !opts.quiet {
            eprintln!(
                "warning: record {id}: gold and pred envelopes differ by more than 10% \
                 (IoU {env_iou:.3})"
            );
        }
        out.push(CorpusPair {
            id,
            gold: gold_rec.value,
            pred: pred_rec.value,
        });
    }
    if out.is_empty() {
        bail!("corpus is empty; nothing to score");
    }
    Ok(out)
}

fn project_records(
    records: Vec<Record<treealign_core::bracketed::BracketedTree>>,
    granularity: Granularity,
) -> Result<Vec<Record<SegmentTree>>> {
    records
        .into_iter()
        .map(|r| {
            let tree = project_text(&r.value, granularity)
                .map_err(|e| anyhow::anyhow!("line {}: {e}", r.line))?;
            Ok(Record {
                id: r.id,
                explicit_id: r.explicit_id,
                line: r.line,
                value: tree,
            })
        })
        .collect()
}

type Paired<T> = Vec<(String, Record<T>, Record<T>)>;

fn pair_records<T>(gold: Vec<Record<T>>, pred: Vec<Record<T>>) -> Result<Paired<T>> {
    let by_id = !gold.is_empty()
        && gold.iter().all(|r| r.explicit_id)
        && pred.iter().all(|r| r.explicit_id);
    if by_id {
        let mut pred_map = std::collections::BTreeMap::new();
        for r in pred {
            if pred_map.insert(r.id.clone(), r).is_some() {
                bail!("duplicate id in predicted file");
            }
        }
        let mut out = Vec::with_capacity(gold.len());
        for g in gold {
            let Some(p) = pred_map.remove(&g.id) else {
                bail!(
                    "id '{}' present in gold file but missing from predicted file",
                    g.id
                );
            };
            out.push((g.id.clone(), g, p));
        }
        if let Some(extra) = pred_map.keys().next() {
            bail!("id '{extra}' present in predicted file but missing from gold file");
        }
        Ok(out)
    } else {
        if gold.len() != pred.len() {
            bail!(
                "record count mismatch: {} gold vs {} predicted (add ids to join out-of-order files)",
                gold.len(),
                pred.len()
            );
        }
        Ok(gold
            .into_iter()
            .zip(pred)
            .map(|(g, p)| (g.id.clone(), g, p))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn tmpdir(name: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("treealign-ingest").join(name);
        fs::create_dir_all(&dir).unwrap();
        dir
    }

    const TREE_A: &str = r#"{"label":"NP","start":0.0,"end":2.0,"children":[{"label":"A","start":0.0,"end":1.0},{"label":"B","start":1.0,"end":2.0}]}"#;
    const TREE_BAD: &str = r#"{"label":"NP","start":0.0,"end":2.0,"children":[{"label":"A","start":0.0,"end":1.5},{"label":"B","start":1.0,"end":2.0}]}"#;

    fn opts() -> LoadOptions {
        LoadOptions {
            format: CorpusFormat::Trees,
            epsilon: 1e-9,
            skip_invalid: false,
            strip_suffixes: false,
            quiet: true,
        }
    }

    #[test]
    fn pairs_by_line_order() {
        let dir = tmpdir("lines");
        let g = dir.join("g.jsonl");
        let p = dir.join("p.jsonl");
        fs::write(&g, format!("{TREE_A}\n{TREE_A}\n")).unwrap();
        fs::write(&p, format!("{TREE_A}\n{TREE_A}\n")).unwrap();
        let pairs = load_corpus(&g, &p, &opts()).unwrap();
        assert_eq!(pairs.len(), 2);
        assert_eq!(pairs[0].id, "1");
    }

    #[test]
    fn count_mismatch_without_ids() {
        let dir = tmpdir("mismatch");
        let g = dir.join("g.jsonl");
        let p = dir.join("p.jsonl");
        fs::write(&g, format!("{TREE_A}\n{TREE_A}\n")).unwrap();
        fs::write(&p, format!("{TREE_A}\n{TREE_A}\n{TREE_A}\n")).unwrap();
        let err = load_corpus(&g, &p, &opts()).unwrap_err();
        assert!(err.to_string().contains("count mismatch"));
    }

    #[test]
    fn invalid_record_names_line_and_condition() {
        let dir = tmpdir("invalid");
        let g = dir.join("g.jsonl");
        let p = dir.join("p.jsonl");
        fs::write(&g, format!("{TREE_A}\n")).unwrap();
        fs::write(&p, format!("{TREE_BAD}\n")).unwrap();
        let err = load_corpus(&g, &p, &opts()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 1"), "{msg}");
        assert!(msg.contains("overlap"), "{msg}");
        let mut skip = opts();
        skip.skip_invalid = true;
        assert!(load_corpus(&g, &p, &skip).is_err(), "empty after skip");
    }

    #[test]
    fn joins_by_id() {
        let dir = tmpdir("ids");
        let g = dir.join("g.jsonl");
        let p = dir.join("p.jsonl");
        let a = TREE_A.replacen('{', r#"{"id":"x","#, 1);
        let b = TREE_A.replacen('{', r#"{"id":"y","#, 1);
        fs::write(&g, format!("{a}\n{b}\n")).unwrap();
        fs::write(&p, format!("{b}\n{a}\n")).unwrap();
        let pairs = load_corpus(&g, &p, &opts()).unwrap();
        assert_eq!(pairs.len(), 2);
        assert_eq!(pairs[0].id, "x");
        assert_eq!(pairs[1].id, "y");
    }
}
