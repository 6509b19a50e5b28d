//! Bracket precision/recall/F1 over discrete parse trees.
//!
//! Each counted constituent becomes a `(label, left, right)` bracket with
//! 1-based inclusive word indices. Duplicate brackets from unary chains are
//! multiset-counted, matching standard scorer behavior.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::bracketed::BracketedTree;
use crate::tree::TreeError;

/// A labeled constituent span; `start`/`end` are 1-based inclusive word
/// positions. Unlabeled scoring stores an empty label.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Bracket {
    pub label: String,
    pub start: u32,
    pub end: u32,
}

/// Multiset of brackets extracted from one tree.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BracketSet {
    counts: BTreeMap<Bracket, u32>,
    total: u32,
}

impl BracketSet {
    pub fn len(&self) -> usize {
        self.total as usize
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Bracket, u32)> {
        self.counts.iter().map(|(b, &c)| (b, c))
    }

    fn insert(&mut self, b: Bracket) {
        *self.counts.entry(b).or_insert(0) += 1;
        self.total += 1;
    }

    /// Multiset intersection size.
    pub fn matched(&self, other: &BracketSet) -> u32 {
        self.counts
            .iter()
            .map(|(b, &c)| c.min(other.counts.get(b).copied().unwrap_or(0)))
            .sum()
    }
}

/// Extraction configuration. Defaults match the textbook convention: the
/// root is counted, preterminal (POS) brackets are not, labels matter.
#[derive(Debug, Clone)]
pub struct ExtractOptions {
    pub labeled: bool,
    pub include_preterminals: bool,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        Self {
            labeled: true,
            include_preterminals: false,
        }
    }
}

/// Extracts the bracket multiset of a well-formed bracketed tree.
pub fn extract_brackets(
    tree: &BracketedTree,
    opts: &ExtractOptions,
) -> Result<BracketSet, TreeError> {
    tree.well_formed()
        .map_err(|e| TreeError::Malformed(e.message))?;
    let mut set = BracketSet::default();
    let mut cursor = 0u32;
    walk(tree, opts, &mut cursor, &mut set);
    Ok(set)
}

fn walk(node: &BracketedTree, opts: &ExtractOptions, cursor: &mut u32, set: &mut BracketSet) {
    if node.is_leaf() {
        *cursor += 1;
        return;
    }
    let start = *cursor + 1;
    for c in node.children() {
        walk(c, opts, cursor, set);
    }
    if opts.include_preterminals || !node.is_preterminal() {
        set.insert(Bracket {
            label: if opts.labeled {
                String::from(node.label())
            } else {
                String::new()
            },
            start,
            end: *cursor,
        });
    }
}

/// Precision/recall/F1 with the raw counts they were computed from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrfScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub matched: u64,
    pub pred: u64,
    pub gold: u64,
}

impl PrfScore {
    /// Scores raw counts. Conventions: both sides empty is a perfect
    /// (1, 1, 1); one side empty scores zero. F1 is computed as
    /// `2m / (pred + gold)`, the exact harmonic mean of the two ratios.
    pub fn from_counts(matched: u64, pred: u64, gold: u64) -> Self {
        let (precision, recall, f1) = if pred == 0 && gold == 0 {
            (1.0, 1.0, 1.0)
        } else if pred == 0 || gold == 0 {
            (0.0, 0.0, 0.0)
        } else {
            (
                matched as f64 / pred as f64,
                matched as f64 / gold as f64,
                2.0 * matched as f64 / (pred + gold) as f64,
            )
        };
        Self {
            precision,
            recall,
            f1,
            matched,
            pred,
            gold,
        }
    }
}

/// Scores one tree pair from its bracket multisets.
pub fn score_pair(gold: &BracketSet, pred: &BracketSet) -> PrfScore {
    PrfScore::from_counts(
        gold.matched(pred) as u64,
        pred.len() as u64,
        gold.len() as u64,
    )
}

/// Corpus-level result: micro-averaged (counts pooled before division)
/// plus the sentence-mean macro figures.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusPrf {
    pub micro: PrfScore,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub per_sentence: Vec<PrfScore>,
}

pub fn score_corpus(pairs: &[(BracketSet, BracketSet)]) -> CorpusPrf {
    let mut matched = 0u64;
    let mut pred = 0u64;
    let mut gold = 0u64;
    let mut per_sentence = Vec::with_capacity(pairs.len());
    for (g, p) in pairs {
        let s = score_pair(g, p);
        matched += s.matched;
        pred += s.pred;
        gold += s.gold;
        per_sentence.push(s);
    }
    let k = per_sentence.len().max(1) as f64;
    let mut mp = 0.0;
    let mut mr = 0.0;
    let mut mf = 0.0;
    for s in &per_sentence {
        mp += s.precision;
        mr += s.recall;
        mf += s.f1;
    }
    CorpusPrf {
        micro: PrfScore::from_counts(matched, pred, gold),
        macro_precision: mp / k,
        macro_recall: mr / k,
        macro_f1: mf / k,
        per_sentence,
    }
}

/// Bracket F1 between two trees under the same extraction options; used as
/// the tree loss in consensus selection.
pub fn tree_f1(
    a: &BracketedTree,
    b: &BracketedTree,
    opts: &ExtractOptions,
) -> Result<f64, TreeError> {
    let sa = extract_brackets(a, opts)?;
    let sb = extract_brackets(b, opts)?;
    Ok(score_pair(&sa, &sb).f1)
}
