//! Relaxed segment trees and word-boundary sequences.
//!
//! A relaxed segment tree carries a labeled open interval on every node;
//! children are pairwise disjoint and a nonterminal's interval is exactly
//! the envelope of its children. Speech parses live here directly (spans in
//! seconds); text parses are projected in via unit-length word or character
//! segments.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt;

use crate::bracketed::BracketedTree;
use crate::interval::{approx_eq, Interval, DEFAULT_EPSILON};

/// Coordinate system of a tree's intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    Seconds,
    WordIndex,
    CharIndex,
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Unit::Seconds => "seconds",
            Unit::WordIndex => "word",
            Unit::CharIndex => "char",
        })
    }
}

/// Errors from boundary handling and projection.
#[derive(Debug, Clone, PartialEq)]
pub enum TreeError {
    /// `boundaries[index]` does not strictly exceed its predecessor.
    BoundaryOrder { index: usize },
    /// Boundary list length is not `words + 1`.
    BoundaryCount { words: usize, boundaries: usize },
    /// Word span `index` overlaps its predecessor.
    OverlappingSpans { index: usize },
    /// Word span `index` is empty or reversed.
    EmptySpan { index: usize },
    /// Tree has a different number of terminals than the boundary file.
    TokenCountMismatch { tree: usize, boundaries: usize },
    /// Terminal `index` disagrees between tree and boundary file.
    TokenTextMismatch {
        index: usize,
        tree: String,
        boundaries: String,
    },
    /// Input tree violates the shape assumed by projection.
    Malformed(String),
}

impl fmt::Display for TreeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeError::BoundaryOrder { index } => {
                write!(f, "boundary {index} is not strictly increasing")
            }
            TreeError::BoundaryCount { words, boundaries } => write!(
                f,
                "expected {} boundaries for {words} words, found {boundaries}",
                words + 1
            ),
            TreeError::OverlappingSpans { index } => {
                write!(f, "word span {index} overlaps the previous span")
            }
            TreeError::EmptySpan { index } => write!(f, "word span {index} is empty"),
            TreeError::TokenCountMismatch { tree, boundaries } => write!(
                f,
                "tree has {tree} terminals but boundary record has {boundaries} words"
            ),
            TreeError::TokenTextMismatch {
                index,
                tree,
                boundaries,
            } => write!(
                f,
                "terminal {index} mismatch: tree has '{tree}', boundaries have '{boundaries}'"
            ),
            TreeError::Malformed(msg) => write!(f, "malformed tree: {msg}"),
        }
    }
}

impl core::error::Error for TreeError {}

/// A labeled node with an open interval and disjoint children.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentNode {
    label: String,
    interval: Interval,
    children: Vec<SegmentNode>,
}

impl SegmentNode {
    /// Builds a node; children are stored left-to-right by start point.
    pub fn new(
        label: impl Into<String>,
        interval: Interval,
        mut children: Vec<SegmentNode>,
    ) -> Self {
        children.sort_by(|a, b| {
            a.interval
                .start()
                .total_cmp(&b.interval.start())
                .then(a.interval.end().total_cmp(&b.interval.end()))
        });
        Self {
            label: label.into(),
            interval,
            children,
        }
    }

    pub fn leaf(label: impl Into<String>, interval: Interval) -> Self {
        Self::new(label, interval, Vec::new())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn children(&self) -> &[SegmentNode] {
        &self.children
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    fn count(&self) -> usize {
        1 + self.children.iter().map(SegmentNode::count).sum::<usize>()
    }
}

/// How a node fails the segment-tree conditions.
#[derive(Debug, Clone, PartialEq)]
pub enum ViolationKind {
    /// Children `left` and `right` overlap by `overlap`.
    SiblingOverlap {
        left: usize,
        right: usize,
        overlap: f64,
    },
    /// A nonterminal's interval is not the envelope of its children.
    SpanLaw {
        expected_start: f64,
        expected_end: f64,
    },
}

/// A validation finding: the node (as a child-index path from the root)
/// plus the condition it violates.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub path: Vec<usize>,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path = if self.path.is_empty() {
            "root".to_string()
        } else {
            let parts: Vec<String> = self.path.iter().map(|i| i.to_string()).collect();
            format!("root.{}", parts.join("."))
        };
        match &self.kind {
            ViolationKind::SiblingOverlap {
                left,
                right,
                overlap,
            } => write!(
                f,
                "{path}: children {left} and {right} overlap by {overlap} (disjointness)"
            ),
            ViolationKind::SpanLaw {
                expected_start,
                expected_end,
            } => write!(
                f,
                "{path}: interval differs from children envelope ({expected_start}, {expected_end}) (span law)"
            ),
        }
    }
}

/// A relaxed segment tree: a root node plus cached node count and unit.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentTree {
    root: SegmentNode,
    node_count: usize,
    unit: Unit,
}

impl SegmentTree {
    pub fn new(root: SegmentNode, unit: Unit) -> Self {
        let node_count = root.count();
        Self {
            root,
            node_count,
            unit,
        }
    }

    pub fn root(&self) -> &SegmentNode {
        &self.root
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    /// Total node count, terminals-as-leaves included.
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Node count under the configured convention: lexical terminals are
    /// never nodes, and leaves (the preterminal layer) can be excluded for
    /// ablation.
    pub fn count_nodes(&self, include_leaves: bool) -> usize {
        if include_leaves {
            self.node_count
        } else {
            fn internal(n: &SegmentNode) -> usize {
                if n.is_leaf() {
                    0
                } else {
                    1 + n.children().iter().map(internal).sum::<usize>()
                }
            }
            internal(&self.root)
        }
    }

    pub fn envelope(&self) -> Interval {
        self.root.interval
    }

    /// Nodes in preorder. Preorder position is the node id used by
    /// alignments.
    pub fn nodes_preorder(&self) -> Vec<&SegmentNode> {
        let mut out = Vec::with_capacity(self.node_count);
        fn walk<'a>(n: &'a SegmentNode, out: &mut Vec<&'a SegmentNode>) {
            out.push(n);
            for c in n.children() {
                walk(c, out);
            }
        }
        walk(&self.root, &mut out);
        out
    }

    /// Child-index path of the node at `preorder` position.
    pub fn path_of(&self, preorder: usize) -> Option<Vec<usize>> {
        fn walk(n: &SegmentNode, target: usize, next: &mut usize, path: &mut Vec<usize>) -> bool {
            if *next == target {
                return true;
            }
            *next += 1;
            for (i, c) in n.children().iter().enumerate() {
                path.push(i);
                if walk(c, target, next, path) {
                    return true;
                }
                path.pop();
            }
            false
        }
        let mut path = Vec::new();
        let mut next = 0;
        if walk(&self.root, preorder, &mut next, &mut path) {
            Some(path)
        } else {
            None
        }
    }

    /// Checks every node against the segment-tree conditions. Violations
    /// are data, not failures: an empty list means the tree is valid.
    pub fn validate(&self) -> Vec<Violation> {
        self.validate_with_epsilon(DEFAULT_EPSILON)
    }

    pub fn validate_with_epsilon(&self, eps: f64) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        validate_node(&self.root, eps, &mut path, &mut out);
        out
    }
}

fn validate_node(n: &SegmentNode, eps: f64, path: &mut Vec<usize>, out: &mut Vec<Violation>) {
    if !n.is_leaf() {
        let kids = n.children();
        for i in 0..kids.len() {
            for j in (i + 1)..kids.len() {
                let overlap = kids[i].interval.intersection_size(&kids[j].interval);
                if overlap > eps {
                    out.push(Violation {
                        path: path.clone(),
                        kind: ViolationKind::SiblingOverlap {
                            left: i,
                            right: j,
                            overlap,
                        },
                    });
                }
            }
        }
        let min_start = kids
            .iter()
            .map(|c| c.interval.start())
            .fold(f64::INFINITY, f64::min);
        let max_end = kids
            .iter()
            .map(|c| c.interval.end())
            .fold(f64::NEG_INFINITY, f64::max);
        if !approx_eq(n.interval.start(), min_start, eps)
            || !approx_eq(n.interval.end(), max_end, eps)
        {
            out.push(Violation {
                path: path.clone(),
                kind: ViolationKind::SpanLaw {
                    expected_start: min_start,
                    expected_end: max_end,
                },
            });
        }
        for (i, c) in kids.iter().enumerate() {
            path.push(i);
            validate_node(c, eps, path, out);
            path.pop();
        }
    }
}

/// Word boundaries `b0 < b1 < ... < bn` of an utterance with `n` words;
/// word `i` occupies the open interval `(b[i], b[i+1])`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySequence {
    words: Vec<String>,
    boundaries: Vec<f64>,
}

impl BoundarySequence {
    pub fn new(words: Vec<String>, boundaries: Vec<f64>) -> Result<Self, TreeError> {
        Self::with_epsilon(words, boundaries, DEFAULT_EPSILON)
    }

    pub fn with_epsilon(
        words: Vec<String>,
        boundaries: Vec<f64>,
        eps: f64,
    ) -> Result<Self, TreeError> {
        if boundaries.len() != words.len() + 1 {
            return Err(TreeError::BoundaryCount {
                words: words.len(),
                boundaries: boundaries.len(),
            });
        }
        for i in 1..boundaries.len() {
            if boundaries[i] - boundaries[i - 1] <= eps || !boundaries[i].is_finite() {
                return Err(TreeError::BoundaryOrder { index: i });
            }
        }
        if !boundaries.is_empty() && !boundaries[0].is_finite() {
            return Err(TreeError::BoundaryOrder { index: 0 });
        }
        Ok(Self { words, boundaries })
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Boundaries between words, excluding the utterance start and end.
    pub fn internal(&self) -> &[f64] {
        if self.boundaries.len() <= 2 {
            &[]
        } else {
            &self.boundaries[1..self.boundaries.len() - 1]
        }
    }

    pub fn word_interval(&self, i: usize) -> Interval {
        Interval::with_epsilon(self.boundaries[i], self.boundaries[i + 1], 0.0)
            .expect("boundaries are strictly increasing")
    }
}

/// A word with its own time span, possibly separated from its neighbors by
/// silence.
#[derive(Debug, Clone, PartialEq)]
pub struct WordSpan {
    pub word: String,
    pub start: f64,
    pub end: f64,
}

/// Compacts per-word spans into a gapless boundary sequence: durations are
/// preserved exactly and each word slides left onto the end of its
/// predecessor. Gapless input is returned unchanged (making the operation
/// idempotent); overlapping spans are an error.
pub fn remove_gaps(spans: &[WordSpan]) -> Result<BoundarySequence, TreeError> {
    remove_gaps_with_epsilon(spans, DEFAULT_EPSILON)
}

pub fn remove_gaps_with_epsilon(
    spans: &[WordSpan],
    eps: f64,
) -> Result<BoundarySequence, TreeError> {
    let words: Vec<String> = spans.iter().map(|s| s.word.clone()).collect();
    let mut gapless = true;
    for (i, s) in spans.iter().enumerate() {
        if s.end - s.start <= eps {
            return Err(TreeError::EmptySpan { index: i });
        }
        if i > 0 {
            let prev_end = spans[i - 1].end;
            if s.start < prev_end - eps {
                return Err(TreeError::OverlappingSpans { index: i });
            }
            if !approx_eq(s.start, prev_end, eps) {
                gapless = false;
            }
        }
    }
    let boundaries = if spans.is_empty() {
        vec![0.0]
    } else if gapless {
        // Reuse the original endpoints so re-running is a bitwise no-op.
        let mut b = Vec::with_capacity(spans.len() + 1);
        b.push(spans[0].start);
        b.extend(spans.iter().map(|s| s.end));
        b
    } else {
        let mut b = Vec::with_capacity(spans.len() + 1);
        b.push(spans[0].start);
        let mut cursor = spans[0].start;
        for s in spans {
            cursor += s.end - s.start;
            b.push(cursor);
        }
        b
    };
    BoundarySequence::with_epsilon(words, boundaries, eps)
}

/// Text-projection granularity: one unit per word or per character.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Granularity {
    Word,
    Char,
}

/// Projects a bracketed text parse into a segment tree where terminal `k`
/// occupies `(k, k+1)` in unit coordinates. Preterminals become leaves;
/// lexical terminals are not nodes. Character granularity indexes over the
/// concatenated leaf text, one unit per character.
pub fn project_text(
    tree: &BracketedTree,
    granularity: Granularity,
) -> Result<SegmentTree, TreeError> {
    tree.well_formed()
        .map_err(|e| TreeError::Malformed(e.message))?;
    let mut cursor = 0usize;
    let root = project_node(tree, granularity, &mut cursor)?;
    let unit = match granularity {
        Granularity::Word => Unit::WordIndex,
        Granularity::Char => Unit::CharIndex,
    };
    Ok(SegmentTree::new(root, unit))
}

fn project_node(
    node: &BracketedTree,
    granularity: Granularity,
    cursor: &mut usize,
) -> Result<SegmentNode, TreeError> {
    if node.is_preterminal() {
        let start = *cursor;
        for tok in node.children() {
            let width = match granularity {
                Granularity::Word => 1,
                Granularity::Char => match tok {
                    BracketedTree::Leaf(t) => t.chars().count().max(1),
                    BracketedTree::Node { .. } => unreachable!("preterminal children are tokens"),
                },
            };
            *cursor += width;
        }
        let interval = Interval::with_epsilon(start as f64, *cursor as f64, 0.0)
            .expect("unit spans are non-empty");
        return Ok(SegmentNode::leaf(node.label(), interval));
    }
    let mut children = Vec::with_capacity(node.children().len());
    for c in node.children() {
        children.push(project_node(c, granularity, cursor)?);
    }
    let start = children
        .iter()
        .map(|c| c.interval().start())
        .fold(f64::INFINITY, f64::min);
    let end = children
        .iter()
        .map(|c| c.interval().end())
        .fold(f64::NEG_INFINITY, f64::max);
    let interval =
        Interval::with_epsilon(start, end, 0.0).expect("children cover a non-empty range");
    Ok(SegmentNode::new(node.label(), interval, children))
}

/// Token comparison options for [`attach_boundaries`].
#[derive(Debug, Clone)]
pub struct AttachOptions {
    pub case_insensitive: bool,
}

impl Default for AttachOptions {
    fn default() -> Self {
        Self {
            case_insensitive: false,
        }
    }
}

/// Projects a bracketed text parse onto forced-alignment word boundaries:
/// terminal `k` spans `(b[k], b[k+1])` and internal nodes take their
/// children's envelope. The tree's terminals must match the boundary words
/// token for token.
pub fn attach_boundaries(
    tree: &BracketedTree,
    bounds: &BoundarySequence,
    opts: &AttachOptions,
) -> Result<SegmentTree, TreeError> {
    tree.well_formed()
        .map_err(|e| TreeError::Malformed(e.message))?;
    let leaves = tree.leaves();
    if leaves.len() != bounds.len() {
        return Err(TreeError::TokenCountMismatch {
            tree: leaves.len(),
            boundaries: bounds.len(),
        });
    }
    for (i, (tok, word)) in leaves.iter().zip(bounds.words()).enumerate() {
        let matches = if opts.case_insensitive {
            tok.to_lowercase() == word.to_lowercase()
        } else {
            *tok == word.as_str()
        };
        if !matches {
            return Err(TreeError::TokenTextMismatch {
                index: i,
                tree: tok.to_string(),
                boundaries: word.clone(),
            });
        }
    }
    let mut cursor = 0usize;
    let root = attach_node(tree, bounds, &mut cursor)?;
    Ok(SegmentTree::new(root, Unit::Seconds))
}

fn attach_node(
    node: &BracketedTree,
    bounds: &BoundarySequence,
    cursor: &mut usize,
) -> Result<SegmentNode, TreeError> {
    if node.is_preterminal() {
        let first = *cursor;
        *cursor += node.children().len();
        let interval = Interval::with_epsilon(
            bounds.boundaries()[first],
            bounds.boundaries()[*cursor],
            0.0,
        )
        .expect("boundaries are strictly increasing");
        return Ok(SegmentNode::leaf(node.label(), interval));
    }
    let mut children = Vec::with_capacity(node.children().len());
    for c in node.children() {
        children.push(attach_node(c, bounds, cursor)?);
    }
    let start = children[0].interval().start();
    let end = children[children.len() - 1].interval().end();
    let interval =
        Interval::with_epsilon(start, end, 0.0).expect("children cover a non-empty range");
    Ok(SegmentNode::new(node.label(), interval, children))
}
