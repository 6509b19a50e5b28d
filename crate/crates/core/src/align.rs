//! Optimal structured alignment between two relaxed segment trees.
//!
//! The score of a tree pair is the maximum sum of interval IoU over a
//! one-to-one node matching that preserves ancestor/descendant relations on
//! both sides. The unrestricted problem reduces to the root-aligned one by
//! giving each tree a dummy root over the shared envelope; the root-aligned
//! value obeys
//!
//! ```text
//! f(u, v) = IoU(u, v) + max over equal-length ordered disjoint descendant
//!           sequences D1 of u, D2 of v of sum_i f(D1[i], D2[i])
//! ```
//!
//! and the inner maximum is a knapsack-style sweep over descendant pairs in
//! increasing order of right endpoint, with prefix maxima over a
//! coordinate-compressed endpoint grid. Total cost is O(n²m²) in the node
//! counts.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt;

use crate::interval::{Interval, DEFAULT_EPSILON};
use crate::tree::{SegmentNode, SegmentTree, Violation};

/// Which node pairs may align.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelMode {
    /// Any node may align to any node (grammar-induction convention).
    Unlabeled,
    /// Only same-label nodes may align.
    ExactLabel,
}

/// Alignment configuration.
#[derive(Debug, Clone)]
pub struct AlignOptions {
    pub label_mode: LabelMode,
    /// When false, leaves (the preterminal layer) neither align nor count.
    pub include_leaves: bool,
    pub epsilon: f64,
}

impl Default for AlignOptions {
    fn default() -> Self {
        Self {
            label_mode: LabelMode::Unlabeled,
            include_leaves: true,
            epsilon: DEFAULT_EPSILON,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AlignError {
    /// An input tree fails validation; `which` is 1 or 2.
    InvalidTree {
        which: u8,
        violations: Vec<Violation>,
    },
    /// The brute-force oracle refuses instances this large.
    OracleTooLarge { nodes: usize, limit: usize },
    /// No nodes remain on either side under the current options.
    NoAlignableNodes,
    /// Corpus scoring needs at least one tree pair.
    EmptyCorpus,
    /// An emitted alignment failed its own postconditions.
    BrokenAlignment(String),
}

impl fmt::Display for AlignError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlignError::InvalidTree { which, violations } => {
                write!(f, "tree {which} is not a valid segment tree:")?;
                for v in violations {
                    write!(f, " [{v}]")?;
                }
                Ok(())
            }
            AlignError::OracleTooLarge { nodes, limit } => write!(
                f,
                "oracle enumeration refused: {nodes} nodes exceed the {limit}-node guard"
            ),
            AlignError::NoAlignableNodes => {
                write!(f, "no alignable nodes under the current options")
            }
            AlignError::EmptyCorpus => write!(f, "corpus is empty; nothing to score"),
            AlignError::BrokenAlignment(msg) => write!(f, "alignment invariant violated: {msg}"),
        }
    }
}

impl core::error::Error for AlignError {}

/// One aligned node pair; indices are preorder positions in their trees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignedPair {
    pub index1: usize,
    pub index2: usize,
    pub iou: f64,
}

/// A one-to-one, conflict-free node alignment with its total IoU weight.
#[derive(Debug, Clone, PartialEq)]
pub struct Alignment {
    pub pairs: Vec<AlignedPair>,
    pub total_weight: f64,
}

impl Alignment {
    /// Checks the postconditions an emitted alignment must satisfy:
    /// one-to-one, conflict-free under the ancestor-consistency rules,
    /// label-compatible, and weight-consistent.
    pub fn verify(
        &self,
        t1: &SegmentTree,
        t2: &SegmentTree,
        opts: &AlignOptions,
    ) -> Result<(), AlignError> {
        let info1 = NodeInfo::collect(t1);
        let info2 = NodeInfo::collect(t2);
        let mut used1 = vec![false; info1.len()];
        let mut used2 = vec![false; info2.len()];
        let mut sum = 0.0;
        for p in &self.pairs {
            if p.index1 >= info1.len() || p.index2 >= info2.len() {
                return Err(AlignError::BrokenAlignment(format!(
                    "pair ({}, {}) out of range",
                    p.index1, p.index2
                )));
            }
            if used1[p.index1] || used2[p.index2] {
                return Err(AlignError::BrokenAlignment(format!(
                    "node reused by pair ({}, {})",
                    p.index1, p.index2
                )));
            }
            used1[p.index1] = true;
            used2[p.index2] = true;
            if !opts.include_leaves && (info1.is_leaf(p.index1) || info2.is_leaf(p.index2)) {
                return Err(AlignError::BrokenAlignment(format!(
                    "pair ({}, {}) uses an excluded leaf",
                    p.index1, p.index2
                )));
            }
            if opts.label_mode == LabelMode::ExactLabel
                && info1.label(p.index1) != info2.label(p.index2)
            {
                return Err(AlignError::BrokenAlignment(format!(
                    "pair ({}, {}) crosses labels '{}' and '{}'",
                    p.index1,
                    p.index2,
                    info1.label(p.index1),
                    info2.label(p.index2)
                )));
            }
            let expect = info1.interval(p.index1).iou(&info2.interval(p.index2));
            if (expect - p.iou).abs() > 1e-12 {
                return Err(AlignError::BrokenAlignment(format!(
                    "pair ({}, {}) carries iou {} but intervals give {}",
                    p.index1, p.index2, p.iou, expect
                )));
            }
            sum += p.iou;
        }
        for (a, b) in pairs_of(&self.pairs) {
            let anc1_ab = info1.is_ancestor(a.index1, b.index1);
            let anc1_ba = info1.is_ancestor(b.index1, a.index1);
            let anc2_ab = info2.is_ancestor(a.index2, b.index2);
            let anc2_ba = info2.is_ancestor(b.index2, a.index2);
            if anc1_ab != anc2_ab || anc1_ba != anc2_ba {
                return Err(AlignError::BrokenAlignment(format!(
                    "pairs ({}, {}) and ({}, {}) are conflicted",
                    a.index1, a.index2, b.index1, b.index2
                )));
            }
        }
        if (sum - self.total_weight).abs() > 1e-9 {
            return Err(AlignError::BrokenAlignment(format!(
                "total weight {} differs from pair sum {}",
                self.total_weight, sum
            )));
        }
        Ok(())
    }
}

fn pairs_of(pairs: &[AlignedPair]) -> impl Iterator<Item = (&AlignedPair, &AlignedPair)> {
    pairs
        .iter()
        .enumerate()
        .flat_map(move |(i, a)| pairs[i + 1..].iter().map(move |b| (a, b)))
}

/// Preorder node facts used by verification and the oracle.
pub(crate) struct NodeInfo {
    labels: Vec<String>,
    intervals: Vec<Interval>,
    subtree: Vec<usize>,
    leaf: Vec<bool>,
}

impl NodeInfo {
    pub(crate) fn collect(t: &SegmentTree) -> Self {
        let mut info = NodeInfo {
            labels: Vec::new(),
            intervals: Vec::new(),
            subtree: Vec::new(),
            leaf: Vec::new(),
        };
        fn walk(n: &SegmentNode, info: &mut NodeInfo) -> usize {
            let at = info.labels.len();
            info.labels.push(String::from(n.label()));
            info.intervals.push(n.interval());
            info.subtree.push(0);
            info.leaf.push(n.is_leaf());
            let mut size = 1;
            for c in n.children() {
                size += walk(c, info);
            }
            info.subtree[at] = size;
            size
        }
        walk(t.root(), &mut info);
        info
    }

    pub(crate) fn len(&self) -> usize {
        self.labels.len()
    }

    pub(crate) fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub(crate) fn interval(&self, i: usize) -> Interval {
        self.intervals[i]
    }

    pub(crate) fn is_leaf(&self, i: usize) -> bool {
        self.leaf[i]
    }

    /// Proper-ancestor test via preorder ranges.
    pub(crate) fn is_ancestor(&self, a: usize, d: usize) -> bool {
        a < d && d < a + self.subtree[a]
    }
}

/// The optimal alignment weight normalized to `[0, 1]`:
/// `score = 2 * weight / (n1 + n2)`, so identical trees score 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructIouScore {
    pub score: f64,
    pub weight: f64,
    pub n1: usize,
    pub n2: usize,
}

/// Corpus-level result: the size-weighted corpus score, the unweighted
/// sentence mean, and every per-sentence score.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusScore {
    pub corpus: f64,
    pub sentence_mean: f64,
    pub sentences: Vec<StructIouScore>,
}

// --- flattened trees and per-node descendant contexts ---

struct FlatNode {
    start: f64,
    end: f64,
    label: u32,
    active: bool,
}

/// Descendant entry: node index plus the grid rank of the largest endpoint
/// not exceeding its start (-1 when there is none).
#[derive(Clone, Copy)]
struct DescEntry {
    node: u32,
    srank: i32,
}

/// Per-node sweep context: compressed right-endpoint grid and, per grid
/// point, the descendants whose right endpoint lands there.
struct DescCtx {
    grid: Vec<f64>,
    groups: Vec<Vec<DescEntry>>,
}

impl DescCtx {
    fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}

struct Flat {
    nodes: Vec<FlatNode>,
    /// One context per node, plus the dummy root at index `nodes.len()`.
    ctx: Vec<DescCtx>,
    active_count: usize,
}

fn intern(label: &str, table: &mut BTreeMap<String, u32>) -> u32 {
    if let Some(&id) = table.get(label) {
        return id;
    }
    let id = table.len() as u32;
    table.insert(String::from(label), id);
    id
}

fn flatten(t: &SegmentTree, opts: &AlignOptions, labels: &mut BTreeMap<String, u32>) -> Flat {
    let mut nodes = Vec::with_capacity(t.node_count());
    let mut subtree = Vec::with_capacity(t.node_count());
    fn walk(
        n: &SegmentNode,
        opts: &AlignOptions,
        labels: &mut BTreeMap<String, u32>,
        nodes: &mut Vec<FlatNode>,
        subtree: &mut Vec<usize>,
    ) -> usize {
        let at = nodes.len();
        nodes.push(FlatNode {
            start: n.interval().start(),
            end: n.interval().end(),
            label: intern(n.label(), labels),
            active: opts.include_leaves || !n.is_leaf(),
        });
        subtree.push(0);
        let mut size = 1;
        for c in n.children() {
            size += walk(c, opts, labels, nodes, subtree);
        }
        subtree[at] = size;
        size
    }
    walk(t.root(), opts, labels, &mut nodes, &mut subtree);

    let n = nodes.len();
    let mut ctx = Vec::with_capacity(n + 1);
    for u in 0..n {
        let descendants: Vec<u32> = ((u + 1)..(u + subtree[u]))
            .filter(|&d| nodes[d].active)
            .map(|d| d as u32)
            .collect();
        ctx.push(build_ctx(&nodes, descendants, opts.epsilon));
    }
    // Dummy root: every active node is a descendant.
    let all: Vec<u32> = (0..n)
        .filter(|&d| nodes[d].active)
        .map(|d| d as u32)
        .collect();
    ctx.push(build_ctx(&nodes, all, opts.epsilon));

    let active_count = nodes.iter().filter(|n| n.active).count();
    Flat {
        nodes,
        ctx,
        active_count,
    }
}

fn build_ctx(nodes: &[FlatNode], mut descendants: Vec<u32>, eps: f64) -> DescCtx {
    descendants.sort_unstable_by(|&a, &b| {
        let (a, b) = (a as usize, b as usize);
        nodes[a]
            .end
            .total_cmp(&nodes[b].end)
            .then(nodes[a].start.total_cmp(&nodes[b].start))
            .then(a.cmp(&b))
    });
    let mut grid: Vec<f64> = Vec::new();
    let mut groups: Vec<Vec<DescEntry>> = Vec::new();
    for &d in &descendants {
        let end = nodes[d as usize].end;
        if grid.last().map_or(true, |&g| end - g > eps) {
            grid.push(end);
            groups.push(Vec::new());
        }
        groups
            .last_mut()
            .unwrap()
            .push(DescEntry { node: d, srank: 0 });
    }
    for (gx, group) in groups.iter_mut().enumerate() {
        for e in group.iter_mut() {
            let s = nodes[e.node as usize].start;
            // A node's own end cluster can never precede it in a sequence,
            // so the prefix rank stays strictly below its grid position.
            let rank = grid.partition_point(|&g| g <= s + eps) as i32 - 1;
            e.srank = rank.min(gx as i32 - 1);
        }
    }
    DescCtx { grid, groups }
}

/// How a sweep cell obtained its value; used to reconstruct one optimal
/// alignment deterministically.
#[derive(Clone, Copy)]
enum Cell {
    Stop,
    Left,
    Up,
    Pair {
        d1: u32,
        d2: u32,
        sr1: i32,
        sr2: i32,
    },
}

struct Solver<'a> {
    flat1: &'a Flat,
    flat2: &'a Flat,
    exact_label: bool,
    /// f[u * (n2 + 1) + v]: optimal weight with u and v force-aligned.
    f: Vec<f64>,
    width: usize,
}

impl<'a> Solver<'a> {
    fn new(flat1: &'a Flat, flat2: &'a Flat, opts: &AlignOptions) -> Self {
        let width = flat2.nodes.len() + 1;
        let f = vec![0.0; (flat1.nodes.len() + 1) * width];
        Solver {
            flat1,
            flat2,
            exact_label: opts.label_mode == LabelMode::ExactLabel,
            f,
            width,
        }
    }

    fn label_ok(&self, d1: u32, d2: u32) -> bool {
        !self.exact_label
            || self.flat1.nodes[d1 as usize].label == self.flat2.nodes[d2 as usize].label
    }

    fn pair_iou(&self, u: usize, v: usize) -> f64 {
        let a = &self.flat1.nodes[u];
        let b = &self.flat2.nodes[v];
        let lo = a.start.max(b.start);
        let hi = a.end.min(b.end);
        let inter = if hi > lo { hi - lo } else { 0.0 };
        inter / ((a.end - a.start) + (b.end - b.start) - inter)
    }

    /// Sweeps the descendant-sequence problem for the pair whose contexts
    /// are `c1`, `c2`. Ties prefer skipping over pairing and earlier
    /// descendants over later ones, which keeps output deterministic and
    /// drops zero-gain pairs.
    fn sweep(
        &self,
        c1: &DescCtx,
        c2: &DescCtx,
        g: &mut Vec<f64>,
        mut rec: Option<&mut Vec<Cell>>,
    ) -> f64 {
        if c1.is_empty() || c2.is_empty() {
            return 0.0;
        }
        let (k1, k2) = (c1.grid.len(), c2.grid.len());
        g.clear();
        g.resize(k1 * k2, 0.0);
        if let Some(r) = rec.as_deref_mut() {
            r.clear();
            r.resize(k1 * k2, Cell::Stop);
        }
        for x in 0..k1 {
            for y in 0..k2 {
                let mut best = 0.0;
                let mut cell = Cell::Stop;
                if x > 0 && g[(x - 1) * k2 + y] > best {
                    best = g[(x - 1) * k2 + y];
                    cell = Cell::Left;
                }
                if y > 0 && g[x * k2 + y - 1] > best {
                    best = g[x * k2 + y - 1];
                    cell = Cell::Up;
                }
                for e1 in &c1.groups[x] {
                    for e2 in &c2.groups[y] {
                        if !self.label_ok(e1.node, e2.node) {
                            continue;
                        }
                        let prefix = if e1.srank >= 0 && e2.srank >= 0 {
                            g[e1.srank as usize * k2 + e2.srank as usize]
                        } else {
                            0.0
                        };
                        let cand =
                            self.f[e1.node as usize * self.width + e2.node as usize] + prefix;
                        if cand > best {
                            best = cand;
                            cell = Cell::Pair {
                                d1: e1.node,
                                d2: e2.node,
                                sr1: e1.srank,
                                sr2: e2.srank,
                            };
                        }
                    }
                }
                g[x * k2 + y] = best;
                if let Some(r) = rec.as_deref_mut() {
                    r[x * k2 + y] = cell;
                }
            }
        }
        g[k1 * k2 - 1]
    }

    /// Fills the root-aligned table bottom-up and returns the optimal
    /// total weight over real nodes.
    fn solve(&mut self) -> f64 {
        let n1 = self.flat1.nodes.len();
        let n2 = self.flat2.nodes.len();
        let mut g = Vec::new();
        for u in (0..n1).rev() {
            if !self.flat1.nodes[u].active {
                continue;
            }
            for v in (0..n2).rev() {
                if !self.flat2.nodes[v].active {
                    continue;
                }
                if self.exact_label && self.flat1.nodes[u].label != self.flat2.nodes[v].label {
                    continue;
                }
                let seq = self.sweep(&self.flat1.ctx[u], &self.flat2.ctx[v], &mut g, None);
                self.f[u * self.width + v] = self.pair_iou(u, v) + seq;
            }
        }
        // Dummy roots share an envelope, so their forced pair contributes
        // IoU 1 to the internal objective; only the sequence part counts.
        self.sweep(&self.flat1.ctx[n1], &self.flat2.ctx[n2], &mut g, None)
    }

    /// Reconstructs the pairs chosen for the (u, v) subproblem; `u == n1`
    /// and `v == n2` address the dummy roots.
    fn collect(&self, u: usize, v: usize, out: &mut Vec<AlignedPair>) {
        let n1 = self.flat1.nodes.len();
        if u < n1 {
            out.push(AlignedPair {
                index1: u,
                index2: v,
                iou: self.pair_iou(u, v),
            });
        }
        let c1 = &self.flat1.ctx[u];
        let c2 = &self.flat2.ctx[v];
        if c1.is_empty() || c2.is_empty() {
            return;
        }
        let mut g = Vec::new();
        let mut rec = Vec::new();
        self.sweep(c1, c2, &mut g, Some(&mut rec));
        let k2 = c2.grid.len();
        let (mut x, mut y) = (c1.grid.len() - 1, k2 - 1);
        loop {
            match rec[x * k2 + y] {
                Cell::Stop => break,
                Cell::Left => x -= 1,
                Cell::Up => y -= 1,
                Cell::Pair { d1, d2, sr1, sr2 } => {
                    self.collect(d1 as usize, d2 as usize, out);
                    if sr1 >= 0 && sr2 >= 0 {
                        x = sr1 as usize;
                        y = sr2 as usize;
                    } else {
                        break;
                    }
                }
            }
        }
    }
}

fn validated_flats(
    t1: &SegmentTree,
    t2: &SegmentTree,
    opts: &AlignOptions,
) -> Result<(Flat, Flat), AlignError> {
    let v1 = t1.validate_with_epsilon(opts.epsilon);
    if !v1.is_empty() {
        return Err(AlignError::InvalidTree {
            which: 1,
            violations: v1,
        });
    }
    let v2 = t2.validate_with_epsilon(opts.epsilon);
    if !v2.is_empty() {
        return Err(AlignError::InvalidTree {
            which: 2,
            violations: v2,
        });
    }
    let mut labels = BTreeMap::new();
    Ok((
        flatten(t1, opts, &mut labels),
        flatten(t2, opts, &mut labels),
    ))
}

/// Computes an optimal conflict-free alignment between the real nodes of
/// the two trees. Dummy roots are internal scaffolding and never appear in
/// the output. Ties are broken deterministically (skip-preferred, then the
/// candidate pair encountered first in endpoint order).
pub fn max_alignment(
    t1: &SegmentTree,
    t2: &SegmentTree,
    opts: &AlignOptions,
) -> Result<Alignment, AlignError> {
    let (flat1, flat2) = validated_flats(t1, t2, opts)?;
    let mut solver = Solver::new(&flat1, &flat2, opts);
    let total_weight = solver.solve();
    let mut pairs = Vec::new();
    solver.collect(flat1.nodes.len(), flat2.nodes.len(), &mut pairs);
    pairs.sort_unstable_by(|a, b| (a.index1, a.index2).cmp(&(b.index1, b.index2)));
    let alignment = Alignment {
        pairs,
        total_weight,
    };
    debug_assert!(alignment.verify(t1, t2, opts).is_ok());
    Ok(alignment)
}

/// The normalized alignment score `2 * weight / (n1 + n2)`.
pub fn struct_iou(
    t1: &SegmentTree,
    t2: &SegmentTree,
    opts: &AlignOptions,
) -> Result<StructIouScore, AlignError> {
    let (flat1, flat2) = validated_flats(t1, t2, opts)?;
    let n1 = flat1.active_count;
    let n2 = flat2.active_count;
    if n1 + n2 == 0 {
        return Err(AlignError::NoAlignableNodes);
    }
    let mut solver = Solver::new(&flat1, &flat2, opts);
    let weight = solver.solve();
    Ok(StructIouScore {
        score: 2.0 * weight / (n1 + n2) as f64,
        weight,
        n1,
        n2,
    })
}

/// Scores an index-matched corpus: the corpus score weights each sentence
/// by its combined node count, and the reduction order is fixed so results
/// do not depend on scheduling.
pub fn corpus_struct_iou(
    pairs: &[(&SegmentTree, &SegmentTree)],
    opts: &AlignOptions,
) -> Result<CorpusScore, AlignError> {
    if pairs.is_empty() {
        return Err(AlignError::EmptyCorpus);
    }
    let mut sentences = Vec::with_capacity(pairs.len());
    for (t1, t2) in pairs {
        sentences.push(struct_iou(t1, t2, opts)?);
    }
    Ok(aggregate(sentences))
}

/// Folds per-sentence scores into the corpus report; exposed so parallel
/// callers can score sentences themselves and still reduce identically.
pub fn aggregate(sentences: Vec<StructIouScore>) -> CorpusScore {
    let mut weighted = 0.0;
    let mut weight_sum = 0.0;
    let mut mean = 0.0;
    for s in &sentences {
        let w = (s.n1 + s.n2) as f64;
        weighted += w * s.score;
        weight_sum += w;
        mean += s.score;
    }
    CorpusScore {
        corpus: weighted / weight_sum,
        sentence_mean: mean / sentences.len() as f64,
        sentences,
    }
}
