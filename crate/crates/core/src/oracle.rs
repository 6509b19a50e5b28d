//! Brute-force alignment oracle.
//!
//! Exhaustively enumerates one-to-one node pair sets, filters them with the
//! conflict predicate applied directly to ancestor relations, and returns a
//! maximum-weight survivor. Deliberately shares no machinery with the
//! dynamic program it cross-checks; a size guard keeps the exponential
//! enumeration honest.

use alloc::vec;
use alloc::vec::Vec;

use crate::align::{AlignError, AlignOptions, AlignedPair, Alignment, LabelMode, NodeInfo};
use crate::tree::SegmentTree;

/// Largest combined node count the oracle will enumerate.
pub const ORACLE_MAX_NODES: usize = 20;

struct Search<'a> {
    info1: &'a NodeInfo,
    info2: &'a NodeInfo,
    nodes1: Vec<usize>,
    nodes2: Vec<usize>,
    /// iou[i][j] over active-node positions; 0 for label-incompatible pairs.
    iou: Vec<Vec<f64>>,
    /// Best achievable weight from position i onward.
    tail_bound: Vec<f64>,
    chosen: Vec<(usize, usize)>,
    used2: Vec<bool>,
    best_weight: f64,
    best_pairs: Vec<(usize, usize)>,
}

impl<'a> Search<'a> {
    fn conflicted(&self, (p1, q1): (usize, usize), (p2, q2): (usize, usize)) -> bool {
        let anc1 = self.info1.is_ancestor(self.nodes1[p1], self.nodes1[p2]);
        let anc2 = self.info2.is_ancestor(self.nodes2[q1], self.nodes2[q2]);
        let desc1 = self.info1.is_ancestor(self.nodes1[p2], self.nodes1[p1]);
        let desc2 = self.info2.is_ancestor(self.nodes2[q2], self.nodes2[q1]);
        anc1 != anc2 || desc1 != desc2
    }

    fn run(&mut self, i: usize, weight: f64) {
        if weight > self.best_weight {
            self.best_weight = weight;
            self.best_pairs = self.chosen.clone();
        }
        if i == self.nodes1.len() || weight + self.tail_bound[i] <= self.best_weight {
            return;
        }
        for j in 0..self.nodes2.len() {
            if self.used2[j] {
                continue;
            }
            let w = self.iou[i][j];
            if w <= 0.0 {
                continue;
            }
            let candidate = (i, j);
            if self
                .chosen
                .iter()
                .any(|&prev| self.conflicted(prev, candidate))
            {
                continue;
            }
            self.used2[j] = true;
            self.chosen.push(candidate);
            self.run(i + 1, weight + w);
            self.chosen.pop();
            self.used2[j] = false;
        }
        // Leave node i unmatched.
        self.run(i + 1, weight);
    }
}

/// Maximum-weight conflict-free alignment by exhaustive enumeration.
/// Agrees with [`crate::align::max_alignment`] on total weight; the pair
/// set itself may differ when several alignments are optimal.
pub fn oracle_alignment(
    t1: &SegmentTree,
    t2: &SegmentTree,
    opts: &AlignOptions,
) -> Result<Alignment, AlignError> {
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
    let info1 = NodeInfo::collect(t1);
    let info2 = NodeInfo::collect(t2);
    let keep = |info: &NodeInfo, i: usize| opts.include_leaves || !info.is_leaf(i);
    let nodes1: Vec<usize> = (0..info1.len()).filter(|&i| keep(&info1, i)).collect();
    let nodes2: Vec<usize> = (0..info2.len()).filter(|&i| keep(&info2, i)).collect();
    let total = nodes1.len() + nodes2.len();
    if total > ORACLE_MAX_NODES {
        return Err(AlignError::OracleTooLarge {
            nodes: total,
            limit: ORACLE_MAX_NODES,
        });
    }

    let iou: Vec<Vec<f64>> = nodes1
        .iter()
        .map(|&i| {
            nodes2
                .iter()
                .map(|&j| {
                    if opts.label_mode == LabelMode::ExactLabel && info1.label(i) != info2.label(j)
                    {
                        0.0
                    } else {
                        info1.interval(i).iou(&info2.interval(j))
                    }
                })
                .collect()
        })
        .collect();
    let mut tail_bound = vec![0.0; nodes1.len() + 1];
    for i in (0..nodes1.len()).rev() {
        let row_max = iou[i].iter().fold(0.0f64, |a, &b| a.max(b));
        tail_bound[i] = tail_bound[i + 1] + row_max;
    }

    let n2 = nodes2.len();
    let mut search = Search {
        info1: &info1,
        info2: &info2,
        nodes1,
        nodes2,
        iou,
        tail_bound,
        chosen: Vec::new(),
        used2: vec![false; n2],
        best_weight: 0.0,
        best_pairs: Vec::new(),
    };
    search.run(0, 0.0);

    let mut pairs: Vec<AlignedPair> = search
        .best_pairs
        .iter()
        .map(|&(i, j)| AlignedPair {
            index1: search.nodes1[i],
            index2: search.nodes2[j],
            iou: search.iou[i][j],
        })
        .collect();
    pairs.sort_unstable_by(|a, b| (a.index1, a.index2).cmp(&(b.index1, b.index2)));
    Ok(Alignment {
        pairs,
        total_weight: search.best_weight,
    })
}
