//! Seeded boundary perturbations for robustness studies.
//!
//! Three procedures, each controlled by a level `delta` in `[0, 1]` and
//! consuming the random stream in a fixed order so results are reproducible
//! (see [`crate::rng`] for the generator contract):
//!
//! * **noise**: each internal boundary `b[i]`, in order `i = 1..n-1`, moves
//!   toward a neighbor: draw `r ~ U(-delta, delta)` and set
//!   `b[i] += |r| * (b[i + sgn(r)] - b[i])` against the current boundary
//!   values (earlier updates are visible to later ones);
//! * **insert**: each word, in order, is split with probability `delta` at
//!   a position drawn uniformly inside it, the leaf becoming two sibling
//!   leaves under its parent;
//! * **delete**: each internal boundary, in order, is dropped with
//!   probability `delta`, merging the neighboring words.
//!
//! Utterance endpoints are never touched. Draws that would produce a
//! degenerate boundary (closer than the coordinate tolerance to a neighbor)
//! are rejected and redrawn.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::interval::{Interval, DEFAULT_EPSILON};
use crate::rng::{uniform_open, uniform_signed, RandomSource};
use crate::tree::{BoundarySequence, SegmentNode, SegmentTree};

/// A perturbation request: which procedure, how strongly, which seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbSpec {
    pub kind: PerturbKind,
    pub delta: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerturbKind {
    Noise,
    Insert,
    Delete,
}

impl fmt::Display for PerturbKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PerturbKind::Noise => "noise",
            PerturbKind::Insert => "insert",
            PerturbKind::Delete => "delete",
        })
    }
}

impl PerturbSpec {
    /// Validates `delta` into `[0, 1]`.
    pub fn new(kind: PerturbKind, delta: f64, seed: u64) -> Result<Self, InvalidDelta> {
        if (0.0..=1.0).contains(&delta) {
            Ok(Self { kind, delta, seed })
        } else {
            Err(InvalidDelta(delta))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvalidDelta(pub f64);

impl fmt::Display for InvalidDelta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "perturbation level {} is outside [0, 1]", self.0)
    }
}

impl core::error::Error for InvalidDelta {}

/// Moves each internal boundary toward a random neighbor by a random
/// fraction of the gap. One signed draw per internal boundary; `sgn(0)` is
/// positive, though a zero draw leaves the boundary in place either way.
pub fn perturb_noise(
    bounds: &BoundarySequence,
    delta: f64,
    rng: &mut impl RandomSource,
) -> BoundarySequence {
    assert!((0.0..=1.0).contains(&delta), "delta must be in [0, 1]");
    let mut b = bounds.boundaries().to_vec();
    let n = bounds.len();
    for i in 1..n {
        if delta == 0.0 {
            continue;
        }
        loop {
            let r = uniform_signed(rng, delta);
            let neighbor = if r >= 0.0 { b[i + 1] } else { b[i - 1] };
            let moved = b[i] + r.abs() * (neighbor - b[i]);
            if moved - b[i - 1] > DEFAULT_EPSILON && b[i + 1] - moved > DEFAULT_EPSILON {
                b[i] = moved;
                break;
            }
        }
    }
    BoundarySequence::new(bounds.words().to_vec(), b)
        .expect("noised boundaries stay strictly increasing")
}

/// Splits each word with probability `delta` at a uniform position inside
/// it. A split leaf is replaced by two sibling leaves carrying its label;
/// when the root itself is the only leaf, the two pieces become its
/// children instead.
pub fn perturb_insert(tree: &SegmentTree, delta: f64, rng: &mut impl RandomSource) -> SegmentTree {
    assert!((0.0..=1.0).contains(&delta), "delta must be in [0, 1]");
    let root = insert_walk(tree.root(), delta, rng);
    SegmentTree::new(root, tree.unit())
}

fn split_point(interval: Interval, rng: &mut impl RandomSource) -> f64 {
    loop {
        let cut = uniform_open(rng, interval.start(), interval.end());
        if cut - interval.start() > DEFAULT_EPSILON && interval.end() - cut > DEFAULT_EPSILON {
            return cut;
        }
    }
}

fn insert_walk(node: &SegmentNode, delta: f64, rng: &mut impl RandomSource) -> SegmentNode {
    if node.is_leaf() {
        // Root-is-leaf case: the split pieces become children of the root.
        if rng.next_unit() < delta {
            let cut = split_point(node.interval(), rng);
            let left = Interval::with_epsilon(node.interval().start(), cut, 0.0).unwrap();
            let right = Interval::with_epsilon(cut, node.interval().end(), 0.0).unwrap();
            return SegmentNode::new(
                node.label(),
                node.interval(),
                [
                    SegmentNode::leaf(node.label(), left),
                    SegmentNode::leaf(node.label(), right),
                ]
                .into(),
            );
        }
        return node.clone();
    }
    let mut children = Vec::with_capacity(node.children().len());
    for c in node.children() {
        if c.is_leaf() {
            if rng.next_unit() < delta {
                let cut = split_point(c.interval(), rng);
                let left = Interval::with_epsilon(c.interval().start(), cut, 0.0).unwrap();
                let right = Interval::with_epsilon(cut, c.interval().end(), 0.0).unwrap();
                children.push(SegmentNode::leaf(c.label(), left));
                children.push(SegmentNode::leaf(c.label(), right));
            } else {
                children.push(c.clone());
            }
        } else {
            children.push(insert_walk(c, delta, rng));
        }
    }
    SegmentNode::new(node.label(), node.interval(), children)
}

/// Drops each internal boundary with probability `delta`; words around a
/// dropped boundary merge, their texts joined by a space. Endpoints are
/// never deleted.
pub fn perturb_delete(
    bounds: &BoundarySequence,
    delta: f64,
    rng: &mut impl RandomSource,
) -> BoundarySequence {
    assert!((0.0..=1.0).contains(&delta), "delta must be in [0, 1]");
    let n = bounds.len();
    let old = bounds.boundaries();
    let mut boundaries = Vec::with_capacity(n + 1);
    let mut words: Vec<String> = Vec::with_capacity(n);
    boundaries.push(old[0]);
    if n > 0 {
        let mut acc = bounds.words()[0].clone();
        for i in 1..n {
            if rng.next_unit() < delta {
                acc.push(' ');
                acc.push_str(&bounds.words()[i]);
            } else {
                boundaries.push(old[i]);
                words.push(acc);
                acc = bounds.words()[i].clone();
            }
        }
        words.push(acc);
    }
    boundaries.push(old[n]);
    BoundarySequence::new(words, boundaries)
        .expect("a subset of strictly increasing boundaries is strictly increasing")
}
