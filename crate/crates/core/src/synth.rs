//! Synthetic utterances and trees for robustness studies and property
//! suites.
//!
//! Everything here is deterministic given the caller's generator state.
//! Relaxed-tree endpoints are drawn from a 1/16 grid so coordinates are
//! exactly representable.

use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};

use crate::interval::Interval;
use crate::rng::RandomSource;
use crate::tree::{BoundarySequence, SegmentNode, SegmentTree, Unit};

/// Random word boundaries: `n_words` words with durations uniform in
/// `[min_dur, max_dur)`, starting at `start`.
pub fn random_boundaries(
    rng: &mut impl RandomSource,
    n_words: usize,
    start: f64,
    min_dur: f64,
    max_dur: f64,
) -> BoundarySequence {
    let words: Vec<String> = (0..n_words).map(|i| format!("w{i}")).collect();
    let mut boundaries = Vec::with_capacity(n_words + 1);
    boundaries.push(start);
    let mut cursor = start;
    for _ in 0..n_words {
        cursor += min_dur + rng.next_unit() * (max_dur - min_dur);
        boundaries.push(cursor);
    }
    BoundarySequence::new(words, boundaries).expect("positive durations")
}

/// Random binary parse over the words of `bounds`: every multi-word span
/// splits at a uniformly chosen internal boundary.
pub fn random_binary_tree(
    rng: &mut impl RandomSource,
    bounds: &BoundarySequence,
    labels: &[&str],
) -> SegmentTree {
    assert!(!bounds.is_empty(), "utterance needs at least one word");
    let root = binary_span(rng, bounds, 0, bounds.len(), labels);
    SegmentTree::new(root, Unit::Seconds)
}

fn pick_label(rng: &mut impl RandomSource, labels: &[&str]) -> String {
    if labels.is_empty() {
        String::new()
    } else {
        String::from(labels[(rng.next_u64() % labels.len() as u64) as usize])
    }
}

fn binary_span(
    rng: &mut impl RandomSource,
    bounds: &BoundarySequence,
    lo: usize,
    hi: usize,
    labels: &[&str],
) -> SegmentNode {
    let interval = Interval::with_epsilon(bounds.boundaries()[lo], bounds.boundaries()[hi], 0.0)
        .expect("strictly increasing boundaries");
    if hi - lo == 1 {
        return SegmentNode::leaf(pick_label(rng, labels), interval);
    }
    let cut = lo + 1 + (rng.next_u64() % (hi - lo - 1) as u64) as usize;
    let children = vec![
        binary_span(rng, bounds, lo, cut, labels),
        binary_span(rng, bounds, cut, hi, labels),
    ];
    SegmentNode::new(pick_label(rng, labels), interval, children)
}

/// Random relaxed segment tree with up to `max_nodes` nodes over a 1/16
/// coordinate grid inside `(lo, hi)`. Exercises gaps between siblings,
/// unary chains, and mixed arities.
pub fn random_relaxed_tree(
    rng: &mut impl RandomSource,
    max_nodes: usize,
    labels: &[&str],
    lo: f64,
    hi: f64,
) -> SegmentTree {
    let mut budget = max_nodes.max(1) - 1;
    let root = relaxed_node(rng, labels, lo, hi, &mut budget, 0);
    SegmentTree::new(root, Unit::Seconds)
}

const GRID_STEP: f64 = 1.0 / 16.0;

fn snap(x: f64) -> f64 {
    (x / GRID_STEP + 0.5) as i64 as f64 * GRID_STEP
}

fn relaxed_node(
    rng: &mut impl RandomSource,
    labels: &[&str],
    lo: f64,
    hi: f64,
    budget: &mut usize,
    depth: usize,
) -> SegmentNode {
    let interval = Interval::with_epsilon(lo, hi, 0.0).expect("grid spans are non-empty");
    let cells = ((hi - lo) / GRID_STEP + 0.5) as usize;
    let leaf = *budget == 0 || depth >= 4 || cells < 2 || rng.next_unit() < 0.25;
    if leaf {
        return SegmentNode::leaf(pick_label(rng, labels), interval);
    }
    // Unary chain: a single child spans the whole interval.
    if *budget >= 1 && rng.next_unit() < 0.15 {
        *budget -= 1;
        let child = relaxed_node(rng, labels, lo, hi, budget, depth + 1);
        return SegmentNode::new(pick_label(rng, labels), interval, vec![child]);
    }
    let want = 2 + (rng.next_u64() % 2) as usize;
    let k = want.min(*budget).min(cells);
    if k < 2 {
        return SegmentNode::leaf(pick_label(rng, labels), interval);
    }
    *budget -= k;
    // Children tile the interval; interior cut points may leave gaps.
    let mut cuts: Vec<f64> = Vec::with_capacity(k + 1);
    cuts.push(lo);
    for i in 1..k {
        let frac = i as f64 / k as f64;
        let jitter = (rng.next_unit() - 0.5) * (0.5 / k as f64);
        let cut = snap(lo + (hi - lo) * (frac + jitter));
        cuts.push(cut.max(lo + GRID_STEP).min(hi - GRID_STEP));
    }
    cuts.push(hi);
    cuts.sort_unstable_by(f64::total_cmp);
    cuts.dedup();
    let mut children = Vec::new();
    for w in cuts.windows(2) {
        let (mut s, e) = (w[0], w[1]);
        // Occasionally shave the left edge of an interior child to open a
        // gap between siblings; the first child keeps the envelope start.
        if !children.is_empty() && e - s >= 2.0 * GRID_STEP && rng.next_unit() < 0.3 {
            s += GRID_STEP;
        }
        if e - s >= GRID_STEP / 2.0 {
            children.push(relaxed_node(rng, labels, s, e, budget, depth + 1));
        }
    }
    if children.len() < 2 {
        return SegmentNode::leaf(pick_label(rng, labels), interval);
    }
    // Span law: the envelope must match the children exactly.
    let end = children.last().unwrap().interval().end();
    let start = children.first().unwrap().interval().start();
    debug_assert_eq!(start, lo);
    debug_assert_eq!(end, hi);
    SegmentNode::new(pick_label(rng, labels), interval, children)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Xoshiro256StarStar;

    #[test]
    fn boundaries_are_valid() {
        let mut rng = Xoshiro256StarStar::from_seed(11);
        for n in 1..30 {
            let b = random_boundaries(&mut rng, n, 0.25, 0.05, 0.4);
            assert_eq!(b.len(), n);
            assert_eq!(b.boundaries()[0], 0.25);
        }
    }

    #[test]
    fn binary_trees_validate() {
        let mut rng = Xoshiro256StarStar::from_seed(12);
        let labels = ["NP", "VP", "PP", "S"];
        for n in 1..25 {
            let b = random_boundaries(&mut rng, n, 0.0, 0.1, 0.5);
            let t = random_binary_tree(&mut rng, &b, &labels);
            assert!(t.validate().is_empty());
            assert_eq!(t.node_count(), 2 * n - 1);
        }
    }

    #[test]
    fn relaxed_trees_validate() {
        let mut rng = Xoshiro256StarStar::from_seed(13);
        let labels = ["A", "B", "C", "D"];
        for trial in 0..200 {
            let t = random_relaxed_tree(&mut rng, 2 + trial % 8, &labels, 0.0, 8.0);
            assert!(t.validate().is_empty(), "trial {trial}: {:?}", t.validate());
            assert!(t.node_count() <= 2 + trial % 8);
        }
    }
}
