//! Word-segmentation metrics and consensus output selection.
//!
//! Boundary precision/recall/F1 compares hypothesis word boundaries against
//! reference boundaries under a time tolerance; segmentation mIoU matches
//! word spans one-to-one by interval IoU; consensus (minimum-Bayes-risk)
//! selection picks the candidate minimizing its summed pairwise loss
//! against all candidates.

use alloc::vec::Vec;
use core::fmt;

use crate::bracketed::BracketedTree;
use crate::interval::{Interval, DEFAULT_EPSILON};
use crate::matching::max_weight_assignment;
use crate::parseval::{extract_brackets, score_pair, ExtractOptions, PrfScore};
use crate::tree::{BoundarySequence, TreeError};

#[derive(Debug, Clone, PartialEq)]
pub enum SegEvalError {
    /// Spans `index - 1` and `index` overlap after sorting.
    OverlappingSpans { index: usize },
    /// Selection needs at least one candidate.
    EmptyCandidates,
}

impl fmt::Display for SegEvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SegEvalError::OverlappingSpans { index } => {
                write!(f, "span {index} overlaps its predecessor")
            }
            SegEvalError::EmptyCandidates => write!(f, "candidate list is empty"),
        }
    }
}

impl core::error::Error for SegEvalError {}

/// Sorted, pairwise-disjoint word spans of one segmentation proposal.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanSet {
    spans: Vec<Interval>,
}

impl SpanSet {
    pub fn new(spans: Vec<Interval>) -> Result<Self, SegEvalError> {
        Self::with_epsilon(spans, DEFAULT_EPSILON)
    }

    pub fn with_epsilon(mut spans: Vec<Interval>, eps: f64) -> Result<Self, SegEvalError> {
        spans.sort_unstable_by(|a, b| {
            a.start()
                .total_cmp(&b.start())
                .then(a.end().total_cmp(&b.end()))
        });
        for i in 1..spans.len() {
            if !spans[i - 1].is_disjoint(&spans[i], eps) {
                return Err(SegEvalError::OverlappingSpans { index: i });
            }
        }
        Ok(Self { spans })
    }

    pub fn from_boundaries(b: &BoundarySequence) -> Self {
        let spans = (0..b.len()).map(|i| b.word_interval(i)).collect();
        Self { spans }
    }

    pub fn spans(&self) -> &[Interval] {
        &self.spans
    }

    pub fn len(&self) -> usize {
        self.spans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }
}

/// Boundary precision/recall/F1 at a time tolerance (default 20 ms at the
/// call sites). Only internal boundaries count; the utterance start and end
/// are given, not predicted. Matching is one-to-one: the greedy two-pointer
/// sweep is a maximum matching on this threshold-chain bipartite graph.
pub fn boundary_prf(
    reference: &BoundarySequence,
    hypothesis: &BoundarySequence,
    tolerance: f64,
) -> PrfScore {
    boundary_prf_with_epsilon(reference, hypothesis, tolerance, DEFAULT_EPSILON)
}

pub fn boundary_prf_with_epsilon(
    reference: &BoundarySequence,
    hypothesis: &BoundarySequence,
    tolerance: f64,
    eps: f64,
) -> PrfScore {
    let r = reference.internal();
    let h = hypothesis.internal();
    let matched = greedy_boundary_matches(r, h, tolerance, eps);
    PrfScore::from_counts(matched as u64, h.len() as u64, r.len() as u64)
}

pub(crate) fn greedy_boundary_matches(r: &[f64], h: &[f64], tolerance: f64, eps: f64) -> usize {
    let mut matched = 0usize;
    let (mut i, mut j) = (0usize, 0usize);
    while i < r.len() && j < h.len() {
        if (r[i] - h[j]).abs() <= tolerance + eps {
            matched += 1;
            i += 1;
            j += 1;
        } else if r[i] < h[j] {
            i += 1;
        } else {
            j += 1;
        }
    }
    matched
}

/// Denominator convention for [`segment_miou_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MiouDenominator {
    /// `max(|s1|, |s2|)`: unmatched spans are penalized, so the score is 1
    /// only for identical segmentations. The default.
    MaxCount,
    /// Matched pairs only; count mismatches are invisible.
    MatchedPairs,
}

/// Mean IoU over an optimal one-to-one matching of word spans.
pub fn segment_miou(s1: &SpanSet, s2: &SpanSet) -> f64 {
    segment_miou_with(s1, s2, MiouDenominator::MaxCount)
}

pub fn segment_miou_with(s1: &SpanSet, s2: &SpanSet, denom: MiouDenominator) -> f64 {
    if s1.is_empty() && s2.is_empty() {
        return 1.0;
    }
    if s1.is_empty() || s2.is_empty() {
        return 0.0;
    }
    let weights: Vec<Vec<f64>> = s1
        .spans
        .iter()
        .map(|a| s2.spans.iter().map(|b| a.iou(b)).collect())
        .collect();
    let assignment = max_weight_assignment(&weights);
    match denom {
        MiouDenominator::MaxCount => assignment.total / s1.len().max(s2.len()) as f64,
        MiouDenominator::MatchedPairs => {
            let pairs = assignment.row_to_col.iter().flatten().count();
            if pairs == 0 {
                0.0
            } else {
                assignment.total / pairs as f64
            }
        }
    }
}

/// Selects the candidate with minimum summed pairwise loss against all
/// candidates (self included; its self-loss is common to every row). Ties
/// go to the lowest index.
pub fn mbr_select_by<T, F>(candidates: &[T], mut loss: F) -> Result<usize, SegEvalError>
where
    F: FnMut(&T, &T) -> f64,
{
    if candidates.is_empty() {
        return Err(SegEvalError::EmptyCandidates);
    }
    let mut best = 0usize;
    let mut best_risk = f64::INFINITY;
    for (i, a) in candidates.iter().enumerate() {
        let mut risk = 0.0;
        for b in candidates {
            risk += loss(a, b);
        }
        if risk < best_risk {
            best_risk = risk;
            best = i;
        }
    }
    Ok(best)
}

/// Consensus segmentation: loss is `-mIoU`.
pub fn mbr_select_spans(candidates: &[SpanSet]) -> Result<usize, SegEvalError> {
    mbr_select_by(candidates, |a, b| -segment_miou(a, b))
}

/// Consensus parse: loss is `1 - F1` over brackets. Grammar-induction
/// outputs are conventionally compared unlabeled.
pub fn mbr_select_trees(
    candidates: &[BracketedTree],
    opts: &ExtractOptions,
) -> Result<usize, MbrTreeError> {
    if candidates.is_empty() {
        return Err(MbrTreeError::Select(SegEvalError::EmptyCandidates));
    }
    let sets = candidates
        .iter()
        .map(|t| extract_brackets(t, opts))
        .collect::<Result<Vec<_>, _>>()
        .map_err(MbrTreeError::Tree)?;
    mbr_select_by(&sets, |a, b| 1.0 - score_pair(a, b).f1).map_err(MbrTreeError::Select)
}

#[derive(Debug, Clone, PartialEq)]
pub enum MbrTreeError {
    Tree(TreeError),
    Select(SegEvalError),
}

impl fmt::Display for MbrTreeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MbrTreeError::Tree(e) => e.fmt(f),
            MbrTreeError::Select(e) => e.fmt(f),
        }
    }
}

impl core::error::Error for MbrTreeError {}

#[cfg(test)]
mod tests {
    use super::*;

    fn bounds(vals: &[f64]) -> BoundarySequence {
        let words = (0..vals.len() - 1).map(|i| format!("w{i}")).collect();
        BoundarySequence::new(words, vals.to_vec()).unwrap()
    }

    fn iv(s: f64, e: f64) -> Interval {
        Interval::new(s, e).unwrap()
    }

    #[test]
    fn boundary_prf_examples() {
        // Internal boundaries {0.5, 1.0} vs {0.51, 1.5}: one inside the
        // 20 ms window, one not.
        let r = bounds(&[0.0, 0.5, 1.0, 2.0]);
        let h = bounds(&[0.0, 0.51, 1.5, 2.0]);
        let s = boundary_prf(&r, &h, 0.020);
        assert_eq!((s.precision, s.recall, s.f1), (0.5, 0.5, 0.5));

        let s = boundary_prf(&r, &r, 0.020);
        assert_eq!((s.precision, s.recall, s.f1), (1.0, 1.0, 1.0));

        // One-to-one matching forbids double credit.
        let r = bounds(&[0.0, 1.0, 2.0]);
        let h = bounds(&[0.0, 0.98, 1.02, 2.0]);
        let s = boundary_prf(&r, &h, 0.020);
        assert_eq!(s.matched, 1);
        assert_eq!(s.precision, 0.5);
        assert_eq!(s.recall, 1.0);
    }

    #[test]
    fn boundary_prf_single_word_utterances() {
        let r = bounds(&[0.0, 1.0]);
        let s = boundary_prf(&r, &r, 0.020);
        assert_eq!((s.precision, s.recall, s.f1), (1.0, 1.0, 1.0));
        let h = bounds(&[0.0, 0.4, 1.0]);
        let s = boundary_prf(&r, &h, 0.020);
        assert_eq!((s.precision, s.recall, s.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn miou_examples() {
        let a = SpanSet::new(vec![iv(0.0, 1.0), iv(1.0, 2.0)]).unwrap();
        assert_eq!(segment_miou(&a, &a), 1.0);
        let b = SpanSet::new(vec![iv(0.0, 2.0)]).unwrap();
        assert!((segment_miou(&a, &b) - 0.25).abs() < 1e-12);
        let c = SpanSet::new(vec![iv(5.0, 6.0), iv(6.0, 7.0)]).unwrap();
        assert_eq!(segment_miou(&a, &c), 0.0);
    }

    #[test]
    fn miou_symmetry_and_denominators() {
        let a = SpanSet::new(vec![iv(0.0, 1.0), iv(1.0, 2.0), iv(2.5, 3.0)]).unwrap();
        let b = SpanSet::new(vec![iv(0.2, 1.1), iv(1.4, 2.2)]).unwrap();
        let ab = segment_miou(&a, &b);
        assert_eq!(ab, segment_miou(&b, &a));
        assert!((0.0..=1.0).contains(&ab));
        let matched_only = segment_miou_with(&a, &b, MiouDenominator::MatchedPairs);
        assert!(matched_only >= ab);
    }

    #[test]
    fn spanset_rejects_overlap() {
        assert!(matches!(
            SpanSet::new(vec![iv(0.0, 2.0), iv(1.0, 3.0)]),
            Err(SegEvalError::OverlappingSpans { index: 1 })
        ));
    }

    #[test]
    fn mbr_tie_break_and_consensus() {
        let a = SpanSet::new(vec![iv(0.0, 1.0), iv(1.0, 2.0)]).unwrap();
        let b = SpanSet::new(vec![iv(0.0, 2.0)]).unwrap();
        assert_eq!(
            mbr_select_spans(&[a.clone(), a.clone(), a.clone()]).unwrap(),
            0
        );
        assert_eq!(
            mbr_select_spans(&[a.clone(), a.clone(), b.clone()]).unwrap(),
            0
        );
        assert_eq!(mbr_select_spans(&[a.clone(), b.clone()]).unwrap(), 0);
        // Majority wins regardless of position.
        assert_eq!(mbr_select_spans(&[b.clone(), a.clone(), a]).unwrap(), 1);
        assert!(matches!(
            mbr_select_spans(&[]),
            Err(SegEvalError::EmptyCandidates)
        ));
    }

    #[test]
    fn mbr_over_trees() {
        let t1 = BracketedTree::parse("(S (NP (NN a) (NN b)) (VP (V c)))").unwrap();
        let t2 = BracketedTree::parse("(S (NP (NN a)) (VP (NN b) (V c)))").unwrap();
        let opts = ExtractOptions {
            labeled: false,
            ..ExtractOptions::default()
        };
        let cands = [t1.clone(), t2, t1];
        // Candidates 0 and 2 agree; consensus picks index 0.
        assert_eq!(mbr_select_trees(&cands, &opts).unwrap(), 0);
    }
}
