//! Evaluation metrics for constituency parses over continuous spans and
//! discrete sequences.
//!
//! The centerpiece is the structured-alignment score of [`align`]: an
//! optimal one-to-one, ancestry-consistent matching between the nodes of
//! two relaxed segment trees, weighted by interval IoU and normalized so
//! identical trees score 1. Around it sit the classic bracket F1
//! ([`parseval`]), word-segmentation metrics and consensus selection
//! ([`segeval`]), seeded boundary perturbations ([`perturb`]), and the
//! projections that turn text parses into segment trees ([`tree`]).
//!
//! The crate is `no_std` (with `alloc`) and dependency-free; all IO and
//! file formats live in the companion CLI crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod align;
pub mod bracketed;
pub mod interval;
pub mod matching;
pub mod oracle;
pub mod parseval;
pub mod perturb;
pub mod rng;
pub mod segeval;
pub mod synth;
pub mod tree;

pub use align::{
    aggregate, corpus_struct_iou, max_alignment, struct_iou, AlignError, AlignOptions, AlignedPair,
    Alignment, CorpusScore, LabelMode, StructIouScore,
};
pub use bracketed::{BracketedTree, ParseError};
pub use interval::{Interval, DEFAULT_EPSILON};
pub use oracle::{oracle_alignment, ORACLE_MAX_NODES};
pub use parseval::{
    extract_brackets, score_corpus, score_pair, BracketSet, ExtractOptions, PrfScore,
};
pub use perturb::{perturb_delete, perturb_insert, perturb_noise, PerturbKind, PerturbSpec};
pub use rng::{child_seed, RandomSource, Xoshiro256StarStar};
pub use segeval::{
    boundary_prf, mbr_select_by, mbr_select_spans, mbr_select_trees, segment_miou,
    segment_miou_with, MiouDenominator, SegEvalError, SpanSet,
};
pub use tree::{
    attach_boundaries, project_text, remove_gaps, AttachOptions, BoundarySequence, Granularity,
    SegmentNode, SegmentTree, TreeError, Unit, Violation, WordSpan,
};
