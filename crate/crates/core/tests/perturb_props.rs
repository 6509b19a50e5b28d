//! Perturbation behavior against the alignment score: stronger
//! perturbation hurts more on average, and zero perturbation is exact.

use treealign_core::align::{struct_iou, AlignOptions};
use treealign_core::perturb::{perturb_insert, perturb_noise};
use treealign_core::rng::{child_seed, Xoshiro256StarStar};
use treealign_core::synth::{random_binary_tree, random_boundaries};
use treealign_core::tree::BoundarySequence;

const LABELS: [&str; 3] = ["NP", "VP", "S"];

/// The tree-shape draws depend only on the word count, so replaying the
/// same seed over different boundary values rebuilds the same parse.
fn tree_over(shape_seed: u64, bounds: &BoundarySequence) -> treealign_core::tree::SegmentTree {
    let mut rng = Xoshiro256StarStar::from_seed(shape_seed);
    random_binary_tree(&mut rng, bounds, &LABELS)
}

fn mean_noise_score(utterances: &[(u64, BoundarySequence)], delta: f64, seed: u64) -> f64 {
    let opts = AlignOptions::default();
    let mut total = 0.0;
    for (i, (shape_seed, bounds)) in utterances.iter().enumerate() {
        let gold = tree_over(*shape_seed, bounds);
        let mut rng = Xoshiro256StarStar::from_seed(child_seed(seed, i as u64));
        let noised = perturb_noise(bounds, delta, &mut rng);
        let pred = tree_over(*shape_seed, &noised);
        total += struct_iou(&gold, &pred, &opts).unwrap().score;
    }
    total / utterances.len() as f64
}

fn mean_insert_score(utterances: &[(u64, BoundarySequence)], delta: f64, seed: u64) -> f64 {
    let opts = AlignOptions::default();
    let mut total = 0.0;
    for (i, (shape_seed, bounds)) in utterances.iter().enumerate() {
        let gold = tree_over(*shape_seed, bounds);
        let mut rng = Xoshiro256StarStar::from_seed(child_seed(seed, i as u64));
        let pred = perturb_insert(&gold, delta, &mut rng);
        total += struct_iou(&gold, &pred, &opts).unwrap().score;
    }
    total / utterances.len() as f64
}

fn build_utterances(count: usize) -> Vec<(u64, BoundarySequence)> {
    let mut rng = Xoshiro256StarStar::from_seed(0x0707);
    use treealign_core::rng::RandomSource;
    (0..count)
        .map(|i| {
            let n = 5 + (rng.next_u64() % 8) as usize;
            let b = random_boundaries(&mut rng, n, 0.0, 0.08, 0.45);
            (0x1000 + i as u64, b)
        })
        .collect()
}

#[test]
fn noise_monotonicity() {
    let utterances = build_utterances(60);
    let mut weak = 0.0;
    let mut strong = 0.0;
    for seed in 0..3 {
        weak += mean_noise_score(&utterances, 0.1, seed);
        strong += mean_noise_score(&utterances, 0.9, seed);
    }
    assert!(
        weak > strong + 0.02,
        "noise means not separated: 0.1 -> {weak}, 0.9 -> {strong}"
    );
    // Zero perturbation reproduces the unperturbed score exactly.
    assert_eq!(mean_noise_score(&utterances, 0.0, 0), 1.0);
}

#[test]
fn insert_monotonicity() {
    let utterances = build_utterances(60);
    let mut weak = 0.0;
    let mut strong = 0.0;
    for seed in 0..3 {
        weak += mean_insert_score(&utterances, 0.1, seed);
        strong += mean_insert_score(&utterances, 0.9, seed);
    }
    assert!(
        weak > strong + 0.02,
        "insert means not separated: 0.1 -> {weak}, 0.9 -> {strong}"
    );
    assert_eq!(mean_insert_score(&utterances, 0.0, 0), 1.0);
}
