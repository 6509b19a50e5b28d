//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with the measured values (visible with `--nocapture`).
//!
//! Run with `cargo test -p treealign --test acceptance`.

use std::fs;
use std::time::{Duration, Instant};

use treealign_core::align::{aggregate, struct_iou, AlignOptions, LabelMode, StructIouScore};
use treealign_core::bracketed::BracketedTree;
use treealign_core::interval::Interval;
use treealign_core::oracle::oracle_alignment;
use treealign_core::parseval::{extract_brackets, score_pair, ExtractOptions};
use treealign_core::perturb::{perturb_insert, perturb_noise};
use treealign_core::rng::{child_seed, RandomSource, Xoshiro256StarStar};
use treealign_core::segeval::boundary_prf;
use treealign_core::synth::{random_binary_tree, random_boundaries, random_relaxed_tree};
use treealign_core::tree::{
    attach_boundaries, project_text, AttachOptions, BoundarySequence, Granularity, SegmentNode,
    SegmentTree, Unit,
};

const FIG_GOLD: &str = r#"{"label":"NP","start":2.56,"end":3.01,"children":[{"label":"PRP","start":2.56,"end":2.72},{"label":"NN","start":2.72,"end":3.01}]}"#;
const FIG_PRED: &str = r#"{"label":"VP","start":2.55,"end":3.01,"children":[{"label":"VBP","start":2.55,"end":2.56},{"label":"NP","start":2.56,"end":3.01,"children":[{"label":"PRP","start":2.56,"end":2.72},{"label":"NN","start":2.72,"end":3.01}]}]}"#;

fn fig_trees() -> (SegmentTree, SegmentTree) {
    fn iv(s: f64, e: f64) -> Interval {
        Interval::new(s, e).unwrap()
    }
    let gold = SegmentTree::new(
        SegmentNode::new(
            "NP",
            iv(2.56, 3.01),
            vec![
                SegmentNode::leaf("PRP", iv(2.56, 2.72)),
                SegmentNode::leaf("NN", iv(2.72, 3.01)),
            ],
        ),
        Unit::Seconds,
    );
    let pred = SegmentTree::new(
        SegmentNode::new(
            "VP",
            iv(2.55, 3.01),
            vec![
                SegmentNode::leaf("VBP", iv(2.55, 2.56)),
                SegmentNode::new(
                    "NP",
                    iv(2.56, 3.01),
                    vec![
                        SegmentNode::leaf("PRP", iv(2.56, 2.72)),
                        SegmentNode::leaf("NN", iv(2.72, 3.01)),
                    ],
                ),
            ],
        ),
        Unit::Seconds,
    );
    (gold, pred)
}

/// Speech-parse reproduction: the worked ground-truth/predicted pair
/// scores 0.75 through the `eval` subcommand, and the metric itself
/// computes in under 10 ms.
#[test]
fn criterion_1_speech_example_reproduction() {
    let dir = std::env::temp_dir().join(format!("treealign-acc-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let gold = dir.join("fig_gold.jsonl");
    let pred = dir.join("fig_pred.jsonl");
    fs::write(&gold, format!("{FIG_GOLD}\n")).unwrap();
    fs::write(&pred, format!("{FIG_PRED}\n")).unwrap();
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_treealign"))
        .args(["eval", "--json"])
        .arg("--gold")
        .arg(&gold)
        .arg("--pred")
        .arg(&pred)
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let corpus = v["corpus"].as_f64().unwrap();
    assert!((corpus - 0.75).abs() <= 1e-9, "eval corpus = {corpus}");

    let (g, p) = fig_trees();
    let opts = AlignOptions::default();
    let mut best = Duration::MAX;
    let mut score = 0.0;
    for _ in 0..5 {
        let t0 = Instant::now();
        score = struct_iou(&g, &p, &opts).unwrap().score;
        best = best.min(t0.elapsed());
    }
    assert!((score - 0.75).abs() <= 1e-9);
    assert!(best < Duration::from_millis(10), "metric took {best:?}");
    println!("PASS criterion 1: eval scores {corpus} (metric in {best:?})");
}

/// Discrete-parse reproduction: the worked gold/predicted bracket pair
/// yields precision 3/4, recall 3/5, F1 2/3 exactly.
#[test]
fn criterion_2_bracket_example_reproduction() {
    let gold = BracketedTree::parse(
        "(S (NP (DT The) (NN cat)) (VP (V sat) (PP (IN on) (NP (DT the) (NN mat)))))",
    )
    .unwrap();
    let pred = BracketedTree::parse(
        "(S (NP (DT The) (NN cat)) (VP (V sat) (NP (DT on) (NN the) (NN mat))))",
    )
    .unwrap();
    let opts = ExtractOptions::default();
    let g = extract_brackets(&gold, &opts).unwrap();
    let p = extract_brackets(&pred, &opts).unwrap();
    let s = score_pair(&g, &p);
    assert_eq!(s.precision, 0.75);
    assert_eq!(s.recall, 0.6);
    assert_eq!(s.f1, 2.0 / 3.0);
    println!(
        "PASS criterion 2: precision {} recall {} f1 {}",
        s.precision, s.recall, s.f1
    );
}

const LABELS: [&str; 4] = ["A", "B", "C", "D"];

/// Oracle equivalence: over 1000 random valid tree pairs (at most 8 nodes
/// per side, 4-symbol labels, 1/16-grid endpoints) the dynamic program and
/// the brute-force enumeration agree on total weight to 1e-9 in both label
/// modes, within a 60 s budget.
#[test]
fn criterion_3_oracle_equivalence() {
    let t0 = Instant::now();
    let mut rng = Xoshiro256StarStar::from_seed(0xACC3);
    let mut worst = 0.0f64;
    for mode in [LabelMode::Unlabeled, LabelMode::ExactLabel] {
        let opts = AlignOptions {
            label_mode: mode,
            ..AlignOptions::default()
        };
        for trial in 0..500 {
            let t1 = random_relaxed_tree(&mut rng, 8, &LABELS, 0.0, 8.0);
            let t2 = random_relaxed_tree(&mut rng, 8, &LABELS, 0.0, 8.0);
            let dp = treealign_core::align::max_alignment(&t1, &t2, &opts).unwrap();
            let oracle = oracle_alignment(&t1, &t2, &opts).unwrap();
            let gap = (dp.total_weight - oracle.total_weight).abs();
            worst = worst.max(gap);
            assert!(
                gap <= 1e-9,
                "trial {trial} ({mode:?}): dp {} vs oracle {}",
                dp.total_weight,
                oracle.total_weight
            );
            dp.verify(&t1, &t2, &opts).unwrap();
        }
    }
    let elapsed = t0.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    println!("PASS criterion 3: 1000 pairs, worst gap {worst:.2e}, in {elapsed:?}");
}

/// Identity and symmetry: self-alignment scores exactly 1 and the score is
/// symmetric in its arguments, to 1e-12 over 500 random pairs.
#[test]
fn criterion_4_identity_and_symmetry() {
    let mut rng = Xoshiro256StarStar::from_seed(0xACC4);
    let opts = AlignOptions::default();
    let mut worst_sym = 0.0f64;
    for _ in 0..500 {
        let t1 = random_relaxed_tree(&mut rng, 14, &LABELS, 0.0, 8.0);
        let t2 = random_relaxed_tree(&mut rng, 14, &LABELS, 0.0, 8.0);
        let id = struct_iou(&t1, &t1, &opts).unwrap().score;
        assert!((id - 1.0).abs() <= 1e-12, "identity {id}");
        let ab = struct_iou(&t1, &t2, &opts).unwrap().score;
        let ba = struct_iou(&t2, &t1, &opts).unwrap().score;
        worst_sym = worst_sym.max((ab - ba).abs());
        assert!((ab - ba).abs() <= 1e-12, "symmetry {ab} vs {ba}");
    }
    println!("PASS criterion 4: 500 pairs, worst asymmetry {worst_sym:.2e}");
}

fn tree_over(shape_seed: u64, bounds: &BoundarySequence) -> SegmentTree {
    let mut rng = Xoshiro256StarStar::from_seed(shape_seed);
    random_binary_tree(&mut rng, bounds, &["NP", "VP", "S", "PP"])
}

/// Perturbation monotonicity: over 100 synthetic 10-20-word utterances and
/// 5 seeds, the mean score strictly decreases across noise and insert
/// levels 0.1 -> 0.5 -> 0.9, and level 0 reproduces the unperturbed score
/// exactly. Budget: 2 minutes.
#[test]
fn criterion_5_perturbation_monotonicity() {
    let t0 = Instant::now();
    let mut gen = Xoshiro256StarStar::from_seed(0xACC5);
    let utterances: Vec<(u64, BoundarySequence)> = (0..100)
        .map(|i| {
            let n = 10 + (gen.next_u64() % 11) as usize;
            let b = random_boundaries(&mut gen, n, 0.0, 0.08, 0.45);
            (0x5000 + i as u64, b)
        })
        .collect();
    let opts = AlignOptions::default();

    let mean_noise = |delta: f64, seed: u64| -> f64 {
        let mut total = 0.0;
        for (i, (shape, bounds)) in utterances.iter().enumerate() {
            let gold = tree_over(*shape, bounds);
            let mut rng = Xoshiro256StarStar::from_seed(child_seed(seed, i as u64));
            let noised = perturb_noise(bounds, delta, &mut rng);
            let pred = tree_over(*shape, &noised);
            total += struct_iou(&gold, &pred, &opts).unwrap().score;
        }
        total / utterances.len() as f64
    };
    let mean_insert = |delta: f64, seed: u64| -> f64 {
        let mut total = 0.0;
        for (i, (shape, bounds)) in utterances.iter().enumerate() {
            let gold = tree_over(*shape, bounds);
            let mut rng = Xoshiro256StarStar::from_seed(child_seed(seed, i as u64));
            let pred = perturb_insert(&gold, delta, &mut rng);
            total += struct_iou(&gold, &pred, &opts).unwrap().score;
        }
        total / utterances.len() as f64
    };

    let seeds: Vec<u64> = (0..5).collect();
    let over_seeds = |f: &dyn Fn(f64, u64) -> f64, delta: f64| -> f64 {
        seeds.iter().map(|&s| f(delta, s)).sum::<f64>() / seeds.len() as f64
    };

    let noise: Vec<f64> = [0.1, 0.5, 0.9]
        .iter()
        .map(|&d| over_seeds(&mean_noise, d))
        .collect();
    assert!(
        noise[0] > noise[1] && noise[1] > noise[2],
        "noise means not strictly decreasing: {noise:?}"
    );
    let insert: Vec<f64> = [0.1, 0.5, 0.9]
        .iter()
        .map(|&d| over_seeds(&mean_insert, d))
        .collect();
    assert!(
        insert[0] > insert[1] && insert[1] > insert[2],
        "insert means not strictly decreasing: {insert:?}"
    );
    // Unperturbed predictions score 1; delta = 0 must reproduce that
    // exactly.
    assert_eq!(mean_noise(0.0, 0), 1.0);
    assert_eq!(mean_insert(0.0, 0), 1.0);

    let elapsed = t0.elapsed();
    assert!(elapsed < Duration::from_secs(120), "took {elapsed:?}");
    println!("PASS criterion 5: noise {noise:?}, insert {insert:?}, in {elapsed:?}");
}

/// Corpus-level score is the node-count-weighted mean of sentence scores
/// (1e-12), and sits at or below the unweighted mean when longer sentences
/// score lower.
#[test]
fn criterion_6_corpus_vs_sentence() {
    let mut rng = Xoshiro256StarStar::from_seed(0xACC6);
    let opts = AlignOptions::default();
    for _ in 0..20 {
        let k = 2 + (rng.next_u64() % 19) as usize;
        let mut sentences = Vec::with_capacity(k);
        for _ in 0..k {
            let t1 = random_relaxed_tree(&mut rng, 12, &LABELS, 0.0, 8.0);
            let t2 = random_relaxed_tree(&mut rng, 12, &LABELS, 0.0, 8.0);
            sentences.push(struct_iou(&t1, &t2, &opts).unwrap());
        }
        let report = aggregate(sentences.clone());
        let mut weighted = 0.0;
        let mut weights = 0.0;
        for s in &sentences {
            weighted += (s.n1 + s.n2) as f64 * s.score;
            weights += (s.n1 + s.n2) as f64;
        }
        let expect = weighted / weights;
        assert!(
            (report.corpus - expect).abs() <= 1e-12,
            "corpus {} vs weighted mean {}",
            report.corpus,
            expect
        );
    }

    // Long sentences scoring lower pull the corpus below the sentence
    // mean.
    let fixture = vec![
        StructIouScore {
            score: 0.95,
            weight: 0.0,
            n1: 2,
            n2: 2,
        },
        StructIouScore {
            score: 0.9,
            weight: 0.0,
            n1: 3,
            n2: 3,
        },
        StructIouScore {
            score: 0.6,
            weight: 0.0,
            n1: 20,
            n2: 22,
        },
        StructIouScore {
            score: 0.5,
            weight: 0.0,
            n1: 40,
            n2: 38,
        },
    ];
    let report = aggregate(fixture);
    assert!(
        report.corpus <= report.sentence_mean,
        "corpus {} > sentence mean {}",
        report.corpus,
        report.sentence_mean
    );
    println!(
        "PASS criterion 6: weighted-mean identity holds; fixture corpus {:.4} <= mean {:.4}",
        report.corpus, report.sentence_mean
    );
}

/// Syntactic-ambiguity direction check on the two plausible parses of
/// `N (P N){2}`: bracket F1 between them (5/7 unlabeled) is strictly lower
/// than their alignment score (5/6 unlabeled). The reference report makes
/// the same comparison at n = 8 with 12.5 bracket F1 vs 63.6 alignment,
/// which we record as directional context only.
#[test]
fn criterion_7_ambiguity_direction() {
    let a =
        BracketedTree::parse("(NP (NP (N n)) (PP (P p) (NP (NP (N n)) (PP (P p) (NP (N n))))))")
            .unwrap();
    let b =
        BracketedTree::parse("(NP (NP (NP (N n)) (PP (P p) (NP (N n)))) (PP (P p) (NP (N n))))")
            .unwrap();
    let unlabeled = ExtractOptions {
        labeled: false,
        ..ExtractOptions::default()
    };
    let f1 = score_pair(
        &extract_brackets(&a, &unlabeled).unwrap(),
        &extract_brackets(&b, &unlabeled).unwrap(),
    )
    .f1;
    assert!((f1 - 5.0 / 7.0).abs() <= 1e-12, "bracket f1 {f1}");

    let sa = project_text(&a, Granularity::Word).unwrap();
    let sb = project_text(&b, Granularity::Word).unwrap();
    let opts = AlignOptions::default();
    let s = struct_iou(&sa, &sb, &opts).unwrap();
    assert!(
        (s.score - 5.0 / 6.0).abs() <= 1e-12,
        "alignment score {}",
        s.score
    );
    assert!(f1 < s.score);

    // The constituent-only restriction of the same pair is small enough
    // for the exhaustive oracle; cross-check the engine on this topology.
    let restricted = AlignOptions {
        include_leaves: false,
        ..AlignOptions::default()
    };
    let dp = treealign_core::align::max_alignment(&sa, &sb, &restricted).unwrap();
    let oracle = oracle_alignment(&sa, &sb, &restricted).unwrap();
    assert!((dp.total_weight - oracle.total_weight).abs() <= 1e-9);

    println!(
        "PASS criterion 7: bracket f1 {:.4} < alignment {:.4} (reference n=8 context: 12.5 vs 63.6)",
        f1, s.score
    );
}

/// Boundary F1: the greedy matcher equals brute-force maximum matching on
/// 1000+ random instances with up to 6 boundaries per side, and the
/// +/-20 ms tolerance behaves per the worked examples.
#[test]
fn criterion_8_boundary_f1() {
    fn brute_force(r: &[f64], h: &[f64], tol: f64) -> usize {
        fn try_assign(
            i: usize,
            adj: &[Vec<usize>],
            seen: &mut [bool],
            matched: &mut [Option<usize>],
        ) -> bool {
            for &j in &adj[i] {
                if !seen[j] {
                    seen[j] = true;
                    if matched[j].is_none() || try_assign(matched[j].unwrap(), adj, seen, matched) {
                        matched[j] = Some(i);
                        return true;
                    }
                }
            }
            false
        }
        let adj: Vec<Vec<usize>> = r
            .iter()
            .map(|&ri| {
                h.iter()
                    .enumerate()
                    .filter(|(_, &hj)| (ri - hj).abs() <= tol + 1e-9)
                    .map(|(j, _)| j)
                    .collect()
            })
            .collect();
        let mut matched = vec![None; h.len()];
        let mut count = 0;
        for i in 0..r.len() {
            let mut seen = vec![false; h.len()];
            if try_assign(i, &adj, &mut seen, &mut matched) {
                count += 1;
            }
        }
        count
    }
    fn to_sequence(internal: &[f64]) -> BoundarySequence {
        let mut b = vec![-1.0];
        b.extend_from_slice(internal);
        b.push(2.0);
        let words = (0..b.len() - 1).map(|i| format!("w{i}")).collect();
        BoundarySequence::new(words, b).unwrap()
    }

    let mut rng = Xoshiro256StarStar::from_seed(0xACC8);
    for trial in 0..1500 {
        let mut draw = |n: usize| -> Vec<f64> {
            let mut v: Vec<f64> = (0..n).map(|_| rng.next_unit()).collect();
            v.sort_unstable_by(f64::total_cmp);
            v.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
            v
        };
        let r = draw((trial % 7) as usize);
        let h = draw((trial / 7 % 7) as usize);
        let tol = [0.0, 0.02, 0.05, 0.15][trial % 4];
        let got = boundary_prf(&to_sequence(&r), &to_sequence(&h), tol).matched as usize;
        let want = brute_force(&r, &h, tol);
        assert_eq!(got, want, "trial {trial}: tol {tol} r {r:?} h {h:?}");
    }

    let seq = |vals: &[f64]| -> BoundarySequence {
        let words = (0..vals.len() - 1).map(|i| format!("w{i}")).collect();
        BoundarySequence::new(words, vals.to_vec()).unwrap()
    };
    let s = boundary_prf(
        &seq(&[0.0, 0.5, 1.0, 2.0]),
        &seq(&[0.0, 0.51, 1.5, 2.0]),
        0.020,
    );
    assert_eq!((s.precision, s.recall, s.f1), (0.5, 0.5, 0.5));
    let r = seq(&[0.0, 0.5, 1.0, 2.0]);
    let s = boundary_prf(&r, &r, 0.020);
    assert_eq!((s.precision, s.recall, s.f1), (1.0, 1.0, 1.0));
    let s = boundary_prf(&seq(&[0.0, 1.0, 2.0]), &seq(&[0.0, 0.98, 1.02, 2.0]), 0.020);
    assert_eq!((s.precision, s.recall), (0.5, 1.0));
    println!(
        "PASS criterion 8: greedy = maximum matching on 1500 instances; tolerance examples hold"
    );
}

/// Balanced binary tree with exactly `2 * leaves` nodes (a unary wrapper
/// tops the 2*leaves - 1 balanced nodes).
fn balanced_tree(leaves: usize) -> SegmentTree {
    let tokens: Vec<String> = (0..leaves).map(|i| format!("w{i}")).collect();
    fn build(tokens: &[String], lo: usize, hi: usize) -> BracketedTree {
        if hi - lo == 1 {
            return BracketedTree::Node {
                label: "X".into(),
                children: vec![BracketedTree::Leaf(tokens[lo].clone())],
            };
        }
        let mid = (lo + hi) / 2;
        BracketedTree::Node {
            label: "X".into(),
            children: vec![build(tokens, lo, mid), build(tokens, mid, hi)],
        }
    }
    let inner = build(&tokens, 0, leaves);
    let wrapped = BracketedTree::Node {
        label: "TOP".into(),
        children: vec![inner],
    };
    project_text(&wrapped, Granularity::Word).unwrap()
}

/// Scaling: doubling the node count on balanced self-alignments grows wall
/// time by at most 20x, and the 200-node case completes in under 5 s.
#[test]
fn criterion_9_scaling() {
    let small = balanced_tree(50);
    let large = balanced_tree(100);
    assert_eq!(small.node_count(), 100);
    assert_eq!(large.node_count(), 200);
    let opts = AlignOptions::default();
    let time = |t: &SegmentTree| -> Duration {
        let mut best = Duration::MAX;
        for _ in 0..3 {
            let t0 = Instant::now();
            let s = struct_iou(t, t, &opts).unwrap();
            best = best.min(t0.elapsed());
            assert_eq!(s.score, 1.0);
        }
        best
    };
    let t_small = time(&small);
    let t_large = time(&large);
    let ratio = t_large.as_secs_f64() / t_small.as_secs_f64().max(1e-9);
    assert!(
        t_large < Duration::from_secs(5),
        "200-node case took {t_large:?}"
    );
    assert!(
        ratio <= 20.0,
        "scaling ratio {ratio:.1} (small {t_small:?}, large {t_large:?})"
    );
    println!(
        "PASS criterion 9: 100 nodes in {t_small:?}, 200 nodes in {t_large:?} (ratio {ratio:.1})"
    );
}

/// The attachment path used throughout the suite reproduces the worked
/// speech tree from its bracketing and boundaries.
#[test]
fn attachment_reproduces_figure_tree() {
    let tree = BracketedTree::parse("(NP (PRP Your) (NN turn))").unwrap();
    let bounds =
        BoundarySequence::new(vec!["Your".into(), "turn".into()], vec![2.56, 2.72, 3.01]).unwrap();
    let seg = attach_boundaries(&tree, &bounds, &AttachOptions::default()).unwrap();
    let (gold, _) = fig_trees();
    assert_eq!(seg, gold);
}
