//! `perturb`: seeded boundary perturbations over a corpus.
//!
//! Per-utterance generators are derived from the corpus seed and the
//! record index, so runs are reproducible and parallelizable. A manifest
//! can record exactly what was applied to each utterance.

use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

use treealign_core::perturb::{
    perturb_delete, perturb_insert, perturb_noise, PerturbKind, PerturbSpec,
};
use treealign_core::rng::{child_seed, Xoshiro256StarStar};

use crate::formats::{bounds_to_spans, read_boundary_file, read_tree_file, tree_to_record};
use crate::report::{emit, to_jsonl};
use crate::Ctx;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Noise,
    Insert,
    Delete,
}

impl From<KindArg> for PerturbKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Noise => PerturbKind::Noise,
            KindArg::Insert => PerturbKind::Insert,
            KindArg::Delete => PerturbKind::Delete,
        }
    }
}

#[derive(Debug, Args)]
pub struct PerturbArgs {
    /// Perturbation procedure
    #[arg(long, value_enum)]
    pub kind: KindArg,

    /// Perturbation level in [0, 1]
    #[arg(long, value_name = "DELTA")]
    pub delta: f64,

    /// Corpus seed; per-utterance seeds derive from it
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Boundary file (noise and delete)
    #[arg(long, value_name = "PATH")]
    pub boundaries: Option<PathBuf>,

    /// Time-tree JSONL (insert)
    #[arg(long, value_name = "PATH")]
    pub trees: Option<PathBuf>,

    /// Write a JSONL manifest of the applied perturbations
    #[arg(long, value_name = "PATH")]
    pub manifest: Option<PathBuf>,
}

#[derive(Serialize)]
struct ManifestRecord {
    id: String,
    kind: String,
    delta: f64,
    seed: u64,
}

pub fn run(ctx: &Ctx, args: PerturbArgs) -> Result<ExitCode> {
    let spec = PerturbSpec::new(args.kind.into(), args.delta, args.seed)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    let mut manifest: Vec<ManifestRecord> = Vec::new();

    let output = match spec.kind {
        PerturbKind::Noise | PerturbKind::Delete => {
            let Some(path) = &args.boundaries else {
                bail!("--kind {} needs --boundaries", spec.kind);
            };
            let records = read_boundary_file(path, ctx.epsilon)?;
            let mut lines = Vec::with_capacity(records.len());
            for (i, rec) in records.iter().enumerate() {
                let utt_seed = child_seed(spec.seed, i as u64);
                let mut rng = Xoshiro256StarStar::from_seed(utt_seed);
                let out = match spec.kind {
                    PerturbKind::Noise => perturb_noise(&rec.value, spec.delta, &mut rng),
                    PerturbKind::Delete => perturb_delete(&rec.value, spec.delta, &mut rng),
                    PerturbKind::Insert => unreachable!(),
                };
                manifest.push(ManifestRecord {
                    id: rec.id.clone(),
                    kind: spec.kind.to_string(),
                    delta: spec.delta,
                    seed: utt_seed,
                });
                lines.push(bounds_to_spans(&out));
            }
            to_jsonl(&lines)?
        }
        PerturbKind::Insert => {
            let Some(path) = &args.trees else {
                bail!("--kind insert needs --trees");
            };
            let records = read_tree_file(path, ctx.epsilon)?;
            let mut lines = Vec::with_capacity(records.len());
            for (i, rec) in records.iter().enumerate() {
                let violations = rec.value.validate_with_epsilon(ctx.epsilon);
                if !violations.is_empty() {
                    bail!(
                        "record {} (line {}): invalid segment tree: {}",
                        rec.id,
                        rec.line,
                        violations[0]
                    );
                }
                let utt_seed = child_seed(spec.seed, i as u64);
                let mut rng = Xoshiro256StarStar::from_seed(utt_seed);
                let out = perturb_insert(&rec.value, spec.delta, &mut rng);
                manifest.push(ManifestRecord {
                    id: rec.id.clone(),
                    kind: spec.kind.to_string(),
                    delta: spec.delta,
                    seed: utt_seed,
                });
                lines.push(tree_to_record(
                    &out,
                    rec.explicit_id.then(|| rec.id.clone()),
                ));
            }
            to_jsonl(&lines)?
        }
    };

    if let Some(path) = &args.manifest {
        std::fs::write(path, to_jsonl(&manifest)?)?;
    }
    emit(ctx.out.as_deref(), &output)?;
    Ok(ExitCode::SUCCESS)
}
