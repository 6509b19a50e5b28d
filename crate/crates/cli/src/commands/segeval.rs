//! `segeval`: boundary F1 with tolerance, or segmentation mIoU.

use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

use treealign_core::parseval::PrfScore;
use treealign_core::segeval::{boundary_prf_with_epsilon, segment_miou_with, MiouDenominator};

use crate::formats::{read_boundary_file, read_span_file};
use crate::jobs::par_map;
use crate::report::{
    emit, emit_json, BoundaryReport, MiouReport, MiouSentence, PrfSentence, TOOL, VERSION,
};
use crate::Ctx;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DenomArg {
    /// max(|s1|, |s2|): count mismatches are penalized
    Max,
    /// matched pairs only
    Matched,
}

#[derive(Debug, Args)]
pub struct SegevalArgs {
    /// Reference boundaries (forced alignment)
    #[arg(long = "ref", value_name = "PATH")]
    pub reference: PathBuf,

    /// Hypothesis boundaries
    #[arg(long, value_name = "PATH")]
    pub hyp: PathBuf,

    /// Match tolerance in seconds for boundary F1
    #[arg(long, default_value_t = 0.020, value_name = "SECONDS")]
    pub tolerance: f64,

    /// Score span mIoU instead of boundary F1
    #[arg(long)]
    pub miou: bool,

    /// Denominator convention for --miou
    #[arg(long, value_enum, default_value = "max")]
    pub miou_denominator: DenomArg,
}

pub fn run(ctx: &Ctx, args: SegevalArgs) -> Result<ExitCode> {
    if args.tolerance < 0.0 {
        bail!("tolerance must be non-negative");
    }
    let config = json!({
        "ref": args.reference.display().to_string(),
        "hyp": args.hyp.display().to_string(),
        "tolerance": args.tolerance,
        "miou": args.miou,
        "miou_denominator": match args.miou_denominator { DenomArg::Max => "max", DenomArg::Matched => "matched" },
        "epsilon": ctx.epsilon,
        "jobs": ctx.jobs,
    });

    if args.miou {
        // Segmentation proposals are compared span by span; inter-word
        // gaps are kept as they are.
        let reference = read_span_file(&args.reference, ctx.epsilon)?;
        let hyp = read_span_file(&args.hyp, ctx.epsilon)?;
        if reference.len() != hyp.len() {
            bail!(
                "record count mismatch: {} reference vs {} hypothesis",
                reference.len(),
                hyp.len()
            );
        }
        if reference.is_empty() {
            bail!("corpus is empty; nothing to score");
        }
        let items: Vec<_> = reference.iter().zip(hyp.iter()).collect();
        let denom = match args.miou_denominator {
            DenomArg::Max => MiouDenominator::MaxCount,
            DenomArg::Matched => MiouDenominator::MatchedPairs,
        };
        let scores = par_map(&items, ctx.jobs, |_, (r, h)| {
            segment_miou_with(&r.value, &h.value, denom)
        });
        let mean = scores.iter().sum::<f64>() / scores.len() as f64;
        let report = MiouReport {
            tool: TOOL,
            version: VERSION,
            command: "segeval",
            config,
            miou: mean,
            sentences: items
                .iter()
                .zip(&scores)
                .map(|((r, _), &miou)| MiouSentence {
                    id: r.id.clone(),
                    miou,
                })
                .collect(),
        };
        if ctx.json {
            emit_json(ctx.out.as_deref(), &report)?;
        } else {
            emit(
                ctx.out.as_deref(),
                &format!(
                    "miou       {:.6}\nsentences  {}\n",
                    report.miou,
                    report.sentences.len()
                ),
            )?;
        }
        return Ok(ExitCode::SUCCESS);
    }

    let reference = read_boundary_file(&args.reference, ctx.epsilon)?;
    let hyp = read_boundary_file(&args.hyp, ctx.epsilon)?;
    if reference.len() != hyp.len() {
        bail!(
            "record count mismatch: {} reference vs {} hypothesis",
            reference.len(),
            hyp.len()
        );
    }
    if reference.is_empty() {
        bail!("corpus is empty; nothing to score");
    }
    let items: Vec<_> = reference.iter().zip(hyp.iter()).collect();
    let scored = par_map(&items, ctx.jobs, |_, (r, h)| {
        boundary_prf_with_epsilon(&r.value, &h.value, args.tolerance, ctx.epsilon)
    });
    let mut matched = 0u64;
    let mut hyp_total = 0u64;
    let mut ref_total = 0u64;
    for s in &scored {
        matched += s.matched;
        hyp_total += s.pred;
        ref_total += s.gold;
    }
    let pooled = PrfScore::from_counts(matched, hyp_total, ref_total);
    let report = BoundaryReport {
        tool: TOOL,
        version: VERSION,
        command: "segeval",
        config,
        precision: pooled.precision,
        recall: pooled.recall,
        f1: pooled.f1,
        matched,
        hyp: hyp_total,
        reference: ref_total,
        sentences: items
            .iter()
            .zip(&scored)
            .map(|((r, _), s)| PrfSentence {
                id: r.id.clone(),
                precision: s.precision,
                recall: s.recall,
                f1: s.f1,
                matched: s.matched,
                pred: s.pred,
                gold: s.gold,
            })
            .collect(),
    };
    if ctx.json {
        emit_json(ctx.out.as_deref(), &report)?;
    } else {
        emit(
            ctx.out.as_deref(),
            &format!(
                "precision {:.6}\nrecall    {:.6}\nf1        {:.6}\nmatched   {}\nhyp       {}\nref       {}\n",
                report.precision, report.recall, report.f1, report.matched, report.hyp, report.reference
            ),
        )?;
    }
    Ok(ExitCode::SUCCESS)
}
