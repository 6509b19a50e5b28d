//! `mbr`: consensus selection among candidate segmentations or parses.

use anyhow::{anyhow, bail, Result};
use clap::{Args, ValueEnum};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

use treealign_core::bracketed::BracketedTree;
use treealign_core::interval::Interval;
use treealign_core::parseval::ExtractOptions;
use treealign_core::segeval::{mbr_select_spans, mbr_select_trees, SpanSet};

use crate::formats::read_candidate_file;
use crate::jobs::par_map;
use crate::report::{emit, to_jsonl};
use crate::Ctx;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LossArg {
    /// Negative mean IoU over matched word spans (segmentations)
    Miou,
    /// One minus bracket F1 (parses)
    Treef1,
}

#[derive(Debug, Args)]
pub struct MbrArgs {
    /// Candidate sets, one JSONL record per utterance
    #[arg(long, value_name = "PATH")]
    pub candidates: PathBuf,

    /// Pairwise loss
    #[arg(long, value_enum)]
    pub loss: LossArg,

    /// Labeled bracket F1 for --loss treef1
    #[arg(long)]
    pub labeled: bool,
}

#[derive(Serialize)]
struct Selection {
    id: String,
    selected: usize,
}

pub fn run(ctx: &Ctx, args: MbrArgs) -> Result<ExitCode> {
    let records = read_candidate_file(&args.candidates)?;
    if records.is_empty() {
        bail!("candidate file is empty");
    }
    let selections = par_map(&records, ctx.jobs, |_, rec| -> Result<Selection> {
        let set = &rec.value;
        if set.candidates.is_empty() {
            bail!("record {}: empty candidate list", rec.id);
        }
        let span_count = set.candidates.iter().filter(|c| c.spans.is_some()).count();
        let tree_count = set.candidates.iter().filter(|c| c.tree.is_some()).count();
        if span_count > 0 && tree_count > 0 {
            bail!("record {}: mixes span and tree candidates", rec.id);
        }
        let selected = match args.loss {
            LossArg::Miou => {
                if span_count != set.candidates.len() {
                    bail!("record {}: --loss miou needs span candidates", rec.id);
                }
                let sets = set
                    .candidates
                    .iter()
                    .map(|c| {
                        let spans = c
                            .spans
                            .as_ref()
                            .unwrap()
                            .iter()
                            .map(|s| {
                                Interval::with_epsilon(s.start, s.end, ctx.epsilon)
                                    .map_err(|e| anyhow!("record {}: {e}", rec.id))
                            })
                            .collect::<Result<Vec<_>>>()?;
                        SpanSet::with_epsilon(spans, ctx.epsilon)
                            .map_err(|e| anyhow!("record {}: {e}", rec.id))
                    })
                    .collect::<Result<Vec<_>>>()?;
                mbr_select_spans(&sets).map_err(|e| anyhow!("record {}: {e}", rec.id))?
            }
            LossArg::Treef1 => {
                if tree_count != set.candidates.len() {
                    bail!("record {}: --loss treef1 needs tree candidates", rec.id);
                }
                let trees = set
                    .candidates
                    .iter()
                    .map(|c| {
                        BracketedTree::parse(c.tree.as_ref().unwrap())
                            .map_err(|e| anyhow!("record {}: {e}", rec.id))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let opts = ExtractOptions {
                    labeled: args.labeled,
                    ..ExtractOptions::default()
                };
                mbr_select_trees(&trees, &opts).map_err(|e| anyhow!("record {}: {e}", rec.id))?
            }
        };
        Ok(Selection {
            id: rec.id.clone(),
            selected,
        })
    });
    let selections = selections.into_iter().collect::<Result<Vec<_>>>()?;
    emit(ctx.out.as_deref(), &to_jsonl(&selections)?)?;
    Ok(ExitCode::SUCCESS)
}
