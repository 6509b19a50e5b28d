//! `eval`: structured alignment scoring of a gold/predicted corpus.

use anyhow::Result;
use clap::{ArgAction, Args, ValueEnum};
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

use treealign_core::align::{aggregate, max_alignment, struct_iou, AlignOptions, LabelMode};
use treealign_core::tree::Granularity;

use crate::ingest::{load_corpus, CorpusFormat, LoadOptions};
use crate::jobs::par_map;
use crate::report::{
    emit, emit_json, to_jsonl, AlignmentPairRecord, AlignmentRecord, EvalReport, EvalSentence,
    TOOL, VERSION,
};
use crate::Ctx;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    /// Time-tree JSONL
    Trees,
    /// Bracketed parse lines, projected to unit-length segments
    Brackets,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UnitArg {
    Word,
    Char,
}

impl From<UnitArg> for Granularity {
    fn from(u: UnitArg) -> Self {
        match u {
            UnitArg::Word => Granularity::Word,
            UnitArg::Char => Granularity::Char,
        }
    }
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Ground-truth trees
    #[arg(long, value_name = "PATH")]
    pub gold: PathBuf,

    /// Predicted trees
    #[arg(long, value_name = "PATH")]
    pub pred: PathBuf,

    /// Input format
    #[arg(long, value_enum, default_value = "trees")]
    pub format: FormatArg,

    /// Projection granularity for bracketed input
    #[arg(long, value_enum, default_value = "word")]
    pub unit: UnitArg,

    /// Align only same-label nodes
    #[arg(long)]
    pub labeled: bool,

    /// Count and align the preterminal layer
    #[arg(long, value_name = "BOOL", default_value_t = true, action = ArgAction::Set)]
    pub include_preterminals: bool,

    /// Human output: corpus-level score only
    #[arg(long, conflicts_with = "per_sentence")]
    pub corpus: bool,

    /// Human output: one line per sentence
    #[arg(long)]
    pub per_sentence: bool,

    /// Write per-sentence alignments (JSONL) to this path
    #[arg(long, value_name = "PATH")]
    pub alignments: Option<PathBuf>,

    /// Skip records that fail validation instead of aborting
    #[arg(long)]
    pub skip_invalid: bool,

    /// Strip treebank function suffixes from labels (bracketed input)
    #[arg(long)]
    pub strip_suffixes: bool,
}

pub fn run(ctx: &Ctx, args: EvalArgs) -> Result<ExitCode> {
    let format = match args.format {
        FormatArg::Trees => CorpusFormat::Trees,
        FormatArg::Brackets => CorpusFormat::Brackets(args.unit.into()),
    };
    let pairs = load_corpus(
        &args.gold,
        &args.pred,
        &LoadOptions {
            format,
            epsilon: ctx.epsilon,
            skip_invalid: args.skip_invalid,
            strip_suffixes: args.strip_suffixes,
            quiet: ctx.quiet,
        },
    )?;
    let opts = AlignOptions {
        label_mode: if args.labeled {
            LabelMode::ExactLabel
        } else {
            LabelMode::Unlabeled
        },
        include_leaves: args.include_preterminals,
        epsilon: ctx.epsilon,
    };

    let scored = par_map(&pairs, ctx.jobs, |_, pair| {
        struct_iou(&pair.gold, &pair.pred, &opts)
    });
    let mut sentences = Vec::with_capacity(scored.len());
    for (pair, s) in pairs.iter().zip(scored) {
        sentences.push(s.map_err(|e| anyhow::anyhow!("record {}: {e}", pair.id))?);
    }
    let corpus = aggregate(sentences);

    if let Some(path) = &args.alignments {
        let records = par_map(&pairs, ctx.jobs, |i, pair| -> Result<AlignmentRecord> {
            let alignment = max_alignment(&pair.gold, &pair.pred, &opts)
                .map_err(|e| anyhow::anyhow!("record {}: {e}", pair.id))?;
            let s = &corpus.sentences[i];
            let pairs_out = alignment
                .pairs
                .iter()
                .map(|p| AlignmentPairRecord {
                    t1_path: pair.gold.path_of(p.index1).expect("aligned node exists"),
                    t2_path: pair.pred.path_of(p.index2).expect("aligned node exists"),
                    iou: p.iou,
                })
                .collect();
            Ok(AlignmentRecord {
                id: pair.id.clone(),
                score: s.score,
                n1: s.n1,
                n2: s.n2,
                pairs: pairs_out,
            })
        });
        let records = records.into_iter().collect::<Result<Vec<_>>>()?;
        std::fs::write(path, to_jsonl(&records)?)?;
    }

    let report = EvalReport {
        tool: TOOL,
        version: VERSION,
        command: "eval",
        config: json!({
            "gold": args.gold.display().to_string(),
            "pred": args.pred.display().to_string(),
            "format": match args.format { FormatArg::Trees => "trees", FormatArg::Brackets => "brackets" },
            "unit": match args.unit { UnitArg::Word => "word", UnitArg::Char => "char" },
            "labeled": args.labeled,
            "include_preterminals": args.include_preterminals,
            "epsilon": ctx.epsilon,
            "jobs": ctx.jobs,
        }),
        corpus: corpus.corpus,
        sentence_mean: corpus.sentence_mean,
        sentences: pairs
            .iter()
            .zip(&corpus.sentences)
            .map(|(pair, s)| EvalSentence {
                id: pair.id.clone(),
                score: s.score,
                weight: s.weight,
                n1: s.n1,
                n2: s.n2,
            })
            .collect(),
    };

    if ctx.json {
        emit_json(ctx.out.as_deref(), &report)?;
    } else {
        let mut text = String::new();
        if args.per_sentence {
            text.push_str(&format!(
                "{:<12} {:>10} {:>6} {:>6}\n",
                "id", "score", "n1", "n2"
            ));
            for s in &report.sentences {
                text.push_str(&format!(
                    "{:<12} {:>10.6} {:>6} {:>6}\n",
                    s.id, s.score, s.n1, s.n2
                ));
            }
        }
        if args.corpus {
            text.push_str(&format!("{:.6}\n", report.corpus));
        } else {
            text.push_str(&format!("corpus         {:.6}\n", report.corpus));
            text.push_str(&format!("sentence-mean  {:.6}\n", report.sentence_mean));
            text.push_str(&format!("sentences      {}\n", report.sentences.len()));
        }
        emit(ctx.out.as_deref(), &text)?;
    }
    Ok(ExitCode::SUCCESS)
}
