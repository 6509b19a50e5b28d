//! `parseval`: bracket precision/recall/F1 over discrete parse files.

use anyhow::{bail, Result};
use clap::{ArgAction, Args};
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

use treealign_core::parseval::{extract_brackets, score_corpus, BracketSet, ExtractOptions};

use crate::formats::read_bracketed_file;
use crate::jobs::par_map;
use crate::report::{emit, emit_json, ParsevalReport, PrfSentence, TOOL, VERSION};
use crate::Ctx;

#[derive(Debug, Args)]
pub struct ParsevalArgs {
    /// Gold bracketed parses, one per line
    #[arg(long, value_name = "PATH")]
    pub gold: PathBuf,

    /// Predicted bracketed parses, one per line
    #[arg(long, value_name = "PATH")]
    pub pred: PathBuf,

    /// Erase labels before matching
    #[arg(long)]
    pub unlabeled: bool,

    /// Count preterminal (POS) brackets
    #[arg(long, value_name = "BOOL", default_value_t = false, action = ArgAction::Set)]
    pub include_preterminals: bool,

    /// Comma-separated tokens to remove before scoring
    #[arg(long, value_name = "LIST")]
    pub strip_tokens: Option<String>,

    /// Strip treebank function suffixes from labels
    #[arg(long)]
    pub strip_suffixes: bool,

    /// Human output: headline the pooled (micro) scores; the default
    #[arg(long = "micro", conflicts_with = "macro_headline")]
    pub micro_headline: bool,

    /// Human output: headline the sentence-mean (macro) F1
    #[arg(long = "macro")]
    pub macro_headline: bool,
}

pub fn run(ctx: &Ctx, args: ParsevalArgs) -> Result<ExitCode> {
    let gold = read_bracketed_file(&args.gold, args.strip_suffixes)?;
    let pred = read_bracketed_file(&args.pred, args.strip_suffixes)?;
    if gold.len() != pred.len() {
        bail!(
            "record count mismatch: {} gold vs {} predicted",
            gold.len(),
            pred.len()
        );
    }
    if gold.is_empty() {
        bail!("corpus is empty; nothing to score");
    }
    let deny: Vec<&str> = args
        .strip_tokens
        .as_deref()
        .map(|s| {
            s.split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .collect()
        })
        .unwrap_or_default();
    let opts = ExtractOptions {
        labeled: !args.unlabeled,
        include_preterminals: args.include_preterminals,
    };

    let items: Vec<_> = gold.iter().zip(pred.iter()).collect();
    let extracted = par_map(
        &items,
        ctx.jobs,
        |_, (g, p)| -> Result<(BracketSet, BracketSet)> {
            let extract = |rec: &crate::formats::Record<
                treealign_core::bracketed::BracketedTree,
            >|
             -> Result<BracketSet> {
                let tree = if deny.is_empty() {
                    Some(rec.value.clone())
                } else {
                    rec.value.strip_tokens(&deny)
                };
                Ok(match tree {
                    Some(t) => extract_brackets(&t, &opts)
                        .map_err(|e| anyhow::anyhow!("line {}: {e}", rec.line))?,
                    None => BracketSet::default(),
                })
            };
            Ok((extract(g)?, extract(p)?))
        },
    );
    let pairs = extracted.into_iter().collect::<Result<Vec<_>>>()?;
    let corpus = score_corpus(&pairs);

    let report = ParsevalReport {
        tool: TOOL,
        version: VERSION,
        command: "parseval",
        config: json!({
            "gold": args.gold.display().to_string(),
            "pred": args.pred.display().to_string(),
            "labeled": !args.unlabeled,
            "include_preterminals": args.include_preterminals,
            "strip_tokens": args.strip_tokens,
            "strip_suffixes": args.strip_suffixes,
            "jobs": ctx.jobs,
        }),
        precision: corpus.micro.precision,
        recall: corpus.micro.recall,
        f1: corpus.micro.f1,
        matched: corpus.micro.matched,
        pred: corpus.micro.pred,
        gold: corpus.micro.gold,
        macro_precision: corpus.macro_precision,
        macro_recall: corpus.macro_recall,
        macro_f1: corpus.macro_f1,
        sentences: gold
            .iter()
            .zip(&corpus.per_sentence)
            .map(|(rec, s)| PrfSentence {
                id: rec.id.clone(),
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
        let text = if args.macro_headline {
            format!(
                "macro-precision {:.6}\nmacro-recall    {:.6}\nmacro-f1        {:.6}\nsentences       {}\n",
                report.macro_precision,
                report.macro_recall,
                report.macro_f1,
                report.sentences.len()
            )
        } else {
            format!(
                "precision {:.6}\nrecall    {:.6}\nf1        {:.6}\nmatched   {}\npred      {}\ngold      {}\n",
                report.precision, report.recall, report.f1, report.matched, report.pred, report.gold
            )
        };
        emit(ctx.out.as_deref(), &text)?;
    }
    Ok(ExitCode::SUCCESS)
}
