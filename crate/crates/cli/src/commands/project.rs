//! `project`: bracketed parses onto unit or forced-alignment coordinates.

use anyhow::{bail, Result};
use clap::Args;
use std::path::PathBuf;
use std::process::ExitCode;

use treealign_core::tree::{attach_boundaries, project_text, AttachOptions};

use crate::commands::eval::UnitArg;
use crate::formats::{read_boundary_file, read_bracketed_file, tree_to_record};
use crate::report::{emit, to_jsonl};
use crate::Ctx;

#[derive(Debug, Args)]
pub struct ProjectArgs {
    /// Bracketed parses, one per line
    #[arg(long, value_name = "PATH")]
    pub trees: PathBuf,

    /// Attach these word boundaries instead of unit-length segments
    #[arg(long, value_name = "PATH")]
    pub boundaries: Option<PathBuf>,

    /// Unit-projection granularity (without --boundaries)
    #[arg(long, value_enum, default_value = "word")]
    pub unit: UnitArg,

    /// Case-insensitive token comparison against boundary words
    #[arg(long)]
    pub ci_tokens: bool,

    /// Strip treebank function suffixes from labels
    #[arg(long)]
    pub strip_suffixes: bool,
}

pub fn run(ctx: &Ctx, args: ProjectArgs) -> Result<ExitCode> {
    let trees = read_bracketed_file(&args.trees, args.strip_suffixes)?;
    let records = match &args.boundaries {
        Some(bpath) => {
            let bounds = read_boundary_file(bpath, ctx.epsilon)?;
            if bounds.len() != trees.len() {
                bail!(
                    "record count mismatch: {} trees vs {} boundary records",
                    trees.len(),
                    bounds.len()
                );
            }
            let opts = AttachOptions {
                case_insensitive: args.ci_tokens,
            };
            trees
                .iter()
                .zip(&bounds)
                .map(|(t, b)| {
                    let seg = attach_boundaries(&t.value, &b.value, &opts)
                        .map_err(|e| anyhow::anyhow!("line {}: {e}", t.line))?;
                    Ok(tree_to_record(&seg, Some(t.id.clone())))
                })
                .collect::<Result<Vec<_>>>()?
        }
        None => trees
            .iter()
            .map(|t| {
                let seg = project_text(&t.value, args.unit.into())
                    .map_err(|e| anyhow::anyhow!("line {}: {e}", t.line))?;
                Ok(tree_to_record(&seg, Some(t.id.clone())))
            })
            .collect::<Result<Vec<_>>>()?,
    };
    emit(ctx.out.as_deref(), &to_jsonl(&records)?)?;
    Ok(ExitCode::SUCCESS)
}
