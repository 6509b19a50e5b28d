//! `validate`: structural checks over a time-tree file.
//!
//! Unparseable records and degenerate intervals are reported as findings
//! alongside structural violations, so one bad line does not hide the
//! rest of the file.

use anyhow::{Context, Result};
use clap::Args;
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

use crate::formats::{record_to_tree, JsonTreeRecord};
use crate::report::{emit, emit_json, ValidateFinding, ValidateReport, TOOL, VERSION};
use crate::Ctx;

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Time-tree JSONL to check
    #[arg(long, value_name = "PATH")]
    pub trees: PathBuf,
}

pub fn run(ctx: &Ctx, args: ValidateArgs) -> Result<ExitCode> {
    let text = std::fs::read_to_string(&args.trees)
        .with_context(|| format!("cannot read {}", args.trees.display()))?;
    let mut findings = Vec::new();
    let mut records = 0usize;
    let mut invalid = 0usize;
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        records += 1;
        let lineno = lineno + 1;
        let parsed: std::result::Result<JsonTreeRecord, _> = serde_json::from_str(line);
        let (id, tree) = match parsed {
            Ok(record) => {
                let id = record.id.clone().unwrap_or_else(|| lineno.to_string());
                match record_to_tree(&record, ctx.epsilon) {
                    Ok(tree) => (id, Some(tree)),
                    Err(e) => {
                        findings.push(ValidateFinding {
                            id,
                            line: lineno,
                            message: format!("{e:#}"),
                        });
                        invalid += 1;
                        continue;
                    }
                }
            }
            Err(e) => {
                findings.push(ValidateFinding {
                    id: lineno.to_string(),
                    line: lineno,
                    message: format!("invalid record: {e}"),
                });
                invalid += 1;
                continue;
            }
        };
        let tree = tree.expect("parsed above");
        let violations = tree.validate_with_epsilon(ctx.epsilon);
        if !violations.is_empty() {
            invalid += 1;
            for v in violations {
                findings.push(ValidateFinding {
                    id: id.clone(),
                    line: lineno,
                    message: v.to_string(),
                });
            }
        }
    }

    let report = ValidateReport {
        tool: TOOL,
        version: VERSION,
        command: "validate",
        config: json!({
            "trees": args.trees.display().to_string(),
            "epsilon": ctx.epsilon,
        }),
        records,
        invalid,
        violations: findings,
    };
    if ctx.json {
        emit_json(ctx.out.as_deref(), &report)?;
    } else {
        let mut text = String::new();
        for f in &report.violations {
            text.push_str(&format!("{} (line {}): {}\n", f.id, f.line, f.message));
        }
        text.push_str(&format!(
            "checked {} records, {} invalid\n",
            report.records, report.invalid
        ));
        emit(ctx.out.as_deref(), &text)?;
    }
    Ok(if report.invalid == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
