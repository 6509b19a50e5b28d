//! Bracketed (Penn Treebank style) parse trees over discrete words.
//!
//! Trees are written as s-expressions, one per line: `(NP (PRP Your) (NN
//! turn))`. Tokens are whitespace-separated; parentheses delimit
//! constituents. A label-less outer wrapper `( (S ...) )` is unwrapped on
//! parse.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt;

/// Parse failure, with the character offset of the offending position.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at char {}: {}", self.offset, self.message)
    }
}

impl core::error::Error for ParseError {}

/// A node of a bracketed parse tree: either a labeled constituent or a
/// terminal token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BracketedTree {
    Node {
        label: String,
        children: Vec<BracketedTree>,
    },
    Leaf(String),
}

impl BracketedTree {
    /// Parses a single tree from `input`. Trailing non-whitespace is an
    /// error; a label-less singleton wrapper is unwrapped.
    pub fn parse(input: &str) -> Result<Self, ParseError> {
        let chars: Vec<char> = input.chars().collect();
        let mut pos = 0usize;
        skip_ws(&chars, &mut pos);
        if pos >= chars.len() {
            return Err(ParseError {
                offset: pos,
                message: "empty input".to_string(),
            });
        }
        let tree = parse_tree(&chars, &mut pos)?;
        skip_ws(&chars, &mut pos);
        if pos < chars.len() {
            return Err(ParseError {
                offset: pos,
                message: format!("trailing content starting with '{}'", chars[pos]),
            });
        }
        // PTB files wrap each sentence in an extra unlabeled bracket.
        if let BracketedTree::Node { label, children } = &tree {
            if label.is_empty() && children.len() == 1 {
                if let BracketedTree::Node { .. } = &children[0] {
                    return Ok(children[0].clone());
                }
            }
        }
        Ok(tree)
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, BracketedTree::Leaf(_))
    }

    /// True for a constituent whose children are all terminal tokens.
    pub fn is_preterminal(&self) -> bool {
        match self {
            BracketedTree::Node { children, .. } => {
                !children.is_empty() && children.iter().all(BracketedTree::is_leaf)
            }
            BracketedTree::Leaf(_) => false,
        }
    }

    pub fn label(&self) -> &str {
        match self {
            BracketedTree::Node { label, .. } => label,
            BracketedTree::Leaf(token) => token,
        }
    }

    pub fn children(&self) -> &[BracketedTree] {
        match self {
            BracketedTree::Node { children, .. } => children,
            BracketedTree::Leaf(_) => &[],
        }
    }

    /// Terminal tokens in left-to-right order.
    pub fn leaves(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            BracketedTree::Leaf(token) => out.push(token),
            BracketedTree::Node { children, .. } => {
                for c in children {
                    c.collect_leaves(out);
                }
            }
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            BracketedTree::Leaf(_) => 1,
            BracketedTree::Node { children, .. } => {
                children.iter().map(BracketedTree::leaf_count).sum()
            }
        }
    }

    /// Constituent labels in preorder, terminals excluded.
    pub fn labels_preorder(&self) -> Vec<&str> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            if let BracketedTree::Node { label, children } = t {
                out.push(label.as_str());
                for c in children.iter().rev() {
                    stack.push(c);
                }
            }
        }
        out
    }

    /// Checks the shape assumed by projection and bracket extraction:
    /// the root is a constituent, every constituent has children, and
    /// tokens appear only under preterminals (no mixed children).
    pub fn well_formed(&self) -> Result<(), ParseError> {
        match self {
            BracketedTree::Leaf(token) => Err(ParseError {
                offset: 0,
                message: format!("bare token '{token}' outside any constituent"),
            }),
            BracketedTree::Node { label, children } => {
                if children.is_empty() {
                    return Err(ParseError {
                        offset: 0,
                        message: format!("constituent '{label}' has no children"),
                    });
                }
                let leaves = children.iter().filter(|c| c.is_leaf()).count();
                if leaves > 0 && leaves < children.len() {
                    return Err(ParseError {
                        offset: 0,
                        message: format!("constituent '{label}' mixes tokens and constituents"),
                    });
                }
                if leaves == 0 {
                    for c in children {
                        c.well_formed()?;
                    }
                }
                Ok(())
            }
        }
    }

    /// Copy with treebank function suffixes removed from labels: anything
    /// after a `-` or `=` at position >= 1 is dropped, so `NP-SBJ` becomes
    /// `NP` while `-NONE-` is kept verbatim.
    pub fn strip_label_suffixes(&self) -> BracketedTree {
        match self {
            BracketedTree::Leaf(t) => BracketedTree::Leaf(t.clone()),
            BracketedTree::Node { label, children } => {
                // Labels like -NONE- or -LRB- are special tokens, not
                // function-tagged labels.
                let stripped = if label.starts_with('-') || label.starts_with('=') {
                    label.clone()
                } else {
                    match label.char_indices().find(|(_, c)| *c == '-' || *c == '=') {
                        Some((idx, _)) => label[..idx].to_string(),
                        None => label.clone(),
                    }
                };
                BracketedTree::Node {
                    label: stripped,
                    children: children.iter().map(Self::strip_label_suffixes).collect(),
                }
            }
        }
    }

    /// Copy with the listed tokens removed; constituents left childless are
    /// pruned. Returns `None` when nothing survives.
    pub fn strip_tokens(&self, deny: &[&str]) -> Option<BracketedTree> {
        match self {
            BracketedTree::Leaf(t) => {
                if deny.contains(&t.as_str()) {
                    None
                } else {
                    Some(BracketedTree::Leaf(t.clone()))
                }
            }
            BracketedTree::Node { label, children } => {
                let kept: Vec<BracketedTree> = children
                    .iter()
                    .filter_map(|c| c.strip_tokens(deny))
                    .collect();
                if kept.is_empty() {
                    None
                } else {
                    Some(BracketedTree::Node {
                        label: label.clone(),
                        children: kept,
                    })
                }
            }
        }
    }

    pub fn render(&self) -> String {
        match self {
            BracketedTree::Leaf(t) => t.clone(),
            BracketedTree::Node { label, children } => {
                let mut s = String::new();
                s.push('(');
                s.push_str(label);
                for c in children {
                    s.push(' ');
                    s.push_str(&c.render());
                }
                s.push(')');
                s
            }
        }
    }
}

impl fmt::Display for BracketedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn skip_ws(chars: &[char], pos: &mut usize) {
    while *pos < chars.len() && chars[*pos].is_whitespace() {
        *pos += 1;
    }
}

fn parse_token(chars: &[char], pos: &mut usize) -> String {
    let start = *pos;
    while *pos < chars.len()
        && !chars[*pos].is_whitespace()
        && chars[*pos] != '('
        && chars[*pos] != ')'
    {
        *pos += 1;
    }
    chars[start..*pos].iter().collect()
}

fn parse_tree(chars: &[char], pos: &mut usize) -> Result<BracketedTree, ParseError> {
    if chars[*pos] != '(' {
        return Err(ParseError {
            offset: *pos,
            message: format!("expected '(', found '{}'", chars[*pos]),
        });
    }
    let open = *pos;
    *pos += 1;
    skip_ws(chars, pos);
    // Label is optional; "( (S ...) )" wrappers have none.
    let label = if *pos < chars.len() && chars[*pos] != '(' && chars[*pos] != ')' {
        parse_token(chars, pos)
    } else {
        String::new()
    };
    let mut children = Vec::new();
    loop {
        skip_ws(chars, pos);
        if *pos >= chars.len() {
            return Err(ParseError {
                offset: open,
                message: "unclosed '('".to_string(),
            });
        }
        match chars[*pos] {
            ')' => {
                *pos += 1;
                break;
            }
            '(' => children.push(parse_tree(chars, pos)?),
            _ => {
                let tok = parse_token(chars, pos);
                children.push(BracketedTree::Leaf(tok));
            }
        }
    }
    if children.is_empty() {
        return Err(ParseError {
            offset: open,
            message: if label.is_empty() {
                "empty brackets".to_string()
            } else {
                format!("constituent '{label}' has no children")
            },
        });
    }
    Ok(BracketedTree::Node { label, children })
}
