//! Line-oriented plot corpus format for hand-authored fixtures.
//!
//! ```text
//! # comment
//! FRAG 746: B, who was thought by the people of her community ...
//! -> 1441a ch A to B
//! -> 1373 ch A to B
//! FRAG 1441a: A seeks to discover the secret of Life
//! -> 746 ch B to A
//! FRAG 1373: A sells his shadow for an inexhaustible purse
//! ```
//!
//! Edge lines belong to the closest preceding `FRAG`. A label is zero or
//! more `ch X to Y` clauses separated by commas.

use super::plot::{PendingEdge, PlotGraph, Substitution, SubstitutionEdge};
use super::{CorpusError, SymbolAlphabet};

pub fn parse_plotto(source: &str, alphabet: SymbolAlphabet) -> Result<PlotGraph, CorpusError> {
    let mut fragments: Vec<(String, String, Option<usize>)> = Vec::new();
    let mut edges = Vec::new();

    for (idx, raw) in source.lines().enumerate() {
        let line_no = idx + 1;
        let body = raw.trim_start();
        let indent = raw.len() - body.len();
        let body = body.trim_end();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }

        if let Some(rest) = body.strip_prefix("FRAG") {
            if !rest.starts_with(char::is_whitespace) {
                return Err(syntax(raw, line_no, indent, "expected whitespace after FRAG"));
            }
            let Some(colon) = rest.find(':') else {
                return Err(syntax(raw, line_no, indent + 4, "expected ':' after fragment id"));
            };
            let id = rest[..colon].trim();
            if id.is_empty() || id.contains(char::is_whitespace) {
                return Err(syntax(raw, line_no, indent + 4, "fragment id must be a single non-empty word"));
            }
            let text = rest[colon + 1..].trim();
            if text.is_empty() {
                return Err(syntax(raw, line_no, indent + 5 + colon, "fragment text is empty"));
            }
            if fragments.iter().any(|(existing, _, _)| existing == id) {
                return Err(CorpusError::DuplicateFragment {
                    id: id.to_string(),
                    line: Some(line_no),
                });
            }
            fragments.push((id.to_string(), text.to_string(), Some(line_no)));
        } else if let Some(rest) = body.strip_prefix("->") {
            let Some((from, _, _)) = fragments.last() else {
                return Err(syntax(raw, line_no, indent, "edge before any FRAG record"));
            };
            let offset = indent + 2;
            let trimmed = rest.trim_start();
            let offset = offset + (rest.len() - trimmed.len());
            let (to, label) = match trimmed.find(char::is_whitespace) {
                Some(i) => (&trimmed[..i], &trimmed[i..]),
                None => (trimmed, ""),
            };
            if to.is_empty() {
                return Err(syntax(raw, line_no, offset, "expected target fragment id"));
            }
            let substitutions = parse_label(raw, line_no, offset + to.len(), label)?;
            edges.push(PendingEdge {
                edge: SubstitutionEdge {
                    from: from.clone(),
                    to: to.to_string(),
                    substitutions,
                },
                line: Some(line_no),
            });
        } else {
            return Err(syntax(raw, line_no, indent, "expected FRAG or -> record"));
        }
    }

    PlotGraph::build(fragments, edges, alphabet)
}

/// Parses `ch X to Y{, ch X to Y}`. `offset` is the byte offset of `label` in `line`.
fn parse_label(
    line: &str,
    line_no: usize,
    offset: usize,
    label: &str,
) -> Result<Vec<Substitution>, CorpusError> {
    if label.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut subs = Vec::new();
    let mut pos = offset;
    for clause in label.split(',') {
        let lead = clause.len() - clause.trim_start().len();
        let words: Vec<&str> = clause.split_whitespace().collect();
        match words.as_slice() {
            ["ch", old, "to", new] if is_symbol_word(old) && is_symbol_word(new) => {
                subs.push(Substitution::new(*old, *new));
            }
            _ => {
                return Err(syntax(
                    line,
                    line_no,
                    pos + lead,
                    &format!("unrecognised edge label {:?}, expected 'ch X to Y'", clause.trim()),
                ))
            }
        }
        pos += clause.len() + 1;
    }
    Ok(subs)
}

fn is_symbol_word(w: &str) -> bool {
    !w.is_empty() && w.chars().all(char::is_alphanumeric)
}

fn syntax(line: &str, line_no: usize, byte_offset: usize, message: &str) -> CorpusError {
    let column = line[..byte_offset.min(line.len())].chars().count() + 1;
    CorpusError::Syntax {
        line: line_no,
        column,
        message: message.to_string(),
    }
}
