//! Training-file dialect: `## intent:NAME` headers, `- ` items, `[value](slot)` markers.

use std::collections::BTreeMap;

use serde::Serialize;

use super::IntentError;

const SPLIT_PUNCT: [char; 7] = ['.', '?', '!', ',', ';', ':', '"'];

/// Lowercases and splits on whitespace, peeling punctuation into separate
/// tokens. A possessive `'s` is dropped; a `.` between digits stays put.
pub fn tokenize(text: &str) -> Vec<String> {
    let lower = text.to_lowercase().replace('\u{2019}', "'");
    let mut out = Vec::new();
    for chunk in lower.split_whitespace() {
        if chunk == "'s" {
            continue;
        }
        let mut body = chunk;
        let mut lead = Vec::new();
        while let Some(c) = body.chars().next().filter(|c| SPLIT_PUNCT.contains(c) || *c == '\'') {
            lead.push(c.to_string());
            body = &body[c.len_utf8()..];
        }
        let mut trail = Vec::new();
        while let Some(c) = body.chars().last().filter(|c| SPLIT_PUNCT.contains(c) || *c == '\'') {
            trail.push(c.to_string());
            body = &body[..body.len() - c.len_utf8()];
        }
        out.extend(lead.into_iter().filter(|t| t != "'"));
        let possessive = body.strip_suffix("'s");
        let core = possessive.unwrap_or(body);
        for (i, piece) in core.split('\'').enumerate() {
            if i > 0 {
                out.push("'".to_string());
            }
            if !piece.is_empty() {
                out.push(piece.to_string());
            }
        }
        out.extend(trail.into_iter().rev().filter(|t| t != "'"));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum TemplateToken {
    Fixed(String),
    Slot(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UtteranceTemplate {
    pub tokens: Vec<TemplateToken>,
    /// Bracketed example value per slot, normalized the way `tokenize` would see it.
    pub examples: BTreeMap<String, String>,
    /// The sentence with markers replaced by their example values.
    pub example_text: String,
    pub line: usize,
}

impl UtteranceTemplate {
    pub fn fixed_count(&self) -> usize {
        self.tokens.iter().filter(|t| matches!(t, TemplateToken::Fixed(_))).count()
    }

    pub fn slot_names(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().filter_map(|t| match t {
            TemplateToken::Slot(s) => Some(s.as_str()),
            TemplateToken::Fixed(_) => None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntentSpec {
    pub name: String,
    pub templates: Vec<UtteranceTemplate>,
}

fn format_err(line: usize, reason: impl Into<String>) -> IntentError {
    IntentError::Format { line, reason: reason.into() }
}

fn is_slot_name(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_item(text: &str, line: usize) -> Result<UtteranceTemplate, IntentError> {
    let mut tokens = Vec::new();
    let mut examples = BTreeMap::new();
    let mut example_text = String::new();
    let mut rest = text;
    while !rest.is_empty() {
        match (rest.find('['), rest.find([']', '(', ')'])) {
            (Some(open), stray) if stray.is_none_or(|s| s > open) => {
                let before = &rest[..open];
                tokens.extend(tokenize(before).into_iter().map(TemplateToken::Fixed));
                example_text.push_str(before);
                let after = &rest[open + 1..];
                let close = after.find(']').ok_or_else(|| format_err(line, "unclosed '['"))?;
                let value = &after[..close];
                if value.contains('[') || value.trim().is_empty() {
                    return Err(format_err(line, format!("bad slot value {value:?}")));
                }
                let tail =
                    after[close + 1..].strip_prefix('(').ok_or_else(|| format_err(line, "expected '(' after ']'"))?;
                let end = tail.find(')').ok_or_else(|| format_err(line, "unclosed '('"))?;
                let name = &tail[..end];
                if !is_slot_name(name) {
                    return Err(format_err(line, format!("bad slot name {name:?}")));
                }
                if examples.insert(name.to_string(), tokenize(value).join(" ")).is_some() {
                    return Err(format_err(line, format!("slot {name:?} used twice")));
                }
                tokens.push(TemplateToken::Slot(name.to_string()));
                example_text.push_str(value);
                rest = &tail[end + 1..];
            }
            (_, Some(stray)) => return Err(format_err(line, format!("stray {:?}", &rest[stray..stray + 1]))),
            (None, None) => {
                tokens.extend(tokenize(rest).into_iter().map(TemplateToken::Fixed));
                example_text.push_str(rest);
                rest = "";
            }
            (Some(_), None) => unreachable!("guard covers a missing stray"),
        }
    }
    let template = UtteranceTemplate { tokens, examples, example_text, line };
    if template.fixed_count() == 0 {
        return Err(format_err(line, "template needs at least one fixed word"));
    }
    Ok(template)
}

/// Parses a training file into intents in file order.
pub fn parse_training_file(text: &str) -> Result<Vec<IntentSpec>, IntentError> {
    let mut specs: Vec<(IntentSpec, usize)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || (trimmed.starts_with("<!--") && trimmed.ends_with("-->")) {
            continue;
        }
        if let Some(name) = trimmed.strip_prefix("## intent:") {
            let name = name.trim();
            if !is_slot_name(name) {
                return Err(format_err(line, format!("bad intent name {name:?}")));
            }
            if specs.iter().any(|(s, _)| s.name == name) {
                return Err(format_err(line, format!("duplicate intent {name:?}")));
            }
            specs.push((IntentSpec { name: name.to_string(), templates: Vec::new() }, line));
        } else if let Some(item) = trimmed.strip_prefix("- ") {
            let (spec, _) = specs.last_mut().ok_or_else(|| format_err(line, "item outside an intent section"))?;
            spec.templates.push(parse_item(item, line)?);
        } else {
            return Err(format_err(line, format!("unexpected line {trimmed:?}")));
        }
    }
    if let Some((spec, line)) = specs.iter().find(|(s, _)| s.templates.is_empty()) {
        return Err(format_err(*line, format!("intent {:?} has no templates", spec.name)));
    }
    Ok(specs.into_iter().map(|(s, _)| s).collect())
}
