use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::tokenize::TokenSeq;
use crate::error::{Error, Result};

const NONE_FIELD: &str = "-NONE-";
const FIELD_SEP: &str = "|||";

/// A token-offset edit: replace `source[start..end]` with `replacement`.
///
/// `start == end` is an insertion before `start`; an empty replacement is a
/// deletion.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EditSpan {
    pub start: usize,
    pub end: usize,
    pub replacement: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub type_label: Option<String>,
}

impl EditSpan {
    pub fn new(start: usize, end: usize, replacement: impl Into<String>) -> Result<Self> {
        let replacement = replacement.into();
        if start > end {
            return Err(Error::Argument(format!("edit span {start}..{end} is reversed")));
        }
        if start == end && replacement.is_empty() {
            return Err(Error::Argument(format!(
                "edit span {start}..{end} neither removes nor inserts anything"
            )));
        }
        Ok(EditSpan {
            start,
            end,
            replacement,
            type_label: None,
        })
    }

    pub fn with_type(mut self, label: impl Into<String>) -> Self {
        self.type_label = Some(label.into());
        self
    }

    /// Replacement split into tokens (empty for a deletion).
    pub fn replacement_tokens(&self) -> impl Iterator<Item = &str> {
        self.replacement.split_whitespace()
    }

    /// Edits match when offsets and replacement agree; labels are ignored.
    pub fn matches(&self, other: &EditSpan) -> bool {
        self.start == other.start && self.end == other.end && self.replacement == other.replacement
    }
}

/// One annotator's complete correction of a sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatorSet {
    pub annotator: usize,
    pub edits: Vec<EditSpan>,
    /// The annotator explicitly marked the sentence as needing no change.
    pub noop: bool,
}

impl AnnotatorSet {
    pub fn noop(annotator: usize) -> Self {
        AnnotatorSet {
            annotator,
            edits: Vec::new(),
            noop: true,
        }
    }
}

/// A tokenized sentence together with every annotator's gold edits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldAnnotation {
    pub tokens: TokenSeq,
    pub annotators: Vec<AnnotatorSet>,
}

impl GoldAnnotation {
    /// Checks offset bounds, ordering and overlap of every annotator set.
    pub fn validate(&self) -> Result<()> {
        for set in &self.annotators {
            if set.noop && !set.edits.is_empty() {
                return Err(Error::Argument(format!(
                    "annotator {} is marked noop but carries edits",
                    set.annotator
                )));
            }
            check_edit_order(&set.edits, self.tokens.len()).map_err(|message| {
                Error::Argument(format!("annotator {}: {message}", set.annotator))
            })?;
        }
        Ok(())
    }
}

pub(crate) fn check_edit_order(edits: &[EditSpan], len: usize) -> std::result::Result<(), String> {
    for edit in edits {
        if edit.start > edit.end || edit.end > len {
            return Err(format!(
                "edit {}..{} outside sentence of {len} tokens",
                edit.start, edit.end
            ));
        }
    }
    for pair in edits.windows(2) {
        if (pair[0].start, pair[0].end) > (pair[1].start, pair[1].end) {
            return Err("edits are not sorted".into());
        }
        if pair[1].start < pair[0].end {
            return Err(format!(
                "edits {}..{} and {}..{} overlap",
                pair[0].start, pair[0].end, pair[1].start, pair[1].end
            ));
        }
    }
    Ok(())
}

enum AnnotatorLine {
    Noop,
    Edit(EditSpan),
}

struct PendingBlock {
    tokens: TokenSeq,
    lines: Vec<(usize, usize, AnnotatorLine)>,
}

fn parse_offset(raw: &str, line: usize) -> Result<i64> {
    raw.parse::<i64>()
        .map_err(|_| Error::parse(line, format!("offset '{raw}' is not an integer")))
}

fn parse_a_line(body: &str, line: usize, sentence_len: usize) -> Result<(usize, AnnotatorLine)> {
    let fields: Vec<&str> = body.split(FIELD_SEP).collect();
    if fields.len() < 3 {
        return Err(Error::parse(line, "A-line needs at least offsets, type and correction"));
    }
    let offsets: Vec<&str> = fields[0].split_whitespace().collect();
    if offsets.len() != 2 {
        return Err(Error::parse(line, "A-line must start with two offsets"));
    }
    let start = parse_offset(offsets[0], line)?;
    let end = parse_offset(offsets[1], line)?;
    let annotator = match fields.get(5) {
        Some(raw) => raw
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::parse(line, format!("annotator id '{}' is not an integer", raw.trim())))?,
        None => 0,
    };

    if start == -1 && end == -1 {
        return Ok((annotator, AnnotatorLine::Noop));
    }
    if start < 0 || end < 0 || start > end || end as usize > sentence_len {
        return Err(Error::parse(
            line,
            format!("offsets {start} {end} out of range for a {sentence_len}-token sentence"),
        ));
    }

    let type_label = match fields[1].trim() {
        "" | NONE_FIELD => None,
        label => Some(label.to_owned()),
    };
    let replacement = match fields[2].trim() {
        NONE_FIELD => String::new(),
        text => text.split_whitespace().collect::<Vec<_>>().join(" "),
    };
    let mut edit = EditSpan::new(start as usize, end as usize, replacement)
        .map_err(|e| Error::parse(line, e.to_string()))?;
    edit.type_label = type_label;
    Ok((annotator, AnnotatorLine::Edit(edit)))
}

fn finish_block(block: PendingBlock) -> Result<GoldAnnotation> {
    let PendingBlock { tokens, lines } = block;
    if lines.is_empty() {
        return Ok(GoldAnnotation {
            tokens,
            annotators: vec![AnnotatorSet {
                annotator: 0,
                edits: Vec::new(),
                noop: false,
            }],
        });
    }

    let mut grouped: BTreeMap<usize, (Option<usize>, Vec<(usize, EditSpan)>)> = BTreeMap::new();
    for (line, annotator, parsed) in lines {
        let entry = grouped.entry(annotator).or_default();
        match parsed {
            AnnotatorLine::Noop => entry.0 = Some(line),
            AnnotatorLine::Edit(edit) => entry.1.push((line, edit)),
        }
    }

    let mut annotators = Vec::with_capacity(grouped.len());
    for (annotator, (noop_line, mut edits)) in grouped {
        if let (Some(line), false) = (noop_line, edits.is_empty()) {
            return Err(Error::parse(
                line,
                format!("annotator {annotator} has both a noop line and edits"),
            ));
        }
        edits.sort_by_key(|(_, e)| (e.start, e.end));
        for pair in edits.windows(2) {
            if pair[1].1.start < pair[0].1.end {
                return Err(Error::parse(
                    pair[1].0.max(pair[0].0),
                    format!("overlapping edits for annotator {annotator}"),
                ));
            }
        }
        let noop = edits.is_empty();
        annotators.push(AnnotatorSet {
            annotator,
            edits: edits.into_iter().map(|(_, e)| e).collect(),
            noop,
        });
    }
    Ok(GoldAnnotation { tokens, annotators })
}

/// Parses M2 gold-edit content into one annotation per sentence block.
///
/// Edits are grouped by the trailing annotator field and sorted within each
/// group. A block with no A-lines yields a single implicit, empty annotator.
pub fn parse_m2(content: &str) -> Result<Vec<GoldAnnotation>> {
    let mut annotations = Vec::new();
    let mut current: Option<PendingBlock> = None;

    for (idx, raw) in content.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            if let Some(block) = current.take() {
                annotations.push(finish_block(block)?);
            }
            continue;
        }
        if let Some(rest) = line.strip_prefix('S').filter(|r| r.is_empty() || r.starts_with([' ', '\t'])) {
            if let Some(block) = current.take() {
                annotations.push(finish_block(block)?);
            }
            current = Some(PendingBlock {
                tokens: TokenSeq::from_pretokenized(rest),
                lines: Vec::new(),
            });
        } else if let Some(rest) = line.strip_prefix("A ") {
            let block = current
                .as_mut()
                .ok_or_else(|| Error::parse(line_no, "A-line before any S-line"))?;
            let (annotator, parsed) = parse_a_line(rest, line_no, block.tokens.len())?;
            block.lines.push((line_no, annotator, parsed));
        } else {
            return Err(Error::parse(line_no, "expected an S-line, an A-line or a blank line"));
        }
    }
    if let Some(block) = current.take() {
        annotations.push(finish_block(block)?);
    }
    Ok(annotations)
}

/// Serializes annotations to M2, one blank-line-terminated block each.
pub fn write_m2(annotations: &[GoldAnnotation]) -> String {
    let mut out = String::new();
    for annotation in annotations {
        out.push('S');
        for token in annotation.tokens.iter() {
            out.push(' ');
            out.push_str(token);
        }
        out.push('\n');
        let implicit = annotation.annotators.len() == 1
            && annotation.annotators[0].annotator == 0
            && !annotation.annotators[0].noop
            && annotation.annotators[0].edits.is_empty();
        if !implicit {
            for set in &annotation.annotators {
                if set.edits.is_empty() {
                    let _ = writeln!(
                        out,
                        "A -1 -1{FIELD_SEP}noop{FIELD_SEP}{NONE_FIELD}{FIELD_SEP}REQUIRED{FIELD_SEP}{NONE_FIELD}{FIELD_SEP}{}",
                        set.annotator
                    );
                }
                for edit in &set.edits {
                    let replacement = if edit.replacement.is_empty() {
                        NONE_FIELD
                    } else {
                        edit.replacement.as_str()
                    };
                    let _ = writeln!(
                        out,
                        "A {} {}{FIELD_SEP}{}{FIELD_SEP}{}{FIELD_SEP}REQUIRED{FIELD_SEP}{NONE_FIELD}{FIELD_SEP}{}",
                        edit.start,
                        edit.end,
                        edit.type_label.as_deref().unwrap_or(NONE_FIELD),
                        replacement,
                        set.annotator
                    );
                }
            }
        }
        out.push('\n');
    }
    out
}
