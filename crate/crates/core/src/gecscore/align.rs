use std::collections::HashMap;

use crate::corpus::m2::check_edit_order;
use crate::corpus::{EditSpan, TokenSeq};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    Match,
    Substitute,
    Transpose,
    Delete,
    Insert,
}

impl Op {
    fn source_len(self) -> usize {
        match self {
            Op::Match | Op::Substitute | Op::Delete => 1,
            Op::Transpose => 2,
            Op::Insert => 0,
        }
    }

    fn target_len(self) -> usize {
        match self {
            Op::Match | Op::Substitute | Op::Insert => 1,
            Op::Transpose => 2,
            Op::Delete => 0,
        }
    }
}

fn intern<'a>(tokens: &'a [String], table: &mut HashMap<&'a str, u32>) -> Vec<u32> {
    tokens
        .iter()
        .map(|t| {
            let next = table.len() as u32;
            *table.entry(t.as_str()).or_insert(next)
        })
        .collect()
}

/// Minimal-cost alignment (restricted Damerau-Levenshtein, unit costs) as a
/// forward list of operations.
///
/// Costs are computed over suffixes and the alignment is read front to back,
/// so among equally cheap alignments edits sit as far right as possible
/// (`дуже дуже` -> `дуже` deletes the second copy).
fn align(source: &[u32], target: &[u32]) -> Vec<Op> {
    let (n, m) = (source.len(), target.len());
    let width = m + 1;
    let mut cost = vec![0u32; (n + 1) * width];
    let at = |i: usize, j: usize| i * width + j;
    let swapped = |i: usize, j: usize| {
        i + 1 < n && j + 1 < m && source[i] == target[j + 1] && source[i + 1] == target[j]
    };
    for i in 0..=n {
        cost[at(i, m)] = (n - i) as u32;
    }
    for j in 0..=m {
        cost[at(n, j)] = (m - j) as u32;
    }
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            let diagonal = cost[at(i + 1, j + 1)] + u32::from(source[i] != target[j]);
            let mut best = diagonal
                .min(cost[at(i + 1, j)] + 1)
                .min(cost[at(i, j + 1)] + 1);
            if swapped(i, j) {
                best = best.min(cost[at(i + 2, j + 2)] + 1);
            }
            cost[at(i, j)] = best;
        }
    }

    // Preference: match > substitution > transposition > deletion > insertion.
    let mut ops = Vec::with_capacity(n.max(m));
    let (mut i, mut j) = (0, 0);
    while i < n || j < m {
        let here = cost[at(i, j)];
        let both = i < n && j < m;
        let op = if both && source[i] == target[j] && here == cost[at(i + 1, j + 1)] {
            Op::Match
        } else if both && source[i] != target[j] && here == cost[at(i + 1, j + 1)] + 1 {
            Op::Substitute
        } else if swapped(i, j) && here == cost[at(i + 2, j + 2)] + 1 {
            Op::Transpose
        } else if i < n && here == cost[at(i + 1, j)] + 1 {
            Op::Delete
        } else {
            Op::Insert
        };
        i += op.source_len();
        j += op.target_len();
        ops.push(op);
    }
    ops
}

/// Extracts the edits turning `source` into `hypothesis`.
///
/// Tokens are aligned with a minimal-cost Damerau-Levenshtein alignment and
/// every maximal run of adjacent non-match operations becomes one span.
pub fn extract_edits(source: &TokenSeq, hypothesis: &TokenSeq) -> Vec<EditSpan> {
    let mut table = HashMap::new();
    let src_ids = intern(source, &mut table);
    let hyp_ids = intern(hypothesis, &mut table);
    let ops = align(&src_ids, &hyp_ids);

    let mut edits = Vec::new();
    let (mut i, mut j) = (0, 0);
    let mut run: Option<(usize, usize)> = None;
    let flush = |run: &mut Option<(usize, usize)>, i: usize, j: usize, edits: &mut Vec<EditSpan>| {
        if let Some((start, hyp_start)) = run.take() {
            edits.push(EditSpan {
                start,
                end: i,
                replacement: hypothesis[hyp_start..j].join(" "),
                type_label: None,
            });
        }
    };
    for op in ops {
        if op == Op::Match {
            flush(&mut run, i, j, &mut edits);
        } else if run.is_none() {
            run = Some((i, j));
        }
        i += op.source_len();
        j += op.target_len();
    }
    flush(&mut run, i, j, &mut edits);
    edits
}

/// Applies sorted, non-overlapping edits to `source`.
pub fn apply_edits(source: &TokenSeq, edits: &[EditSpan]) -> Result<TokenSeq> {
    check_edit_order(edits, source.len()).map_err(Error::Argument)?;
    let mut tokens: Vec<String> = source.to_vec();
    for edit in edits.iter().rev() {
        tokens.splice(
            edit.start..edit.end,
            edit.replacement_tokens().map(str::to_owned),
        );
    }
    Ok(TokenSeq::new(tokens))
}
