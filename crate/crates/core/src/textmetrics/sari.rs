use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ngrams::{mean, ngram_counts};
use crate::corpus::tokenize;
use crate::error::{Error, Result};

const MAX_ORDER: usize = 4;

/// SARI and its three components, each averaged over n-gram orders 1 to 4.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SariScore {
    pub f_add: f64,
    pub f_keep: f64,
    pub p_del: f64,
    pub sari: f64,
    pub scaled: f64,
}

impl SariScore {
    fn from_components(f_add: f64, f_keep: f64, p_del: f64) -> Self {
        let sari = (f_add + f_keep + p_del) / 3.0;
        SariScore {
            f_add,
            f_keep,
            p_del,
            sari,
            scaled: 100.0 * sari,
        }
    }
}

fn f1(precision: f64, recall: f64) -> f64 {
    if precision > 0.0 || recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

fn ratio(num: f64, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num / den as f64
    }
}

/// Keep F1, deletion precision and addition F1 for one n-gram order.
///
/// Source and hypothesis counts are scaled by the number of references and
/// compared against reference counts summed over all references, which is
/// what makes the multi-reference counts fractional. Any 0/0 is 0.
fn order_scores(
    source: &[String],
    hypothesis: &[String],
    references: &[Vec<String>],
    n: usize,
) -> (f64, f64, f64) {
    let num_refs = references.len();
    let src = ngram_counts(source, n);
    let hyp = ngram_counts(hypothesis, n);
    let mut refs: HashMap<&[String], usize> = HashMap::new();
    for reference in references {
        for (gram, count) in ngram_counts(reference, n) {
            *refs.entry(gram).or_insert(0) += count;
        }
    }
    let ref_count = |g: &[String]| refs.get(g).copied().unwrap_or(0);
    let hyp_rep = |g: &[String]| hyp.get(g).copied().unwrap_or(0) * num_refs;

    // keep: grams present in both source and hypothesis
    let (mut kept_types, mut keep_p, mut keep_r) = (0usize, 0.0, 0.0);
    // grams of the source that some reference also keeps
    let mut keepable_types = 0usize;
    // delete: grams the hypothesis has fewer of than the source
    let (mut deleted_types, mut del_p) = (0usize, 0.0);
    for (&gram, &count) in &src {
        let s = count * num_refs;
        let c = hyp_rep(gram);
        let r = ref_count(gram);

        let kept = s.min(c);
        let keepable = s.min(r);
        if keepable > 0 {
            keepable_types += 1;
        }
        if kept > 0 {
            kept_types += 1;
            let good = kept.min(r);
            if good > 0 {
                keep_p += good as f64 / kept as f64;
                keep_r += good as f64 / keepable as f64;
            }
        }

        let deleted = s.saturating_sub(c);
        if deleted > 0 {
            deleted_types += 1;
            let good = deleted.saturating_sub(r);
            if good > 0 {
                del_p += good as f64 / deleted as f64;
            }
        }
    }
    let keep = f1(ratio(keep_p, kept_types), ratio(keep_r, keepable_types));
    let delete = ratio(del_p, deleted_types);

    // add: grams new in the hypothesis, judged as sets
    let added = hyp.keys().filter(|g| !src.contains_key(*g)).count();
    let added_good = hyp
        .keys()
        .filter(|g| !src.contains_key(*g) && refs.contains_key(*g))
        .count();
    let addable = refs.keys().filter(|g| !src.contains_key(*g)).count();
    let add = f1(
        ratio(added_good as f64, added),
        ratio(added_good as f64, addable),
    );

    (keep, delete, add)
}

fn lowercase_tokens(text: &str) -> Vec<String> {
    tokenize(text).iter().map(|t| t.to_lowercase()).collect()
}

/// Sentence-level SARI. Texts are tokenized and lowercased first.
pub fn sari_sentence<S: AsRef<str>>(source: &str, hypothesis: &str, references: &[S]) -> SariScore {
    let source = lowercase_tokens(source);
    let hypothesis = lowercase_tokens(hypothesis);
    let references: Vec<Vec<String>> = references
        .iter()
        .map(|r| lowercase_tokens(r.as_ref()))
        .collect();
    if references.is_empty() {
        return SariScore::from_components(0.0, 0.0, 0.0);
    }

    let (mut keep, mut delete, mut add) = (0.0, 0.0, 0.0);
    for n in 1..=MAX_ORDER {
        let (k, d, a) = order_scores(&source, &hypothesis, &references, n);
        keep += k;
        delete += d;
        add += a;
    }
    let orders = MAX_ORDER as f64;
    SariScore::from_components(add / orders, keep / orders, delete / orders)
}

/// Borrowed (source, hypothesis, references) triple.
#[derive(Debug, Clone, Copy)]
pub struct SariInput<'a> {
    pub source: &'a str,
    pub hypothesis: &'a str,
    pub references: &'a [String],
}

/// Macro-average of sentence-level SARI.
pub fn sari_corpus(examples: &[SariInput<'_>]) -> Result<SariScore> {
    if examples.is_empty() {
        return Err(Error::Argument("SARI needs at least one example".into()));
    }
    if let Some(i) = examples.iter().position(|e| e.references.is_empty()) {
        return Err(Error::Scoring {
            index: i,
            message: "example has no references".into(),
        });
    }
    let scores: Vec<SariScore> = examples
        .par_iter()
        .map(|e| sari_sentence(e.source, e.hypothesis, e.references))
        .collect();
    let column = |f: fn(&SariScore) -> f64| mean(&scores.iter().map(f).collect::<Vec<_>>());
    Ok(SariScore::from_components(
        column(|s| s.f_add),
        column(|s| s.f_keep),
        column(|s| s.p_del),
    ))
}
