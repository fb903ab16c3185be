//! Span-based GEC scoring: edit extraction by token alignment, exact-match
//! comparison against multi-annotator gold, and micro-averaged F-beta.

mod align;

pub use align::{apply_edits, extract_edits};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{tokenize, EditSpan, GoldAnnotation};
use crate::error::{Error, Result};

pub const DEFAULT_BETA: f64 = 0.5;

/// Precision, recall and F-beta from raw counts.
///
/// Undefined precision or recall (0/0) counts as 1; F-beta is 0 whenever
/// precision or recall is 0.
pub fn precision_recall_fbeta(tp: usize, fp: usize, fn_: usize, beta: f64) -> (f64, f64, f64) {
    let ratio = |num: usize, den: usize| if den == 0 { 1.0 } else { num as f64 / den as f64 };
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    let f = if precision * recall == 0.0 {
        0.0
    } else {
        let b2 = beta * beta;
        (1.0 + b2) * precision * recall / (b2 * precision + recall)
    };
    (precision, recall, f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GecSentenceResult {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    #[serde(rename = "annotator")]
    pub chosen_annotator: usize,
}

/// Corpus-level counts and the derived metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GecCorpusScore {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
    pub f_beta: f64,
    pub beta: f64,
    pub scaled: f64,
}

impl GecCorpusScore {
    pub fn from_counts(tp: usize, fp: usize, fn_: usize, beta: f64) -> Self {
        let (precision, recall, f_beta) = precision_recall_fbeta(tp, fp, fn_, beta);
        GecCorpusScore {
            tp,
            fp,
            fn_,
            precision,
            recall,
            f_beta,
            beta,
            scaled: 100.0 * f_beta,
        }
    }
}

/// One line of the per-sentence diagnostics JSONL.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceDiagnostic {
    pub idx: usize,
    #[serde(flatten)]
    pub result: GecSentenceResult,
}

#[derive(Debug, Clone)]
pub struct GecCorpusReport {
    pub score: GecCorpusScore,
    pub sentences: Vec<GecSentenceResult>,
}

impl GecCorpusReport {
    pub fn diagnostics(&self) -> impl Iterator<Item = SentenceDiagnostic> + '_ {
        self.sentences
            .iter()
            .enumerate()
            .map(|(idx, &result)| SentenceDiagnostic { idx, result })
    }
}

fn count_matches(candidate: &[EditSpan], gold: &[EditSpan]) -> usize {
    // Both lists are sorted and non-overlapping, so an edit matches at most
    // one gold edit.
    candidate
        .iter()
        .filter(|c| gold.iter().any(|g| g.matches(c)))
        .count()
}

/// Scores candidate edits against the annotator whose gold set gives the
/// highest sentence-level F-beta (ties go to the lowest index).
pub fn score_sentence_with_beta(
    candidate: &[EditSpan],
    gold: &GoldAnnotation,
    beta: f64,
) -> Result<GecSentenceResult> {
    let mut best: Option<(f64, GecSentenceResult)> = None;
    for (index, set) in gold.annotators.iter().enumerate() {
        let tp = count_matches(candidate, &set.edits);
        let result = GecSentenceResult {
            tp,
            fp: candidate.len() - tp,
            fn_: set.edits.len() - tp,
            chosen_annotator: index,
        };
        let (_, _, f) = precision_recall_fbeta(result.tp, result.fp, result.fn_, beta);
        if best.is_none_or(|(best_f, _)| f > best_f) {
            best = Some((f, result));
        }
    }
    best.map(|(_, r)| r)
        .ok_or_else(|| Error::Score("gold annotation has no annotator sets".into()))
}

pub fn score_sentence(candidate: &[EditSpan], gold: &GoldAnnotation) -> Result<GecSentenceResult> {
    score_sentence_with_beta(candidate, gold, DEFAULT_BETA)
}

/// Extracts and scores edits for every sentence, then sums the counts
/// corpus-wide before computing precision, recall and F-beta.
pub fn score_gec_corpus(
    sources: &[String],
    hypotheses: &[String],
    gold: &[GoldAnnotation],
    beta: f64,
) -> Result<GecCorpusReport> {
    if sources.len() != hypotheses.len() || sources.len() != gold.len() {
        return Err(Error::Argument(format!(
            "length mismatch: {} sources, {} hypotheses, {} gold annotations",
            sources.len(),
            hypotheses.len(),
            gold.len()
        )));
    }
    let sentences = sources
        .par_iter()
        .zip(hypotheses.par_iter())
        .zip(gold.par_iter())
        .enumerate()
        .map(|(index, ((source, hypothesis), gold))| {
            let source_tokens = tokenize(source);
            if source_tokens != gold.tokens {
                return Err(Error::Scoring {
                    index,
                    message: "source tokenization differs from the gold S-line".into(),
                });
            }
            let edits = extract_edits(&source_tokens, &tokenize(hypothesis));
            score_sentence_with_beta(&edits, gold, beta)
                .map_err(|e| Error::Scoring { index, message: e.to_string() })
        })
        .collect::<Result<Vec<_>>>()?;

    let (tp, fp, fn_) = sentences
        .iter()
        .fold((0, 0, 0), |(tp, fp, fn_), r| (tp + r.tp, fp + r.fp, fn_ + r.fn_));
    Ok(GecCorpusReport {
        score: GecCorpusScore::from_counts(tp, fp, fn_, beta),
        sentences,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{parse_m2, AnnotatorSet, TokenSeq};

    fn edit(start: usize, end: usize, text: &str) -> EditSpan {
        EditSpan::new(start, end, text).unwrap()
    }

    fn gold(sets: Vec<Vec<EditSpan>>) -> GoldAnnotation {
        GoldAnnotation {
            tokens: TokenSeq::from_pretokenized("a b c d e"),
            annotators: sets
                .into_iter()
                .enumerate()
                .map(|(annotator, edits)| AnnotatorSet {
                    annotator,
                    noop: edits.is_empty(),
                    edits,
                })
                .collect(),
        }
    }

    #[test]
    fn fbeta_arithmetic() {
        let (p, r, f) = precision_recall_fbeta(1, 1, 0, 0.5);
        assert_eq!((p, r), (0.5, 1.0));
        assert!((f - 1.25 * 0.5 / (0.25 * 0.5 + 1.0)).abs() < 1e-12);
        assert!((100.0 * f - 55.555_555).abs() < 1e-4);
        assert_eq!(precision_recall_fbeta(0, 0, 0, 0.5), (1.0, 1.0, 1.0));
        assert_eq!(precision_recall_fbeta(0, 0, 3, 0.5), (1.0, 0.0, 0.0));
        assert_eq!(precision_recall_fbeta(0, 2, 0, 0.5), (0.0, 1.0, 0.0));
    }

    #[test]
    fn perfect_candidate() {
        let g = gold(vec![vec![edit(0, 1, "x"), edit(2, 3, "y")]]);
        let r = score_sentence(&g.annotators[0].edits, &g).unwrap();
        assert_eq!((r.tp, r.fp, r.fn_), (2, 0, 0));
    }

    #[test]
    fn empty_candidate_misses_everything() {
        let g = gold(vec![vec![edit(0, 1, "x"), edit(2, 3, "y")]]);
        let r = score_sentence(&[], &g).unwrap();
        assert_eq!((r.tp, r.fp, r.fn_), (0, 0, 2));
    }

    #[test]
    fn spurious_edit_counts_as_false_positive() {
        let g = gold(vec![vec![edit(0, 1, "x")]]);
        let r = score_sentence(&[edit(0, 1, "x"), edit(3, 4, "z")], &g).unwrap();
        assert_eq!((r.tp, r.fp, r.fn_), (1, 1, 0));
    }

    #[test]
    fn type_labels_do_not_affect_matching() {
        let g = gold(vec![vec![edit(0, 1, "x").with_type("Spelling")]]);
        let r = score_sentence(&[edit(0, 1, "x")], &g).unwrap();
        assert_eq!(r.tp, 1);
    }

    #[test]
    fn best_annotator_is_selected() {
        let g = gold(vec![vec![edit(0, 1, "x")], vec![edit(2, 3, "y")], vec![]]);
        let r = score_sentence(&[edit(2, 3, "y")], &g).unwrap();
        assert_eq!(r.chosen_annotator, 1);
        // copy prefers the noop annotator
        let r = score_sentence(&[], &g).unwrap();
        assert_eq!((r.chosen_annotator, r.fn_), (2, 0));
        // ties keep the first annotator
        let g = gold(vec![vec![edit(0, 1, "x")], vec![edit(0, 1, "x")]]);
        assert_eq!(score_sentence(&[edit(0, 1, "x")], &g).unwrap().chosen_annotator, 0);
    }

    #[test]
    fn no_annotators_is_an_error() {
        let g = gold(vec![]);
        assert!(matches!(score_sentence(&[], &g), Err(Error::Score(_))));
    }

    #[test]
    fn corpus_scoring_paths() {
        let gold = parse_m2(
            "S а ти йдеш .\nA 0 1|||Orth|||А|||REQUIRED|||-NONE-|||0\n\n\
             S він прийде завтра\nA 3 3|||Punct|||.|||REQUIRED|||-NONE-|||0\n",
        )
        .unwrap();
        let sources = vec!["а ти йдеш.".to_owned(), "він прийде завтра".to_owned()];
        let copy = score_gec_corpus(&sources, &sources, &gold, 0.5).unwrap();
        assert_eq!(copy.score.scaled, 0.0);
        assert_eq!((copy.score.precision, copy.score.recall), (1.0, 0.0));

        let fixed = vec!["А ти йдеш.".to_owned(), "він прийде завтра.".to_owned()];
        let perfect = score_gec_corpus(&sources, &fixed, &gold, 0.5).unwrap();
        assert_eq!(perfect.score.scaled, 100.0);

        assert!(matches!(
            score_gec_corpus(&sources[..1], &fixed, &gold, 0.5),
            Err(Error::Argument(_))
        ));
        let wrong = vec!["а ти йдеш!".to_owned(), sources[1].clone()];
        assert!(matches!(
            score_gec_corpus(&wrong, &fixed, &gold, 0.5),
            Err(Error::Scoring { index: 0, .. })
        ));
    }

    #[test]
    fn diagnostics_serialize_with_short_names() {
        let d = SentenceDiagnostic {
            idx: 3,
            result: GecSentenceResult { tp: 1, fp: 2, fn_: 0, chosen_annotator: 1 },
        };
        assert_eq!(
            serde_json::to_string(&d).unwrap(),
            r#"{"idx":3,"tp":1,"fp":2,"fn":0,"annotator":1}"#
        );
    }
}
