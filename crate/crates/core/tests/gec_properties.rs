use proptest::prelude::*;
use redaktor_core::corpus::{AnnotatorSet, EditSpan, GoldAnnotation, TokenSeq};
use redaktor_core::gecscore::{
    apply_edits, extract_edits, precision_recall_fbeta, score_sentence, GecCorpusScore,
};

fn tokens(max: usize) -> impl Strategy<Value = TokenSeq> {
    prop::collection::vec(prop::sample::select(vec!["а", "б", "в", "г", ",", "ї", "зв'язок"]), 0..max)
        .prop_map(|v| v.into_iter().collect())
}

/// Sorted, non-overlapping edits over a sentence of `len` tokens.
fn edit_set(len: usize) -> impl Strategy<Value = Vec<EditSpan>> {
    prop::collection::vec((0..=len, 0usize..3, prop::sample::select(vec!["x", "y", "", "x y"])), 0..4)
        .prop_map(move |raw| {
            let mut edits: Vec<EditSpan> = Vec::new();
            let mut cursor = 0;
            let mut sorted = raw;
            sorted.sort();
            for (start, width, text) in sorted {
                let start = start.max(cursor);
                let end = (start + width).min(len);
                if start > len || (start == end && text.is_empty()) {
                    continue;
                }
                if let Some(prev) = edits.last() {
                    if prev.start == prev.end && start == prev.end && start == end {
                        continue;
                    }
                }
                edits.push(EditSpan::new(start, end, text).unwrap());
                cursor = end.max(start + usize::from(start == end));
            }
            edits
        })
}

fn gold_with(len: usize, max_annotators: usize) -> impl Strategy<Value = (TokenSeq, Vec<Vec<EditSpan>>)> {
    let sentence: TokenSeq = (0..len).map(|i| ["а", "б", "в"][i % 3]).collect();
    prop::collection::vec(edit_set(len), 1..=max_annotators).prop_map(move |sets| (sentence.clone(), sets))
}

fn annotation(tokens: TokenSeq, sets: Vec<Vec<EditSpan>>) -> GoldAnnotation {
    GoldAnnotation {
        tokens,
        annotators: sets
            .into_iter()
            .enumerate()
            .map(|(annotator, edits)| AnnotatorSet { annotator, noop: edits.is_empty(), edits })
            .collect(),
    }
}

/// Independent oracle: nested-loop matching and a direct F0.5 formula.
fn brute_force_choice(candidate: &[EditSpan], gold: &GoldAnnotation) -> (usize, usize, usize, usize) {
    let mut best: Option<(f64, (usize, usize, usize, usize))> = None;
    for (index, set) in gold.annotators.iter().enumerate() {
        let mut tp = 0;
        for c in candidate {
            for g in &set.edits {
                if (c.start, c.end, &c.replacement) == (g.start, g.end, &g.replacement) {
                    tp += 1;
                    break;
                }
            }
        }
        let fp = candidate.len() - tp;
        let fn_ = set.edits.len() - tp;
        let p = if tp + fp == 0 { 1.0 } else { tp as f64 / (tp + fp) as f64 };
        let r = if tp + fn_ == 0 { 1.0 } else { tp as f64 / (tp + fn_) as f64 };
        let f = if p == 0.0 || r == 0.0 { 0.0 } else { 1.25 * p * r / (0.25 * p + r) };
        match best {
            Some((best_f, _)) if best_f >= f => {}
            _ => best = Some((f, (index, tp, fp, fn_))),
        }
    }
    best.unwrap().1
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn apply_inverts_extract(source in tokens(14), hypothesis in tokens(14)) {
        let edits = extract_edits(&source, &hypothesis);
        prop_assert_eq!(apply_edits(&source, &edits).unwrap(), hypothesis);
        for pair in edits.windows(2) {
            // merged spans never touch each other
            prop_assert!(pair[0].end < pair[1].start);
        }
    }

    #[test]
    fn best_annotator_equals_brute_force(
        (tokens, sets) in (1usize..8).prop_flat_map(|len| gold_with(len, 3)),
        pick in 0usize..4,
        extra in edit_set(7),
    ) {
        let gold = annotation(tokens, sets);
        let candidate = if pick < gold.annotators.len() {
            gold.annotators[pick].edits.clone()
        } else {
            extra.into_iter().filter(|e| e.end <= gold.tokens.len()).collect()
        };
        let result = score_sentence(&candidate, &gold).unwrap();
        let (index, tp, fp, fn_) = brute_force_choice(&candidate, &gold);
        prop_assert_eq!(
            (result.chosen_annotator, result.tp, result.fp, result.fn_),
            (index, tp, fp, fn_)
        );
    }

    #[test]
    fn fbeta_stays_in_unit_interval(tp in 0usize..50, fp in 0usize..50, fn_ in 0usize..50, beta in 0.1f64..4.0) {
        let (p, r, f) = precision_recall_fbeta(tp, fp, fn_, beta);
        prop_assert!((0.0..=1.0).contains(&p));
        prop_assert!((0.0..=1.0).contains(&r));
        prop_assert!((0.0..=1.0).contains(&f));
        let score = GecCorpusScore::from_counts(tp, fp, fn_, beta);
        prop_assert!((0.0..=100.0).contains(&score.scaled));
    }

    // Counts move by one edit: a spurious candidate adds a false positive, a
    // gold-matching one converts a false negative into a true positive.
    #[test]
    fn monotone_in_candidate_quality(tp in 0usize..30, fp in 0usize..30, fn_ in 0usize..30) {
        let base = GecCorpusScore::from_counts(tp, fp, fn_, 0.5).f_beta;
        let spurious = GecCorpusScore::from_counts(tp, fp + 1, fn_, 0.5).f_beta;
        prop_assert!(spurious <= base + 1e-12);
        if fn_ > 0 {
            let matched = GecCorpusScore::from_counts(tp + 1, fp, fn_ - 1, 0.5).f_beta;
            prop_assert!(matched + 1e-12 >= base);
        }
    }
}

#[test]
fn extract_round_trip_on_ten_thousand_pairs() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
    let vocab = ["а", "б", "в", "г", "ґ", ",", ".", "і", "зв'язок", "пам’ять"];
    let draw = |rng: &mut rand_chacha::ChaCha8Rng| -> TokenSeq {
        let len = rng.gen_range(0..25);
        (0..len).map(|_| vocab[rng.gen_range(0..vocab.len())]).collect()
    };
    for _ in 0..10_000 {
        let source = draw(&mut rng);
        let hypothesis = draw(&mut rng);
        let edits = extract_edits(&source, &hypothesis);
        assert_eq!(apply_edits(&source, &edits).unwrap(), hypothesis);
    }
}
