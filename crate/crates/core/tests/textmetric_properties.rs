use proptest::prelude::*;
use redaktor_core::textmetrics::{bleu_corpus, sari_corpus, sari_sentence, BleuMode, SariInput};

fn text() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(vec!["а", "б", "в", "Г", "ґ", ",", ".", "зв'язок", "1"]), 0..12)
        .prop_map(|t| t.join(" "))
}

fn triples() -> impl Strategy<Value = Vec<(String, String, Vec<String>)>> {
    prop::collection::vec((text(), text(), prop::collection::vec(text(), 1..4)), 1..12)
}

proptest! {
    #[test]
    fn sari_is_bounded(source in text(), hyp in text(), refs in prop::collection::vec(text(), 1..4)) {
        let s = sari_sentence(&source, &hyp, &refs);
        for v in [s.f_add, s.f_keep, s.p_del, s.sari] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
        prop_assert!((0.0..=100.0).contains(&s.scaled));
        prop_assert!((s.sari - (s.f_add + s.f_keep + s.p_del) / 3.0).abs() < 1e-12);
    }

    #[test]
    fn sari_corpus_ignores_example_order(data in triples(), rotate in 0usize..12) {
        let inputs: Vec<SariInput> = data
            .iter()
            .map(|(s, h, r)| SariInput { source: s, hypothesis: h, references: r })
            .collect();
        let mut shuffled = inputs.clone();
        let k = rotate % shuffled.len();
        shuffled.rotate_left(k);
        shuffled.reverse();
        let a = sari_corpus(&inputs).unwrap();
        let b = sari_corpus(&shuffled).unwrap();
        prop_assert!((a.sari - b.sari).abs() < 1e-12);
    }

    #[test]
    fn bleu_is_bounded_and_order_free(data in triples(), rotate in 0usize..12) {
        let hyps: Vec<&String> = data.iter().map(|(_, h, _)| h).collect();
        let refs: Vec<Vec<String>> = data.iter().map(|(_, _, r)| r.clone()).collect();
        let a = bleu_corpus(&hyps, &refs, BleuMode::ReferenceBased).unwrap();
        prop_assert!((0.0..=100.0).contains(&a.scaled));
        prop_assert!(a.brevity_penalty >= 0.0 && a.brevity_penalty <= 1.0);

        let k = rotate % hyps.len();
        let mut hyps2 = hyps.clone();
        let mut refs2 = refs.clone();
        hyps2.rotate_left(k);
        refs2.rotate_left(k);
        let b = bleu_corpus(&hyps2, &refs2, BleuMode::ReferenceBased).unwrap();
        prop_assert_eq!(a.bleu, b.bleu);
    }

    #[test]
    fn self_bleu_of_copy_is_exactly_100(sources in prop::collection::vec(text(), 0..10)) {
        let refs: Vec<Vec<String>> = sources.iter().map(|s| vec![s.clone()]).collect();
        let score = bleu_corpus(&sources, &refs, BleuMode::ReferenceFree).unwrap();
        prop_assert_eq!(score.scaled, 100.0);
    }
}
