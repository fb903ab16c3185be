use std::path::Path;

use proptest::prelude::*;
use redaktor_core::corpus::{detokenize, parse_m2, tokenize, write_m2, TokenSeq};
use redaktor_core::gecscore::{apply_edits, score_gec_corpus};
use redaktor_core::Error;

fn sample() -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/sample.m2");
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn sample_parses_into_expected_structure() {
    let gold = parse_m2(&sample()).unwrap();
    assert_eq!(gold.len(), 6);
    let annotators: Vec<usize> = gold.iter().map(|g| g.annotators.len()).collect();
    assert_eq!(annotators, [1, 2, 1, 3, 2, 1]);
    assert!(gold[1].annotators[1].noop);
    assert!(gold[2].annotators[0].noop);
    assert!(!gold[5].annotators[0].noop);
    for annotation in &gold {
        annotation.validate().unwrap();
    }
}

#[test]
fn gold_tokens_agree_with_tokenizer() {
    for annotation in parse_m2(&sample()).unwrap() {
        let text = annotation.tokens.join(" ");
        assert_eq!(tokenize(&text), annotation.tokens);
    }
}

#[test]
fn write_then_parse_is_identity_on_fixture() {
    let gold = parse_m2(&sample()).unwrap();
    let written = write_m2(&gold);
    assert_eq!(parse_m2(&written).unwrap(), gold);
    // canonical text is a fixed point
    assert_eq!(write_m2(&parse_m2(&written).unwrap()), written);
}

#[test]
fn annotator_zero_corrections_apply_cleanly() {
    let gold = parse_m2(&sample()).unwrap();
    let corrected = apply_edits(&gold[0].tokens, &gold[0].annotators[0].edits).unwrap();
    assert_eq!(
        corrected,
        tokenize("А ти, батюшко, стало бути, тут у сторожі?")
    );
}

#[test]
fn annotator_zero_corrections_score_one_hundred() {
    let gold = parse_m2(&sample()).unwrap();
    let sources: Vec<String> = gold.iter().map(|g| detokenize(&g.tokens)).collect();
    let corrected: Vec<String> = gold
        .iter()
        .map(|g| detokenize(&apply_edits(&g.tokens, &g.annotators[0].edits).unwrap()))
        .collect();
    let report = score_gec_corpus(&sources, &corrected, &gold, 0.5).unwrap();
    assert_eq!(report.score.scaled, 100.0);
    let copy = score_gec_corpus(&sources, &sources, &gold, 0.5).unwrap();
    assert_eq!(copy.score.scaled, 0.0);
}

fn arbitrary_m2_line() -> impl Strategy<Value = String> {
    let offset = prop_oneof![Just("-1".to_owned()), (0i64..12).prop_map(|v| v.to_string()), Just("x".to_owned())];
    prop_oneof![
        prop::collection::vec(prop::sample::select(vec!["а", "б", "в", ",", "."]), 0..8)
            .prop_map(|t| format!("S {}", t.join(" "))),
        (offset.clone(), offset, prop::sample::select(vec!["x", "-NONE-", "y z"]), 0usize..3)
            .prop_map(|(s, e, c, a)| format!("A {s} {e}|||T|||{c}|||REQUIRED|||-NONE-|||{a}")),
        Just(String::new()),
    ]
}

proptest! {
    // Random M2 text either fails to parse or yields in-bounds, ordered,
    // non-overlapping edits that survive a write/parse round trip.
    #[test]
    fn parser_never_accepts_out_of_bounds_spans(lines in prop::collection::vec(arbitrary_m2_line(), 0..12)) {
        let text = lines.join("\n");
        match parse_m2(&text) {
            Ok(gold) => {
                for annotation in &gold {
                    prop_assert!(annotation.validate().is_ok());
                    for set in &annotation.annotators {
                        for edit in &set.edits {
                            prop_assert!(edit.start <= edit.end && edit.end <= annotation.tokens.len());
                        }
                    }
                }
                prop_assert_eq!(parse_m2(&write_m2(&gold)).unwrap(), gold);
            }
            Err(Error::Parse { line, .. }) => prop_assert!(line >= 1 && line <= lines.len()),
            Err(other) => prop_assert!(false, "unexpected error kind {other:?}"),
        }
    }
}

#[test]
fn empty_sentence_allows_insertions_only() {
    let gold = parse_m2("S\nA 0 0|||M|||слово|||REQUIRED|||-NONE-|||0\n").unwrap();
    assert_eq!(gold[0].tokens, TokenSeq::default());
    assert!(parse_m2("S\nA 0 1|||R|||слово|||REQUIRED|||-NONE-|||0\n").is_err());
}
