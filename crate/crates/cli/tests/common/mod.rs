#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use redaktor_core::corpus::{tokenize, write_m2, AnnotatorSet, GoldAnnotation};
use redaktor_core::gecscore::extract_edits;
use serde_json::json;

pub const WORDS: &[&str] = &[
    "я", "ти", "він", "вона", "ми", "вони", "дім", "місто", "книга", "читати", "писати",
    "швидко", "повільно", "добре", "погано", "сьогодні", "завтра", "вчора", "дуже", "тут",
    "там", "зв'язок", "пам’ять", "Київ", "Львів", "річка", "гора", "слово", "мова", "школа",
    "робота", "друг", "вечір", "ранок", "але", "і", "що", "коли", ",",
];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn sentence(rng: &mut ChaCha8Rng, min: usize, max: usize) -> String {
    let len = rng.gen_range(min..=max);
    let mut words: Vec<&str> = (0..len).map(|_| WORDS[rng.gen_range(0..WORDS.len() - 1)]).collect();
    words.push(".");
    words.join(" ")
}

/// One to three token edits; never returns the input unchanged.
pub fn perturb(rng: &mut ChaCha8Rng, text: &str) -> String {
    let mut tokens: Vec<String> = text.split(' ').map(str::to_owned).collect();
    let edits = rng.gen_range(1..=3);
    for _ in 0..edits {
        let pos = rng.gen_range(0..tokens.len());
        match rng.gen_range(0..3) {
            0 if tokens.len() > 2 => {
                tokens.remove(pos);
            }
            1 => tokens.insert(pos, WORDS[rng.gen_range(0..WORDS.len())].to_owned()),
            _ => tokens[pos] = WORDS[rng.gen_range(0..WORDS.len())].to_owned(),
        }
    }
    let out = tokens.join(" ");
    if out == text { format!("{out} ще") } else { out }
}

pub fn write_lines(path: &Path, lines: impl IntoIterator<Item = String>) {
    fs::create_dir_all(path.parent().unwrap()).unwrap();
    let mut text = String::new();
    for line in lines {
        text.push_str(&line);
        text.push('\n');
    }
    fs::write(path, text).unwrap();
}

/// JSONL corpus with `refs_per_example` perturbed references.
pub fn write_corpus(path: &Path, dataset: &str, n: usize, refs_per_example: usize, seed: u64) {
    let mut rng = rng(seed);
    write_lines(
        path,
        (0..n).map(|i| {
            let src = sentence(&mut rng, 4, 14);
            let refs: Vec<String> = (0..refs_per_example).map(|_| perturb(&mut rng, &src)).collect();
            json!({"id": format!("{dataset}:{i}"), "src": src, "refs": refs}).to_string()
        }),
    );
}

/// A GEC test corpus and its M2 gold. Every sentence carries at least one
/// edit; gold edits are in the extractor's canonical form.
pub fn write_gec(dir: &Path, n: usize, seed: u64) -> (PathBuf, PathBuf, Vec<String>) {
    let mut rng = rng(seed);
    let mut lines = Vec::with_capacity(n);
    let mut gold = Vec::with_capacity(n);
    let mut corrected = Vec::with_capacity(n);
    for i in 0..n {
        let src = sentence(&mut rng, 4, 18);
        let fixed = perturb(&mut rng, &src);
        let tokens = tokenize(&src);
        let edits = extract_edits(&tokens, &tokenize(&fixed));
        lines.push(json!({"id": format!("ua-gec:{i}"), "src": src, "refs": [fixed]}).to_string());
        gold.push(GoldAnnotation {
            tokens,
            annotators: vec![AnnotatorSet { annotator: 0, edits, noop: false }],
        });
        corrected.push(fixed);
    }
    let corpus = dir.join("gec/test.jsonl");
    let m2 = dir.join("gec/test.m2");
    write_lines(&corpus, lines);
    fs::write(&m2, write_m2(&gold)).unwrap();
    (corpus, m2, corrected)
}

pub fn redaktor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_redaktor"))
        .args(args)
        .output()
        .expect("run redaktor")
}

pub fn redaktor_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_redaktor"))
        .args(args)
        .envs(env.iter().copied())
        .output()
        .expect("run redaktor")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

pub fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

pub fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

/// Per (dataset, split, size) files matching configs/full-build.toml, sized
/// so the build reproduces the expected dataset statistics.
pub const FULL_BUILD_FILES: &[(&str, &str, usize)] = &[
    ("gec/train.jsonl", "ua-gec", 31_032),
    ("gec/test.jsonl", "ua-gec", 2_682),
    ("simplification/wikilarge.train.jsonl", "wikilarge", 8_000),
    ("simplification/wikiauto.train.jsonl", "wikiauto", 4_779),
    ("simplification/asset.test.jsonl", "asset", 175),
    ("simplification/turk.test.jsonl", "turk", 358),
    ("coherence/discofuse.train.jsonl", "discofuse", 6_000),
    ("coherence/iterater.train.jsonl", "iterater", 4_309),
    ("coherence/discofuse.test.jsonl", "discofuse", 300),
    ("coherence/iterater.test.jsonl", "iterater", 251),
    ("paraphrasing/paws.train.jsonl", "paws", 15_640),
    ("paraphrasing/mrpc.test.jsonl", "mrpc", 1_000),
    ("paraphrasing/sts.test.jsonl", "sts", 1_000),
    ("paraphrasing/qqp.test.jsonl", "qqp", 4_244),
];

/// Lays out `<root>/configs/full-build.toml` (copied from the repository)
/// and synthetic corpora under `<root>/data`. Returns the config path.
pub fn synthetic_full_build(root: &Path) -> PathBuf {
    for (i, (rel, dataset, n)) in FULL_BUILD_FILES.iter().enumerate() {
        write_corpus(&root.join("data").join(rel), dataset, *n, 1, 1000 + i as u64);
    }
    let config = root.join("configs/full-build.toml");
    fs::create_dir_all(config.parent().unwrap()).unwrap();
    fs::copy(workspace_root().join("configs/full-build.toml"), &config).unwrap();
    config
}
