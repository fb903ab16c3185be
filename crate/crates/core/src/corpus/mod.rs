//! Data model and IO for parallel corpora and M2 gold-edit files.

mod load;
pub(crate) mod m2;
mod task;
mod tokenize;

pub use load::{load_corpus, parse_corpus};
pub use m2::{parse_m2, write_m2, AnnotatorSet, EditSpan, GoldAnnotation};
pub use task::{ParallelExample, Split, Task};
pub use tokenize::{detokenize, tokenize, TokenSeq};

use unicode_normalization::UnicodeNormalization;

/// NFC-normalizes text. Every loader routes through this before anything
/// else sees the text.
pub fn normalize(text: &str) -> String {
    text.nfc().collect()
}
