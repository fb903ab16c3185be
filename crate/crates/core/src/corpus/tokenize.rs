use std::ops::Deref;

use serde::{Deserialize, Serialize};
use unicode_normalization::char::is_combining_mark;

/// An ordered sequence of whitespace-free tokens.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TokenSeq(Vec<String>);

impl TokenSeq {
    pub fn new(tokens: Vec<String>) -> Self {
        debug_assert!(tokens
            .iter()
            .all(|t| !t.is_empty() && !t.chars().any(char::is_whitespace)));
        TokenSeq(tokens)
    }

    /// Splits pre-tokenized text on whitespace without further segmentation.
    pub fn from_pretokenized(text: &str) -> Self {
        TokenSeq(text.split_whitespace().map(str::to_owned).collect())
    }

    pub fn into_inner(self) -> Vec<String> {
        self.0
    }
}

impl Deref for TokenSeq {
    type Target = [String];

    fn deref(&self) -> &[String] {
        &self.0
    }
}

impl From<Vec<String>> for TokenSeq {
    fn from(tokens: Vec<String>) -> Self {
        TokenSeq::new(tokens)
    }
}

impl<'a> FromIterator<&'a str> for TokenSeq {
    fn from_iter<I: IntoIterator<Item = &'a str>>(iter: I) -> Self {
        TokenSeq::new(iter.into_iter().map(str::to_owned).collect())
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || is_combining_mark(c)
}

// Kept inside a word when flanked by word characters on both sides.
fn is_joiner(c: char) -> bool {
    matches!(
        c,
        '\'' | '\u{2019}' | '\u{02BC}' | '-' | '\u{2010}' | '\u{2011}'
    )
}

/// Splits text into word and punctuation tokens.
///
/// Whitespace separates tokens; every punctuation or symbol character becomes
/// its own token, except apostrophes and hyphens sitting between two word
/// characters ("зв'язність", "будь-який"), which stay inside the word.
pub fn tokenize(text: &str) -> TokenSeq {
    let mut tokens = Vec::new();
    for chunk in text.split_whitespace() {
        let chars: Vec<char> = chunk.chars().collect();
        let mut word = String::new();
        for (i, &c) in chars.iter().enumerate() {
            if is_word_char(c) {
                word.push(c);
                continue;
            }
            let inside_word = is_joiner(c)
                && !word.is_empty()
                && chars.get(i + 1).copied().is_some_and(is_word_char);
            if inside_word {
                word.push(c);
                continue;
            }
            if !word.is_empty() {
                tokens.push(std::mem::take(&mut word));
            }
            tokens.push(c.to_string());
        }
        if !word.is_empty() {
            tokens.push(word);
        }
    }
    TokenSeq(tokens)
}

/// Joins tokens with single spaces.
pub fn detokenize(tokens: &[String]) -> String {
    tokens.join(" ")
}
