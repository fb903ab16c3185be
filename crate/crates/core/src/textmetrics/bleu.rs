use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::ngrams::ngram_counts;
use crate::corpus::tokenize;
use crate::error::{Error, Result};

const MAX_ORDER: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BleuMode {
    ReferenceBased,
    /// Scored against the source text (self-BLEU).
    ReferenceFree,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BleuScore {
    pub mode: BleuMode,
    pub ngram_precisions: [f64; MAX_ORDER],
    pub brevity_penalty: f64,
    pub bleu: f64,
    pub scaled: f64,
}

/// Sufficient statistics for corpus BLEU; sums of these pool corpora.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BleuStats {
    pub matches: [usize; MAX_ORDER],
    pub totals: [usize; MAX_ORDER],
    pub hyp_len: usize,
    pub ref_len: usize,
}

impl std::ops::AddAssign for BleuStats {
    fn add_assign(&mut self, other: Self) {
        for n in 0..MAX_ORDER {
            self.matches[n] += other.matches[n];
            self.totals[n] += other.totals[n];
        }
        self.hyp_len += other.hyp_len;
        self.ref_len += other.ref_len;
    }
}

impl BleuStats {
    /// Clipped n-gram matches of one hypothesis against its references.
    pub fn sentence(hypothesis: &str, references: &[impl AsRef<str>]) -> Self {
        let hyp = tokenize(hypothesis);
        let refs: Vec<_> = references.iter().map(|r| tokenize(r.as_ref())).collect();
        let mut stats = BleuStats {
            hyp_len: hyp.len(),
            ref_len: closest_length(hyp.len(), refs.iter().map(|r| r.len())),
            ..Default::default()
        };
        for n in 1..=MAX_ORDER {
            let mut max_ref: HashMap<&[String], usize> = HashMap::new();
            for reference in &refs {
                for (gram, count) in ngram_counts(reference, n) {
                    let slot = max_ref.entry(gram).or_insert(0);
                    *slot = (*slot).max(count);
                }
            }
            let hyp_counts = ngram_counts(&hyp, n);
            stats.totals[n - 1] = hyp.len().saturating_sub(n - 1);
            stats.matches[n - 1] = hyp_counts
                .iter()
                .map(|(gram, &count)| count.min(max_ref.get(gram).copied().unwrap_or(0)))
                .sum();
        }
        stats
    }

    pub fn score(&self, mode: BleuMode) -> BleuScore {
        let mut precisions = [0.0; MAX_ORDER];
        for n in 0..MAX_ORDER {
            precisions[n] = if self.totals[n] == 0 {
                1.0
            } else {
                self.matches[n] as f64 / self.totals[n] as f64
            };
        }
        let (c, r) = (self.hyp_len, self.ref_len);
        let brevity_penalty = if c >= r {
            1.0
        } else if c == 0 {
            0.0
        } else {
            (1.0 - r as f64 / c as f64).exp()
        };
        let bleu = if precisions.contains(&0.0) {
            0.0
        } else {
            let log_mean = precisions.iter().map(|p| p.ln()).sum::<f64>() / MAX_ORDER as f64;
            brevity_penalty * log_mean.exp()
        };
        BleuScore {
            mode,
            ngram_precisions: precisions,
            brevity_penalty,
            bleu,
            scaled: 100.0 * bleu,
        }
    }
}

// Closest reference length; ties go to the shorter reference.
fn closest_length(hyp_len: usize, ref_lens: impl Iterator<Item = usize>) -> usize {
    ref_lens
        .min_by_key(|&len| (len.abs_diff(hyp_len), len))
        .unwrap_or(0)
}

/// Corpus BLEU accumulated over every sentence.
pub fn bleu_stats<S: AsRef<str>>(hypotheses: &[S], references: &[Vec<String>]) -> Result<BleuStats> {
    if hypotheses.len() != references.len() {
        return Err(Error::Argument(format!(
            "{} hypotheses but {} reference lists",
            hypotheses.len(),
            references.len()
        )));
    }
    let mut stats = BleuStats::default();
    for (hypothesis, refs) in hypotheses.iter().zip(references) {
        stats += BleuStats::sentence(hypothesis.as_ref(), refs);
    }
    Ok(stats)
}

/// Case-sensitive corpus-level BLEU-4 without smoothing.
///
/// Clipped n-gram matches and totals are pooled over the corpus before the
/// geometric mean. The brevity penalty is `exp(1 - r/c)` for `c < r`, where
/// `r` sums each sentence's closest reference length. An order with no
/// hypothesis n-grams at all counts as precision 1. In reference-free mode,
/// pass the sources as the single references.
pub fn bleu_corpus<S: AsRef<str>>(
    hypotheses: &[S],
    references_per_hyp: &[Vec<String>],
    mode: BleuMode,
) -> Result<BleuScore> {
    Ok(bleu_stats(hypotheses, references_per_hyp)?.score(mode))
}
