//! Translation metrics and significance tests.
//!
//! BLEU lowercases and uses the `13a` tokenizer with exponential smoothing;
//! chrF uses character 6-grams and beta 2.

mod bleu;
mod chrf;
mod embed;
mod overlap;
mod report;
mod stats;
mod tokenizer;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bleu::{bleu_from_stats, bleu_stats, corpus_bleu, sentence_bleu, BleuConfig, BleuStats};
pub use chrf::{chrf_from_stats, chrf_stats, corpus_chrf, sentence_chrf, ChrfConfig, ChrfStats};
pub use embed::{cosine_100, embed_similarity, EmbeddingBackend, HttpEmbedding, MockEmbedding};
pub use overlap::{subword_overlap, OverlapStats, Segmenter, WordSegmenter};
pub use report::{
    align_records, render_significance_table, Aligned, score_hypotheses, score_records, CorpusScore, MetricReport,
    SentenceScore,
};
pub use stats::{
    bootstrap_compare, bootstrap_compare_scores, midranks, normalize_da, pearson, wilcoxon_rank_sum, DaItemScore,
    DaNormalized, DaRating, Metric, RaterStats, SignificanceResult, EXACT_RANK_SUM_MAX,
};
pub use tokenizer::{tokenize_13a, tokenize_13a_cased};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("{hyps} hypotheses but {refs} references")]
    LengthMismatch { hyps: usize, refs: usize },
    #[error("nothing to score")]
    Empty,
    #[error("input is constant")]
    ConstantInput,
    #[error("all pooled values are identical; the rank-sum variance is zero")]
    AllTied,
    #[error("rater {0} gave the same score to every item")]
    ConstantRater(String),
    #[error("rater {0} rated fewer than two items")]
    RaterTooFew(String),
    #[error("rating {raw} by {rater} for {item} is outside [0, 100]")]
    RatingOutOfRange { rater: String, item: String, raw: f64 },
    #[error("cannot take the cosine of a zero vector")]
    ZeroVector,
    #[error("embedding dimensions differ: {a} vs {b}")]
    DimensionMismatch { a: usize, b: usize },
    #[error("embedding backend: {0}")]
    Embedding(String),
    #[error("no reference for item {0}")]
    MissingReference(String),
    #[error("{0}")]
    Unsupported(&'static str),
}

pub(crate) fn check_lengths(hyps: usize, refs: usize) -> Result<(), EvalError> {
    if hyps == refs {
        Ok(())
    } else {
        Err(EvalError::LengthMismatch { hyps, refs })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricConfig {
    #[serde(default)]
    pub bleu: BleuConfig,
    #[serde(default)]
    pub chrf: ChrfConfig,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn scores_bounded_and_identity(h in "[a-z .,]{0,30}", r in "[a-z .,]{1,30}") {
            let cfg = MetricConfig::default();
            let b = sentence_bleu(&h, &r, &cfg.bleu);
            let c = sentence_chrf(&h, &r, &cfg.chrf);
            prop_assert!((0.0..=100.0 + 1e-9).contains(&b));
            prop_assert!((0.0..=100.0 + 1e-9).contains(&c));
            // without effective order every n-gram order needs a match
            if tokenize_13a(&r).len() >= cfg.bleu.max_ngram {
                prop_assert!((sentence_bleu(&r, &r, &cfg.bleu) - 100.0).abs() < 1e-9);
            }
            if r.chars().any(|c| !c.is_whitespace()) {
                prop_assert!((sentence_chrf(&r, &r, &cfg.chrf) - 100.0).abs() < 1e-9);
            }
        }

        #[test]
        fn appending_reference_token_keeps_unigram_matches(h in "[a-e ]{0,20}", r in "[a-e ]{1,20}") {
            let cfg = BleuConfig::default();
            let toks = tokenize_13a(&r);
            prop_assume!(!toks.is_empty());
            let before = bleu_stats(&h, &r, &cfg).correct[0];
            let after = bleu_stats(&format!("{h} {}", toks[0]), &r, &cfg).correct[0];
            prop_assert!(after >= before);
        }
    }
}
