use std::collections::HashSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ExampleVariant;
use crate::corpus_store::{ParallelCorpus, ParallelExample};
use crate::morphology::AnalyzedSentence;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExampleSet {
    pub variant: ExampleVariant,
    pub examples: Vec<ParallelExample>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scores: Option<Vec<f64>>,
}

impl ExampleSet {
    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn ids(&self) -> Vec<&str> {
        self.examples.iter().map(|e| e.id.as_str()).collect()
    }

    /// One `Source: ...` / `Target: ...` line pair per example.
    pub fn render(&self, source_language: &str, target_language: &str) -> String {
        self.examples
            .iter()
            .map(|e| format!("{source_language}: {}\n{target_language}: {}", e.source, e.target))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// Draws `n` distinct examples without replacement. Asking for more than the
/// corpus holds returns the whole corpus, shuffled.
pub fn select_random(corpus: &ParallelCorpus, n: usize, seed: u64) -> ExampleSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picked = rand::seq::index::sample(&mut rng, corpus.len(), n.min(corpus.len()));
    ExampleSet {
        variant: ExampleVariant::Random,
        examples: picked.iter().map(|i| corpus.examples()[i].clone()).collect(),
        scores: None,
    }
}

/// Walks the sentence's stems in order and collects each stem's anchored
/// examples in corpus order, stopping at `cap`.
pub fn select_by_dictionary(sentence: &AnalyzedSentence, corpus: &ParallelCorpus, cap: usize) -> ExampleSet {
    let mut seen = HashSet::new();
    let mut examples = Vec::new();
    'stems: for stem in sentence.stems() {
        for ex in corpus.examples() {
            if examples.len() == cap {
                break 'stems;
            }
            if ex.anchor_lexemes.iter().any(|a| a == stem) && seen.insert(ex.id.as_str()) {
                examples.push(ex.clone());
            }
        }
    }
    ExampleSet {
        variant: ExampleVariant::Dictionary,
        examples,
        scores: None,
    }
}
