//! Prompt ingredients: dictionary bundles, parallel example sets and grammar
//! bundles.

mod bm25;
mod dictionary;
mod examples;
mod grammar;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bm25::{bm25_query, build_bm25_index, build_bm25_index_with, morpheme_terms, Bm25Index, Bm25Params, Posting};
pub use dictionary::{build_dictionary_bundle, CollocationNote, DictionaryBundle, GlossBlock, SuffixNote};
pub use examples::{select_by_dictionary, select_random, ExampleSet};
pub use grammar::{build_grammar_bundle, GrammarBundle, GrammarExcerpt, GRAMMAR_PREAMBLE};

/// Default number of parallel examples placed in a prompt.
pub const DEFAULT_EXAMPLE_COUNT: usize = 10;

#[derive(Debug, Error)]
pub enum RetrievalError {
    #[error("cannot build an index over an empty corpus")]
    EmptyCorpus,
    #[error("unknown grammar feature {0:?}")]
    UnknownFeature(String),
    #[error("index covers {index} documents but the corpus has {corpus}")]
    IndexMismatch { index: usize, corpus: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DictVariant {
    /// Lexical entries only.
    #[serde(rename = "l")]
    Lexical,
    /// Lexical entries and suffix explanations.
    #[serde(rename = "l_s")]
    LexicalSuffix,
    /// Lexical entries, suffix explanations and collocations.
    #[serde(rename = "l_s_c")]
    LexicalSuffixCollocation,
}

impl DictVariant {
    pub const ALL: [DictVariant; 3] = [
        DictVariant::Lexical,
        DictVariant::LexicalSuffix,
        DictVariant::LexicalSuffixCollocation,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            DictVariant::Lexical => "l",
            DictVariant::LexicalSuffix => "l_s",
            DictVariant::LexicalSuffixCollocation => "l_s_c",
        }
    }

    pub fn with_suffixes(self) -> bool {
        self >= DictVariant::LexicalSuffix
    }

    pub fn with_collocations(self) -> bool {
        self == DictVariant::LexicalSuffixCollocation
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExampleVariant {
    Random,
    Dictionary,
    Bm25,
}

impl ExampleVariant {
    pub const ALL: [ExampleVariant; 3] = [
        ExampleVariant::Random,
        ExampleVariant::Dictionary,
        ExampleVariant::Bm25,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            ExampleVariant::Random => "random",
            ExampleVariant::Dictionary => "dictionary",
            ExampleVariant::Bm25 => "bm25",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrammarVariant {
    Short,
    Long,
    /// Long excerpts plus their illustrating examples.
    LongP,
}

impl GrammarVariant {
    pub const ALL: [GrammarVariant; 3] = [GrammarVariant::Short, GrammarVariant::Long, GrammarVariant::LongP];

    pub fn tag(self) -> &'static str {
        match self {
            GrammarVariant::Short => "short",
            GrammarVariant::Long => "long",
            GrammarVariant::LongP => "long_p",
        }
    }
}
