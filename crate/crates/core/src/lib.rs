//! In-context machine translation for low-resource agglutinative languages.
//!
//! The crate covers the whole pipeline around an LLM translator:
//!
//! - [`corpus_store`] loads and validates the lexicon, parallel corpus,
//!   grammar table and evaluation set.
//! - [`morphology`] segments source words into stem + suffixes, keeping every
//!   valid alternative analysis.
//! - [`retrieval`] assembles dictionary bundles, parallel examples (random,
//!   dictionary-anchored or BM25) and grammar excerpts.
//! - [`prompt`] composes the prompt text for any component combination and
//!   [`cipher`] produces the enciphered variant.
//! - [`llm`] dispatches prompts to a chat-completion backend and extracts the
//!   translation from the response.
//! - [`eval`] scores hypotheses (BLEU, chrF, embedding similarity) and runs
//!   significance tests and human-evaluation statistics.
//! - [`augment`] turns a monolingual corpus into synthetic training data.
//! - [`pipeline`] and [`ablate`] glue everything into end-to-end runs and the
//!   stage-by-stage component ablation.

pub mod ablate;
pub mod augment;
pub mod cipher;
pub mod corpus_store;
pub mod error;
pub mod eval;
pub mod llm;
pub mod morphology;
pub mod pipeline;
pub mod prompt;
pub mod retrieval;

pub use error::{Error, Result};
