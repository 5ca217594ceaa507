//! Chat-completion backends, translation extraction and batch dispatch.

mod backend;
mod batch;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use backend::{
    BackendConfig, BackendKind, CacheRecord, CachedBackend, ChatBackend, Completion, HttpBackend, MockBackend,
    ReplayBackend, RetryPolicy, DEFAULT_API_KEY_ENV,
};
pub use batch::{read_records, run_batch, BatchItem, RecordLog, StatusCounts};

#[derive(Debug, Error)]
pub enum BackendError {
    #[error("backend failed after {attempts} attempts: {last}")]
    Exhausted { attempts: u32, last: String },
    #[error("malformed response body: {0}")]
    Malformed(String),
    #[error("no cached response for prompt {0}")]
    CacheMiss(String),
    #[error("invalid backend configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("nothing to translate")]
    EmptyBatch,
}

impl BackendError {
    /// Transport attempts spent before the error surfaced.
    pub fn attempts(&self) -> u32 {
        match self {
            BackendError::Exhausted { attempts, .. } => *attempts,
            BackendError::Malformed(_) => 1,
            _ => 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub model_id: String,
    pub temperature: f64,
    pub top_p: f64,
    pub max_output_tokens: u32,
}

impl GenParams {
    /// Sampling settings used for locally served models.
    pub fn local(model_id: impl Into<String>) -> Self {
        GenParams {
            model_id: model_id.into(),
            temperature: 0.9,
            top_p: 0.9,
            max_output_tokens: 5000,
        }
    }

    /// Provider defaults for hosted APIs.
    pub fn api(model_id: impl Into<String>) -> Self {
        GenParams {
            model_id: model_id.into(),
            temperature: 1.0,
            top_p: 1.0,
            max_output_tokens: 5000,
        }
    }

    pub fn validate(&self) -> Result<(), BackendError> {
        if self.temperature.is_nan() || self.temperature < 0.0 {
            return Err(BackendError::Config("temperature must be >= 0".into()));
        }
        if !(self.top_p > 0.0 && self.top_p <= 1.0) {
            return Err(BackendError::Config("top_p must be in (0, 1]".into()));
        }
        if self.max_output_tokens == 0 {
            return Err(BackendError::Config("max_output_tokens must be positive".into()));
        }
        Ok(())
    }
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams::local("mock")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordStatus {
    Ok,
    ExtractionFailed,
    BackendError,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationRecord {
    pub item_id: String,
    pub prompt_hash: String,
    pub spec_tag: String,
    pub raw_response: String,
    pub hypothesis: Option<String>,
    pub status: RecordStatus,
    pub attempts: u32,
}

impl TranslationRecord {
    /// The hypothesis as scored: failed items count as empty output.
    pub fn scored_hypothesis(&self) -> &str {
        self.hypothesis.as_deref().unwrap_or("")
    }
}

/// Hex SHA-256 over the prompt text and the serialized parameters.
pub fn prompt_hash(prompt: &str, params: &GenParams) -> String {
    let mut h = Sha256::new();
    h.update(prompt.as_bytes());
    h.update([0u8]);
    h.update(serde_json::to_vec(params).expect("params serialize"));
    hex::encode(h.finalize())
}

/// Text between the last two `###` delimiters, trimmed. `None` when fewer
/// than two delimiters occur or the enclosed text is blank.
pub fn extract_translation(raw: &str) -> Option<String> {
    let marks: Vec<usize> = raw.match_indices("###").map(|(i, _)| i).collect();
    let [.., open, close] = marks[..] else { return None };
    let inner = raw[open + 3..close].trim();
    (!inner.is_empty()).then(|| inner.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extraction() {
        assert_eq!(extract_translation("reasoning... ### Hello world ###").as_deref(), Some("Hello world"));
        assert_eq!(extract_translation("no delimiters here"), None);
        assert_eq!(extract_translation("### a ### mid ### b ###").as_deref(), Some("b"));
        assert_eq!(extract_translation("only ### one"), None);
        assert_eq!(extract_translation("### ###"), None);
        assert_eq!(extract_translation("I will use ###.\n### The horse. ###\n").as_deref(), Some("The horse."));
    }

    #[test]
    fn hash_depends_on_prompt_and_params() {
        let p = GenParams::local("m");
        assert_eq!(prompt_hash("a", &p), prompt_hash("a", &p));
        assert_ne!(prompt_hash("a", &p), prompt_hash("b", &p));
        assert_ne!(prompt_hash("a", &p), prompt_hash("a", &GenParams::api("m")));
        assert_eq!(prompt_hash("a", &p).len(), 64);
    }

    #[test]
    fn params_validation() {
        assert!(GenParams::local("m").validate().is_ok());
        assert!(GenParams { top_p: 0.0, ..GenParams::api("m") }.validate().is_err());
        assert!(GenParams { temperature: -1.0, ..GenParams::api("m") }.validate().is_err());
        assert!(GenParams { max_output_tokens: 0, ..GenParams::api("m") }.validate().is_err());
    }
}
