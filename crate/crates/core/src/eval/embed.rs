use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use sha2::{Digest, Sha256};

use super::tokenizer::tokenize_13a;
use super::EvalError;

/// Maps a text to a real vector.
pub trait EmbeddingBackend: Send + Sync {
    fn embed(&self, text: &str) -> Result<Vec<f64>, EvalError>;
}

/// Offline embedding: each lowercased token gets a hash-seeded random vector
/// and a text is the normalized sum of its tokens. Identical texts map to
/// identical vectors; texts sharing words land close together.
#[derive(Clone, Debug)]
pub struct MockEmbedding {
    pub dim: usize,
}

impl Default for MockEmbedding {
    fn default() -> Self {
        MockEmbedding { dim: 64 }
    }
}

impl MockEmbedding {
    fn token_vector(&self, token: &str) -> Vec<f64> {
        let digest = Sha256::digest(token.as_bytes());
        let mut seed = [0u8; 32];
        seed.copy_from_slice(&digest);
        let mut rng = ChaCha8Rng::from_seed(seed);
        (0..self.dim).map(|_| rng.random_range(-1.0..1.0)).collect()
    }
}

impl EmbeddingBackend for MockEmbedding {
    fn embed(&self, text: &str) -> Result<Vec<f64>, EvalError> {
        let mut v = vec![0.0; self.dim];
        for tok in tokenize_13a(text) {
            for (a, b) in v.iter_mut().zip(self.token_vector(&tok)) {
                *a += b;
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            v.iter_mut().for_each(|x| *x /= norm);
        }
        Ok(v)
    }
}

/// Embedding endpoint speaking the common `input` / `data[0].embedding`
/// JSON protocol.
#[derive(Debug)]
pub struct HttpEmbedding {
    client: reqwest::blocking::Client,
    endpoint: String,
    model: String,
    api_key: Option<String>,
}

impl HttpEmbedding {
    pub fn new(endpoint: impl Into<String>, model: impl Into<String>, api_key: Option<String>) -> Result<Self, EvalError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(120))
            .build()
            .map_err(|e| EvalError::Embedding(e.to_string()))?;
        Ok(HttpEmbedding {
            client,
            endpoint: endpoint.into(),
            model: model.into(),
            api_key,
        })
    }
}

impl EmbeddingBackend for HttpEmbedding {
    fn embed(&self, text: &str) -> Result<Vec<f64>, EvalError> {
        let mut req = self
            .client
            .post(&self.endpoint)
            .json(&json!({"model": self.model, "input": text}));
        if let Some(key) = &self.api_key {
            req = req.bearer_auth(key);
        }
        let resp = req.send().map_err(|e| EvalError::Embedding(e.to_string()))?;
        if !resp.status().is_success() {
            return Err(EvalError::Embedding(format!("HTTP {}", resp.status())));
        }
        let value: serde_json::Value = resp.json().map_err(|e| EvalError::Embedding(e.to_string()))?;
        value["data"][0]["embedding"]
            .as_array()
            .and_then(|xs| xs.iter().map(serde_json::Value::as_f64).collect::<Option<Vec<_>>>())
            .ok_or_else(|| EvalError::Embedding("missing data[0].embedding".into()))
    }
}

/// 100 times the cosine of the two vectors.
pub fn cosine_100(a: &[f64], b: &[f64]) -> Result<f64, EvalError> {
    if a.len() != b.len() {
        return Err(EvalError::DimensionMismatch { a: a.len(), b: b.len() });
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let aa: f64 = a.iter().map(|x| x * x).sum();
    let bb: f64 = b.iter().map(|x| x * x).sum();
    if aa == 0.0 || bb == 0.0 {
        return Err(EvalError::ZeroVector);
    }
    if a == b {
        return Ok(100.0);
    }
    Ok((100.0 * dot / (aa * bb).sqrt()).clamp(-100.0, 100.0))
}

pub fn embed_similarity(hyp: &str, reference: &str, backend: &dyn EmbeddingBackend) -> Result<f64, EvalError> {
    cosine_100(&backend.embed(hyp)?, &backend.embed(reference)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Fixed;

    impl EmbeddingBackend for Fixed {
        fn embed(&self, text: &str) -> Result<Vec<f64>, EvalError> {
            Ok(if text == "x" { vec![1.0, 0.0] } else { vec![0.0, 3.0] })
        }
    }

    #[test]
    fn identity_is_100() {
        let m = MockEmbedding::default();
        assert_eq!(embed_similarity("The horse is black.", "The horse is black.", &m).unwrap(), 100.0);
        assert_eq!(embed_similarity("x", "x", &Fixed).unwrap(), 100.0);
    }

    #[test]
    fn orthogonal_is_0() {
        assert_eq!(embed_similarity("x", "y", &Fixed).unwrap(), 0.0);
    }

    #[test]
    fn mock_prefers_shared_words() {
        let m = MockEmbedding::default();
        let close = embed_similarity("the black horse", "the horse is black", &m).unwrap();
        let far = embed_similarity("the black horse", "minister came yesterday", &m).unwrap();
        assert!(close > far);
    }

    #[test]
    fn degenerate_vectors() {
        assert!(matches!(cosine_100(&[0.0, 0.0], &[1.0, 0.0]), Err(EvalError::ZeroVector)));
        assert!(matches!(cosine_100(&[1.0], &[1.0, 0.0]), Err(EvalError::DimensionMismatch { .. })));
        let m = MockEmbedding::default();
        assert!(matches!(embed_similarity("", "a", &m), Err(EvalError::ZeroVector)));
    }
}
