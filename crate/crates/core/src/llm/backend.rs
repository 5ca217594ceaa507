use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{prompt_hash, BackendError, GenParams};
use crate::morphology::PUNCTUATION;

/// Environment variable holding the API secret unless the config names another.
pub const DEFAULT_API_KEY_ENV: &str = "ICMT_API_KEY";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Completion {
    pub text: String,
    pub attempts: u32,
}

pub trait ChatBackend: Send + Sync {
    fn complete(&self, prompt: &str, params: &GenParams) -> Result<Completion, BackendError>;
}

impl<T: ChatBackend + ?Sized> ChatBackend for Box<T> {
    fn complete(&self, prompt: &str, params: &GenParams) -> Result<Completion, BackendError> {
        (**self).complete(prompt, params)
    }
}

impl<T: ChatBackend + ?Sized> ChatBackend for &T {
    fn complete(&self, prompt: &str, params: &GenParams) -> Result<Completion, BackendError> {
        (**self).complete(prompt, params)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    /// Pause after the n-th failed attempt; the last value repeats.
    pub backoff_ms: Vec<u64>,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_attempts: 3,
            backoff_ms: vec![1_000, 4_000, 16_000],
        }
    }
}

impl RetryPolicy {
    pub fn no_wait(max_attempts: u32) -> Self {
        RetryPolicy {
            max_attempts,
            backoff_ms: vec![0],
        }
    }

    fn pause(&self, failed: u32) -> Duration {
        let i = (failed as usize).saturating_sub(1);
        let ms = self.backoff_ms.get(i).or(self.backoff_ms.last()).copied().unwrap_or(0);
        Duration::from_millis(ms)
    }
}

// ---------------------------------------------------------------------------
// Mock

type Responder = Arc<dyn Fn(&str) -> String + Send + Sync>;

#[derive(Clone)]
enum MockMode {
    Canned(String),
    Glossing,
    Responder(Responder),
}

/// Deterministic offline backend.
#[derive(Clone)]
pub struct MockBackend {
    mode: MockMode,
    calls: Arc<AtomicUsize>,
}

impl std::fmt::Debug for MockBackend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MockBackend").field("calls", &self.calls()).finish()
    }
}

impl MockBackend {
    /// Always answers with `translation` wrapped in `###`.
    pub fn canned(translation: impl Into<String>) -> Self {
        Self::with_mode(MockMode::Canned(translation.into()))
    }

    /// Translates word by word from the dictionary entries found in the
    /// prompt, and copies the target side of any parallel example whose source
    /// equals the input sentence.
    pub fn glossing() -> Self {
        Self::with_mode(MockMode::Glossing)
    }

    /// Answers with an arbitrary function of the prompt.
    pub fn responder(f: impl Fn(&str) -> String + Send + Sync + 'static) -> Self {
        Self::with_mode(MockMode::Responder(Arc::new(f)))
    }

    fn with_mode(mode: MockMode) -> Self {
        MockBackend {
            mode,
            calls: Arc::new(AtomicUsize::new(0)),
        }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl ChatBackend for MockBackend {
    fn complete(&self, prompt: &str, _params: &GenParams) -> Result<Completion, BackendError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        let text = match &self.mode {
            MockMode::Canned(t) => format!("Here is my translation.\n### {t} ###"),
            MockMode::Glossing => format!("Here is my translation.\n### {} ###", gloss_prompt(prompt)),
            MockMode::Responder(f) => f(prompt),
        };
        Ok(Completion { text, attempts: 1 })
    }
}

const SENTENCE_HEADER: &str = "Please help me translate the following sentence from ";

fn first_sense(senses: &str) -> &str {
    let s = senses.split(" (parent word: ").next().unwrap_or(senses);
    let s = s.strip_prefix("1. ").unwrap_or(s);
    s.split(" 2. ").next().unwrap_or(s).split(", ").next().unwrap_or(s)
}

fn split_trailing_punct(w: &str) -> (&str, &str) {
    let core = w.trim_end_matches(|c| PUNCTUATION.contains(&c));
    (core, &w[core.len()..])
}

fn gloss_prompt(prompt: &str) -> String {
    let lines: Vec<&str> = prompt.lines().collect();
    let Some(pos) = lines.iter().position(|l| l.starts_with(SENTENCE_HEADER)) else {
        return String::new();
    };
    let Some(sentence) = lines.get(pos + 1) else {
        return String::new();
    };
    // surface form of the first analysis of every word
    let surface: Vec<String> = sentence
        .split_whitespace()
        .map(|w| {
            let (core, trail) = split_trailing_punct(w);
            format!("{}{trail}", core.split('/').next().unwrap_or(core).replace(['=', '~'], ""))
        })
        .collect();
    let plain = surface.join(" ");

    for pair in lines.windows(2) {
        let (Some((_, src)), Some((_, tgt))) = (pair[0].split_once(": "), pair[1].split_once(": ")) else {
            continue;
        };
        if src == plain && !tgt.is_empty() {
            return tgt.to_string();
        }
    }

    let mut glosses: HashMap<&str, &str> = HashMap::new();
    for line in &lines {
        if let Some((head, senses)) = line.split_once(": ") {
            let head = head.trim_end_matches('=');
            if !head.is_empty() && !head.contains(' ') {
                glosses.entry(head).or_insert_with(|| first_sense(senses));
            }
        }
    }
    sentence
        .split_whitespace()
        .map(|w| {
            let (core, trail) = split_trailing_punct(w);
            let first = core.split('/').next().unwrap_or(core);
            let stem = first.split(['=', '~']).next().unwrap_or(first);
            let word = glosses.get(stem).copied().unwrap_or(stem);
            format!("{word}{trail}")
        })
        .collect::<Vec<_>>()
        .join(" ")
}

// ---------------------------------------------------------------------------
// Cache files

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub prompt_hash: String,
    pub response: String,
    pub attempts: u32,
}

fn read_cache(path: &Path) -> Result<HashMap<String, CacheRecord>, BackendError> {
    let io = |source| BackendError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::open(path).map_err(io)?;
    let mut map = HashMap::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io)?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: CacheRecord = serde_json::from_str(&line)
            .map_err(|e| BackendError::Malformed(format!("{}:{}: {e}", path.display(), n + 1)))?;
        map.insert(rec.prompt_hash.clone(), rec);
    }
    Ok(map)
}

/// Serves responses from a cache file only; a miss is an error.
#[derive(Debug)]
pub struct ReplayBackend {
    cache: HashMap<String, CacheRecord>,
}

impl ReplayBackend {
    pub fn open(path: impl AsRef<Path>) -> Result<Self, BackendError> {
        Ok(ReplayBackend {
            cache: read_cache(path.as_ref())?,
        })
    }
}

impl ChatBackend for ReplayBackend {
    fn complete(&self, prompt: &str, params: &GenParams) -> Result<Completion, BackendError> {
        let hash = prompt_hash(prompt, params);
        let rec = self.cache.get(&hash).ok_or(BackendError::CacheMiss(hash))?;
        Ok(Completion {
            text: rec.response.clone(),
            attempts: rec.attempts,
        })
    }
}

/// Read-through cache in front of another backend. Every live response is
/// appended to the cache file before it is returned, so an interrupted run
/// resumes without repeating finished prompts.
pub struct CachedBackend<B> {
    inner: B,
    path: PathBuf,
    cache: Mutex<HashMap<String, CacheRecord>>,
    file: Mutex<File>,
    live_calls: AtomicUsize,
}

impl<B: ChatBackend> CachedBackend<B> {
    pub fn open(inner: B, path: impl AsRef<Path>) -> Result<Self, BackendError> {
        let path = path.as_ref().to_path_buf();
        let cache = if path.exists() { read_cache(&path)? } else { HashMap::new() };
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|source| BackendError::Io {
                path: path.clone(),
                source,
            })?;
        Ok(CachedBackend {
            inner,
            path,
            cache: Mutex::new(cache),
            file: Mutex::new(file),
            live_calls: AtomicUsize::new(0),
        })
    }

    /// Number of requests forwarded to the inner backend.
    pub fn live_calls(&self) -> usize {
        self.live_calls.load(Ordering::SeqCst)
    }

    pub fn inner(&self) -> &B {
        &self.inner
    }
}

impl<B: ChatBackend> ChatBackend for CachedBackend<B> {
    fn complete(&self, prompt: &str, params: &GenParams) -> Result<Completion, BackendError> {
        let hash = prompt_hash(prompt, params);
        if let Some(rec) = self.cache.lock().expect("cache lock").get(&hash) {
            return Ok(Completion {
                text: rec.response.clone(),
                attempts: rec.attempts,
            });
        }
        self.live_calls.fetch_add(1, Ordering::SeqCst);
        let done = self.inner.complete(prompt, params)?;
        let rec = CacheRecord {
            prompt_hash: hash.clone(),
            response: done.text.clone(),
            attempts: done.attempts,
        };
        {
            let mut file = self.file.lock().expect("cache file lock");
            let line = serde_json::to_string(&rec).expect("cache record serializes");
            writeln!(file, "{line}")
                .and_then(|_| file.flush())
                .map_err(|source| BackendError::Io {
                    path: self.path.clone(),
                    source,
                })?;
        }
        self.cache.lock().expect("cache lock").insert(hash, rec);
        Ok(done)
    }
}

// ---------------------------------------------------------------------------
// HTTP

/// Chat-completion endpoint speaking the common `messages` / `choices` JSON
/// protocol.
#[derive(Debug)]
pub struct HttpBackend {
    client: reqwest::blocking::Client,
    endpoint: String,
    api_key: Option<String>,
    retry: RetryPolicy,
}

impl HttpBackend {
    pub fn new(endpoint: impl Into<String>, api_key: Option<String>, retry: RetryPolicy) -> Result<Self, BackendError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(600))
            .build()
            .map_err(|e| BackendError::Config(e.to_string()))?;
        Ok(HttpBackend {
            client,
            endpoint: endpoint.into(),
            api_key,
            retry,
        })
    }

    fn attempt(&self, body: &serde_json::Value) -> Result<String, AttemptError> {
        let mut req = self.client.post(&self.endpoint).json(body);
        if let Some(key) = &self.api_key {
            req = req.bearer_auth(key);
        }
        let resp = req.send().map_err(|e| AttemptError::Retry(e.to_string()))?;
        let status = resp.status();
        let text = resp.text().map_err(|e| AttemptError::Retry(e.to_string()))?;
        if !status.is_success() {
            return Err(AttemptError::Retry(format!("HTTP {status}: {}", truncate(&text, 200))));
        }
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| AttemptError::Fatal(BackendError::Malformed(e.to_string())))?;
        value["choices"][0]["message"]["content"]
            .as_str()
            .map(String::from)
            .ok_or_else(|| AttemptError::Fatal(BackendError::Malformed("missing choices[0].message.content".into())))
    }
}

enum AttemptError {
    Retry(String),
    Fatal(BackendError),
}

fn truncate(s: &str, n: usize) -> &str {
    match s.char_indices().nth(n) {
        Some((i, _)) => &s[..i],
        None => s,
    }
}

impl ChatBackend for HttpBackend {
    fn complete(&self, prompt: &str, params: &GenParams) -> Result<Completion, BackendError> {
        let body = json!({
            "model": params.model_id,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": params.temperature,
            "top_p": params.top_p,
            "max_tokens": params.max_output_tokens,
        });
        let mut last = String::new();
        for attempt in 1..=self.retry.max_attempts.max(1) {
            match self.attempt(&body) {
                Ok(text) => return Ok(Completion { text, attempts: attempt }),
                Err(AttemptError::Fatal(e)) => return Err(e),
                Err(AttemptError::Retry(msg)) => {
                    log::warn!("attempt {attempt} against {} failed: {msg}", self.endpoint);
                    last = msg;
                    if attempt < self.retry.max_attempts {
                        std::thread::sleep(self.retry.pause(attempt));
                    }
                }
            }
        }
        Err(BackendError::Exhausted {
            attempts: self.retry.max_attempts.max(1),
            last,
        })
    }
}

// ---------------------------------------------------------------------------
// Configuration

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    HttpEndpoint,
    Mock,
    Replay,
}

fn default_parallel() -> usize {
    4
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BackendConfig {
    pub kind: BackendKind,
    #[serde(default)]
    pub endpoint: Option<String>,
    /// Name of the environment variable holding the API secret.
    #[serde(default)]
    pub api_key_env: Option<String>,
    /// Response cache; required for replay, optional otherwise.
    #[serde(default)]
    pub cache: Option<PathBuf>,
    #[serde(default)]
    pub retry: RetryPolicy,
    #[serde(default = "default_parallel")]
    pub max_parallel: usize,
}

impl Default for BackendConfig {
    fn default() -> Self {
        BackendConfig::mock()
    }
}

impl BackendConfig {
    pub fn mock() -> Self {
        BackendConfig {
            kind: BackendKind::Mock,
            endpoint: None,
            api_key_env: None,
            cache: None,
            retry: RetryPolicy::default(),
            max_parallel: default_parallel(),
        }
    }

    pub fn validate(&self) -> Result<(), BackendError> {
        if self.max_parallel == 0 {
            return Err(BackendError::Config("max_parallel must be positive".into()));
        }
        if self.retry.max_attempts == 0 {
            return Err(BackendError::Config("retry.max_attempts must be positive".into()));
        }
        match self.kind {
            BackendKind::HttpEndpoint if self.endpoint.is_none() => {
                Err(BackendError::Config("http_endpoint requires an endpoint".into()))
            }
            BackendKind::Replay if self.cache.is_none() => {
                Err(BackendError::Config("replay requires a cache path".into()))
            }
            _ => Ok(()),
        }
    }

    /// Instantiates the backend, wrapping it in a read-through cache when a
    /// cache path is set.
    pub fn build(&self) -> Result<Box<dyn ChatBackend>, BackendError> {
        self.validate()?;
        let inner: Box<dyn ChatBackend> = match self.kind {
            BackendKind::Replay => {
                return Ok(Box::new(ReplayBackend::open(self.cache.as_ref().expect("validated"))?));
            }
            BackendKind::Mock => Box::new(MockBackend::glossing()),
            BackendKind::HttpEndpoint => {
                let var = self.api_key_env.as_deref().unwrap_or(DEFAULT_API_KEY_ENV);
                let key = std::env::var(var).ok();
                if key.is_none() {
                    log::info!("{var} is not set; sending requests without authorization");
                }
                Box::new(HttpBackend::new(
                    self.endpoint.clone().expect("validated"),
                    key,
                    self.retry.clone(),
                )?)
            }
        };
        match &self.cache {
            Some(path) => Ok(Box::new(CachedBackend::open(inner, path)?)),
            None => Ok(inner),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::llm::extract_translation;
    use std::io::Read;
    use std::net::TcpListener;

    fn params() -> GenParams {
        GenParams::local("test")
    }

    #[test]
    fn mock_wraps_in_delimiters() {
        let m = MockBackend::canned("The horse.");
        let c = m.complete("anything", &params()).unwrap();
        assert_eq!(extract_translation(&c.text).as_deref(), Some("The horse."));
        assert_eq!(m.calls(), 1);
    }

    #[test]
    fn glossing_mock_uses_dictionary_lines() {
        let prompt = "Please help me translate the following sentence from Manchu to English:\n\
                      sakda~sa oho/o=ho.\nThe morphemes ...\n\
                      sakda: 1. old man 2. old, aged (parent word: se)\n\
                      oho: armpit\no=: 1. to become, to change into 2. to be\n";
        let c = MockBackend::glossing().complete(prompt, &params()).unwrap();
        assert_eq!(extract_translation(&c.text).as_deref(), Some("old man armpit."));
    }

    #[test]
    fn glossing_mock_copies_matching_example() {
        let prompt = "Please help me translate the following sentence from Manchu to English:\n\
                      morin kara\nManchu: morin kara\nEnglish: The horse is black.\n";
        let c = MockBackend::glossing().complete(prompt, &params()).unwrap();
        assert_eq!(extract_translation(&c.text).as_deref(), Some("The horse is black."));
    }

    #[test]
    fn cached_then_replayed() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.jsonl");
        let cached = CachedBackend::open(MockBackend::canned("x"), &path).unwrap();
        let a = cached.complete("p1", &params()).unwrap();
        cached.complete("p1", &params()).unwrap();
        cached.complete("p2", &params()).unwrap();
        assert_eq!(cached.live_calls(), 2);
        assert_eq!(cached.inner().calls(), 2);

        let replay = ReplayBackend::open(&path).unwrap();
        assert_eq!(replay.complete("p1", &params()).unwrap(), a);
        assert!(matches!(replay.complete("p3", &params()), Err(BackendError::CacheMiss(_))));

        let reopened = CachedBackend::open(MockBackend::canned("y"), &path).unwrap();
        assert_eq!(reopened.complete("p2", &params()).unwrap().text, a.text);
        assert_eq!(reopened.live_calls(), 0);
    }

    fn serve(responses: Vec<(u16, String)>) -> (String, std::thread::JoinHandle<usize>) {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!("http://{}/v1/chat/completions", listener.local_addr().unwrap());
        let handle = std::thread::spawn(move || {
            let mut served = 0;
            for (status, body) in responses {
                let (mut stream, _) = listener.accept().unwrap();
                let mut buf = Vec::new();
                let mut chunk = [0u8; 4096];
                // read headers and the announced body
                loop {
                    let n = stream.read(&mut chunk).unwrap();
                    buf.extend_from_slice(&chunk[..n]);
                    let text = String::from_utf8_lossy(&buf);
                    if let Some(end) = text.find("\r\n\r\n") {
                        let len = text[..end]
                            .lines()
                            .find_map(|l| l.to_ascii_lowercase().strip_prefix("content-length:").map(|v| v.trim().parse::<usize>().unwrap()))
                            .unwrap_or(0);
                        if buf.len() >= end + 4 + len {
                            break;
                        }
                    }
                    if n == 0 {
                        break;
                    }
                }
                let reply = format!(
                    "HTTP/1.1 {status} X\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{body}",
                    body.len()
                );
                stream.write_all(reply.as_bytes()).unwrap();
                served += 1;
            }
            served
        });
        (url, handle)
    }

    #[test]
    fn http_retries_then_gives_up() {
        let (url, handle) = serve(vec![(500, "{}".into()); 3]);
        let backend = HttpBackend::new(url, None, RetryPolicy::no_wait(3)).unwrap();
        let err = backend.complete("hello", &params()).unwrap_err();
        assert!(matches!(err, BackendError::Exhausted { attempts: 3, .. }), "{err}");
        assert_eq!(handle.join().unwrap(), 3);
    }

    #[test]
    fn http_recovers_after_failure() {
        let ok = r####"{"choices":[{"message":{"role":"assistant","content":"### hi ###"}}]}"####.to_string();
        let (url, handle) = serve(vec![(429, "{}".into()), (200, ok)]);
        let backend = HttpBackend::new(url, Some("k".into()), RetryPolicy::no_wait(3)).unwrap();
        let c = backend.complete("hello", &params()).unwrap();
        assert_eq!(c, Completion { text: "### hi ###".into(), attempts: 2 });
        assert_eq!(handle.join().unwrap(), 2);
    }

    #[test]
    fn http_malformed_body() {
        let (url, handle) = serve(vec![(200, r#"{"nope":1}"#.into())]);
        let backend = HttpBackend::new(url, None, RetryPolicy::no_wait(3)).unwrap();
        assert!(matches!(backend.complete("x", &params()), Err(BackendError::Malformed(_))));
        handle.join().unwrap();
    }

    #[test]
    fn config_validation() {
        let mut c = BackendConfig::mock();
        assert!(c.validate().is_ok());
        c.kind = BackendKind::HttpEndpoint;
        assert!(c.validate().is_err());
        c.kind = BackendKind::Replay;
        assert!(c.validate().is_err());
        c.cache = Some("x.jsonl".into());
        assert!(c.validate().is_ok());
    }
}
