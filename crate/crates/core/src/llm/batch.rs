use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::{extract_translation, prompt_hash, BackendError, ChatBackend, GenParams, RecordStatus, TranslationRecord};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BatchItem {
    pub item_id: String,
    pub spec_tag: String,
    pub prompt: String,
}

/// Append-only JSON-lines file of translation records.
#[derive(Debug)]
pub struct RecordLog {
    path: PathBuf,
    out: Mutex<BufWriter<File>>,
}

impl RecordLog {
    /// Creates or truncates `path`.
    pub fn create(path: impl AsRef<Path>) -> Result<Self, BackendError> {
        Self::open_with(path.as_ref(), OpenOptions::new().create(true).write(true).truncate(true))
    }

    pub fn append(path: impl AsRef<Path>) -> Result<Self, BackendError> {
        Self::open_with(path.as_ref(), OpenOptions::new().create(true).append(true))
    }

    fn open_with(path: &Path, opts: &OpenOptions) -> Result<Self, BackendError> {
        let file = opts.open(path).map_err(|source| BackendError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(RecordLog {
            path: path.to_path_buf(),
            out: Mutex::new(BufWriter::new(file)),
        })
    }

    pub fn write(&self, record: &TranslationRecord) -> Result<(), BackendError> {
        let line = serde_json::to_string(record).expect("record serializes");
        let mut out = self.out.lock().expect("record log lock");
        writeln!(out, "{line}")
            .and_then(|_| out.flush())
            .map_err(|source| BackendError::Io {
                path: self.path.clone(),
                source,
            })
    }
}

pub fn read_records(path: impl AsRef<Path>) -> Result<Vec<TranslationRecord>, BackendError> {
    let path = path.as_ref();
    let io = |source| BackendError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::open(path).map_err(io)?;
    let mut out = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io)?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(
            serde_json::from_str(&line)
                .map_err(|e| BackendError::Malformed(format!("{}:{}: {e}", path.display(), n + 1)))?,
        );
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatusCounts {
    pub ok: usize,
    pub extraction_failed: usize,
    pub backend_error: usize,
}

impl StatusCounts {
    pub fn of(records: &[TranslationRecord]) -> Self {
        let mut c = StatusCounts::default();
        for r in records {
            match r.status {
                RecordStatus::Ok => c.ok += 1,
                RecordStatus::ExtractionFailed => c.extraction_failed += 1,
                RecordStatus::BackendError => c.backend_error += 1,
            }
        }
        c
    }
}

fn translate_one(item: &BatchItem, backend: &dyn ChatBackend, params: &GenParams) -> TranslationRecord {
    let hash = prompt_hash(&item.prompt, params);
    let (raw_response, hypothesis, status, attempts) = match backend.complete(&item.prompt, params) {
        Ok(done) => {
            let hyp = extract_translation(&done.text);
            let status = if hyp.is_some() {
                RecordStatus::Ok
            } else {
                RecordStatus::ExtractionFailed
            };
            (done.text, hyp, status, done.attempts)
        }
        Err(e) => {
            log::error!("{}: {e}", item.item_id);
            (e.to_string(), None, RecordStatus::BackendError, e.attempts())
        }
    };
    TranslationRecord {
        item_id: item.item_id.clone(),
        prompt_hash: hash,
        spec_tag: item.spec_tag.clone(),
        raw_response,
        hypothesis,
        status,
        attempts,
    }
}

/// Translates every item with at most `max_parallel` requests in flight.
/// Records come back in input order; each is written to `log` as soon as it
/// completes. Per-item failures are recorded, not raised.
pub fn run_batch(
    items: &[BatchItem],
    backend: &dyn ChatBackend,
    params: &GenParams,
    max_parallel: usize,
    log: Option<&RecordLog>,
) -> Result<Vec<TranslationRecord>, BackendError> {
    if items.is_empty() {
        return Err(BackendError::EmptyBatch);
    }
    params.validate()?;
    let workers = max_parallel.clamp(1, items.len());
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<TranslationRecord>>> = items.iter().map(|_| Mutex::new(None)).collect();
    let log_error: Mutex<Option<BackendError>> = Mutex::new(None);

    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(item) = items.get(i) else { break };
                let record = translate_one(item, backend, params);
                if let Some(log) = log {
                    if let Err(e) = log.write(&record) {
                        log_error.lock().expect("lock").get_or_insert(e);
                    }
                }
                *slots[i].lock().expect("slot lock") = Some(record);
            });
        }
    });

    if let Some(e) = log_error.into_inner().expect("lock") {
        return Err(e);
    }
    Ok(slots
        .into_iter()
        .map(|s| s.into_inner().expect("slot lock").expect("every slot filled"))
        .collect())
}
