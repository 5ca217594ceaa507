//! Synthetic parallel data from monolingual source text.
//!
//! [`forward_translate`] runs the prompt pipeline over monolingual sentences;
//! wrap the backend in a [`CachedBackend`](crate::llm::CachedBackend) and an
//! interrupted run resumes without repeating completed requests. [`mix`]
//! combines real and synthetic pairs at a fixed ratio.

use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus_store::{MonoSentence, ParallelCorpus};
use crate::llm::{run_batch, ChatBackend, GenParams, RecordLog, RecordStatus};
use crate::pipeline::{prepare_prompt, Resources};
use crate::prompt::PromptSpec;
use crate::llm::BatchItem;
use crate::Result;

#[derive(Debug, Error)]
pub enum AugmentError {
    #[error("backend failed on {item_id}: {message}")]
    Backend { item_id: String, message: String },
    #[error("ratio {needed_ratio} needs {needed} synthetic pairs but only {available} exist")]
    Insufficient {
        needed_ratio: f64,
        needed: usize,
        available: usize,
    },
    #[error("mixing ratio must be a finite non-negative number, got {0}")]
    InvalidRatio(f64),
    #[error("the real corpus is empty")]
    EmptyReal,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {source}")]
    Parse {
        path: PathBuf,
        line: usize,
        #[source]
        source: serde_json::Error,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntheticPair {
    pub id: String,
    pub source: String,
    pub target: String,
    pub spec_tag: String,
    pub model_id: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForwardOutput {
    pub pairs: Vec<SyntheticPair>,
    /// Sentences whose response held no extractable translation.
    pub dropped: Vec<String>,
}

/// Translates monolingual sentences into synthetic pairs. Extraction
/// failures are dropped and logged; a backend failure aborts the run.
pub fn forward_translate(
    mono: &[MonoSentence],
    spec: &PromptSpec,
    res: &Resources,
    backend: &dyn ChatBackend,
    params: &GenParams,
    max_parallel: usize,
    log: Option<&RecordLog>,
) -> Result<ForwardOutput> {
    let tag = spec.tag();
    let items = mono
        .iter()
        .map(|m| {
            Ok(BatchItem {
                item_id: m.id.clone(),
                spec_tag: tag.clone(),
                prompt: prepare_prompt(spec, &m.source, res)?.text,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let records = run_batch(&items, backend, params, max_parallel, log)?;
    let mut out = ForwardOutput::default();
    for (m, r) in mono.iter().zip(&records) {
        match r.status {
            RecordStatus::Ok => out.pairs.push(SyntheticPair {
                id: m.id.clone(),
                source: m.source.clone(),
                target: r.hypothesis.clone().unwrap_or_default(),
                spec_tag: tag.clone(),
                model_id: params.model_id.clone(),
            }),
            RecordStatus::ExtractionFailed => {
                log::warn!("{}: no translation in response, dropped", m.id);
                out.dropped.push(m.id.clone());
            }
            RecordStatus::BackendError => {
                return Err(AugmentError::Backend {
                    item_id: m.id.clone(),
                    message: r.raw_response.clone(),
                }
                .into())
            }
        }
    }
    Ok(out)
}

pub fn write_synthetic(path: impl AsRef<Path>, pairs: &[SyntheticPair]) -> Result<(), AugmentError> {
    let path = path.as_ref();
    let mut text = String::new();
    for p in pairs {
        text.push_str(&serde_json::to_string(p).expect("pair serializes"));
        text.push('\n');
    }
    fs::write(path, text).map_err(|source| AugmentError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_synthetic(path: impl AsRef<Path>) -> Result<Vec<SyntheticPair>, AugmentError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| AugmentError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|source| AugmentError::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                source,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainingManifest {
    pub real_count: usize,
    pub synthetic_count: usize,
    pub requested_ratio: f64,
    pub seed: u64,
    /// Ids of the synthetic pairs that made it in, in sampling order.
    pub synthetic_ids: Vec<String>,
    pub source_path: PathBuf,
    pub target_path: PathBuf,
}

impl TrainingManifest {
    pub fn ratio(&self) -> f64 {
        self.synthetic_count as f64 / self.real_count as f64
    }
}

/// Writes `train.src`, `train.tgt` and `manifest.json` into `out_dir`: all
/// real pairs plus `round(ratio * |real|)` seeded-sampled synthetic pairs,
/// shuffled together.
pub fn mix(
    real: &ParallelCorpus,
    synthetic: &[SyntheticPair],
    ratio: f64,
    seed: u64,
    out_dir: impl AsRef<Path>,
) -> Result<TrainingManifest, AugmentError> {
    if !ratio.is_finite() || ratio < 0.0 {
        return Err(AugmentError::InvalidRatio(ratio));
    }
    if real.is_empty() {
        return Err(AugmentError::EmptyReal);
    }
    let needed = (ratio * real.len() as f64).round() as usize;
    if needed > synthetic.len() {
        return Err(AugmentError::Insufficient {
            needed_ratio: ratio,
            needed,
            available: synthetic.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picked: Vec<&SyntheticPair> = index::sample(&mut rng, synthetic.len(), needed)
        .into_iter()
        .map(|i| &synthetic[i])
        .collect();

    let mut lines: Vec<(&str, &str)> = real
        .examples()
        .iter()
        .map(|e| (e.source.as_str(), e.target.as_str()))
        .chain(picked.iter().map(|p| (p.source.as_str(), p.target.as_str())))
        .collect();
    lines.shuffle(&mut rng);

    let out_dir = out_dir.as_ref();
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| AugmentError::Io { path, source }
    };
    fs::create_dir_all(out_dir).map_err(io(out_dir))?;
    let one_line = |s: &str| s.split_whitespace().collect::<Vec<_>>().join(" ");
    let src: String = lines.iter().map(|(s, _)| one_line(s) + "\n").collect();
    let tgt: String = lines.iter().map(|(_, t)| one_line(t) + "\n").collect();
    let source_path = out_dir.join("train.src");
    let target_path = out_dir.join("train.tgt");
    fs::write(&source_path, src).map_err(io(&source_path))?;
    fs::write(&target_path, tgt).map_err(io(&target_path))?;

    let manifest = TrainingManifest {
        real_count: real.len(),
        synthetic_count: needed,
        requested_ratio: ratio,
        seed,
        synthetic_ids: picked.iter().map(|p| p.id.clone()).collect(),
        source_path,
        target_path,
    };
    let manifest_path = out_dir.join("manifest.json");
    fs::write(
        &manifest_path,
        serde_json::to_string_pretty(&manifest).expect("manifest serializes"),
    )
    .map_err(io(&manifest_path))?;
    Ok(manifest)
}
