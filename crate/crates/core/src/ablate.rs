//! Run configuration and the stage-by-stage component ablation.
//!
//! Stages run in a fixed order: direct, morphological analysis (always
//! adopted), dictionary, parallel examples, grammar, chain-of-thought. Each
//! later stage tries every variant on top of the previous winner; the
//! previous winner competes too and keeps its place on a tie.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus_store::{load_eval_set, EvalItem};
use crate::eval::{score_records, CorpusScore, EmbeddingBackend, HttpEmbedding, Metric, MetricConfig, MockEmbedding};
use crate::llm::{BackendConfig, BackendError, ChatBackend, GenParams, RecordLog, RecordStatus, StatusCounts, TranslationRecord};
use crate::pipeline::{prepare_batch, ResourcePaths, Resources};
use crate::prompt::{CotVariant, PromptSpec};
use crate::retrieval::{DictVariant, ExampleVariant, GrammarVariant, DEFAULT_EXAMPLE_COUNT};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbeddingKind {
    #[default]
    None,
    Mock,
    Http,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingConfig {
    #[serde(default)]
    pub kind: EmbeddingKind,
    #[serde(default)]
    pub endpoint: Option<String>,
    #[serde(default)]
    pub model: Option<String>,
    #[serde(default)]
    pub api_key_env: Option<String>,
}

impl EmbeddingConfig {
    pub fn build(&self) -> Result<Option<Box<dyn EmbeddingBackend>>> {
        match self.kind {
            EmbeddingKind::None => Ok(None),
            EmbeddingKind::Mock => Ok(Some(Box::new(MockEmbedding::default()))),
            EmbeddingKind::Http => {
                let endpoint = self
                    .endpoint
                    .clone()
                    .ok_or_else(|| Error::Config("embedding.endpoint is required for http".into()))?;
                let model = self.model.clone().unwrap_or_default();
                let key = self.api_key_env.as_deref().and_then(|v| std::env::var(v).ok());
                Ok(Some(Box::new(HttpEmbedding::new(endpoint, model, key)?)))
            }
        }
    }
}

fn default_source() -> String {
    "Manchu".into()
}

fn default_target() -> String {
    "English".into()
}

fn default_output() -> PathBuf {
    PathBuf::from("runs")
}

fn default_count() -> usize {
    DEFAULT_EXAMPLE_COUNT
}

/// Everything a run needs, loaded from one JSON file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub resources: ResourcePaths,
    pub eval_set: PathBuf,
    #[serde(default = "default_source")]
    pub source_language: String,
    #[serde(default = "default_target")]
    pub target_language: String,
    #[serde(default)]
    pub backend: BackendConfig,
    #[serde(default)]
    pub params: GenParams,
    #[serde(default)]
    pub metrics: MetricConfig,
    #[serde(default)]
    pub embedding: EmbeddingConfig,
    /// Metric that picks each stage's winner.
    #[serde(default = "default_selection")]
    pub selection: Metric,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_count")]
    pub parallel_count: usize,
    /// Prompt settings for `translate`; empty means the best setting.
    #[serde(default)]
    pub grid: Vec<PromptSpec>,
}

fn default_selection() -> Metric {
    Metric::Bleu
}

impl RunConfig {
    /// Config rooted at a resource directory holding the conventional file
    /// names plus `eval.jsonl`.
    pub fn for_dir(dir: impl AsRef<Path>) -> Self {
        let dir = dir.as_ref();
        RunConfig {
            resources: ResourcePaths::in_dir(dir),
            eval_set: dir.join("eval.jsonl"),
            source_language: default_source(),
            target_language: default_target(),
            backend: BackendConfig::mock(),
            params: GenParams::default(),
            metrics: MetricConfig::default(),
            embedding: EmbeddingConfig::default(),
            selection: Metric::Bleu,
            output_dir: default_output(),
            seed: 0,
            parallel_count: DEFAULT_EXAMPLE_COUNT,
            grid: Vec::new(),
        }
    }

    /// Reads a config; relative paths resolve against the file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut cfg.resources.lexicon);
        fix(&mut cfg.resources.corpus);
        fix(&mut cfg.resources.grammar);
        if let Some(p) = cfg.resources.index.as_mut() {
            fix(p);
        }
        fix(&mut cfg.eval_set);
        fix(&mut cfg.output_dir);
        if let Some(p) = cfg.backend.cache.as_mut() {
            fix(p);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.backend.validate()?;
        self.params.validate()?;
        self.base_spec().validate()?;
        for spec in &self.grid {
            spec.validate()?;
        }
        if self.selection == Metric::Embed && self.embedding.kind == EmbeddingKind::None {
            return Err(Error::Config("selection by embedding similarity needs an embedding backend".into()));
        }
        Ok(())
    }

    /// The direct setting carrying this run's languages, seed and example count.
    pub fn base_spec(&self) -> PromptSpec {
        PromptSpec {
            source_language: self.source_language.clone(),
            target_language: self.target_language.clone(),
            parallel_count: self.parallel_count,
            seed: self.seed,
            ..PromptSpec::direct()
        }
    }

    pub fn load_eval_set(&self) -> Result<Vec<EvalItem>> {
        Ok(load_eval_set(&self.eval_set)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Direct,
    Morph,
    Dictionary,
    Parallel,
    Grammar,
    Cot,
}

impl Stage {
    pub const ORDER: [Stage; 6] = [
        Stage::Direct,
        Stage::Morph,
        Stage::Dictionary,
        Stage::Parallel,
        Stage::Grammar,
        Stage::Cot,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Direct => "direct",
            Stage::Morph => "morph",
            Stage::Dictionary => "dictionary",
            Stage::Parallel => "parallel",
            Stage::Grammar => "grammar",
            Stage::Cot => "cot",
        }
    }

    /// Settings tried at this stage given the previous winner. For the
    /// competitive stages the first entry is the previous winner itself.
    pub fn candidates(self, prev: &PromptSpec) -> Vec<PromptSpec> {
        let with = |f: &dyn Fn(&mut PromptSpec)| {
            let mut s = prev.clone();
            f(&mut s);
            s
        };
        let mut out = vec![];
        match self {
            Stage::Direct => return vec![with(&|s| *s = PromptSpec { use_morph: false, ..s.clone() })],
            Stage::Morph => return vec![with(&|s| s.use_morph = true)],
            Stage::Dictionary => out.extend(DictVariant::ALL.map(|v| with(&|s| s.dict_variant = Some(v)))),
            Stage::Parallel => out.extend(ExampleVariant::ALL.map(|v| with(&|s| s.parallel_variant = Some(v)))),
            Stage::Grammar => out.extend(GrammarVariant::ALL.map(|v| with(&|s| s.grammar_variant = Some(v)))),
            Stage::Cot => out.extend(CotVariant::ALL.map(|v| with(&|s| s.cot_variant = Some(v)))),
        }
        out.insert(0, prev.clone());
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariantResult {
    pub tag: String,
    pub spec: PromptSpec,
    pub corpus: CorpusScore,
    pub counts: StatusCounts,
    pub records_path: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub stage: Stage,
    pub baseline: String,
    pub rows: Vec<VariantResult>,
    pub chosen: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AblationReport {
    pub selection: Metric,
    pub stages: Vec<StageReport>,
    pub best: PromptSpec,
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".into(), |v| format!("{v:.2}"))
}

impl AblationReport {
    /// One block per stage; `>` marks the adopted setting.
    pub fn render(&self) -> String {
        let width = self
            .stages
            .iter()
            .flat_map(|s| s.rows.iter().map(|r| r.tag.len()))
            .max()
            .unwrap_or(0)
            .max(8);
        let mut out = String::new();
        for s in &self.stages {
            let _ = writeln!(out, "[{}] baseline {}", s.stage.name(), s.baseline);
            for r in &s.rows {
                let mark = if r.tag == s.chosen { '>' } else { ' ' };
                let _ = writeln!(
                    out,
                    "{mark} {:<width$} {:>8.2} {:>8.2} {:>8} {:>4}/{}",
                    r.tag,
                    r.corpus.bleu,
                    r.corpus.chrf,
                    fmt_opt(r.corpus.embed_sim),
                    r.counts.ok,
                    r.counts.ok + r.counts.extraction_failed + r.counts.backend_error,
                );
            }
        }
        let _ = writeln!(out, "best: {} (selected by {})", self.best.tag(), self.selection.name());
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, serde_json::to_string_pretty(self)?).map_err(|e| Error::io(path, e))
    }
}

fn file_stem(tag: &str) -> String {
    tag.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '-' { c } else { '_' })
        .collect()
}

/// Translates and scores the evaluation set under one setting, writing the
/// records to `records_dir/<tag>.jsonl`.
#[allow(clippy::too_many_arguments)]
pub fn run_variant(
    spec: &PromptSpec,
    res: &Resources,
    eval_set: &[EvalItem],
    backend: &dyn ChatBackend,
    params: &GenParams,
    max_parallel: usize,
    metrics: &MetricConfig,
    embed: Option<&dyn EmbeddingBackend>,
    records_dir: &Path,
) -> Result<(VariantResult, Vec<TranslationRecord>)> {
    let tag = spec.tag();
    fs::create_dir_all(records_dir).map_err(|e| Error::io(records_dir, e))?;
    let records_path = records_dir.join(format!("{}.jsonl", file_stem(&tag)));
    let batch = prepare_batch(spec, eval_set, res)?;
    let log = RecordLog::create(&records_path)?;
    let records = crate::llm::run_batch(&batch, backend, params, max_parallel, Some(&log))?;
    let report = score_records(&records, eval_set, metrics, embed)?;
    Ok((
        VariantResult {
            tag,
            spec: spec.clone(),
            corpus: report.corpus,
            counts: StatusCounts::of(&records),
            records_path,
        },
        records,
    ))
}

/// Fails when a run produced no usable translation: a backend error when
/// every request failed, otherwise a stage error naming `label`.
pub fn require_translations(label: &str, result: &VariantResult, records: &[TranslationRecord]) -> Result<()> {
    if result.counts.ok > 0 {
        return Ok(());
    }
    if result.counts.backend_error == records.len() {
        let last = records.last().expect("non-empty batch");
        return Err(Error::Backend(BackendError::Exhausted {
            attempts: last.attempts,
            last: last.raw_response.clone(),
        }));
    }
    let sample = records
        .iter()
        .find(|r| r.status == RecordStatus::ExtractionFailed)
        .map(|r| r.raw_response.chars().take(120).collect::<String>())
        .unwrap_or_default();
    Err(Error::Stage {
        stage: label.into(),
        message: format!(
            "{} produced no translations ({} extraction failures, {} backend errors); first response: {sample:?}",
            result.tag, result.counts.extraction_failed, result.counts.backend_error
        ),
    })
}

/// Runs every stage and writes records plus `report.json` under the
/// configured output directory.
pub fn run_ablation(
    cfg: &RunConfig,
    res: &Resources,
    eval_set: &[EvalItem],
    backend: &dyn ChatBackend,
    embed: Option<&dyn EmbeddingBackend>,
) -> Result<AblationReport> {
    cfg.validate()?;
    if cfg.selection == Metric::Embed && embed.is_none() {
        return Err(Error::Config("selection by embedding similarity needs an embedding backend".into()));
    }
    if eval_set.is_empty() {
        return Err(Error::Eval(crate::eval::EvalError::Empty));
    }
    let records_dir = cfg.output_dir.join("records");
    let mut done: HashMap<String, VariantResult> = HashMap::new();
    let mut stages = Vec::new();
    let mut prev = cfg.base_spec();
    let mut prev_tag = String::from("-");

    for stage in Stage::ORDER {
        let candidates = stage.candidates(&prev);
        let mut rows = Vec::with_capacity(candidates.len());
        for spec in &candidates {
            let tag = spec.tag();
            let row = match done.get(&tag) {
                Some(r) => r.clone(),
                None => {
                    log::info!("[{}] {}", stage.name(), tag);
                    let (row, records) = run_variant(
                        spec,
                        res,
                        eval_set,
                        backend,
                        &cfg.params,
                        cfg.backend.max_parallel,
                        &cfg.metrics,
                        embed,
                        &records_dir,
                    )?;
                    require_translations(stage.name(), &row, &records)?;
                    done.insert(tag, row.clone());
                    row
                }
            };
            rows.push(row);
        }
        // strict improvement only, so the earlier candidate (the baseline) wins ties
        let mut best = 0;
        for (i, r) in rows.iter().enumerate().skip(1) {
            let score = |r: &VariantResult| r.corpus.get(cfg.selection).expect("embedding configured");
            if score(r) > score(&rows[best]) {
                best = i;
            }
        }
        let chosen = rows[best].tag.clone();
        prev = rows[best].spec.clone();
        stages.push(StageReport {
            stage,
            baseline: prev_tag,
            rows,
            chosen: chosen.clone(),
        });
        prev_tag = chosen;
    }

    let report = AblationReport {
        selection: cfg.selection,
        stages,
        best: prev,
    };
    report.save(cfg.output_dir.join("report.json"))?;
    Ok(report)
}
