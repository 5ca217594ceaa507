//! Glue from a source sentence to a scored translation.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus_store::{
    load_grammar_table, load_lexicon, load_parallel_corpus, EvalItem, GrammarTable, Lexicon, ParallelCorpus,
};
use crate::eval::{score_records, EmbeddingBackend, EvalError, MetricConfig, MetricReport};
use crate::llm::{run_batch, BatchItem, ChatBackend, GenParams, RecordLog, TranslationRecord};
use crate::morphology::{analyze_sentence, extract_features};
use crate::prompt::{build_prompt, PromptInput, PromptSpec, PromptText};
use crate::retrieval::{
    bm25_query, build_bm25_index, build_dictionary_bundle, build_grammar_bundle, select_by_dictionary, select_random,
    Bm25Index, ExampleVariant,
};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourcePaths {
    pub lexicon: PathBuf,
    pub corpus: PathBuf,
    pub grammar: PathBuf,
    /// Prebuilt BM25 index; built from the corpus when absent.
    #[serde(default)]
    pub index: Option<PathBuf>,
}

impl ResourcePaths {
    /// The conventional file names inside one directory.
    pub fn in_dir(dir: impl AsRef<Path>) -> Self {
        let dir = dir.as_ref();
        ResourcePaths {
            lexicon: dir.join("lexicon.json"),
            corpus: dir.join("corpus.jsonl"),
            grammar: dir.join("grammar.json"),
            index: None,
        }
    }
}

/// Everything retrieval needs, loaded once and shared read-only.
#[derive(Clone, Debug)]
pub struct Resources {
    pub lexicon: Lexicon,
    pub corpus: ParallelCorpus,
    pub grammar: GrammarTable,
    pub index: Bm25Index,
}

impl Resources {
    pub fn new(lexicon: Lexicon, corpus: ParallelCorpus, grammar: GrammarTable) -> Result<Self> {
        let index = build_bm25_index(&corpus, &lexicon)?;
        Ok(Resources {
            lexicon,
            corpus,
            grammar,
            index,
        })
    }

    pub fn load(paths: &ResourcePaths) -> Result<Self> {
        let lexicon = load_lexicon(&paths.lexicon)?;
        let corpus = load_parallel_corpus(&paths.corpus)?;
        let grammar = load_grammar_table(&paths.grammar)?;
        let index = match &paths.index {
            Some(p) => Bm25Index::load(p)?,
            None => build_bm25_index(&corpus, &lexicon)?,
        };
        Ok(Resources {
            lexicon,
            corpus,
            grammar,
            index,
        })
    }
}

/// Per-sentence seed for random example selection, derived from the root seed.
pub fn sentence_seed(seed: u64, source: &str) -> u64 {
    let digest = Sha256::digest(source.as_bytes());
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    seed ^ u64::from_le_bytes(bytes)
}

/// Analyzes the sentence, retrieves the components the spec enables and
/// builds the prompt.
pub fn prepare_prompt(spec: &PromptSpec, source: &str, res: &Resources) -> Result<PromptText> {
    spec.validate()?;
    if !spec.use_morph {
        return Ok(build_prompt(spec, PromptInput::Raw(source), None, None, None)?);
    }
    let a = analyze_sentence(source, &res.lexicon)?;
    let dictionary = spec
        .dict_variant
        .map(|v| build_dictionary_bundle(&a, &res.lexicon, v));
    let examples = match spec.parallel_variant {
        None => None,
        Some(ExampleVariant::Random) => Some(select_random(
            &res.corpus,
            spec.parallel_count,
            sentence_seed(spec.seed, source),
        )),
        Some(ExampleVariant::Dictionary) => Some(select_by_dictionary(&a, &res.corpus, spec.parallel_count)),
        Some(ExampleVariant::Bm25) => Some(bm25_query(&res.index, &res.corpus, &a, spec.parallel_count)?),
    };
    let grammar = match spec.grammar_variant {
        None => None,
        Some(v) => Some(build_grammar_bundle(&extract_features(&a, &res.grammar), &res.grammar, v)?),
    };
    Ok(build_prompt(
        spec,
        PromptInput::Analyzed(&a),
        dictionary.as_ref(),
        examples.as_ref(),
        grammar.as_ref(),
    )?)
}

pub fn prepare_batch(spec: &PromptSpec, items: &[EvalItem], res: &Resources) -> Result<Vec<BatchItem>> {
    let tag = spec.tag();
    items
        .iter()
        .map(|item| {
            Ok(BatchItem {
                item_id: item.id.clone(),
                spec_tag: tag.clone(),
                prompt: prepare_prompt(spec, &item.source, res)?.text,
            })
        })
        .collect()
}

pub struct Translation {
    pub records: Vec<TranslationRecord>,
    pub report: MetricReport,
}

/// Builds every prompt first (so a bad spec fails before any request), then
/// translates and scores the evaluation set.
#[allow(clippy::too_many_arguments)]
pub fn end_to_end_translate(
    spec: &PromptSpec,
    res: &Resources,
    eval_set: &[EvalItem],
    backend: &dyn ChatBackend,
    params: &GenParams,
    max_parallel: usize,
    log: Option<&RecordLog>,
    metrics: &MetricConfig,
    embed: Option<&dyn EmbeddingBackend>,
) -> Result<Translation> {
    if eval_set.is_empty() {
        return Err(Error::Eval(EvalError::Empty));
    }
    let batch = prepare_batch(spec, eval_set, res)?;
    let records = run_batch(&batch, backend, params, max_parallel, log)?;
    let report = score_records(&records, eval_set, metrics, embed)?;
    Ok(Translation { records, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus_store::load_eval_set;
    use crate::eval::MockEmbedding;
    use crate::llm::{MockBackend, RecordStatus};
    use crate::retrieval::{DictVariant, GrammarVariant};

    fn fixtures() -> (Resources, Vec<EvalItem>) {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
        (
            Resources::load(&ResourcePaths::in_dir(&dir)).unwrap(),
            load_eval_set(dir.join("eval.jsonl")).unwrap(),
        )
    }

    #[test]
    fn best_setting_end_to_end() {
        let (res, eval) = fixtures();
        let mock = MockBackend::glossing();
        let out = end_to_end_translate(
            &PromptSpec::best(),
            &res,
            &eval,
            &mock,
            &GenParams::default(),
            3,
            None,
            &MetricConfig::default(),
            Some(&MockEmbedding::default()),
        )
        .unwrap();
        assert_eq!(out.records.len(), eval.len());
        assert!(out.records.iter().all(|r| r.status == RecordStatus::Ok));
        assert_eq!(out.report.per_sentence.len(), eval.len());
        assert_eq!(mock.calls(), eval.len());
    }

    #[test]
    fn cipher_with_grammar_rejected_before_calls() {
        let (res, eval) = fixtures();
        let mock = MockBackend::glossing();
        let spec = PromptSpec {
            cipher: true,
            grammar_variant: Some(GrammarVariant::Short),
            ..PromptSpec::morph()
        };
        let err = end_to_end_translate(&spec, &res, &eval, &mock, &GenParams::default(), 1, None, &MetricConfig::default(), None);
        assert!(matches!(err, Err(Error::Prompt(_))));
        assert_eq!(mock.calls(), 0);
    }

    #[test]
    fn empty_eval_set_rejected() {
        let (res, _) = fixtures();
        let mock = MockBackend::glossing();
        let err = end_to_end_translate(&PromptSpec::direct(), &res, &[], &mock, &GenParams::default(), 1, None, &MetricConfig::default(), None);
        assert!(matches!(err, Err(Error::Eval(EvalError::Empty))));
    }

    #[test]
    fn random_examples_follow_root_seed() {
        let (res, _) = fixtures();
        let spec = PromptSpec {
            parallel_variant: Some(ExampleVariant::Random),
            parallel_count: 3,
            seed: 11,
            ..PromptSpec::morph()
        };
        let a = prepare_prompt(&spec, "se udu oho", &res).unwrap();
        assert_eq!(a, prepare_prompt(&spec, "se udu oho", &res).unwrap());
        let other = PromptSpec { seed: 12, ..spec.clone() };
        assert_ne!(a.text, prepare_prompt(&other, "se udu oho", &res).unwrap().text);
    }

    #[test]
    fn dictionary_prompt_mentions_entries() {
        let (res, _) = fixtures();
        let spec = PromptSpec {
            dict_variant: Some(DictVariant::LexicalSuffixCollocation),
            ..PromptSpec::morph()
        };
        let p = prepare_prompt(&spec, "gvsai ejen jihe", &res).unwrap();
        assert!(p.text.contains("gvsa-i ejen: Lieutenant-General (of a banner)"));
    }
}
