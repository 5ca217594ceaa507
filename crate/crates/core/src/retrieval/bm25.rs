use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ExampleVariant, RetrievalError};
use crate::corpus_store::{Lexicon, ParallelCorpus};
use crate::morphology::{analyze_sentence, AnalyzedSentence, MorphemeKind};
use crate::retrieval::ExampleSet;
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Bm25Params { k1: 1.5, b: 0.75 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Posting {
    /// Position of the document in the corpus.
    pub doc: usize,
    pub tf: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bm25Index {
    pub postings: BTreeMap<String, Vec<Posting>>,
    pub doc_ids: Vec<String>,
    pub doc_len: Vec<usize>,
    pub avgdl: f64,
    pub params: Bm25Params,
}

/// Bag of retrieval terms for a sentence. Each word contributes the union of
/// its morphemes over all alternative analyses: stems by headword, suffixes as
/// `-form`. Unanalyzed words stand for themselves; punctuation is dropped.
pub fn morpheme_terms(sentence: &AnalyzedSentence) -> Vec<String> {
    let mut terms = Vec::new();
    for word in &sentence.words {
        if word.punctuation {
            continue;
        }
        if word.unanalyzed {
            terms.push(word.word.clone());
            continue;
        }
        let mut union = BTreeSet::new();
        for analysis in &word.analyses {
            for m in &analysis.morphemes {
                union.insert(match m.kind {
                    MorphemeKind::Stem => m.entry.clone(),
                    _ => format!("-{}", m.entry),
                });
            }
        }
        terms.extend(union);
    }
    terms
}

pub fn build_bm25_index(corpus: &ParallelCorpus, lexicon: &Lexicon) -> Result<Bm25Index, RetrievalError> {
    build_bm25_index_with(corpus, lexicon, Bm25Params::default())
}

pub fn build_bm25_index_with(
    corpus: &ParallelCorpus,
    lexicon: &Lexicon,
    params: Bm25Params,
) -> Result<Bm25Index, RetrievalError> {
    let docs = corpus.examples().iter().map(|ex| {
        let terms = analyze_sentence(&ex.source, lexicon)
            .map(|a| morpheme_terms(&a))
            .unwrap_or_default();
        (ex.id.clone(), terms)
    });
    Bm25Index::from_documents(docs, params)
}

impl Bm25Index {
    /// Builds an index over pre-tokenized documents.
    pub fn from_documents(
        docs: impl IntoIterator<Item = (String, Vec<String>)>,
        params: Bm25Params,
    ) -> Result<Self, RetrievalError> {
        let mut postings: BTreeMap<String, Vec<Posting>> = BTreeMap::new();
        let mut doc_ids = Vec::new();
        let mut doc_len = Vec::new();
        for (doc, (id, terms)) in docs.into_iter().enumerate() {
            let mut tf: BTreeMap<&str, usize> = BTreeMap::new();
            for t in &terms {
                *tf.entry(t).or_default() += 1;
            }
            for (term, tf) in tf {
                postings.entry(term.to_string()).or_default().push(Posting { doc, tf });
            }
            doc_ids.push(id);
            doc_len.push(terms.len());
        }
        if doc_ids.is_empty() {
            return Err(RetrievalError::EmptyCorpus);
        }
        let avgdl = doc_len.iter().sum::<usize>() as f64 / doc_len.len() as f64;
        Ok(Bm25Index {
            postings,
            doc_ids,
            doc_len,
            avgdl,
            params,
        })
    }

    pub fn len(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.doc_ids.is_empty()
    }

    pub fn idf(&self, term: &str) -> f64 {
        let n = self.len() as f64;
        let df = self.postings.get(term).map_or(0, Vec::len) as f64;
        ((n - df + 0.5) / (df + 0.5) + 1.0).ln()
    }

    /// Okapi score of every document against the query bag. Repeated query
    /// terms count once per occurrence.
    pub fn scores(&self, query: &[String]) -> Vec<f64> {
        let Bm25Params { k1, b } = self.params;
        let mut scores = vec![0.0; self.len()];
        for term in query {
            let Some(postings) = self.postings.get(term) else { continue };
            let idf = self.idf(term);
            for p in postings {
                let tf = p.tf as f64;
                let norm = 1.0 - b + b * self.doc_len[p.doc] as f64 / self.avgdl;
                scores[p.doc] += idf * tf * (k1 + 1.0) / (tf + k1 * norm);
            }
        }
        scores
    }

    /// Document positions of the top `n` scores, ties broken by corpus order.
    pub fn rank(&self, query: &[String], n: usize) -> Vec<(usize, f64)> {
        let scores = self.scores(query);
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
        order.into_iter().take(n).map(|i| (i, scores[i])).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("index serializes")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> crate::Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> crate::Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Top `n` corpus examples for the sentence by BM25 over morpheme terms.
pub fn bm25_query(
    index: &Bm25Index,
    corpus: &ParallelCorpus,
    sentence: &AnalyzedSentence,
    n: usize,
) -> Result<ExampleSet, RetrievalError> {
    if index.len() != corpus.len() {
        return Err(RetrievalError::IndexMismatch {
            index: index.len(),
            corpus: corpus.len(),
        });
    }
    let ranked = index.rank(&morpheme_terms(sentence), n);
    Ok(ExampleSet {
        variant: ExampleVariant::Bm25,
        examples: ranked.iter().map(|&(i, _)| corpus.examples()[i].clone()).collect(),
        scores: Some(ranked.iter().map(|&(_, s)| s).collect()),
    })
}
