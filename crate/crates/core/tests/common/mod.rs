#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use icmt::corpus_store::{
    load_eval_set, load_grammar_table, load_lexicon, load_parallel_corpus, EvalItem, GrammarTable, Lexicon,
    ParallelCorpus, Slot,
};
use icmt::pipeline::{ResourcePaths, Resources};
use icmt::prompt::{CotVariant, PromptSpec};
use icmt::retrieval::{DictVariant, ExampleVariant, GrammarVariant};

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn lexicon() -> Lexicon {
    load_lexicon(fixtures_dir().join("lexicon.json")).unwrap()
}

pub fn corpus() -> ParallelCorpus {
    load_parallel_corpus(fixtures_dir().join("corpus.jsonl")).unwrap()
}

pub fn grammar() -> GrammarTable {
    load_grammar_table(fixtures_dir().join("grammar.json")).unwrap()
}

pub fn eval_set() -> Vec<EvalItem> {
    load_eval_set(fixtures_dir().join("eval.jsonl")).unwrap()
}

pub fn resources() -> Resources {
    Resources::load(&ResourcePaths::in_dir(fixtures_dir())).unwrap()
}

pub const GOLDEN_SENTENCE: &str = "gvsai ejen sakdasa oho.";

/// The component combinations with checked-in golden prompts, by file stem.
pub fn golden_specs() -> Vec<(&'static str, PromptSpec)> {
    let mu = PromptSpec::morph();
    let d = |v| PromptSpec {
        dict_variant: Some(v),
        ..mu.clone()
    };
    let full_d = d(DictVariant::LexicalSuffixCollocation);
    let p = |v| PromptSpec {
        parallel_variant: Some(v),
        ..full_d.clone()
    };
    let best = p(ExampleVariant::Bm25);
    let g = |v| PromptSpec {
        grammar_variant: Some(v),
        ..best.clone()
    };
    let c = |v| PromptSpec {
        cot_variant: Some(v),
        ..best.clone()
    };
    vec![
        ("direct", PromptSpec::direct()),
        ("mu", mu.clone()),
        ("mu_d_l", d(DictVariant::Lexical)),
        ("mu_d_l_s", d(DictVariant::LexicalSuffix)),
        ("mu_d_l_s_c", full_d.clone()),
        ("mu_d_p_random", p(ExampleVariant::Random)),
        ("mu_d_p_dictionary", p(ExampleVariant::Dictionary)),
        ("mu_d_p_bm25", best.clone()),
        ("mu_d_p_g_short", g(GrammarVariant::Short)),
        ("mu_d_p_g_long", g(GrammarVariant::Long)),
        ("mu_d_p_g_long_p", g(GrammarVariant::LongP)),
        ("mu_d_p_c_annotate", c(CotVariant::Annotate)),
        ("mu_d_p_c_annotate_syntax", c(CotVariant::AnnotateSyntax)),
        ("mu_d_p_cipher", PromptSpec { cipher: true, ..best }),
    ]
}

pub fn golden_path(stem: &str) -> PathBuf {
    fixtures_dir().join("golden").join(format!("{stem}.txt"))
}

/// One analysis as (surface, kind, entry) triples; kind is "stem", "verbal"
/// or "nominal".
pub type Segmentation = Vec<(String, &'static str, String)>;

/// Every way to cut `word` into a stem followed by at most `max_suffixes`
/// suffix surfaces of the stem's slot, found by trying all cut points.
pub fn segment_oracle(word: &str, lexicon: &Lexicon, max_suffixes: usize) -> BTreeSet<Segmentation> {
    let slot_name = |s: Slot| match s {
        Slot::Verbal => "verbal",
        Slot::Nominal => "nominal",
    };
    let mut surfaces: Vec<(String, Slot, String)> = Vec::new();
    for s in lexicon.suffixes() {
        for surface in s.surfaces() {
            surfaces.push((surface.to_string(), s.slot, s.form.clone()));
        }
    }
    let mut out = BTreeSet::new();
    for cut in 1..=word.len() {
        if !word.is_char_boundary(cut) {
            continue;
        }
        let Some(entry) = lexicon.entries().iter().find(|e| e.headword == word[..cut]) else {
            continue;
        };
        let slot = entry.slot();
        let mut tails: Vec<Vec<(String, &'static str, String)>> = Vec::new();
        split_suffixes(&word[cut..], &surfaces, slot, max_suffixes, &mut vec![], &mut tails, slot_name);
        for tail in tails {
            let mut seg = vec![(word[..cut].to_string(), "stem", entry.headword.clone())];
            seg.extend(tail);
            out.insert(seg);
        }
    }
    out
}

fn split_suffixes(
    rest: &str,
    surfaces: &[(String, Slot, String)],
    slot: Slot,
    budget: usize,
    acc: &mut Vec<(String, &'static str, String)>,
    out: &mut Vec<Vec<(String, &'static str, String)>>,
    name: impl Fn(Slot) -> &'static str + Copy,
) {
    if rest.is_empty() {
        out.push(acc.clone());
        return;
    }
    if budget == 0 {
        return;
    }
    for (surface, s, form) in surfaces {
        if *s == slot && rest.starts_with(surface.as_str()) {
            acc.push((surface.clone(), name(*s), form.clone()));
            split_suffixes(&rest[surface.len()..], surfaces, slot, budget - 1, acc, out, name);
            acc.pop();
        }
    }
}

/// Textbook Okapi BM25 over term lists, recomputing every statistic per call.
pub fn bm25_oracle(docs: &[Vec<String>], query: &[String], k1: f64, b: f64) -> Vec<f64> {
    let n = docs.len() as f64;
    let avgdl = docs.iter().map(Vec::len).sum::<usize>() as f64 / n;
    docs.iter()
        .map(|doc| {
            let mut score = 0.0;
            for q in query {
                let df = docs.iter().filter(|d| d.contains(q)).count() as f64;
                let tf = doc.iter().filter(|t| *t == q).count() as f64;
                if tf == 0.0 {
                    continue;
                }
                let idf = ((n - df + 0.5) / (df + 0.5) + 1.0).ln();
                score += idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * doc.len() as f64 / avgdl));
            }
            score
        })
        .collect()
}

/// Positions sorted by score descending, earlier documents first on ties.
pub fn oracle_rank(scores: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    // insertion sort keeps equal elements in place
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && scores[idx[j - 1]] < scores[idx[j]] {
            idx.swap(j - 1, j);
            j -= 1;
        }
    }
    idx
}

/// Mean and sample standard deviation per key.
pub fn mean_sd(groups: &BTreeMap<String, Vec<f64>>) -> BTreeMap<String, (f64, f64)> {
    groups
        .iter()
        .map(|(k, xs)| {
            let n = xs.len() as f64;
            let mean = xs.iter().sum::<f64>() / n;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (k.clone(), (mean, var.sqrt()))
        })
        .collect()
}
