//! Rule-based morphological analysis by recursive suffix detachment.
//!
//! A word is analyzed by repeatedly stripping a known suffix surface from its
//! right edge until the remainder is a known stem. Every successful path is
//! kept: ambiguity is resolved downstream by the translator, not here.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus_store::{GrammarTable, Lexicon, Slot};

/// Maximum number of suffixes detached from a single word.
pub const MAX_SUFFIXES: usize = 4;

/// Characters split off as standalone tokens and never analyzed.
pub const PUNCTUATION: [char; 6] = ['.', ',', '?', '!', ':', ';'];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MorphError {
    #[error("empty sentence")]
    EmptySentence,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MorphemeKind {
    Stem,
    VerbalSuffix,
    NominalSuffix,
}

impl MorphemeKind {
    fn suffix(slot: Slot) -> Self {
        match slot {
            Slot::Verbal => MorphemeKind::VerbalSuffix,
            Slot::Nominal => MorphemeKind::NominalSuffix,
        }
    }

    /// The separator written before a suffix of this kind.
    pub fn marker(self) -> Option<char> {
        match self {
            MorphemeKind::Stem => None,
            MorphemeKind::VerbalSuffix => Some('='),
            MorphemeKind::NominalSuffix => Some('~'),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Morpheme {
    pub surface: String,
    pub kind: MorphemeKind,
    /// Headword for stems, canonical suffix form for suffixes.
    pub entry: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WordAnalysis {
    pub morphemes: Vec<Morpheme>,
}

impl WordAnalysis {
    pub fn stem(&self) -> &Morpheme {
        &self.morphemes[0]
    }

    pub fn suffixes(&self) -> &[Morpheme] {
        &self.morphemes[1..]
    }

    pub fn surface(&self) -> String {
        self.morphemes.iter().map(|m| m.surface.as_str()).collect()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for m in &self.morphemes {
            if let Some(marker) = m.kind.marker() {
                out.push(marker);
            }
            out.push_str(&m.surface);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordAnalysisSet {
    pub word: String,
    pub analyses: Vec<WordAnalysis>,
    pub unanalyzed: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub punctuation: bool,
}

impl WordAnalysisSet {
    pub fn render(&self) -> String {
        if self.unanalyzed {
            self.word.clone()
        } else {
            self.analyses
                .iter()
                .map(WordAnalysis::render)
                .collect::<Vec<_>>()
                .join("/")
        }
    }
}

/// A source sentence with every token analyzed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalyzedSentence {
    pub original: String,
    pub words: Vec<WordAnalysisSet>,
}

impl AnalyzedSentence {
    /// Distinct stem headwords in order of first occurrence, alternatives of
    /// one word taken in analysis order.
    pub fn stems(&self) -> Vec<&str> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for word in &self.words {
            for analysis in &word.analyses {
                let stem = analysis.stem().entry.as_str();
                if seen.insert(stem) {
                    out.push(stem);
                }
            }
        }
        out
    }

    /// Words for which no analysis was found, excluding punctuation.
    pub fn unanalyzed_words(&self) -> Vec<&str> {
        self.words
            .iter()
            .filter(|w| w.unanalyzed && !w.punctuation)
            .map(|w| w.word.as_str())
            .collect()
    }
}

/// Returns every analysis of `word` reachable by right-edge suffix detachment.
///
/// Analyses are ordered by morpheme count, then lexicographically by their
/// surface sequence.
pub fn analyze_word(word: &str, lexicon: &Lexicon) -> WordAnalysisSet {
    let mut found = Vec::new();
    let mut detached = Vec::new();
    detach(word, lexicon, &mut detached, &mut found);

    let mut seen = HashSet::new();
    found.retain(|a: &WordAnalysis| seen.insert(a.clone()));
    found.sort_by(|a, b| {
        a.morphemes.len().cmp(&b.morphemes.len()).then_with(|| {
            let sa = a.morphemes.iter().map(|m| m.surface.as_str());
            let sb = b.morphemes.iter().map(|m| m.surface.as_str());
            sa.cmp(sb)
        })
    });

    WordAnalysisSet {
        word: word.to_string(),
        unanalyzed: found.is_empty(),
        analyses: found,
        punctuation: false,
    }
}

// `detached` holds suffixes innermost-last, i.e. in reverse word order.
fn detach(rest: &str, lexicon: &Lexicon, detached: &mut Vec<Morpheme>, out: &mut Vec<WordAnalysis>) {
    if let Some(entry) = lexicon.entry(rest) {
        let kind = MorphemeKind::suffix(entry.slot());
        if detached.iter().all(|m| m.kind == kind) {
            let mut morphemes = Vec::with_capacity(detached.len() + 1);
            morphemes.push(Morpheme {
                surface: rest.to_string(),
                kind: MorphemeKind::Stem,
                entry: entry.headword.clone(),
            });
            morphemes.extend(detached.iter().rev().cloned());
            out.push(WordAnalysis { morphemes });
        }
    }
    if detached.len() == MAX_SUFFIXES {
        return;
    }
    for (surface, suffix) in lexicon.suffix_surfaces() {
        if rest.len() <= surface.len() || !rest.ends_with(surface) {
            continue;
        }
        let kind = MorphemeKind::suffix(suffix.slot);
        // every suffix of one analysis must share the stem's slot
        if detached.first().is_some_and(|m| m.kind != kind) {
            continue;
        }
        detached.push(Morpheme {
            surface: surface.to_string(),
            kind,
            entry: suffix.form.clone(),
        });
        detach(&rest[..rest.len() - surface.len()], lexicon, detached, out);
        detached.pop();
    }
}

/// Splits on whitespace and detaches punctuation from both token edges.
pub fn tokenize(sentence: &str) -> Vec<(String, bool)> {
    let mut tokens = Vec::new();
    for raw in sentence.split_whitespace() {
        let core_start = raw.find(|c| !PUNCTUATION.contains(&c));
        let Some(start) = core_start else {
            tokens.extend(raw.chars().map(|c| (c.to_string(), true)));
            continue;
        };
        let end = raw
            .rfind(|c| !PUNCTUATION.contains(&c))
            .map(|i| i + raw[i..].chars().next().map_or(1, char::len_utf8))
            .unwrap_or(raw.len());
        tokens.extend(raw[..start].chars().map(|c| (c.to_string(), true)));
        tokens.push((raw[start..end].to_string(), false));
        tokens.extend(raw[end..].chars().map(|c| (c.to_string(), true)));
    }
    tokens
}

pub fn analyze_sentence(sentence: &str, lexicon: &Lexicon) -> Result<AnalyzedSentence, MorphError> {
    if sentence.trim().is_empty() {
        return Err(MorphError::EmptySentence);
    }
    let words = tokenize(sentence)
        .into_iter()
        .map(|(token, is_punct)| {
            if is_punct {
                WordAnalysisSet {
                    word: token,
                    analyses: Vec::new(),
                    unanalyzed: true,
                    punctuation: true,
                }
            } else {
                analyze_word(&token, lexicon)
            }
        })
        .collect();
    Ok(AnalyzedSentence {
        original: sentence.to_string(),
        words,
    })
}

/// Renders the analyzed sentence: `=` before verbal suffixes, `~` before
/// nominal ones, `/` between alternative analyses. Punctuation attaches to the
/// preceding token.
pub fn render(sentence: &AnalyzedSentence) -> String {
    let mut out = String::new();
    for word in &sentence.words {
        if !out.is_empty() && !word.punctuation {
            out.push(' ');
        }
        out.push_str(&word.render());
    }
    out
}

/// Grammar features triggered by any suffix of any analysis, in order of first
/// occurrence in the sentence.
pub fn extract_features(sentence: &AnalyzedSentence, table: &GrammarTable) -> Vec<String> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for word in &sentence.words {
        for analysis in &word.analyses {
            for suffix in analysis.suffixes() {
                for feature in table.triggered_by(&suffix.entry) {
                    if seen.insert(feature) {
                        out.push(feature.to_string());
                    }
                }
            }
        }
    }
    out
}
