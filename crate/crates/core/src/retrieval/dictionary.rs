use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::DictVariant;
use crate::corpus_store::{Lexicon, MorphemeKey};
use crate::morphology::{AnalyzedSentence, WordAnalysisSet};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlossBlock {
    pub headword: String,
    pub is_verbal: bool,
    pub senses: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
    /// True when the block was pulled in as the parent of another stem.
    #[serde(default)]
    pub via_parent: bool,
}

impl GlossBlock {
    /// Verbal headwords carry a trailing `=`.
    pub fn label(&self) -> String {
        if self.is_verbal {
            format!("{}=", self.headword)
        } else {
            self.headword.clone()
        }
    }

    pub fn render(&self, parent_label: Option<&str>) -> String {
        let senses = if self.senses.len() == 1 {
            self.senses[0].clone()
        } else {
            self.senses
                .iter()
                .enumerate()
                .map(|(i, s)| format!("{}. {s}", i + 1))
                .collect::<Vec<_>>()
                .join(" ")
        };
        match parent_label {
            Some(p) => format!("{}: {senses} (parent word: {p})", self.label()),
            None => format!("{}: {senses}", self.label()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuffixNote {
    pub form: String,
    pub explanation: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollocationNote {
    pub pattern: Vec<String>,
    pub gloss: String,
}

impl CollocationNote {
    pub fn render(&self) -> String {
        format!("{}: {}", self.pattern.join(" "), self.gloss)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DictionaryBundle {
    pub variant: DictVariant,
    pub entries: Vec<GlossBlock>,
    /// Present iff the variant includes suffixes.
    pub suffix_notes: Option<Vec<SuffixNote>>,
    /// Present iff the variant includes collocations.
    pub collocation_notes: Option<Vec<CollocationNote>>,
    /// Words with no analysis; they contribute no block.
    pub unanalyzed: Vec<String>,
}

impl DictionaryBundle {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
            && self.suffix_notes.as_ref().is_none_or(Vec::is_empty)
            && self.collocation_notes.as_ref().is_none_or(Vec::is_empty)
    }

    pub fn render(&self) -> String {
        let mut lines: Vec<String> = self
            .entries
            .iter()
            .map(|block| {
                let parent = block.parent.as_deref().map(|p| {
                    self.entries
                        .iter()
                        .find(|b| b.headword == p)
                        .map_or_else(|| p.to_string(), GlossBlock::label)
                });
                block.render(parent.as_deref())
            })
            .collect();
        if let Some(notes) = self.suffix_notes.as_ref().filter(|n| !n.is_empty()) {
            lines.push("Suffixes:".into());
            lines.extend(notes.iter().map(|n| format!("-{}: {}", n.form, n.explanation)));
        }
        if let Some(notes) = self.collocation_notes.as_ref().filter(|n| !n.is_empty()) {
            lines.push("Collocations:".into());
            lines.extend(notes.iter().map(CollocationNote::render));
        }
        lines.join("\n")
    }
}

/// Collects gloss blocks for every stem of every alternative analysis, their
/// parents, and (depending on the variant) suffix and collocation notes.
pub fn build_dictionary_bundle(
    sentence: &AnalyzedSentence,
    lexicon: &Lexicon,
    variant: DictVariant,
) -> DictionaryBundle {
    let mut entries: Vec<GlossBlock> = Vec::new();
    let mut seen = HashSet::new();
    for stem in sentence.stems() {
        let Some(entry) = lexicon.entry(stem) else { continue };
        let chain = std::iter::once((entry, false)).chain(lexicon.parent_chain(stem).into_iter().map(|e| (e, true)));
        for (e, via_parent) in chain {
            if seen.insert(e.headword.clone()) {
                entries.push(GlossBlock {
                    headword: e.headword.clone(),
                    is_verbal: e.is_verbal,
                    senses: e.senses.clone(),
                    parent: e.parent.clone(),
                    via_parent,
                });
            }
        }
    }

    let suffix_notes = variant.with_suffixes().then(|| {
        let mut seen = HashSet::new();
        let mut notes = Vec::new();
        for word in &sentence.words {
            for analysis in &word.analyses {
                for suffix in analysis.suffixes() {
                    if !seen.insert(suffix.entry.clone()) {
                        continue;
                    }
                    if let Some(entry) = lexicon.suffix_by_surface(&suffix.entry) {
                        notes.push(SuffixNote {
                            form: entry.form.clone(),
                            explanation: entry.explanation.clone(),
                        });
                    }
                }
            }
        }
        notes
    });

    let collocation_notes = variant
        .with_collocations()
        .then(|| find_collocations(sentence, lexicon));

    DictionaryBundle {
        variant,
        entries,
        suffix_notes,
        collocation_notes,
        unanalyzed: sentence.unanalyzed_words().into_iter().map(String::from).collect(),
    }
}

fn word_matches(word: &WordAnalysisSet, key: &MorphemeKey) -> bool {
    word.analyses.iter().any(|a| {
        a.stem().entry == key.stem
            && (key.suffixes.is_empty()
                || a.suffixes().iter().map(|m| m.entry.as_str()).eq(key.suffixes.iter().map(String::as_str)))
    })
}

/// Collocations whose whole pattern occurs over consecutive words, ordered by
/// first match position.
fn find_collocations(sentence: &AnalyzedSentence, lexicon: &Lexicon) -> Vec<CollocationNote> {
    let mut hits: Vec<(usize, CollocationNote)> = Vec::new();
    for (_, colloc) in lexicon.collocations() {
        let Some(keys) = colloc
            .pattern
            .iter()
            .map(|k| lexicon.parse_key(k))
            .collect::<Option<Vec<_>>>()
        else {
            continue;
        };
        if keys.len() > sentence.words.len() {
            continue;
        }
        let first = (0..=sentence.words.len() - keys.len()).find(|&start| {
            keys.iter()
                .enumerate()
                .all(|(i, key)| word_matches(&sentence.words[start + i], key))
        });
        if let Some(pos) = first {
            hits.push((
                pos,
                CollocationNote {
                    pattern: colloc.pattern.clone(),
                    gloss: colloc.gloss.clone(),
                },
            ));
        }
    }
    hits.sort_by_key(|(pos, _)| *pos);
    hits.into_iter().map(|(_, note)| note).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus_store::load_lexicon;
    use crate::morphology::analyze_sentence;
    use std::path::Path;

    fn lexicon() -> Lexicon {
        load_lexicon(Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/lexicon.json")).unwrap()
    }

    fn headwords(b: &DictionaryBundle) -> Vec<&str> {
        b.entries.iter().map(|e| e.headword.as_str()).collect()
    }

    #[test]
    fn lexical_blocks_for_ambiguous_sentence() {
        let lex = lexicon();
        let a = analyze_sentence("se udu oho", &lex).unwrap();
        let b = build_dictionary_bundle(&a, &lex, DictVariant::Lexical);
        assert_eq!(headwords(&b), vec!["se", "udu", "oho", "o"]);
        assert!(b.suffix_notes.is_none());
        assert!(b.collocation_notes.is_none());
        let text = b.render();
        assert!(text.contains("oho: armpit"));
        assert!(text.contains("o=: 1. to become, to change into 2. to be, to exist"));
    }

    #[test]
    fn collocation_note_for_banner_master() {
        let lex = lexicon();
        let a = analyze_sentence("gvsai ejen", &lex).unwrap();
        let b = build_dictionary_bundle(&a, &lex, DictVariant::LexicalSuffixCollocation);
        let notes = b.collocation_notes.as_ref().unwrap();
        assert_eq!(notes.len(), 1);
        assert!(notes[0].render().starts_with("gvsa-i ejen: Lieutenant-General"));
        assert_eq!(b.suffix_notes.as_ref().unwrap()[0].form, "i");
    }

    #[test]
    fn collocation_requires_adjacency() {
        let lex = lexicon();
        let a = analyze_sentence("gvsai morin ejen", &lex).unwrap();
        let b = build_dictionary_bundle(&a, &lex, DictVariant::LexicalSuffixCollocation);
        assert!(b.collocation_notes.unwrap().is_empty());
        // the genitive is part of the pattern
        let a = analyze_sentence("gvsa ejen", &lex).unwrap();
        let b = build_dictionary_bundle(&a, &lex, DictVariant::LexicalSuffixCollocation);
        assert!(b.collocation_notes.unwrap().is_empty());
    }

    #[test]
    fn unknown_words_give_empty_bundle() {
        let lex = lexicon();
        let a = analyze_sentence("foo bar", &lex).unwrap();
        let b = build_dictionary_bundle(&a, &lex, DictVariant::LexicalSuffixCollocation);
        assert!(b.is_empty());
        assert_eq!(b.unanalyzed, vec!["foo", "bar"]);
    }

    #[test]
    fn parents_follow_their_child() {
        let lex = lexicon();
        let a = analyze_sentence("sakdasa morin", &lex).unwrap();
        let b = build_dictionary_bundle(&a, &lex, DictVariant::Lexical);
        assert_eq!(headwords(&b), vec!["sakda", "se", "morin"]);
        assert!(b.entries[1].via_parent);
        assert!(b.render().contains("sakda: 1. old man 2. old, aged (parent word: se)"));
    }

    #[test]
    fn tiers_only_add_sections() {
        let lex = lexicon();
        let a = analyze_sentence("gvsai ejen sakdasa oho", &lex).unwrap();
        let l = build_dictionary_bundle(&a, &lex, DictVariant::Lexical);
        let ls = build_dictionary_bundle(&a, &lex, DictVariant::LexicalSuffix);
        let lsc = build_dictionary_bundle(&a, &lex, DictVariant::LexicalSuffixCollocation);
        assert_eq!(l.entries, ls.entries);
        assert_eq!(ls.entries, lsc.entries);
        assert_eq!(ls.suffix_notes, lsc.suffix_notes);
        assert!(lsc.render().starts_with(&ls.render()));
        assert!(ls.render().starts_with(&l.render()));
    }
}
