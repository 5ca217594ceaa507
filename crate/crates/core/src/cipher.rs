//! Letter-rotation cipher that turns transliterated source text into an
//! unfamiliar "fake" language while leaving target-language text alone.
//!
//! Each vowel is replaced by the next vowel and each consonant by the next
//! consonant, wrapping at the end of either list:
//!
//! ```
//! use icmt::cipher::{decipher_token, encipher_token};
//! assert_eq!(encipher_token("amban"), "encep");
//! assert_eq!(decipher_token("encep"), "amban");
//! ```

use thiserror::Error;

use crate::corpus_store::{LexicalEntry, Lexicon, ParallelCorpus, ParallelExample, SuffixEntry};
use crate::morphology::AnalyzedSentence;
use crate::retrieval::{DictionaryBundle, ExampleSet, GrammarBundle};

pub const VOWEL_CYCLE: [char; 5] = ['a', 'e', 'i', 'o', 'u'];
pub const CONSONANT_CYCLE: [char; 21] = [
    'b', 'c', 'd', 'f', 'g', 'h', 'j', 'k', 'l', 'm', 'n', 'p', 'q', 'r', 's', 't', 'v', 'w', 'x', 'y', 'z',
];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CipherError {
    #[error("grammar excerpts mix source and target text and cannot be enciphered")]
    GrammarPresent,
}

/// Forward and inverse substitution over the 26 lowercase letters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CipherTable {
    forward: [char; 26],
    inverse: [char; 26],
}

impl Default for CipherTable {
    fn default() -> Self {
        let mut forward = ['\0'; 26];
        let mut inverse = ['\0'; 26];
        for cycle in [&VOWEL_CYCLE[..], &CONSONANT_CYCLE[..]] {
            for (i, &c) in cycle.iter().enumerate() {
                let next = cycle[(i + 1) % cycle.len()];
                forward[(c as u8 - b'a') as usize] = next;
                inverse[(next as u8 - b'a') as usize] = c;
            }
        }
        CipherTable { forward, inverse }
    }
}

impl CipherTable {
    fn map(table: &[char; 26], c: char) -> char {
        if c.is_ascii_lowercase() {
            table[(c as u8 - b'a') as usize]
        } else if c.is_ascii_uppercase() {
            table[(c.to_ascii_lowercase() as u8 - b'a') as usize].to_ascii_uppercase()
        } else {
            c
        }
    }

    pub fn encipher_char(&self, c: char) -> char {
        Self::map(&self.forward, c)
    }

    pub fn decipher_char(&self, c: char) -> char {
        Self::map(&self.inverse, c)
    }

    pub fn encipher(&self, s: &str) -> String {
        s.chars().map(|c| self.encipher_char(c)).collect()
    }

    pub fn decipher(&self, s: &str) -> String {
        s.chars().map(|c| self.decipher_char(c)).collect()
    }
}

pub fn encipher_token(t: &str) -> String {
    CipherTable::default().encipher(t)
}

pub fn decipher_token(t: &str) -> String {
    CipherTable::default().decipher(t)
}

pub fn encipher_sentence(a: &AnalyzedSentence) -> AnalyzedSentence {
    let t = CipherTable::default();
    let mut out = a.clone();
    out.original = t.encipher(&a.original);
    for word in &mut out.words {
        word.word = t.encipher(&word.word);
        for analysis in &mut word.analyses {
            for m in &mut analysis.morphemes {
                m.surface = t.encipher(&m.surface);
                m.entry = t.encipher(&m.entry);
            }
        }
    }
    out
}

pub fn encipher_dictionary(d: &DictionaryBundle) -> DictionaryBundle {
    let t = CipherTable::default();
    let mut out = d.clone();
    for block in &mut out.entries {
        block.headword = t.encipher(&block.headword);
        block.parent = block.parent.as_deref().map(|p| t.encipher(p));
    }
    for note in out.suffix_notes.iter_mut().flatten() {
        note.form = t.encipher(&note.form);
    }
    for note in out.collocation_notes.iter_mut().flatten() {
        note.pattern = note.pattern.iter().map(|p| t.encipher(p)).collect();
    }
    out.unanalyzed = d.unanalyzed.iter().map(|w| t.encipher(w)).collect();
    out
}

pub fn encipher_example(e: &ParallelExample) -> ParallelExample {
    ParallelExample {
        source: encipher_token(&e.source),
        anchor_lexemes: e.anchor_lexemes.iter().map(|a| encipher_token(a)).collect(),
        ..e.clone()
    }
}

pub fn encipher_examples(p: &ExampleSet) -> ExampleSet {
    ExampleSet {
        examples: p.examples.iter().map(encipher_example).collect(),
        ..p.clone()
    }
}

pub fn encipher_corpus(corpus: &ParallelCorpus) -> ParallelCorpus {
    ParallelCorpus::new(corpus.examples().iter().map(encipher_example).collect())
        .expect("enciphering preserves ids and non-empty fields")
}

/// Enciphers headwords, parents, suffix surfaces and collocation patterns.
/// Senses, explanations and glosses are kept.
pub fn encipher_lexicon(lexicon: &Lexicon) -> Lexicon {
    let t = CipherTable::default();
    let entries = lexicon
        .entries()
        .iter()
        .map(|e| LexicalEntry {
            headword: t.encipher(&e.headword),
            parent: e.parent.as_deref().map(|p| t.encipher(p)),
            collocations: e
                .collocations
                .iter()
                .map(|c| crate::corpus_store::Collocation {
                    pattern: c.pattern.iter().map(|p| t.encipher(p)).collect(),
                    gloss: c.gloss.clone(),
                })
                .collect(),
            ..e.clone()
        })
        .collect();
    let suffixes = lexicon
        .suffixes()
        .iter()
        .map(|s| SuffixEntry {
            form: t.encipher(&s.form),
            allomorphs: s.allomorphs.iter().map(|a| t.encipher(a)).collect(),
            ..s.clone()
        })
        .collect();
    Lexicon::new(entries, suffixes).expect("a bijective rename preserves lexicon validity")
}

#[derive(Clone, Debug, PartialEq)]
pub struct EncipheredInputs {
    pub sentence: AnalyzedSentence,
    pub dictionary: Option<DictionaryBundle>,
    pub examples: Option<ExampleSet>,
}

/// Enciphers every source-language string of the prompt ingredients. Grammar
/// bundles are refused.
pub fn encipher_bundle(
    sentence: &AnalyzedSentence,
    dictionary: Option<&DictionaryBundle>,
    examples: Option<&ExampleSet>,
    grammar: Option<&GrammarBundle>,
) -> Result<EncipheredInputs, CipherError> {
    if grammar.is_some() {
        return Err(CipherError::GrammarPresent);
    }
    Ok(EncipheredInputs {
        sentence: encipher_sentence(sentence),
        dictionary: dictionary.map(encipher_dictionary),
        examples: examples.map(encipher_examples),
    })
}
