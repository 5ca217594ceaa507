//! Loading and validation of the linguistic resources.
//!
//! The lexicon and grammar table are single JSON documents; the parallel
//! corpus and the evaluation set are JSON-lines files with one record per
//! line. Every store is immutable once loaded.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Maximum number of parent links followed when expanding a headword.
pub const MAX_PARENT_DEPTH: usize = 3;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Schema {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("lexicon has no entries")]
    EmptyLexicon,
    #[error("invalid lexical entry {headword:?}: {message}")]
    InvalidEntry { headword: String, message: String },
    #[error("duplicate headword {0:?}")]
    DuplicateHeadword(String),
    #[error("entry {headword:?} references unknown parent {parent:?}")]
    DanglingParent { headword: String, parent: String },
    #[error("parent chain of {0:?} contains a cycle")]
    ParentCycle(String),
    #[error("invalid suffix {form:?}: {message}")]
    InvalidSuffix { form: String, message: String },
    #[error("{0:?} is both a stem and a suffix surface")]
    StemSuffixCollision(String),
    #[error("collocation {pattern:?} of {headword:?}: {message}")]
    InvalidCollocation {
        headword: String,
        pattern: Vec<String>,
        message: String,
    },
    #[error("{path}:{line}: duplicate id {id:?}")]
    DuplicateId {
        path: PathBuf,
        line: usize,
        id: String,
    },
    #[error("{path}:{line}: field `{field}` is empty")]
    EmptyField {
        path: PathBuf,
        line: usize,
        field: &'static str,
    },
    #[error("grammar feature {feature_id:?}: {message}")]
    InvalidFeature { feature_id: String, message: String },
    #[error("{path}: no records")]
    Empty { path: PathBuf },
}

// ---------------------------------------------------------------------------
// Lexicon

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    Verbal,
    Nominal,
}

/// A multi-morpheme pattern with its own meaning. Pattern elements are morpheme
/// keys: a stem (`ejen`), optionally followed by suffixes joined with `-`
/// (`gvsa-i`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Collocation {
    pub pattern: Vec<String>,
    pub gloss: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LexicalEntry {
    pub headword: String,
    pub senses: Vec<String>,
    #[serde(default)]
    pub is_verbal: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub collocations: Vec<Collocation>,
}

impl LexicalEntry {
    pub fn slot(&self) -> Slot {
        if self.is_verbal {
            Slot::Verbal
        } else {
            Slot::Nominal
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuffixEntry {
    pub form: String,
    pub slot: Slot,
    pub explanation: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub allomorphs: Vec<String>,
}

impl SuffixEntry {
    /// The canonical form followed by every allomorph.
    pub fn surfaces(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.form.as_str()).chain(self.allomorphs.iter().map(String::as_str))
    }
}

/// A morpheme key parsed from a collocation pattern element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphemeKey {
    pub stem: String,
    /// Canonical suffix forms, in order.
    pub suffixes: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LexiconDoc {
    entries: Vec<LexicalEntry>,
    #[serde(default)]
    suffixes: Vec<SuffixEntry>,
}

/// Stems, suffixes and collocations, with lookup indexes.
#[derive(Clone, Debug, Serialize)]
pub struct Lexicon {
    entries: Vec<LexicalEntry>,
    suffixes: Vec<SuffixEntry>,
    #[serde(skip)]
    stem_index: HashMap<String, usize>,
    #[serde(skip)]
    surface_index: HashMap<String, usize>,
    /// Suffix surfaces sorted longest first, then lexicographically.
    #[serde(skip)]
    surfaces_by_length: Vec<(String, usize)>,
}

impl Lexicon {
    pub fn new(entries: Vec<LexicalEntry>, suffixes: Vec<SuffixEntry>) -> Result<Self, LoadError> {
        if entries.is_empty() {
            return Err(LoadError::EmptyLexicon);
        }

        let mut stem_index = HashMap::new();
        for (i, entry) in entries.iter().enumerate() {
            if entry.headword.trim().is_empty() {
                return Err(LoadError::InvalidEntry {
                    headword: entry.headword.clone(),
                    message: "headword is empty".into(),
                });
            }
            if entry.headword.chars().any(char::is_whitespace) {
                return Err(LoadError::InvalidEntry {
                    headword: entry.headword.clone(),
                    message: "headword contains whitespace".into(),
                });
            }
            if entry.senses.is_empty() || entry.senses.iter().any(|s| s.trim().is_empty()) {
                return Err(LoadError::InvalidEntry {
                    headword: entry.headword.clone(),
                    message: "senses must be a non-empty list of non-empty strings".into(),
                });
            }
            if stem_index.insert(entry.headword.clone(), i).is_some() {
                return Err(LoadError::DuplicateHeadword(entry.headword.clone()));
            }
        }

        let mut surface_index = HashMap::new();
        for (i, suffix) in suffixes.iter().enumerate() {
            let mut seen = HashSet::new();
            for surface in suffix.surfaces() {
                if surface.is_empty() {
                    return Err(LoadError::InvalidSuffix {
                        form: suffix.form.clone(),
                        message: "empty surface form".into(),
                    });
                }
                if !seen.insert(surface) {
                    return Err(LoadError::InvalidSuffix {
                        form: suffix.form.clone(),
                        message: format!("surface {surface:?} listed twice"),
                    });
                }
                if stem_index.contains_key(surface) {
                    return Err(LoadError::StemSuffixCollision(surface.to_string()));
                }
                if surface_index.insert(surface.to_string(), i).is_some() {
                    return Err(LoadError::InvalidSuffix {
                        form: suffix.form.clone(),
                        message: format!("surface {surface:?} belongs to another suffix"),
                    });
                }
            }
        }

        let mut surfaces_by_length: Vec<(String, usize)> =
            surface_index.iter().map(|(s, &i)| (s.clone(), i)).collect();
        surfaces_by_length.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(&b.0)));

        let lexicon = Lexicon {
            entries,
            suffixes,
            stem_index,
            surface_index,
            surfaces_by_length,
        };
        lexicon.check_parents()?;
        lexicon.check_collocations()?;
        Ok(lexicon)
    }

    fn check_parents(&self) -> Result<(), LoadError> {
        for entry in &self.entries {
            let mut seen = HashSet::from([entry.headword.as_str()]);
            let mut current = entry;
            while let Some(parent) = &current.parent {
                let Some(next) = self.entry(parent) else {
                    return Err(LoadError::DanglingParent {
                        headword: current.headword.clone(),
                        parent: parent.clone(),
                    });
                };
                if !seen.insert(next.headword.as_str()) {
                    return Err(LoadError::ParentCycle(entry.headword.clone()));
                }
                current = next;
            }
        }
        Ok(())
    }

    fn check_collocations(&self) -> Result<(), LoadError> {
        for entry in &self.entries {
            for colloc in &entry.collocations {
                let fail = |message: String| LoadError::InvalidCollocation {
                    headword: entry.headword.clone(),
                    pattern: colloc.pattern.clone(),
                    message,
                };
                if colloc.pattern.len() < 2 {
                    return Err(fail("pattern needs at least two elements".into()));
                }
                if colloc.gloss.trim().is_empty() {
                    return Err(fail("gloss is empty".into()));
                }
                for key in &colloc.pattern {
                    if self.parse_key(key).is_none() {
                        return Err(fail(format!("element {key:?} does not resolve")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn from_json_str(json: &str) -> Result<Self, LoadError> {
        Self::parse(json, Path::new("<memory>"))
    }

    fn parse(json: &str, path: &Path) -> Result<Self, LoadError> {
        let doc: LexiconDoc = serde_json::from_str(json).map_err(|e| LoadError::Schema {
            path: path.to_path_buf(),
            line: e.line(),
            message: e.to_string(),
        })?;
        Self::new(doc.entries, doc.suffixes)
    }

    pub fn entries(&self) -> &[LexicalEntry] {
        &self.entries
    }

    pub fn suffixes(&self) -> &[SuffixEntry] {
        &self.suffixes
    }

    pub fn entry(&self, headword: &str) -> Option<&LexicalEntry> {
        self.stem_index.get(headword).map(|&i| &self.entries[i])
    }

    pub fn is_stem(&self, s: &str) -> bool {
        self.stem_index.contains_key(s)
    }

    /// The suffix entry owning `surface` (canonical form or allomorph).
    pub fn suffix_by_surface(&self, surface: &str) -> Option<&SuffixEntry> {
        self.surface_index.get(surface).map(|&i| &self.suffixes[i])
    }

    /// All suffix surfaces with their entries, longest first.
    pub fn suffix_surfaces(&self) -> impl Iterator<Item = (&str, &SuffixEntry)> {
        self.surfaces_by_length
            .iter()
            .map(|(s, i)| (s.as_str(), &self.suffixes[*i]))
    }

    /// Every collocation, paired with the headword that lists it.
    pub fn collocations(&self) -> impl Iterator<Item = (&LexicalEntry, &Collocation)> {
        self.entries
            .iter()
            .flat_map(|e| e.collocations.iter().map(move |c| (e, c)))
    }

    /// Resolves a morpheme key such as `gvsa-i` or `erxe=`.
    pub fn parse_key(&self, key: &str) -> Option<MorphemeKey> {
        let key = key.trim_end_matches('=');
        let mut parts = key.split('-');
        let stem = parts.next().filter(|s| self.is_stem(s))?;
        let suffixes = parts
            .map(|p| self.suffix_by_surface(p).map(|s| s.form.clone()))
            .collect::<Option<Vec<_>>>()?;
        Some(MorphemeKey {
            stem: stem.to_string(),
            suffixes,
        })
    }

    /// The parent chain of `headword`, nearest first, capped at
    /// [`MAX_PARENT_DEPTH`].
    pub fn parent_chain(&self, headword: &str) -> Vec<&LexicalEntry> {
        let mut chain = Vec::new();
        let mut current = self.entry(headword);
        while let Some(parent) = current.and_then(|e| e.parent.as_deref()) {
            if chain.len() == MAX_PARENT_DEPTH {
                break;
            }
            let Some(next) = self.entry(parent) else { break };
            chain.push(next);
            current = Some(next);
        }
        chain
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("lexicon serializes")
    }
}

pub fn load_lexicon(path: impl AsRef<Path>) -> Result<Lexicon, LoadError> {
    let path = path.as_ref();
    let text = read(path)?;
    Lexicon::parse(&text, path)
}

// ---------------------------------------------------------------------------
// Parallel corpus and evaluation set

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParallelExample {
    pub id: String,
    pub source: String,
    pub target: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub anchor_lexemes: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParallelCorpus {
    examples: Vec<ParallelExample>,
}

impl ParallelCorpus {
    pub fn new(examples: Vec<ParallelExample>) -> Result<Self, LoadError> {
        let path = Path::new("<memory>");
        let mut ids = HashSet::new();
        for (i, ex) in examples.iter().enumerate() {
            validate_pair(path, i + 1, &ex.id, &ex.source, ("target", &ex.target), &mut ids)?;
        }
        Ok(ParallelCorpus { examples })
    }

    pub fn examples(&self) -> &[ParallelExample] {
        &self.examples
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&ParallelExample> {
        self.examples.iter().find(|e| e.id == id)
    }
}

fn validate_pair(
    path: &Path,
    line: usize,
    id: &str,
    source: &str,
    target: (&'static str, &str),
    ids: &mut HashSet<String>,
) -> Result<(), LoadError> {
    let empty = |field| LoadError::EmptyField {
        path: path.to_path_buf(),
        line,
        field,
    };
    if id.trim().is_empty() {
        return Err(empty("id"));
    }
    if source.trim().is_empty() {
        return Err(empty("source"));
    }
    if target.1.trim().is_empty() {
        return Err(empty(target.0));
    }
    if !ids.insert(id.to_string()) {
        return Err(LoadError::DuplicateId {
            path: path.to_path_buf(),
            line,
            id: id.to_string(),
        });
    }
    Ok(())
}

pub fn load_parallel_corpus(path: impl AsRef<Path>) -> Result<ParallelCorpus, LoadError> {
    let path = path.as_ref();
    let records: Vec<(usize, ParallelExample)> = read_jsonl(path)?;
    let mut ids = HashSet::new();
    for (line, ex) in &records {
        validate_pair(path, *line, &ex.id, &ex.source, ("target", &ex.target), &mut ids)?;
    }
    Ok(ParallelCorpus {
        examples: records.into_iter().map(|(_, ex)| ex).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalItem {
    pub id: String,
    pub source: String,
    pub reference: String,
}

pub fn load_eval_set(path: impl AsRef<Path>) -> Result<Vec<EvalItem>, LoadError> {
    let path = path.as_ref();
    let records: Vec<(usize, EvalItem)> = read_jsonl(path)?;
    let mut ids = HashSet::new();
    for (line, item) in &records {
        validate_pair(
            path,
            *line,
            &item.id,
            &item.source,
            ("reference", &item.reference),
            &mut ids,
        )?;
    }
    Ok(records.into_iter().map(|(_, item)| item).collect())
}

/// One sentence of a monolingual source corpus (plain text, one per line).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonoSentence {
    pub id: String,
    pub source: String,
}

pub fn load_monolingual(path: impl AsRef<Path>) -> Result<Vec<MonoSentence>, LoadError> {
    let path = path.as_ref();
    let text = read(path)?;
    Ok(text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| MonoSentence {
            id: format!("m{}", i + 1),
            source: l.trim().to_string(),
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Grammar table

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Illustration {
    pub src: String,
    pub gloss: String,
    pub tgt: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrammarRecord {
    pub feature_id: String,
    /// Canonical suffix forms whose presence in a sentence selects this feature.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub triggers: Vec<String>,
    pub short_excerpt: String,
    pub long_excerpt: String,
    #[serde(default)]
    pub illustrations: Vec<Illustration>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrammarTable {
    features: Vec<GrammarRecord>,
}

impl GrammarTable {
    pub fn new(features: Vec<GrammarRecord>) -> Result<Self, LoadError> {
        let mut ids = HashSet::new();
        for f in &features {
            let fail = |message: &str| LoadError::InvalidFeature {
                feature_id: f.feature_id.clone(),
                message: message.into(),
            };
            if f.feature_id.trim().is_empty() {
                return Err(fail("feature_id is empty"));
            }
            if f.short_excerpt.trim().is_empty() {
                return Err(fail("short_excerpt is empty"));
            }
            if f.long_excerpt.trim().is_empty() {
                return Err(fail("long_excerpt is empty"));
            }
            if !ids.insert(f.feature_id.as_str()) {
                return Err(fail("duplicate feature_id"));
            }
        }
        Ok(GrammarTable { features })
    }

    pub fn features(&self) -> &[GrammarRecord] {
        &self.features
    }

    pub fn feature(&self, id: &str) -> Option<&GrammarRecord> {
        self.features.iter().find(|f| f.feature_id == id)
    }

    /// Feature ids triggered by a canonical suffix form, in table order.
    pub fn triggered_by<'a>(&'a self, suffix_form: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.features
            .iter()
            .filter(move |f| f.triggers.iter().any(|t| t == suffix_form))
            .map(|f| f.feature_id.as_str())
    }
}

pub fn load_grammar_table(path: impl AsRef<Path>) -> Result<GrammarTable, LoadError> {
    let path = path.as_ref();
    let text = read(path)?;
    let table: GrammarTable = serde_json::from_str(&text).map_err(|e| LoadError::Schema {
        path: path.to_path_buf(),
        line: e.line(),
        message: e.to_string(),
    })?;
    GrammarTable::new(table.features)
}

// ---------------------------------------------------------------------------
// Overlap check

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlapMatch {
    pub eval_id: String,
    pub corpus_id: String,
    pub normalized: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlapReport {
    pub matches: Vec<OverlapMatch>,
}

impl OverlapReport {
    pub fn is_disjoint(&self) -> bool {
        self.matches.is_empty()
    }
}

/// Collapses whitespace runs to a single space and trims. Case is preserved.
pub fn normalize_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Lists every evaluation source that also occurs (after whitespace
/// normalization) as a corpus source.
pub fn check_disjoint(corpus: &ParallelCorpus, eval_set: &[EvalItem]) -> OverlapReport {
    let mut by_source: BTreeMap<String, Vec<&str>> = BTreeMap::new();
    for ex in corpus.examples() {
        by_source
            .entry(normalize_whitespace(&ex.source))
            .or_default()
            .push(&ex.id);
    }
    let mut matches = Vec::new();
    for item in eval_set {
        let normalized = normalize_whitespace(&item.source);
        if let Some(ids) = by_source.get(&normalized) {
            for id in ids {
                matches.push(OverlapMatch {
                    eval_id: item.id.clone(),
                    corpus_id: id.to_string(),
                    normalized: normalized.clone(),
                });
            }
        }
    }
    OverlapReport { matches }
}

// ---------------------------------------------------------------------------

fn read(path: &Path) -> Result<String, LoadError> {
    fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<(usize, T)>, LoadError> {
    let text = read(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(line).map_err(|e| LoadError::Schema {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push((i + 1, record));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture(name: &str) -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
    }

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        use std::io::Write;
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn fixture_lexicon_counts() {
        let lex = load_lexicon(fixture("lexicon.json")).unwrap();
        assert_eq!(lex.entries().len(), 12);
        assert_eq!(lex.suffixes().len(), 5);
    }

    #[test]
    fn empty_lexicon_rejected() {
        let err = Lexicon::from_json_str(r#"{"entries": [], "suffixes": []}"#).unwrap_err();
        assert_eq!(err.to_string(), "lexicon has no entries");
    }

    #[test]
    fn dangling_parent_named() {
        let json = r#"{"entries": [{"headword": "a", "senses": ["x"], "parent": "nofix"}]}"#;
        let err = Lexicon::from_json_str(json).unwrap_err();
        assert!(matches!(err, LoadError::DanglingParent { ref parent, .. } if parent == "nofix"));
        assert!(err.to_string().contains("nofix"));
    }

    #[test]
    fn parent_cycle_rejected() {
        let json = r#"{"entries": [
            {"headword": "a", "senses": ["x"], "parent": "b"},
            {"headword": "b", "senses": ["y"], "parent": "a"}]}"#;
        assert!(matches!(
            Lexicon::from_json_str(json),
            Err(LoadError::ParentCycle(_))
        ));
    }

    #[test]
    fn stem_suffix_collision_rejected() {
        let json = r#"{"entries": [{"headword": "se", "senses": ["year"]}],
            "suffixes": [{"form": "sa", "slot": "nominal", "explanation": "pl", "allomorphs": ["se"]}]}"#;
        assert!(matches!(
            Lexicon::from_json_str(json),
            Err(LoadError::StemSuffixCollision(ref s)) if s == "se"
        ));
    }

    #[test]
    fn schema_violation_reports_field() {
        let json = r#"{"entries": [{"headword": "a", "sense": ["x"]}]}"#;
        let err = Lexicon::from_json_str(json).unwrap_err();
        assert!(err.to_string().contains("sense"), "{err}");
    }

    #[test]
    fn unresolved_collocation_rejected() {
        let json = r#"{"entries": [{"headword": "a", "senses": ["x"],
            "collocations": [{"pattern": ["a", "zz"], "gloss": "g"}]}]}"#;
        assert!(matches!(
            Lexicon::from_json_str(json),
            Err(LoadError::InvalidCollocation { .. })
        ));
    }

    #[test]
    fn parse_key_resolves_suffix_allomorphs() {
        let lex = load_lexicon(fixture("lexicon.json")).unwrap();
        let key = lex.parse_key("sakda-so").unwrap();
        assert_eq!(key.stem, "sakda");
        assert_eq!(key.suffixes, vec!["sa".to_string()]);
        assert!(lex.parse_key("nope-i").is_none());
    }

    #[test]
    fn corpus_preserves_order() {
        let corpus = load_parallel_corpus(fixture("corpus.jsonl")).unwrap();
        assert_eq!(corpus.len(), 20);
        let ids: Vec<_> = corpus.examples().iter().map(|e| e.id.as_str()).collect();
        let expected: Vec<String> = (1..=20).map(|i| format!("p{i}")).collect();
        assert_eq!(ids, expected);
    }

    #[test]
    fn duplicate_corpus_id_named() {
        let f = write_tmp(
            "{\"id\": \"p7\", \"source\": \"a\", \"target\": \"b\"}\n{\"id\": \"p7\", \"source\": \"c\", \"target\": \"d\"}\n",
        );
        let err = load_parallel_corpus(f.path()).unwrap_err();
        assert!(matches!(err, LoadError::DuplicateId { ref id, line: 2, .. } if id == "p7"));
    }

    #[test]
    fn empty_target_reports_line() {
        let f = write_tmp(
            "{\"id\": \"p1\", \"source\": \"a\", \"target\": \"b\"}\n{\"id\": \"p2\", \"source\": \"c\", \"target\": \"\"}\n",
        );
        let err = load_parallel_corpus(f.path()).unwrap_err();
        assert!(matches!(err, LoadError::EmptyField { line: 2, field: "target", .. }));
    }

    #[test]
    fn fixture_sets_are_disjoint() {
        let corpus = load_parallel_corpus(fixture("corpus.jsonl")).unwrap();
        let eval = load_eval_set(fixture("eval.jsonl")).unwrap();
        assert!(check_disjoint(&corpus, &eval).is_disjoint());
    }

    #[test]
    fn copied_item_is_reported() {
        let corpus = load_parallel_corpus(fixture("corpus.jsonl")).unwrap();
        let eval = vec![EvalItem {
            id: "e9".into(),
            source: "gvsai ejen jihe".into(),
            reference: "x".into(),
        }];
        let report = check_disjoint(&corpus, &eval);
        assert_eq!(report.matches.len(), 1);
        assert_eq!(report.matches[0].eval_id, "e9");
        assert_eq!(report.matches[0].corpus_id, "p8");
    }

    #[test]
    fn double_spaces_still_match() {
        let corpus = load_parallel_corpus(fixture("corpus.jsonl")).unwrap();
        let eval = vec![EvalItem {
            id: "e9".into(),
            source: " gvsai  ejen   jihe ".into(),
            reference: "x".into(),
        }];
        assert_eq!(check_disjoint(&corpus, &eval).matches.len(), 1);
    }

    #[test]
    fn case_is_not_folded() {
        let corpus = load_parallel_corpus(fixture("corpus.jsonl")).unwrap();
        let eval = vec![EvalItem {
            id: "e9".into(),
            source: "Gvsai ejen jihe".into(),
            reference: "x".into(),
        }];
        assert!(check_disjoint(&corpus, &eval).is_disjoint());
    }

    #[test]
    fn grammar_fixture_loads() {
        let table = load_grammar_table(fixture("grammar.json")).unwrap();
        assert_eq!(table.features().len(), 6);
        assert_eq!(table.triggered_by("ha").collect::<Vec<_>>(), vec!["perfect_participle"]);
    }

    #[test]
    fn loading_is_deterministic() {
        let a = load_lexicon(fixture("lexicon.json")).unwrap().to_json();
        let b = load_lexicon(fixture("lexicon.json")).unwrap().to_json();
        assert_eq!(a, b);
        let c = serde_json::to_string(&load_parallel_corpus(fixture("corpus.jsonl")).unwrap()).unwrap();
        let d = serde_json::to_string(&load_parallel_corpus(fixture("corpus.jsonl")).unwrap()).unwrap();
        assert_eq!(c, d);
    }
}
