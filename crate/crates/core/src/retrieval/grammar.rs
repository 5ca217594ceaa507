use serde::{Deserialize, Serialize};

use super::{GrammarVariant, RetrievalError};
use crate::corpus_store::{GrammarTable, Illustration};

/// Typology paragraph heading every grammar bundle. `{source language}` is
/// filled in when the prompt is built.
pub const GRAMMAR_PREAMBLE: &str = "- {source language} Grammar Book\n\
The {source language} language is typologically similar to the Mongolic and Turkic languages. \
All {source language} phrases are head-final; the head-word of a phrase (e.g., the noun of a noun phrase, or the verb of a verb phrase) always falls at the end of the phrase. \
Thus, adjectives and adjectival phrases always precede the noun they modify, and the arguments to the verb always precede the verb. \
As a result, {source language} sentence structure is subject\u{2013}object\u{2013}verb (SOV).\n\
{source language} also makes extensive use of converb structures and has an inventory of converbial suffixes to indicate the relationship between the subordinate verb and the finite verb that follows it.\n\
Unlike English, which uses prepositions, {source language} exclusively uses postpositions.\n\
The {source language} language is agglutinative in word structure, meaning that words are formed by adding suffixes to the root, and each morpheme in a word has one distinct meaning or grammatical function.";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrammarExcerpt {
    pub feature_id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub illustrations: Option<Vec<Illustration>>,
}

impl GrammarExcerpt {
    pub fn render(&self) -> String {
        let mut out = self.text.clone();
        for ill in self.illustrations.iter().flatten() {
            out.push_str(&format!("\n{}\n{}\n{}", ill.src, ill.gloss, ill.tgt));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrammarBundle {
    pub variant: GrammarVariant,
    pub preamble: String,
    pub excerpts: Vec<GrammarExcerpt>,
}

impl GrammarBundle {
    pub fn render(&self, source_language: &str) -> String {
        let mut parts = vec![self.preamble.replace("{source language}", source_language)];
        parts.extend(self.excerpts.iter().map(GrammarExcerpt::render));
        parts.join("\n")
    }
}

pub fn build_grammar_bundle(
    features: &[String],
    table: &GrammarTable,
    variant: GrammarVariant,
) -> Result<GrammarBundle, RetrievalError> {
    let excerpts = features
        .iter()
        .map(|id| {
            let record = table
                .feature(id)
                .ok_or_else(|| RetrievalError::UnknownFeature(id.clone()))?;
            Ok(GrammarExcerpt {
                feature_id: id.clone(),
                text: match variant {
                    GrammarVariant::Short => record.short_excerpt.clone(),
                    GrammarVariant::Long | GrammarVariant::LongP => record.long_excerpt.clone(),
                },
                illustrations: (variant == GrammarVariant::LongP).then(|| record.illustrations.clone()),
            })
        })
        .collect::<Result<_, RetrievalError>>()?;
    Ok(GrammarBundle {
        variant,
        preamble: GRAMMAR_PREAMBLE.to_string(),
        excerpts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus_store::load_grammar_table;
    use std::path::Path;

    fn table() -> GrammarTable {
        load_grammar_table(Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/grammar.json")).unwrap()
    }

    fn ids(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn accusative_long_p_has_illustration() {
        let b = build_grammar_bundle(&ids(&["accusative"]), &table(), GrammarVariant::LongP).unwrap();
        let text = b.render("Manchu");
        assert!(text.contains("jugvn be yabu-me\nroad ACC go-CONV\nto go along the road;"));
        assert_eq!(text.matches("subject\u{2013}object\u{2013}verb (SOV)").count(), 1);
    }

    #[test]
    fn empty_features_preamble_only() {
        let b = build_grammar_bundle(&[], &table(), GrammarVariant::Short).unwrap();
        assert!(b.excerpts.is_empty());
        assert_eq!(b.render("Manchu"), GRAMMAR_PREAMBLE.replace("{source language}", "Manchu"));
    }

    #[test]
    fn short_excerpts_in_order() {
        let t = table();
        let b = build_grammar_bundle(&ids(&["plural", "genitive"]), &t, GrammarVariant::Short).unwrap();
        let texts: Vec<_> = b.excerpts.iter().map(|e| e.text.as_str()).collect();
        assert_eq!(
            texts,
            vec![
                t.feature("plural").unwrap().short_excerpt.as_str(),
                t.feature("genitive").unwrap().short_excerpt.as_str()
            ]
        );
        assert!(b.excerpts.iter().all(|e| e.illustrations.is_none()));
        let long = build_grammar_bundle(&ids(&["plural"]), &t, GrammarVariant::Long).unwrap();
        assert!(long.excerpts[0].illustrations.is_none());
    }

    #[test]
    fn unknown_feature_rejected() {
        let err = build_grammar_bundle(&ids(&["ergative"]), &table(), GrammarVariant::Short).unwrap_err();
        assert!(matches!(err, RetrievalError::UnknownFeature(f) if f == "ergative"));
    }
}
