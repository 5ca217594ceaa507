//! Prompt templates and their assembly from retrieved components.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cipher::{encipher_bundle, encipher_token, CipherError};
use crate::morphology::{render, AnalyzedSentence};
use crate::retrieval::{
    DictVariant, DictionaryBundle, ExampleSet, ExampleVariant, GrammarBundle, GrammarVariant, DEFAULT_EXAMPLE_COUNT,
};

const S: &str = "{source language}";
const T: &str = "{target language}";

const HEADER: &str = "Please help me translate the following sentence from {source language} to {target language}:";

const TRY_YOUR_BEST: &str =
    "Please try your best to translate, it's okay if your translation is bad. Do not refuse to try it. I won't blame you.";

/// The delimiter instruction; appears exactly once in every prompt.
pub const ENCLOSE_INSTRUCTION: &str = "Please enclose your translation in ###. For example, if your translation is \"Hello world\", the last part of your output should be ### Hello world ###";

const MORPH_NOTE: &str = "The morphemes in this sentence have been segmented: the verb stem and verbal suffixes are separated by '=', the noun stem and nominal suffixes are separated by '~'. \
Note that some words can be either analyzed as a whole or as a word stem plus a suffix; the different analyses are separated by '/'. \
In such a case, explanations for both analyses are given below, and you need to choose which one is the most appropriate in the given context.";

const FINAL_INSTRUCTION: &str =
    "Using all the information provided above, now please translate the sentence into {target language}. Remember your source sentence is: ";

const DICTIONARY_INTRO: &str = "For the translation task, you are given the word by word mapping from the {source language} words to the {target language} words. \
Some words can be polysemous and there might be multiple possible English translations. In such a case, please choose the most appropriate one. \
Note that for some words, they might be derived from a more basic form, we call this the parent word. The parents are also given in the word-by-word translation. \
Here are the dictionary entries for each individual word in the source sentence:";

const COLLOCATION_CAVEAT: &str = "Note that sometimes two or more words can form a collocation and express a specific meaning. You should refer to the collocations listed under the dictionary entries. \
For example, 'mama' means 'grandmother', 'erxe=' means 'to attend', but 'mama erxe=' as a collocation means 'to get smallpox'. \
In such a case, explain which collocation meaning you think is most appropriate in the context.";

const PARALLEL_INTRO: &str = "To help with the translation, here are some {source language}-{target language} parallel sentences that may be helpful for your translation:";

const GRAMMAR_INTRO: &str =
    "You are also given this grammar book below. Feel free to rely on this grammar book in your translation task:";

const COT_ANNOTATE: &str = "Given the previous information, please first annotate the meaning and grammatical features of each word in the sentence.\n\
For each word, based on their English translation and whether it ends with '='(marker of verb stems), first decide whether the word is nominal (noun/adjective), or a verbal(verb, converb) or else (other part of speech such as adverb, postposition ect.).\n\
Then for each noun, please annotate its number (singular/plural) and case (Nominative/Genitive/Dative-Locative/Accusative/Ablative), based on the particles/suffixes that follow the noun.\n\
And for each verb, please annotate its tense (perfect/imperfect) and form (Affirmative/Negative/Interrogative/Imperative/Optative/Desiderative), based on the suffixes attached to the verb.\n\
\n\
Then based on the annotations, translate the sentence from {source language} into {target language} based on the annotations and the analyzed sentence structure.";

const COT_ANNOTATE_SYNTAX: &str = "Given the previous information, please proceed with the following steps:\n\
Step 1:\n\
Please first annotate the meaning and grammatical features of each word in the sentence.\n\
For each word, based on their English translation and whether it ends with '='(marker of verb stems), first decide whether the word is nominal (noun/adjective), or a verbal (verb, converb) or else (other part of speech such as adverb, postposition etc.).\n\
Then for each noun, please annotate its number (singular/plural) and case (Nominative/Genitive/Dative-Locative/Accusative/Ablative), based on the particles/suffixes that follow the noun.\n\
And for each verb, please annotate its tense (perfect/imperfect) and form (Affirmative/Negative/Interrogative/Imperative/Optative/Desiderative), based on the suffixes attached to the verb.\n\
Step 2:\n\
Then based on the annotations, please analyze the sentence structure by figuring out what the subject and object of each verb is. Keep in mind that {source language}'s basic word order is subject\u{2013}object\u{2013}verb (SOV) and it is a head-final language, so that the adjectives and participles always precede the noun they modifies, and the arguments to the verb always precede the verb.\n\
Note that clauses can be combined into a single sentence by using converbs, which relate the first action to the second.\n\
The final step:\n\
Translate the sentence into {target language} based on the annotations and the analyzed sentence structure.";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CotVariant {
    Annotate,
    AnnotateSyntax,
}

impl CotVariant {
    pub const ALL: [CotVariant; 2] = [CotVariant::Annotate, CotVariant::AnnotateSyntax];

    pub fn tag(self) -> &'static str {
        match self {
            CotVariant::Annotate => "annotate",
            CotVariant::AnnotateSyntax => "annotate_syntax",
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PromptError {
    #[error("invalid prompt spec: {0}")]
    InvalidSpec(&'static str),
    #[error("spec enables the {0} component but no bundle was supplied")]
    MissingComponent(&'static str),
    #[error("a {0} bundle was supplied but the spec does not enable it")]
    UnexpectedComponent(&'static str),
    #[error("{component} bundle has variant {found}, spec asks for {expected}")]
    VariantMismatch {
        component: &'static str,
        expected: &'static str,
        found: &'static str,
    },
    #[error("spec expects {0} input")]
    InputKind(&'static str),
    #[error(transparent)]
    Cipher(#[from] CipherError),
}

fn default_count() -> usize {
    DEFAULT_EXAMPLE_COUNT
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptSpec {
    pub source_language: String,
    pub target_language: String,
    #[serde(default)]
    pub use_morph: bool,
    #[serde(default)]
    pub dict_variant: Option<DictVariant>,
    #[serde(default)]
    pub parallel_variant: Option<ExampleVariant>,
    #[serde(default = "default_count")]
    pub parallel_count: usize,
    #[serde(default)]
    pub grammar_variant: Option<GrammarVariant>,
    #[serde(default)]
    pub cot_variant: Option<CotVariant>,
    #[serde(default)]
    pub cipher: bool,
    #[serde(default)]
    pub seed: u64,
}

impl Default for PromptSpec {
    fn default() -> Self {
        PromptSpec {
            source_language: "Manchu".into(),
            target_language: "English".into(),
            use_morph: false,
            dict_variant: None,
            parallel_variant: None,
            parallel_count: DEFAULT_EXAMPLE_COUNT,
            grammar_variant: None,
            cot_variant: None,
            cipher: false,
            seed: 0,
        }
    }
}

impl PromptSpec {
    /// Raw sentence, no components.
    pub fn direct() -> Self {
        PromptSpec::default()
    }

    /// Analyzed sentence, no components.
    pub fn morph() -> Self {
        PromptSpec {
            use_morph: true,
            ..PromptSpec::default()
        }
    }

    /// Analyzed sentence with the full dictionary and BM25 examples.
    pub fn best() -> Self {
        PromptSpec {
            dict_variant: Some(DictVariant::LexicalSuffixCollocation),
            parallel_variant: Some(ExampleVariant::Bm25),
            ..PromptSpec::morph()
        }
    }

    pub fn has_components(&self) -> bool {
        self.dict_variant.is_some()
            || self.parallel_variant.is_some()
            || self.grammar_variant.is_some()
            || self.cot_variant.is_some()
    }

    pub fn validate(&self) -> Result<(), PromptError> {
        if self.source_language.trim().is_empty() || self.target_language.trim().is_empty() {
            return Err(PromptError::InvalidSpec("language names must be non-empty"));
        }
        if self.has_components() && !self.use_morph {
            return Err(PromptError::InvalidSpec("components require the analyzed sentence"));
        }
        if self.cipher && self.grammar_variant.is_some() {
            return Err(PromptError::InvalidSpec("the cipher cannot be combined with grammar excerpts"));
        }
        Ok(())
    }

    /// Component labels in prompt order.
    pub fn provenance(&self) -> Vec<String> {
        let mut out = vec![if self.use_morph { "mu" } else { "x" }.to_string()];
        if let Some(d) = self.dict_variant {
            out.push(format!("D:{}", d.tag()));
        }
        if let Some(p) = self.parallel_variant {
            out.push(format!("P:{}", p.tag()));
        }
        if let Some(g) = self.grammar_variant {
            out.push(format!("G:{}", g.tag()));
        }
        if let Some(c) = self.cot_variant {
            out.push(format!("C:{}", c.tag()));
        }
        if self.cipher {
            out.push("cipher".into());
        }
        out
    }

    /// Short label such as `mu+D:l_s_c+P:bm25`.
    pub fn tag(&self) -> String {
        self.provenance().join("+")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptText {
    pub text: String,
    pub provenance: Vec<String>,
    pub estimated_tokens: usize,
}

impl PromptText {
    fn new(text: String, provenance: Vec<String>) -> Self {
        let estimated_tokens = (text.split_whitespace().count() as f64 * 1.3).round() as usize;
        PromptText {
            text,
            provenance,
            estimated_tokens,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub enum PromptInput<'a> {
    Raw(&'a str),
    Analyzed(&'a AnalyzedSentence),
}

/// The chain-of-thought block with language placeholders still in place.
pub fn cot_instruction(variant: CotVariant) -> &'static str {
    match variant {
        CotVariant::Annotate => COT_ANNOTATE,
        CotVariant::AnnotateSyntax => COT_ANNOTATE_SYNTAX,
    }
}

fn check<B>(
    name: &'static str,
    wanted: Option<&'static str>,
    bundle: Option<&B>,
    found: impl Fn(&B) -> &'static str,
) -> Result<(), PromptError> {
    match (wanted, bundle) {
        (None, None) => Ok(()),
        (Some(_), None) => Err(PromptError::MissingComponent(name)),
        (None, Some(_)) => Err(PromptError::UnexpectedComponent(name)),
        (Some(expected), Some(b)) if found(b) != expected => Err(PromptError::VariantMismatch {
            component: name,
            expected,
            found: found(b),
        }),
        _ => Ok(()),
    }
}

/// Builds the prompt for `spec`. Bundles are passed in plain form; when the
/// spec enables the cipher they are enciphered here.
pub fn build_prompt(
    spec: &PromptSpec,
    input: PromptInput<'_>,
    dictionary: Option<&DictionaryBundle>,
    examples: Option<&ExampleSet>,
    grammar: Option<&GrammarBundle>,
) -> Result<PromptText, PromptError> {
    spec.validate()?;
    check("dictionary", spec.dict_variant.map(DictVariant::tag), dictionary, |d| d.variant.tag())?;
    check("parallel", spec.parallel_variant.map(ExampleVariant::tag), examples, |p| p.variant.tag())?;
    check("grammar", spec.grammar_variant.map(GrammarVariant::tag), grammar, |g| g.variant.tag())?;

    let fill = |s: &str| {
        s.replace(S, &spec.source_language)
            .replace(T, &spec.target_language)
    };
    let header = fill(HEADER);
    let enclose = ENCLOSE_INSTRUCTION;

    let analyzed = match (input, spec.use_morph) {
        (PromptInput::Raw(x), false) => {
            let x = if spec.cipher { encipher_token(x) } else { x.to_string() };
            let text = format!("{header}\n{x}\n{TRY_YOUR_BEST}\n{enclose}");
            return Ok(PromptText::new(text, spec.provenance()));
        }
        (PromptInput::Analyzed(a), true) => a,
        (_, true) => return Err(PromptError::InputKind("an analyzed")),
        (_, false) => return Err(PromptError::InputKind("a raw")),
    };

    let (sentence, dictionary, examples) = if spec.cipher {
        let enc = encipher_bundle(analyzed, dictionary, examples, grammar)?;
        (enc.sentence, enc.dictionary, enc.examples)
    } else {
        (analyzed.clone(), dictionary.cloned(), examples.cloned())
    };
    let rendered = render(&sentence);

    if !spec.has_components() {
        let text = format!("{header}\n{rendered}\n{MORPH_NOTE}\n{TRY_YOUR_BEST}\n{enclose}");
        return Ok(PromptText::new(text, spec.provenance()));
    }

    let mut components = Vec::new();
    if let Some(d) = &dictionary {
        components.push(format!(
            "{}\n{}\n\n{COLLOCATION_CAVEAT}",
            fill(DICTIONARY_INTRO),
            d.render()
        ));
    }
    if let Some(p) = &examples {
        components.push(format!(
            "{}\n{}",
            fill(PARALLEL_INTRO),
            p.render(&spec.source_language, &spec.target_language)
        ));
    }
    if let Some(g) = grammar {
        components.push(format!("{GRAMMAR_INTRO}\n{}", g.render(&spec.source_language)));
    }
    if let Some(c) = spec.cot_variant {
        components.push(fill(cot_instruction(c)));
    }

    let text = format!(
        "{header}\n{rendered}\n{MORPH_NOTE}\n{}\n\n{}{rendered}\n{enclose}",
        components.join("\n\n"),
        fill(FINAL_INSTRUCTION),
    );
    Ok(PromptText::new(text, spec.provenance()))
}
