#[allow(dead_code)]
mod analyze_sentence {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/analyze_sentence.rs"));
}

#[allow(dead_code)]
mod dictionary_bundle {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/dictionary_bundle.rs"));
}

#[allow(dead_code)]
mod example_selection {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/example_selection.rs"));
}

#[allow(dead_code)]
mod build_prompt {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/build_prompt.rs"));
}

#[allow(dead_code)]
mod encipher {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/encipher.rs"));
}

#[allow(dead_code)]
mod score_translations {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/score_translations.rs"));
}

#[allow(dead_code)]
mod significance {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/significance.rs"));
}

#[allow(dead_code)]
mod cached_backend {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/cached_backend.rs"));
}

#[allow(dead_code)]
mod forward_translation {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/forward_translation.rs"));
}

#[allow(dead_code)]
mod ablation {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/ablation.rs"));
}

#[allow(dead_code)]
mod subword_overlap {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/subword_overlap.rs"));
}

#[test]
fn analyze_sentence_runs() {
    analyze_sentence::run_example().unwrap();
}

#[test]
fn dictionary_bundle_runs() {
    dictionary_bundle::run_example().unwrap();
}

#[test]
fn example_selection_runs() {
    example_selection::run_example().unwrap();
}

#[test]
fn build_prompt_runs() {
    build_prompt::run_example().unwrap();
}

#[test]
fn encipher_runs() {
    encipher::run_example().unwrap();
}

#[test]
fn score_translations_runs() {
    score_translations::run_example().unwrap();
}

#[test]
fn significance_runs() {
    significance::run_example().unwrap();
}

#[test]
fn cached_backend_runs() {
    cached_backend::run_example().unwrap();
}

#[test]
fn forward_translation_runs() {
    forward_translation::run_example().unwrap();
}

#[test]
fn ablation_runs() {
    ablation::run_example().unwrap();
}

#[test]
fn subword_overlap_runs() {
    subword_overlap::run_example().unwrap();
}
