// How much of the test vocabulary the in-context examples already cover.

use std::error::Error;
use std::path::Path;

use icmt::corpus_store::{load_eval_set, load_parallel_corpus};
use icmt::eval::{subword_overlap, WordSegmenter};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let corpus = load_parallel_corpus(dir.join("corpus.jsonl"))?;
    let eval = load_eval_set(dir.join("eval.jsonl"))?;

    let icl: Vec<String> = corpus.examples().iter().map(|e| e.target.clone()).collect();
    let test: Vec<String> = eval.iter().map(|e| e.reference.clone()).collect();
    let words = subword_overlap(&icl, &test, &WordSegmenter);

    // any closure from text to units works as a segmenter
    let trigrams = |t: &str| {
        let c: Vec<char> = t.to_lowercase().chars().filter(|c| c.is_alphabetic()).collect();
        c.windows(3).map(|w| w.iter().collect()).collect::<Vec<String>>()
    };
    let chars = subword_overlap(&icl, &test, &trigrams);

    println!("{:<24} {:>8} {:>8} {:>8} {:>8}", "", "icl", "test", "overlap", "unseen");
    println!("{}", words.render_row("words"));
    println!("{}", chars.render_row("char trigrams"));
    assert!(words.overlap <= words.test_types && chars.overlap <= chars.test_types);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
