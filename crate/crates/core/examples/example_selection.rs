// Few-shot example selection: random, dictionary-anchored and BM25.

use std::error::Error;
use std::path::Path;

use icmt::corpus_store::{load_lexicon, load_parallel_corpus};
use icmt::morphology::analyze_sentence;
use icmt::retrieval::{bm25_query, build_bm25_index, select_by_dictionary, select_random};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let lexicon = load_lexicon(dir.join("lexicon.json"))?;
    let corpus = load_parallel_corpus(dir.join("corpus.jsonl"))?;
    let a = analyze_sentence("sakdasa morin yalumbi", &lexicon)?;

    let random = select_random(&corpus, 3, 42);
    let anchored = select_by_dictionary(&a, &corpus, 3);
    let index = build_bm25_index(&corpus, &lexicon)?;
    let bm25 = bm25_query(&index, &corpus, &a, 3)?;

    println!("random      {:?}", random.ids());
    println!("dictionary  {:?}", anchored.ids());
    println!("bm25        {:?} {:?}", bm25.ids(), bm25.scores.as_deref().unwrap_or_default());
    println!("\n{}", bm25.render("Manchu", "English"));

    assert_eq!(random.ids(), select_random(&corpus, 3, 42).ids());
    let s = bm25.scores.unwrap();
    assert!(s.windows(2).all(|w| w[0] >= w[1]));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
