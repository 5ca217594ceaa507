// Dictionary retrieval at the three levels of detail.

use std::error::Error;
use std::path::Path;

use icmt::corpus_store::load_lexicon;
use icmt::morphology::analyze_sentence;
use icmt::retrieval::{build_dictionary_bundle, DictVariant};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let lexicon = load_lexicon(Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/lexicon.json"))?;
    let a = analyze_sentence("gvsai ejen sakdasa oho", &lexicon)?;

    for v in DictVariant::ALL {
        let bundle = build_dictionary_bundle(&a, &lexicon, v);
        println!("== {} ==\n{}\n", v.tag(), bundle.render());
    }
    // parents come along with their children
    let full = build_dictionary_bundle(&a, &lexicon, DictVariant::LexicalSuffixCollocation);
    let heads: Vec<&str> = full.entries.iter().map(|e| e.headword.as_str()).collect();
    assert_eq!(heads, ["gvsa", "ejen", "sakda", "se", "oho", "o"]);
    assert!(full.render().contains("gvsa-i ejen: Lieutenant-General"));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
