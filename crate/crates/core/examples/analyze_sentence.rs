// Morphological analysis: every valid stem + suffix segmentation is kept.

use std::error::Error;
use std::path::Path;

use icmt::corpus_store::load_lexicon;
use icmt::morphology::{analyze_sentence, render};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let lexicon = load_lexicon(Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/lexicon.json"))?;
    let a = analyze_sentence("gvsai ejen sakdasa oho.", &lexicon)?;

    for w in &a.words {
        let alts: Vec<String> = w.analyses.iter().map(|x| x.render()).collect();
        println!("{:10} {}", w.word, if w.unanalyzed { "(unanalyzed)".into() } else { alts.join(" | ") });
    }
    let rendered = render(&a);
    println!("{rendered}");
    assert_eq!(rendered, "gvsa~i ejen sakda~sa oho/o=ho.");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
