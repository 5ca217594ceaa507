// Encipherment: rotate vowels and consonants so the source language looks
// unfamiliar while its structure stays intact.

use std::error::Error;
use std::path::Path;

use icmt::cipher::{decipher_token, encipher_lexicon, encipher_sentence, encipher_token};
use icmt::corpus_store::load_lexicon;
use icmt::morphology::{analyze_sentence, render};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    for w in ["amban", "sakdasa", "Ejen"] {
        let e = encipher_token(w);
        println!("{w:8} -> {e:8} -> {}", decipher_token(&e));
    }

    let lexicon = load_lexicon(Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/lexicon.json"))?;
    let a = analyze_sentence("sakdasa morin", &lexicon)?;
    let enc = render(&encipher_sentence(&a));
    println!("{} -> {enc}", render(&a));

    // the enciphered lexicon analyzes enciphered text the same way
    let enc_lexicon = encipher_lexicon(&lexicon);
    let again = analyze_sentence(&encipher_token("sakdasa morin"), &enc_lexicon)?;
    assert_eq!(render(&again), enc);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
