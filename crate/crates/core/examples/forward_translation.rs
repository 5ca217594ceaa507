// Synthetic parallel data: translate monolingual text, then mix it with the
// real corpus at a fixed ratio.

use std::error::Error;
use std::path::Path;

use icmt::augment::{forward_translate, mix};
use icmt::corpus_store::load_monolingual;
use icmt::llm::{GenParams, MockBackend};
use icmt::pipeline::{ResourcePaths, Resources};
use icmt::prompt::PromptSpec;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let res = Resources::load(&ResourcePaths::in_dir(&fixtures))?;
    let mono = load_monolingual(fixtures.join("mono.txt"))?;

    let out = forward_translate(
        &mono,
        &PromptSpec::best(),
        &res,
        &MockBackend::glossing(),
        &GenParams::default(),
        4,
        None,
    )?;
    for p in out.pairs.iter().take(3) {
        println!("{} => {}", p.source, p.target);
    }

    let dir = tempfile::tempdir()?;
    let manifest = mix(&res.corpus, &out.pairs, 0.25, 7, dir.path())?;
    println!(
        "{} real + {} synthetic (ratio {:.2})",
        manifest.real_count,
        manifest.synthetic_count,
        manifest.ratio()
    );
    assert_eq!(manifest.synthetic_count, 5);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
