// Prompt composition. Every component is optional; the analyzed sentence
// is required once any component is on.

use std::error::Error;
use std::path::Path;

use icmt::pipeline::{prepare_prompt, ResourcePaths, Resources};
use icmt::prompt::{CotVariant, PromptSpec};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let res = Resources::load(&ResourcePaths::in_dir(Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")))?;
    let sentence = "gvsai ejen genehe";

    let best = prepare_prompt(&PromptSpec::best(), sentence, &res)?;
    println!("{}\n", best.text);
    println!("components {:?}, ~{} tokens", best.provenance, best.estimated_tokens);

    let cot = PromptSpec {
        cot_variant: Some(CotVariant::AnnotateSyntax),
        ..PromptSpec::best()
    };
    let p = prepare_prompt(&cot, sentence, &res)?;
    assert!(p.text.len() > best.text.len());

    let bad = PromptSpec {
        use_morph: false,
        ..PromptSpec::best()
    };
    assert!(prepare_prompt(&bad, sentence, &res).is_err());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
