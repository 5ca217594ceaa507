// BLEU, chrF and embedding similarity, per sentence and pooled.

use std::error::Error;

use icmt::eval::{corpus_bleu, score_hypotheses, sentence_bleu, sentence_chrf, MetricConfig, MockEmbedding};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let cfg = MetricConfig::default();
    let hyp = "This immediately is that friend too";
    let reference = "This is that very friend.";
    println!("BLEU {:.2}", sentence_bleu(hyp, reference, &cfg.bleu));
    println!("chrF {:.2}", sentence_chrf(hyp, reference, &cfg.chrf));

    let ids: Vec<String> = ["e1", "e2", "e3"].map(String::from).to_vec();
    let refs: Vec<String> = ["The horse is black.", "The old men ride horses.", "The minister is sitting."]
        .map(String::from)
        .to_vec();
    let hyps: Vec<String> = ["The horse is black.", "Old men are riding horses.", "A minister sits."]
        .map(String::from)
        .to_vec();
    let report = score_hypotheses(&ids, &hyps, &refs, &cfg, Some(&MockEmbedding::default()))?;
    print!("{}", report.render_table());

    // corpus BLEU pools n-gram counts; it is not the mean of sentence scores
    let pooled = corpus_bleu(&hyps, &refs, &cfg.bleu)?;
    assert!((pooled - report.corpus.bleu).abs() < 1e-12);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
