// Batch translation through a read-through response cache. A second run
// with the same prompts and parameters makes no backend calls.

use std::error::Error;

use icmt::llm::{extract_translation, run_batch, BatchItem, CachedBackend, GenParams, MockBackend, RecordStatus};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let dir = tempfile::tempdir()?;
    let cache = dir.path().join("responses.jsonl");
    let params = GenParams::local("mock-7b");
    let items: Vec<BatchItem> = ["morin", "amban", "ejen"]
        .iter()
        .enumerate()
        .map(|(i, w)| BatchItem {
            item_id: format!("e{i}"),
            spec_tag: "x".into(),
            prompt: format!("translate {w}"),
        })
        .collect();
    let answer = |p: &str| match p {
        "translate amban" => "I am not sure.".to_string(),
        _ => format!("Sure.\n### {} ###", p.trim_start_matches("translate ")),
    };

    let first = CachedBackend::open(MockBackend::responder(answer), &cache)?;
    let records = run_batch(&items, &first, &params, 2, None)?;
    for r in &records {
        println!("{} {:?} {:?}", r.item_id, r.status, r.hypothesis);
    }
    assert_eq!(records[1].status, RecordStatus::ExtractionFailed);
    assert_eq!(first.live_calls(), 3);

    let second = CachedBackend::open(MockBackend::responder(answer), &cache)?;
    run_batch(&items, &second, &params, 2, None)?;
    assert_eq!(second.live_calls(), 0);

    assert_eq!(extract_translation("a ### b ### c ### d ###").as_deref(), Some("d"));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
