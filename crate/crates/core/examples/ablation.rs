// Stage-by-stage component ablation against the glossing mock backend.

use std::error::Error;
use std::path::Path;

use icmt::ablate::{run_ablation, RunConfig};
use icmt::eval::Metric;
use icmt::llm::MockBackend;
use icmt::pipeline::Resources;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let dir = tempfile::tempdir()?;
    let mut cfg = RunConfig::for_dir(Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures"));
    cfg.output_dir = dir.path().to_path_buf();
    cfg.selection = Metric::Chrf;

    let res = Resources::load(&cfg.resources)?;
    let eval = cfg.load_eval_set()?;
    let report = run_ablation(&cfg, &res, &eval, &MockBackend::glossing(), None)?;
    print!("{}", report.render());

    assert!(dir.path().join("report.json").exists());
    assert!(report.best.use_morph);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
