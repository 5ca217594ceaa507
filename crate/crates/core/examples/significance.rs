// Paired bootstrap between two systems, a rank-sum test on human scores,
// and per-rater z-normalization of direct assessments.

use std::error::Error;

use icmt::eval::{bootstrap_compare, normalize_da, pearson, wilcoxon_rank_sum, DaRating, Metric};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let refs: Vec<String> = (0..12).map(|i| format!("the old man rode horse number {i} home")).collect();
    let base: Vec<String> = (0..12).map(|i| format!("old man horse {i}")).collect();
    let variant: Vec<String> = (0..12).map(|i| format!("the old man rode horse {i} home")).collect();

    for metric in [Metric::Bleu, Metric::Chrf] {
        let r = bootstrap_compare(&base, &variant, &refs, metric, 1000, 1)?;
        println!("{:5} {:6.2} -> {:6.2}  p = {:.3}", metric.name(), r.baseline, r.variant, r.p_value);
        assert!(r.p_value < 0.05);
    }

    let ratings: Vec<DaRating> = [("ann", 70.0, 40.0), ("bo", 90.0, 85.0), ("cy", 55.0, 20.0)]
        .iter()
        .flat_map(|&(rater, a, b)| {
            [("s1", a), ("s2", b), ("s3", (a + b) / 2.0)].map(|(item, raw)| DaRating {
                rater_id: rater.into(),
                item_id: item.into(),
                raw,
            })
        })
        .collect();
    let da = normalize_da(&ratings)?;
    for item in &da.items {
        println!("{} mean z {:+.3}", item.item_id, item.z_mean);
    }

    let a = [0.9, 1.1, 0.4, 1.3, 0.8];
    let b = [-0.2, 0.1, -0.9, 0.3, -0.5];
    println!("rank-sum p = {:.4}", wilcoxon_rank_sum(&a, &b)?);
    println!("pearson = {:.3}", pearson(&a, &b)?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
