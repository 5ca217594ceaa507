use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use statrs::statistics::Statistics;

use super::bleu::{bleu_from_stats, bleu_stats, BleuConfig, BleuStats};
use super::chrf::{chrf_from_stats, chrf_stats, ChrfConfig, ChrfStats};
use super::{check_lengths, EvalError};

/// Pooled sample sizes up to this bound use the exact rank-sum distribution.
pub const EXACT_RANK_SUM_MAX: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Bleu,
    Chrf,
    /// Mean of per-sentence embedding similarities.
    Embed,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Bleu => "BLEU",
            Metric::Chrf => "chrF",
            Metric::Embed => "SBERT",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignificanceResult {
    pub metric: Metric,
    pub baseline: f64,
    pub variant: f64,
    pub p_value: f64,
    pub n_samples: usize,
    pub seed: u64,
}

fn resample(n: usize, n_samples: usize, seed: u64) -> impl Iterator<Item = Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_samples).map(move |_| (0..n).map(|_| rng.random_range(0..n)).collect())
}

/// Paired bootstrap: p is the fraction of resamples in which the variant does
/// not beat the baseline. Ties count against the variant.
pub fn bootstrap_compare(
    baseline: &[String],
    variant: &[String],
    refs: &[String],
    metric: Metric,
    n_samples: usize,
    seed: u64,
) -> Result<SignificanceResult, EvalError> {
    check_lengths(baseline.len(), refs.len())?;
    check_lengths(variant.len(), refs.len())?;
    if refs.is_empty() {
        return Err(EvalError::Empty);
    }
    if n_samples == 0 {
        return Err(EvalError::Empty);
    }
    match metric {
        Metric::Bleu => {
            let cfg = BleuConfig::default();
            let a: Vec<BleuStats> = baseline.iter().zip(refs).map(|(h, r)| bleu_stats(h, r, &cfg)).collect();
            let b: Vec<BleuStats> = variant.iter().zip(refs).map(|(h, r)| bleu_stats(h, r, &cfg)).collect();
            let score = |stats: &[BleuStats], idx: &[usize]| {
                let mut t = BleuStats::default();
                for &i in idx {
                    t += &stats[i];
                }
                bleu_from_stats(&t, &cfg)
            };
            Ok(run_bootstrap(metric, &a, &b, score, n_samples, seed))
        }
        Metric::Chrf => {
            let cfg = ChrfConfig::default();
            let a: Vec<ChrfStats> = baseline.iter().zip(refs).map(|(h, r)| chrf_stats(h, r, &cfg)).collect();
            let b: Vec<ChrfStats> = variant.iter().zip(refs).map(|(h, r)| chrf_stats(h, r, &cfg)).collect();
            let score = |stats: &[ChrfStats], idx: &[usize]| {
                let mut t = ChrfStats::default();
                for &i in idx {
                    t.add(&stats[i]);
                }
                chrf_from_stats(&t, &cfg)
            };
            Ok(run_bootstrap(metric, &a, &b, score, n_samples, seed))
        }
        Metric::Embed => Err(EvalError::Unsupported(
            "embedding significance needs per-sentence scores; use bootstrap_compare_scores",
        )),
    }
}

fn run_bootstrap<S>(
    metric: Metric,
    a: &[S],
    b: &[S],
    score: impl Fn(&[S], &[usize]) -> f64,
    n_samples: usize,
    seed: u64,
) -> SignificanceResult {
    let all: Vec<usize> = (0..a.len()).collect();
    let not_better = resample(a.len(), n_samples, seed)
        .filter(|idx| score(b, idx) <= score(a, idx))
        .count();
    SignificanceResult {
        metric,
        baseline: score(a, &all),
        variant: score(b, &all),
        p_value: not_better as f64 / n_samples as f64,
        n_samples,
        seed,
    }
}

/// Paired bootstrap over per-sentence scores whose corpus score is their mean.
pub fn bootstrap_compare_scores(
    metric: Metric,
    baseline: &[f64],
    variant: &[f64],
    n_samples: usize,
    seed: u64,
) -> Result<SignificanceResult, EvalError> {
    check_lengths(variant.len(), baseline.len())?;
    if baseline.is_empty() || n_samples == 0 {
        return Err(EvalError::Empty);
    }
    let mean = |xs: &[f64], idx: &[usize]| idx.iter().map(|&i| xs[i]).sum::<f64>() / idx.len() as f64;
    Ok(run_bootstrap(metric, baseline, variant, mean, n_samples, seed))
}

/// Average ranks with ties sharing the mean of their positions (1-based).
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Two-sided Wilcoxon rank-sum test. Small samples use the exact permutation
/// distribution of the rank sum (midranks under ties); larger ones use the
/// tie-corrected normal approximation.
pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64]) -> Result<f64, EvalError> {
    if a.is_empty() || b.is_empty() {
        return Err(EvalError::Empty);
    }
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    if pooled.iter().all(|&x| x == pooled[0]) {
        return Err(EvalError::AllTied);
    }
    let ranks = midranks(&pooled);
    let (n1, n) = (a.len(), pooled.len());
    let w: f64 = ranks[..n1].iter().sum();
    let mean = n1 as f64 * (n as f64 + 1.0) / 2.0;

    if n <= EXACT_RANK_SUM_MAX {
        // midranks are multiples of 1/2, so doubled ranks are integers
        let doubled: Vec<usize> = ranks.iter().map(|r| (r * 2.0).round() as usize).collect();
        let max_sum: usize = doubled.iter().sum();
        // ways[k][s]: subsets of size k with doubled rank sum s
        let mut ways = vec![vec![0f64; max_sum + 1]; n1 + 1];
        ways[0][0] = 1.0;
        for &r in &doubled {
            for k in (1..=n1).rev() {
                for s in (r..=max_sum).rev() {
                    ways[k][s] += ways[k - 1][s - r];
                }
            }
        }
        let total: f64 = ways[n1].iter().sum();
        let observed = (w - mean).abs();
        let extreme: f64 = ways[n1]
            .iter()
            .enumerate()
            .filter(|(s, _)| (*s as f64 / 2.0 - mean).abs() >= observed - 1e-9)
            .map(|(_, c)| c)
            .sum();
        return Ok((extreme / total).min(1.0));
    }

    let mut ties: HashMap<u64, usize> = HashMap::new();
    for x in &pooled {
        *ties.entry(x.to_bits()).or_default() += 1;
    }
    let tie_term: f64 = ties.values().map(|&t| (t * t * t - t) as f64).sum::<f64>() / (n as f64 * (n as f64 - 1.0));
    let n2 = (n - n1) as f64;
    let var = n1 as f64 * n2 / 12.0 * ((n as f64 + 1.0) - tie_term);
    let z = (w - mean) / var.sqrt();
    Ok(erfc(z.abs() / std::f64::consts::SQRT_2).min(1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DaRating {
    pub rater_id: String,
    pub item_id: String,
    pub raw: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RaterStats {
    pub rater_id: String,
    pub n: usize,
    pub mean: f64,
    pub std_dev: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DaItemScore {
    pub item_id: String,
    pub n_ratings: usize,
    pub raw_mean: f64,
    pub z_mean: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DaNormalized {
    pub raters: Vec<RaterStats>,
    pub items: Vec<DaItemScore>,
    /// One z-score per input rating, in input order.
    pub z: Vec<f64>,
}

/// Per-rater z-normalization with the sample standard deviation, then the
/// mean z per item. Raters and items keep first-appearance order.
pub fn normalize_da(ratings: &[DaRating]) -> Result<DaNormalized, EvalError> {
    if ratings.is_empty() {
        return Err(EvalError::Empty);
    }
    let mut rater_order: Vec<&str> = Vec::new();
    let mut by_rater: HashMap<&str, Vec<f64>> = HashMap::new();
    for r in ratings {
        if !(0.0..=100.0).contains(&r.raw) {
            return Err(EvalError::RatingOutOfRange {
                rater: r.rater_id.clone(),
                item: r.item_id.clone(),
                raw: r.raw,
            });
        }
        by_rater
            .entry(&r.rater_id)
            .or_insert_with(|| {
                rater_order.push(&r.rater_id);
                Vec::new()
            })
            .push(r.raw);
    }
    let mut raters = Vec::new();
    let mut params: HashMap<&str, (f64, f64)> = HashMap::new();
    for id in rater_order {
        let xs = &by_rater[id];
        if xs.len() < 2 {
            return Err(EvalError::RaterTooFew(id.to_string()));
        }
        let mean = xs.iter().mean();
        let sd = xs.iter().std_dev();
        if sd.is_nan() || sd <= 0.0 {
            return Err(EvalError::ConstantRater(id.to_string()));
        }
        params.insert(id, (mean, sd));
        raters.push(RaterStats {
            rater_id: id.to_string(),
            n: xs.len(),
            mean,
            std_dev: sd,
        });
    }
    let z: Vec<f64> = ratings
        .iter()
        .map(|r| {
            let (m, s) = params[r.rater_id.as_str()];
            (r.raw - m) / s
        })
        .collect();

    let mut item_order: Vec<&str> = Vec::new();
    let mut by_item: HashMap<&str, (Vec<f64>, Vec<f64>)> = HashMap::new();
    for (r, zi) in ratings.iter().zip(&z) {
        let e = by_item.entry(&r.item_id).or_insert_with(|| {
            item_order.push(&r.item_id);
            (Vec::new(), Vec::new())
        });
        e.0.push(r.raw);
        e.1.push(*zi);
    }
    let items = item_order
        .into_iter()
        .map(|id| {
            let (raw, zs) = &by_item[id];
            DaItemScore {
                item_id: id.to_string(),
                n_ratings: raw.len(),
                raw_mean: raw.iter().mean(),
                z_mean: zs.iter().mean(),
            }
        })
        .collect();
    Ok(DaNormalized { raters, items, z })
}

/// Pearson product-moment correlation.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64, EvalError> {
    check_lengths(xs.len(), ys.len())?;
    if xs.len() < 2 {
        return Err(EvalError::Empty);
    }
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(EvalError::ConstantInput);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}
