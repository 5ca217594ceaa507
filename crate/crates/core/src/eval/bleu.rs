use std::collections::HashMap;
use std::ops::AddAssign;

use serde::{Deserialize, Serialize};

use super::tokenizer::{tokenize_13a, tokenize_13a_cased};
use super::{check_lengths, EvalError};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BleuConfig {
    pub lowercase: bool,
    pub max_ngram: usize,
    /// Divide by the highest order with any n-grams instead of `max_ngram`.
    pub effective_order: bool,
}

impl Default for BleuConfig {
    fn default() -> Self {
        BleuConfig {
            lowercase: true,
            max_ngram: 4,
            effective_order: false,
        }
    }
}

/// Sufficient statistics; corpus BLEU sums these before scoring.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BleuStats {
    pub correct: Vec<u64>,
    pub total: Vec<u64>,
    pub sys_len: u64,
    pub ref_len: u64,
}

impl AddAssign<&BleuStats> for BleuStats {
    fn add_assign(&mut self, o: &BleuStats) {
        if self.correct.len() < o.correct.len() {
            self.correct.resize(o.correct.len(), 0);
            self.total.resize(o.total.len(), 0);
        }
        for (i, (c, t)) in o.correct.iter().zip(&o.total).enumerate() {
            self.correct[i] += c;
            self.total[i] += t;
        }
        self.sys_len += o.sys_len;
        self.ref_len += o.ref_len;
    }
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], u64> {
    let mut m = HashMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            *m.entry(w).or_default() += 1;
        }
    }
    m
}

pub fn bleu_stats(hyp: &str, reference: &str, cfg: &BleuConfig) -> BleuStats {
    let tok = if cfg.lowercase { tokenize_13a } else { tokenize_13a_cased };
    let h = tok(hyp);
    let r = tok(reference);
    let mut stats = BleuStats {
        correct: vec![0; cfg.max_ngram],
        total: vec![0; cfg.max_ngram],
        sys_len: h.len() as u64,
        ref_len: r.len() as u64,
    };
    for n in 1..=cfg.max_ngram {
        let hc = ngram_counts(&h, n);
        let rc = ngram_counts(&r, n);
        stats.total[n - 1] = h.len().saturating_sub(n - 1) as u64;
        stats.correct[n - 1] = hc.iter().map(|(g, c)| (*c).min(rc.get(g).copied().unwrap_or(0))).sum();
    }
    stats
}

fn my_log(x: f64) -> f64 {
    if x == 0.0 {
        -9_999_999_999.0
    } else {
        x.ln()
    }
}

/// BLEU with exponential smoothing of zero-match orders.
pub fn bleu_from_stats(s: &BleuStats, cfg: &BleuConfig) -> f64 {
    let max = cfg.max_ngram;
    if s.correct.iter().all(|&c| c == 0) {
        return 0.0;
    }
    let mut precisions = vec![0.0; max];
    let mut smooth = 1.0;
    let mut eff = max;
    for n in 1..=max {
        let (correct, total) = (s.correct[n - 1], s.total[n - 1]);
        if total == 0 {
            break;
        }
        if cfg.effective_order {
            eff = n;
        }
        precisions[n - 1] = if correct == 0 {
            smooth *= 2.0;
            100.0 / (smooth * total as f64)
        } else {
            100.0 * correct as f64 / total as f64
        };
    }
    let bp = if s.sys_len < s.ref_len {
        if s.sys_len > 0 {
            (1.0 - s.ref_len as f64 / s.sys_len as f64).exp()
        } else {
            0.0
        }
    } else {
        1.0
    };
    let log_sum: f64 = precisions[..eff].iter().map(|&p| my_log(p)).sum();
    bp * (log_sum / eff as f64).exp()
}

pub fn sentence_bleu(hyp: &str, reference: &str, cfg: &BleuConfig) -> f64 {
    bleu_from_stats(&bleu_stats(hyp, reference, cfg), cfg)
}

pub fn corpus_bleu(hyps: &[String], refs: &[String], cfg: &BleuConfig) -> Result<f64, EvalError> {
    check_lengths(hyps.len(), refs.len())?;
    let mut total = BleuStats::default();
    for (h, r) in hyps.iter().zip(refs) {
        total += &bleu_stats(h, r, cfg);
    }
    Ok(bleu_from_stats(&total, cfg))
}
