use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use super::{check_lengths, EvalError};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChrfConfig {
    pub char_order: usize,
    pub word_order: usize,
    pub beta: f64,
}

impl Default for ChrfConfig {
    fn default() -> Self {
        ChrfConfig {
            char_order: 6,
            word_order: 0,
            beta: 2.0,
        }
    }
}

/// Per order (character orders first, then word orders): hypothesis count,
/// reference count, matches.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChrfStats(pub Vec<[u64; 3]>);

impl ChrfStats {
    pub fn add(&mut self, o: &ChrfStats) {
        if self.0.len() < o.0.len() {
            self.0.resize(o.0.len(), [0; 3]);
        }
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            for k in 0..3 {
                a[k] += b[k];
            }
        }
    }
}

fn counts<T: Hash + Eq>(items: impl Iterator<Item = T>) -> HashMap<T, u64> {
    let mut m = HashMap::new();
    for it in items {
        *m.entry(it).or_default() += 1;
    }
    m
}

fn order_stats<T: Hash + Eq>(h: HashMap<T, u64>, r: HashMap<T, u64>) -> [u64; 3] {
    let matches = h.iter().map(|(g, c)| (*c).min(r.get(g).copied().unwrap_or(0))).sum();
    [h.values().sum(), r.values().sum(), matches]
}

fn char_ngrams(chars: &[char], n: usize) -> HashMap<&[char], u64> {
    if chars.len() < n {
        return HashMap::new();
    }
    counts(chars.windows(n))
}

// Splits one leading or trailing punctuation mark off each word.
fn words(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    for tok in s.split_whitespace() {
        let chars: Vec<char> = tok.chars().collect();
        if chars.len() > 1 && chars[chars.len() - 1].is_ascii_punctuation() {
            out.push(chars[..chars.len() - 1].iter().collect());
            out.push(chars[chars.len() - 1].to_string());
        } else if chars.len() > 1 && chars[0].is_ascii_punctuation() {
            out.push(chars[0].to_string());
            out.push(chars[1..].iter().collect());
        } else {
            out.push(tok.to_string());
        }
    }
    out
}

pub fn chrf_stats(hyp: &str, reference: &str, cfg: &ChrfConfig) -> ChrfStats {
    let hc: Vec<char> = hyp.chars().filter(|c| !c.is_whitespace()).collect();
    let rc: Vec<char> = reference.chars().filter(|c| !c.is_whitespace()).collect();
    let mut stats: Vec<[u64; 3]> = (1..=cfg.char_order)
        .map(|n| order_stats(char_ngrams(&hc, n), char_ngrams(&rc, n)))
        .collect();
    if cfg.word_order > 0 {
        let hw = words(hyp);
        let rw = words(reference);
        for n in 1..=cfg.word_order {
            let h = if hw.len() >= n { counts(hw.windows(n)) } else { HashMap::new() };
            let r = if rw.len() >= n { counts(rw.windows(n)) } else { HashMap::new() };
            stats.push(order_stats(h, r));
        }
    }
    ChrfStats(stats)
}

/// F-beta over macro-averaged precision and recall. Orders where either side
/// has no n-grams are left out of the average.
pub fn chrf_from_stats(s: &ChrfStats, cfg: &ChrfConfig) -> f64 {
    let factor = cfg.beta * cfg.beta;
    let (mut p, mut r, mut eff) = (0.0, 0.0, 0usize);
    for &[hyp, reference, matches] in &s.0 {
        if hyp > 0 && reference > 0 {
            p += matches as f64 / hyp as f64;
            r += matches as f64 / reference as f64;
            eff += 1;
        }
    }
    if eff == 0 {
        return 0.0;
    }
    p /= eff as f64;
    r /= eff as f64;
    if p + r == 0.0 {
        return 0.0;
    }
    100.0 * (1.0 + factor) * p * r / (factor * p + r)
}

pub fn sentence_chrf(hyp: &str, reference: &str, cfg: &ChrfConfig) -> f64 {
    chrf_from_stats(&chrf_stats(hyp, reference, cfg), cfg)
}

pub fn corpus_chrf(hyps: &[String], refs: &[String], cfg: &ChrfConfig) -> Result<f64, EvalError> {
    check_lengths(hyps.len(), refs.len())?;
    let mut total = ChrfStats::default();
    for (h, r) in hyps.iter().zip(refs) {
        total.add(&chrf_stats(h, r, cfg));
    }
    Ok(chrf_from_stats(&total, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ChrfConfig {
        ChrfConfig::default()
    }

    // Counts n-grams by scanning every offset pair instead of hashing.
    fn brute_chrf(h: &str, r: &str, order: usize, beta: f64) -> f64 {
        let h: Vec<char> = h.chars().filter(|c| !c.is_whitespace()).collect();
        let r: Vec<char> = r.chars().filter(|c| !c.is_whitespace()).collect();
        let (mut p, mut rc, mut eff) = (0.0, 0.0, 0);
        for n in 1..=order {
            let hg: Vec<&[char]> = if h.len() >= n { h.windows(n).collect() } else { vec![] };
            let rg: Vec<&[char]> = if r.len() >= n { r.windows(n).collect() } else { vec![] };
            if hg.is_empty() || rg.is_empty() {
                continue;
            }
            let mut used = vec![false; rg.len()];
            let mut m = 0;
            for g in &hg {
                if let Some(j) = (0..rg.len()).find(|&j| !used[j] && rg[j] == *g) {
                    used[j] = true;
                    m += 1;
                }
            }
            p += m as f64 / hg.len() as f64;
            rc += m as f64 / rg.len() as f64;
            eff += 1;
        }
        if eff == 0 {
            return 0.0;
        }
        let (p, rc) = (p / eff as f64, rc / eff as f64);
        if p + rc == 0.0 {
            return 0.0;
        }
        let b2 = beta * beta;
        100.0 * (1.0 + b2) * p * rc / (b2 * p + rc)
    }

    #[test]
    fn paper_pairs() {
        // frozen from the reference implementation
        let t14 = sentence_chrf("This immediately is that friend too", "This is that very friend.", &cfg());
        assert!((t14 - 45.72042029749801).abs() < 1e-9);
        let t8 = sentence_chrf(
            "From this point forward, wild animals are abundant.",
            "From there onwards beasts were plentiful.",
            &cfg(),
        );
        assert!((t8 - 24.54628951436226).abs() < 1e-9);
    }

    #[test]
    fn identity_and_empty() {
        assert!((sentence_chrf("The horse.", "The horse.", &cfg()) - 100.0).abs() < 1e-9);
        assert_eq!(sentence_chrf("", "The horse.", &cfg()), 0.0);
    }

    #[test]
    fn matches_brute_force() {
        let pairs = [
            ("the old men are sitting", "The old men sit."),
            ("aaaa", "aa"),
            ("abc", "xyz"),
            ("banner master came", "The Lieutenant-General came."),
        ];
        for (h, r) in pairs {
            assert!((sentence_chrf(h, r, &cfg()) - brute_chrf(h, r, 6, 2.0)).abs() < 1e-9, "{h}");
        }
    }

    #[test]
    fn word_order_adds_orders() {
        let c = ChrfConfig {
            word_order: 2,
            ..cfg()
        };
        let s = chrf_stats("the horse.", "the horse.", &c);
        assert_eq!(s.0.len(), 8);
        assert_eq!(s.0[6], [3, 3, 3]);
        assert_eq!(s.0[7], [2, 2, 2]);
        assert!((sentence_chrf("the horse.", "the horse.", &c) - 100.0).abs() < 1e-9);
    }
}
