use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::bleu::{bleu_from_stats, bleu_stats, BleuStats};
use super::chrf::{chrf_from_stats, chrf_stats, ChrfStats};
use super::embed::{embed_similarity, EmbeddingBackend};
use super::stats::{Metric, SignificanceResult};
use super::{check_lengths, EvalError, MetricConfig};
use crate::corpus_store::EvalItem;
use crate::llm::TranslationRecord;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SentenceScore {
    pub item_id: String,
    pub bleu: f64,
    pub chrf: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embed_sim: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusScore {
    pub bleu: f64,
    pub chrf: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embed_sim: Option<f64>,
}

impl CorpusScore {
    pub fn get(&self, metric: Metric) -> Option<f64> {
        match metric {
            Metric::Bleu => Some(self.bleu),
            Metric::Chrf => Some(self.chrf),
            Metric::Embed => self.embed_sim,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub per_sentence: Vec<SentenceScore>,
    pub corpus: CorpusScore,
    pub config: MetricConfig,
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".into(), |v| format!("{v:.2}"))
}

impl MetricReport {
    /// Aligned plain-text table, one row per sentence plus a corpus row.
    pub fn render_table(&self) -> String {
        let width = self
            .per_sentence
            .iter()
            .map(|s| s.item_id.len())
            .chain(["corpus".len()])
            .max()
            .unwrap_or(6);
        let mut out = format!("{:<width$} {:>8} {:>8} {:>8}\n", "item", "BLEU", "chrF", "SBERT");
        for s in &self.per_sentence {
            out.push_str(&format!(
                "{:<width$} {:>8.2} {:>8.2} {:>8}\n",
                s.item_id,
                s.bleu,
                s.chrf,
                fmt_opt(s.embed_sim)
            ));
        }
        out.push_str(&format!(
            "{:<width$} {:>8.2} {:>8.2} {:>8}\n",
            "corpus",
            self.corpus.bleu,
            self.corpus.chrf,
            fmt_opt(self.corpus.embed_sim)
        ));
        out
    }
}

/// Scores aligned hypotheses against references. Corpus BLEU and chrF pool
/// sufficient statistics; the corpus embedding score is the sentence mean.
pub fn score_hypotheses(
    ids: &[String],
    hyps: &[String],
    refs: &[String],
    cfg: &MetricConfig,
    embed: Option<&dyn EmbeddingBackend>,
) -> Result<MetricReport, EvalError> {
    check_lengths(hyps.len(), refs.len())?;
    check_lengths(ids.len(), refs.len())?;
    if refs.is_empty() {
        return Err(EvalError::Empty);
    }
    let mut bleu_total = BleuStats::default();
    let mut chrf_total = ChrfStats::default();
    let mut per_sentence = Vec::with_capacity(hyps.len());
    for ((id, h), r) in ids.iter().zip(hyps).zip(refs) {
        let b = bleu_stats(h, r, &cfg.bleu);
        let c = chrf_stats(h, r, &cfg.chrf);
        let embed_sim = match embed {
            // an empty hypothesis has no direction; score it as unrelated
            Some(backend) => match embed_similarity(h, r, backend) {
                Err(EvalError::ZeroVector) => Some(0.0),
                other => Some(other?),
            },
            None => None,
        };
        per_sentence.push(SentenceScore {
            item_id: id.clone(),
            bleu: bleu_from_stats(&b, &cfg.bleu),
            chrf: chrf_from_stats(&c, &cfg.chrf),
            embed_sim,
        });
        bleu_total += &b;
        chrf_total.add(&c);
    }
    let embed_sim = embed.map(|_| {
        per_sentence.iter().filter_map(|s| s.embed_sim).sum::<f64>() / per_sentence.len() as f64
    });
    Ok(MetricReport {
        corpus: CorpusScore {
            bleu: bleu_from_stats(&bleu_total, &cfg.bleu),
            chrf: chrf_from_stats(&chrf_total, &cfg.chrf),
            embed_sim,
        },
        per_sentence,
        config: cfg.clone(),
    })
}

/// Item ids, hypotheses and references in record order.
pub type Aligned = (Vec<String>, Vec<String>, Vec<String>);

/// Aligns records with the evaluation set by item id. Failed records score
/// as empty hypotheses.
pub fn align_records(records: &[TranslationRecord], eval_set: &[EvalItem]) -> Result<Aligned, EvalError> {
    let refs: HashMap<&str, &str> = eval_set.iter().map(|e| (e.id.as_str(), e.reference.as_str())).collect();
    let mut ids = Vec::new();
    let mut hyps = Vec::new();
    let mut out_refs = Vec::new();
    for r in records {
        let reference = refs
            .get(r.item_id.as_str())
            .ok_or_else(|| EvalError::MissingReference(r.item_id.clone()))?;
        ids.push(r.item_id.clone());
        hyps.push(r.scored_hypothesis().to_string());
        out_refs.push(reference.to_string());
    }
    Ok((ids, hyps, out_refs))
}

pub fn score_records(
    records: &[TranslationRecord],
    eval_set: &[EvalItem],
    cfg: &MetricConfig,
    embed: Option<&dyn EmbeddingBackend>,
) -> Result<MetricReport, EvalError> {
    let (ids, hyps, refs) = align_records(records, eval_set)?;
    score_hypotheses(&ids, &hyps, &refs, cfg, embed)
}

/// One row per comparison, one p-value column per metric; `*` marks p < 0.05.
pub fn render_significance_table(rows: &[(String, Vec<SignificanceResult>)]) -> String {
    let width = rows.iter().map(|(l, _)| l.len()).max().unwrap_or(0).max("comparison".len());
    let mut metrics: Vec<Metric> = Vec::new();
    for (_, results) in rows {
        for r in results {
            if !metrics.contains(&r.metric) {
                metrics.push(r.metric);
            }
        }
    }
    let mut out = format!("{:<width$}", "comparison");
    for m in &metrics {
        out.push_str(&format!(" {:>10}", m.name()));
    }
    out.push('\n');
    for (label, results) in rows {
        out.push_str(&format!("{label:<width$}"));
        for m in &metrics {
            let cell = results.iter().find(|r| r.metric == *m).map_or_else(
                || "-".to_string(),
                |r| format!("{:.3}{}", r.p_value, if r.p_value < 0.05 { "*" } else { "" }),
            );
            out.push_str(&format!(" {cell:>10}"));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::embed::MockEmbedding;
    use crate::llm::RecordStatus;

    fn v(x: &[&str]) -> Vec<String> {
        x.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn report_shape() {
        let ids = v(&["e1", "e2"]);
        let refs = v(&["The horse is black.", "That person."]);
        let hyps = v(&["The horse is black.", "This man."]);
        let r = score_hypotheses(&ids, &hyps, &refs, &MetricConfig::default(), Some(&MockEmbedding::default())).unwrap();
        assert_eq!(r.per_sentence.len(), 2);
        assert!((r.per_sentence[0].bleu - 100.0).abs() < 1e-9);
        assert_eq!(r.per_sentence[0].embed_sim, Some(100.0));
        let table = r.render_table();
        assert_eq!(table.lines().count(), 4);
        assert!(table.lines().last().unwrap().starts_with("corpus"));
    }

    #[test]
    fn failed_records_score_empty() {
        let eval = vec![EvalItem {
            id: "e1".into(),
            source: "morin".into(),
            reference: "horse".into(),
        }];
        let rec = TranslationRecord {
            item_id: "e1".into(),
            prompt_hash: "h".into(),
            spec_tag: "x".into(),
            raw_response: "no".into(),
            hypothesis: None,
            status: RecordStatus::ExtractionFailed,
            attempts: 1,
        };
        let r = score_records(std::slice::from_ref(&rec), &eval, &MetricConfig::default(), Some(&MockEmbedding::default())).unwrap();
        assert_eq!(r.corpus.bleu, 0.0);
        assert_eq!(r.corpus.chrf, 0.0);
        assert_eq!(r.corpus.embed_sim, Some(0.0));
        let orphan = TranslationRecord {
            item_id: "e9".into(),
            ..rec
        };
        assert!(matches!(
            score_records(&[orphan], &eval, &MetricConfig::default(), None),
            Err(EvalError::MissingReference(_))
        ));
    }

    #[test]
    fn significance_table() {
        let res = |metric, p| SignificanceResult {
            metric,
            baseline: 1.0,
            variant: 2.0,
            p_value: p,
            n_samples: 1000,
            seed: 0,
        };
        let t = render_significance_table(&[
            ("D > mu".into(), vec![res(Metric::Bleu, 0.01), res(Metric::Chrf, 0.2)]),
            ("P > D".into(), vec![res(Metric::Bleu, 0.5)]),
        ]);
        let lines: Vec<&str> = t.lines().collect();
        assert!(lines[0].contains("BLEU") && lines[0].contains("chrF"));
        assert!(lines[1].contains("0.010*"));
        assert!(lines[2].trim_end().ends_with('-'));
    }
}
