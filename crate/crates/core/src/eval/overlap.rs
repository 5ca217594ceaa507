use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::tokenizer::tokenize_13a;

/// Splits text into the units whose types are compared.
pub trait Segmenter {
    fn segment(&self, text: &str) -> Vec<String>;
}

/// Lowercased `13a` word tokens.
#[derive(Clone, Copy, Debug, Default)]
pub struct WordSegmenter;

impl Segmenter for WordSegmenter {
    fn segment(&self, text: &str) -> Vec<String> {
        tokenize_13a(text)
    }
}

impl<F: Fn(&str) -> Vec<String>> Segmenter for F {
    fn segment(&self, text: &str) -> Vec<String> {
        self(text)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapStats {
    pub icl_types: usize,
    pub test_types: usize,
    pub overlap: usize,
    /// Share of test types never seen in the in-context texts, in percent.
    pub non_overlap_pct: f64,
}

impl OverlapStats {
    pub fn render_row(&self, label: &str) -> String {
        format!(
            "{label:<24} {:>8} {:>8} {:>8} {:>7.2}%",
            self.icl_types, self.test_types, self.overlap, self.non_overlap_pct
        )
    }
}

pub fn subword_overlap(icl_texts: &[String], test_texts: &[String], segmenter: &dyn Segmenter) -> OverlapStats {
    let icl: BTreeSet<String> = icl_texts.iter().flat_map(|t| segmenter.segment(t)).collect();
    let test: BTreeSet<String> = test_texts.iter().flat_map(|t| segmenter.segment(t)).collect();
    let overlap = test.intersection(&icl).count();
    let non_overlap_pct = if test.is_empty() {
        0.0
    } else {
        100.0 * (test.len() - overlap) as f64 / test.len() as f64
    };
    OverlapStats {
        icl_types: icl.len(),
        test_types: test.len(),
        overlap,
        non_overlap_pct,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn subset_and_disjoint() {
        let icl = s(&["the horse is black", "a minister"]);
        let r = subword_overlap(&icl, &s(&["the horse"]), &WordSegmenter);
        assert_eq!(r.non_overlap_pct, 0.0);
        let r = subword_overlap(&icl, &s(&["banner troops"]), &WordSegmenter);
        assert_eq!(r.non_overlap_pct, 100.0);
    }

    #[test]
    fn four_of_five() {
        let icl = s(&["a b c d x y"]);
        let r = subword_overlap(&icl, &s(&["a b c d e"]), &WordSegmenter);
        assert_eq!((r.icl_types, r.test_types, r.overlap), (6, 5, 4));
        assert!((r.non_overlap_pct - 20.0).abs() < 1e-12);
    }

    #[test]
    fn pluggable_segmenter() {
        let chars = |t: &str| t.chars().filter(|c| !c.is_whitespace()).map(String::from).collect::<Vec<_>>();
        let r = subword_overlap(&s(&["ab"]), &s(&["bc"]), &chars);
        assert_eq!(r.overlap, 1);
        assert_eq!(r.non_overlap_pct, 50.0);
    }
}
