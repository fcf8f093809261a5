use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl ConfusionCounts {
    /// Tally predictions against truth.
    pub fn from_predictions(pairs: impl IntoIterator<Item = (bool, bool)>) -> Self {
        let mut c = ConfusionCounts::default();
        for (predicted, actual) in pairs {
            match (predicted, actual) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, false) => c.tn += 1,
                (false, true) => c.fn_ += 1,
            }
        }
        c
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

/// A ratio that is 0.0 and flagged when its denominator is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ratio {
    pub value: f64,
    pub degenerate: bool,
}

impl Ratio {
    fn of(num: f64, den: f64) -> Self {
        if den == 0.0 {
            Ratio {
                value: 0.0,
                degenerate: true,
            }
        } else {
            Ratio {
                value: num / den,
                degenerate: false,
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConfusionMetrics {
    pub accuracy: Ratio,
    pub precision: Ratio,
    pub recall: Ratio,
    pub f1: Ratio,
}

pub fn confusion_metrics(c: &ConfusionCounts) -> ConfusionMetrics {
    let (tp, fp, tn, fn_) = (c.tp as f64, c.fp as f64, c.tn as f64, c.fn_ as f64);
    let precision = Ratio::of(tp, tp + fp);
    let recall = Ratio::of(tp, tp + fn_);
    let f1 = Ratio::of(2.0 * precision.value * recall.value, precision.value + recall.value);
    ConfusionMetrics {
        accuracy: Ratio::of(tp + tn, tp + fp + tn + fn_),
        precision,
        recall,
        f1,
    }
}

/// Probability that a random positive outscores a random negative, ties
/// counting one half. Computed from average ranks.
pub fn roc_auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::Precondition(format!(
            "{} scores but {} labels",
            scores.len(),
            labels.len()
        )));
    }
    if let Some(s) = scores.iter().find(|s| s.is_nan()) {
        return Err(Error::Validation(format!("score {s} is not a number")));
    }
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::UndefinedMetric(format!(
            "AUC needs both classes, got {n_pos} positive and {n_neg} negative"
        )));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // Sum of positive ranks, doubled so tied average ranks stay integral.
    let mut twice_rank_sum: u128 = 0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // Ranks i+1..=j+1 share the average (i + j + 2) / 2.
        let twice_avg = (i + j + 2) as u128;
        let pos_in_group = order[i..=j].iter().filter(|&&k| labels[k]).count() as u128;
        twice_rank_sum += twice_avg * pos_in_group;
        i = j + 1;
    }
    let (p, n) = (n_pos as u128, n_neg as u128);
    // U = R - P(P+1)/2, counting half-credit ties; AUC = U / (P N).
    let twice_u = twice_rank_sum - p * (p + 1);
    Ok(twice_u as f64 / (2 * p * n) as f64)
}

/// `sum_{i=1..k} (2^rel_i - 1) / log2(i + 1)`.
pub fn dcg_at_k(rels: &[u8], k: usize) -> f64 {
    rels.iter()
        .take(k)
        .enumerate()
        .map(|(i, &r)| (2f64.powi(r as i32) - 1.0) / ((i + 2) as f64).log2())
        .sum()
}

/// DCG over the DCG of the same grades sorted descending; 0 when all grades are 0.
pub fn ndcg_at_k(rels: &[u8], k: usize) -> f64 {
    let mut ideal = rels.to_vec();
    ideal.sort_unstable_by(|a, b| b.cmp(a));
    let best = dcg_at_k(&ideal, k);
    if best == 0.0 {
        return 0.0;
    }
    (dcg_at_k(rels, k) / best).clamp(0.0, 1.0)
}

pub const MAX_GRADE: u8 = 2;

/// The system ranking of one article's hashtags with their grades.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedJudgedList {
    pub article_id: String,
    pub entries: Vec<(String, u8)>,
}

impl RankedJudgedList {
    pub fn grades(&self) -> Vec<u8> {
        self.entries.iter().map(|(_, g)| *g).collect()
    }
}

/// Per-article credit `rel_1 / 2`.
pub fn precision_at_1_values(lists: &[RankedJudgedList]) -> Result<Vec<f64>> {
    lists
        .iter()
        .map(|l| {
            l.entries
                .first()
                .map(|(_, g)| *g as f64 / MAX_GRADE as f64)
                .ok_or_else(|| Error::Precondition(format!("empty ranking for {}", l.article_id)))
        })
        .collect()
}

/// Mean of [`precision_at_1_values`].
pub fn precision_at_1(lists: &[RankedJudgedList]) -> Result<f64> {
    if lists.is_empty() {
        return Err(Error::UndefinedMetric("precision@1 over no articles".into()));
    }
    let v = precision_at_1_values(lists)?;
    Ok(v.iter().sum::<f64>() / v.len() as f64)
}

/// A mean with its two-sided Student-t confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanCi {
    pub mean: f64,
    /// Half-width of the interval; `None` with fewer than two values.
    pub half_width: Option<f64>,
    /// Two-sided one-sample t-test p-value against a zero mean.
    pub p_value: Option<f64>,
    pub n: usize,
}

impl MeanCi {
    pub fn interval(&self) -> Option<(f64, f64)> {
        self.half_width.map(|h| (self.mean - h, self.mean + h))
    }
}

impl std::fmt::Display for MeanCi {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:.3}", self.mean)?;
        if let Some((lo, hi)) = self.interval() {
            write!(f, " ([{lo:.3}, {hi:.3}]")?;
            match self.p_value {
                // Below this the t tail is not resolvable in double precision.
                Some(p) if p < 2.2e-16 => write!(f, ", p<2.2e-16")?,
                Some(p) => write!(f, ", p={p:.2e}")?,
                None => {}
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

pub fn t_interval(values: &[f64], confidence: f64) -> Result<MeanCi> {
    if values.is_empty() {
        return Err(Error::UndefinedMetric("mean of no values".into()));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::Precondition(format!("confidence {confidence} outside (0,1)")));
    }
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return Ok(MeanCi {
            mean,
            half_width: None,
            p_value: None,
            n,
        });
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let dist = StudentsT::new(0.0, 1.0, (n - 1) as f64).map_err(|e| Error::UndefinedMetric(e.to_string()))?;
    let t = dist.inverse_cdf(0.5 + confidence / 2.0);
    let se = (var / n as f64).sqrt();
    let p_value = if se > 0.0 {
        2.0 * dist.sf((mean / se).abs())
    } else if mean == 0.0 {
        1.0
    } else {
        0.0
    };
    Ok(MeanCi {
        mean,
        half_width: Some(t * se),
        p_value: Some(p_value),
        n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_auc(scores: &[f64], labels: &[bool]) -> f64 {
        let mut credit = 0.0;
        let mut pairs = 0.0;
        for (i, &li) in labels.iter().enumerate() {
            for (j, &lj) in labels.iter().enumerate() {
                if li && !lj {
                    pairs += 1.0;
                    if scores[i] > scores[j] {
                        credit += 1.0;
                    } else if scores[i] == scores[j] {
                        credit += 0.5;
                    }
                }
            }
        }
        credit / pairs
    }

    #[test]
    fn confusion_example() {
        let m = confusion_metrics(&ConfusionCounts {
            tp: 3,
            fp: 1,
            tn: 4,
            fn_: 2,
        });
        assert_eq!(m.precision.value, 0.75);
        assert_eq!(m.recall.value, 0.6);
        assert_eq!(m.accuracy.value, 0.7);
        assert!((m.f1.value - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn perfect_and_degenerate() {
        let m = confusion_metrics(&ConfusionCounts {
            tp: 5,
            fp: 0,
            tn: 7,
            fn_: 0,
        });
        for r in [m.accuracy, m.precision, m.recall, m.f1] {
            assert_eq!(r.value, 1.0);
        }
        let m = confusion_metrics(&ConfusionCounts {
            tp: 0,
            fp: 0,
            tn: 3,
            fn_: 2,
        });
        assert!(m.precision.degenerate);
        assert_eq!(m.precision.value, 0.0);
        assert_eq!(m.f1.value, 0.0);
    }

    #[test]
    fn auc_examples() {
        assert_eq!(
            roc_auc(&[0.9, 0.8, 0.2, 0.1], &[true, true, false, false]).unwrap(),
            1.0
        );
        assert_eq!(
            roc_auc(&[0.4; 6], &[true, false, true, false, false, true]).unwrap(),
            0.5
        );
        assert!(matches!(
            roc_auc(&[0.1, 0.2], &[true, true]),
            Err(Error::UndefinedMetric(_))
        ));
        assert!(roc_auc(&[0.1], &[true, false]).is_err());
    }

    #[test]
    fn dcg_examples() {
        assert!((dcg_at_k(&[2, 1, 0], 3) - 3.6309).abs() < 1e-4);
        assert!((dcg_at_k(&[2, 1, 0], 3) - (3.0 + 1.0 / 3f64.log2())).abs() < 1e-12);
        assert!((ndcg_at_k(&[2, 1, 0], 3) - 1.0).abs() < 1e-12);
        assert_eq!(ndcg_at_k(&[0, 0, 0], 3), 0.0);
        assert!((dcg_at_k(&[0, 2], 2) - 1.8928).abs() < 1e-4);
        assert!((ndcg_at_k(&[0, 2], 2) - 0.6309).abs() < 1e-4);
    }

    #[test]
    fn p_at_1_examples() {
        let lists: Vec<RankedJudgedList> = [2u8, 1, 0, 2]
            .iter()
            .enumerate()
            .map(|(i, &g)| RankedJudgedList {
                article_id: i.to_string(),
                entries: vec![("t".into(), g), ("u".into(), 0)],
            })
            .collect();
        assert!((precision_at_1(&lists).unwrap() - 0.625).abs() < 1e-12);
        assert_eq!(precision_at_1(&lists[2..3]).unwrap(), 0.0);
        assert!(matches!(precision_at_1(&[]), Err(Error::UndefinedMetric(_))));
    }

    #[test]
    fn t_interval_values() {
        // t_{0.975, 4} = 2.7764451051977987
        let ci = t_interval(&[1.0, 2.0, 3.0, 4.0, 5.0], 0.95).unwrap();
        assert_eq!(ci.mean, 3.0);
        let expected = 2.7764451051977987 * (2.5f64 / 5.0).sqrt();
        assert!((ci.half_width.unwrap() - expected).abs() < 1e-9);
        // scipy.stats.ttest_1samp([1, 2, 3, 4, 5], 0)
        assert!((ci.p_value.unwrap() - 0.013235599563682695).abs() < 1e-9);
        assert_eq!(ci.to_string(), "3.000 ([1.037, 4.963], p=1.32e-2)");
        assert_eq!(t_interval(&[0.5], 0.95).unwrap().half_width, None);
        assert!(t_interval(&[], 0.95).is_err());
    }

    proptest! {
        #[test]
        fn auc_matches_pairwise(data in prop::collection::vec((0u8..8, any::<bool>()), 2..80)) {
            let scores: Vec<f64> = data.iter().map(|(s, _)| *s as f64 / 8.0).collect();
            let labels: Vec<bool> = data.iter().map(|(_, l)| *l).collect();
            match roc_auc(&scores, &labels) {
                Ok(a) => prop_assert!((a - brute_auc(&scores, &labels)).abs() < 1e-12),
                Err(_) => prop_assert!(labels.iter().all(|&l| l) || labels.iter().all(|&l| !l)),
            }
        }

        #[test]
        fn ndcg_properties(rels in prop::collection::vec(0u8..3, 1..10), k in 1usize..6) {
            let v = ndcg_at_k(&rels, k);
            prop_assert!((0.0..=1.0).contains(&v));
            let mut ideal = rels.clone();
            ideal.sort_unstable_by(|a, b| b.cmp(a));
            if rels.iter().any(|&r| r > 0) {
                prop_assert!((ndcg_at_k(&ideal, k) - 1.0).abs() < 1e-12);
            }
            if rels.len() > k {
                let mut tail_permuted = rels.clone();
                tail_permuted[k..].reverse();
                prop_assert_eq!(dcg_at_k(&rels, k), dcg_at_k(&tail_permuted, k));
            }
        }

        #[test]
        fn f1_is_harmonic_mean(tp in 0usize..20, fp in 0usize..20, tn in 0usize..20, fn_ in 0usize..20) {
            let m = confusion_metrics(&ConfusionCounts { tp, fp, tn, fn_ });
            let (p, r) = (m.precision.value, m.recall.value);
            if p * r == 0.0 {
                prop_assert_eq!(m.f1.value, 0.0);
            } else {
                prop_assert!((m.f1.value - 2.0 * p * r / (p + r)).abs() < 1e-12);
            }
        }
    }
}
