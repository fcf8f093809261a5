use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::labels::{agreement_filter, apply_labels, derive_url_ground_truth, Agreement, PairLabel};
use super::metrics::{
    confusion_metrics, ndcg_at_k, precision_at_1_values, roc_auc, t_interval, ConfusionCounts, ConfusionMetrics,
    MeanCi, RankedJudgedList,
};
use crate::corpus::{replay_filter, Article, StreamWindow, Tweet};
use crate::error::{Error, Result};
use crate::pipeline::{prepare_articles, prepare_tweets, run_window, PipelineConfig, WindowRun};
use crate::ranker::{
    baseline_top_k, classify, rank_all, rank_hashtags, train, BaselineKey, LogisticModel, ScoredPair, TrainConfig,
    DEFAULT_THRESHOLD, DEFAULT_TOP_K,
};
use crate::synthgen::{generate, simulate_annotations, SynthConfig, SynthCorpus};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalConfig {
    pub train: TrainConfig,
    pub threshold: f64,
    pub top_k: usize,
    pub confidence: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            train: TrainConfig::default(),
            threshold: DEFAULT_THRESHOLD,
            top_k: DEFAULT_TOP_K,
            confidence: 0.95,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Small,
    Medium,
    Large,
}

impl std::str::FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "small" => Ok(ExperimentKind::Small),
            "medium" => Ok(ExperimentKind::Medium),
            "large" => Ok(ExperimentKind::Large),
            other => Err(Error::Config(format!("unknown experiment {other:?}"))),
        }
    }
}

/// Prepared inputs: two processed windows and the agreed manual labels.
#[derive(Debug, Clone)]
pub struct ExperimentData {
    pub articles: Vec<Article>,
    pub tweets: Vec<Tweet>,
    /// Window A: manual training labels.
    pub train_run: WindowRun,
    /// Window B: held-out evaluation.
    pub test_run: WindowRun,
    pub labels: Option<Agreement>,
}

impl ExperimentData {
    /// Process both windows over prepared articles and tweets.
    pub fn new(
        mut articles: Vec<Article>,
        mut tweets: Vec<Tweet>,
        train_window: &StreamWindow,
        test_window: &StreamWindow,
        labels: Option<Agreement>,
        config: &PipelineConfig,
    ) -> Result<Self> {
        prepare_articles(&mut articles, config)?;
        prepare_tweets(&mut tweets, config);
        let train_run = run_window(&articles, &tweets, train_window, config)?;
        let test_run = run_window(&articles, &tweets, test_window, config)?;
        Ok(ExperimentData {
            articles,
            tweets,
            train_run,
            test_run,
            labels,
        })
    }

    fn manual(&self) -> Result<&Agreement> {
        self.labels
            .as_ref()
            .ok_or_else(|| Error::Config("experiment needs manual labels (labels file from two annotators)".into()))
    }

    fn labeled(&self, run: &WindowRun) -> Result<Vec<ScoredPair>> {
        let mut pairs = run.pairs.clone();
        apply_labels(&mut pairs, &self.manual()?.pairs);
        Ok(pairs)
    }

    fn train_manual(&self, config: &EvalConfig) -> Result<(LogisticModel, Vec<ScoredPair>)> {
        let pairs = self.labeled(&self.train_run)?;
        let model = train(&pairs, &config.train).map_err(|e| e.in_stage("train"))?;
        Ok((model, pairs))
    }

    fn url_positives(&self, run: &WindowRun) -> Vec<PairLabel> {
        derive_url_ground_truth(replay_filter(&self.tweets, &run.window), &self.articles)
    }
}

fn positive_fraction(pairs: &[ScoredPair]) -> (usize, f64) {
    let labeled: Vec<bool> = pairs.iter().filter_map(|p| p.binary_label).collect();
    let pos = labeled.iter().filter(|&&b| b).count();
    (
        labeled.len(),
        if labeled.is_empty() {
            0.0
        } else {
            pos as f64 / labeled.len() as f64
        },
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmallReport {
    pub agreement_rate: f64,
    pub train_pairs: usize,
    pub train_positive_fraction: f64,
    pub test_pairs: usize,
    pub test_positive_fraction: f64,
    pub counts: ConfusionCounts,
    pub metrics: ConfusionMetrics,
    pub auc: f64,
    pub most_frequent_top3_precision: f64,
    pub highest_cosine_top3_precision: f64,
    pub logistic_top3_precision: f64,
    pub model: LogisticModel,
}

/// Precision of top-k lists over the pairs that carry a label.
fn top_k_precision<'a>(lists: impl IntoIterator<Item = Vec<&'a ScoredPair>>) -> f64 {
    let (mut hit, mut judged) = (0usize, 0usize);
    for list in lists {
        for p in list {
            if let Some(b) = p.binary_label {
                judged += 1;
                hit += b as usize;
            }
        }
    }
    if judged == 0 {
        0.0
    } else {
        hit as f64 / judged as f64
    }
}

/// Train on window A's labels, evaluate classification on window B's.
pub fn small(data: &ExperimentData, config: &EvalConfig) -> Result<SmallReport> {
    let (model, train_pairs) = data.train_manual(config)?;
    let mut test = data.labeled(&data.test_run)?;
    model.score_all(&mut test);
    let judged: Vec<&ScoredPair> = test.iter().filter(|p| p.binary_label.is_some()).collect();
    let counts = ConfusionCounts::from_predictions(judged.iter().map(|p| {
        (
            classify(p.score.unwrap_or(0.0), config.threshold),
            p.binary_label.unwrap_or(false),
        )
    }));
    let scores: Vec<f64> = judged.iter().map(|p| p.score.unwrap_or(0.0)).collect();
    let truth: Vec<bool> = judged.iter().map(|p| p.binary_label.unwrap_or(false)).collect();
    let auc = roc_auc(&scores, &truth).map_err(|e| e.in_stage("eval"))?;
    let k = config.top_k;
    let articles = &data.test_run.article_ids;
    let baseline = |key| top_k_precision(articles.iter().map(|a| baseline_top_k(a, &test, key, k)));
    let (train_n, train_pos) = positive_fraction(&train_pairs);
    let (test_n, test_pos) = positive_fraction(&test);
    Ok(SmallReport {
        agreement_rate: data.manual()?.rate,
        train_pairs: train_n,
        train_positive_fraction: train_pos,
        test_pairs: test_n,
        test_positive_fraction: test_pos,
        metrics: confusion_metrics(&counts),
        counts,
        auc,
        most_frequent_top3_precision: baseline(BaselineKey::LocalFreq),
        highest_cosine_top3_precision: baseline(BaselineKey::LocalCosine),
        logistic_top3_precision: top_k_precision(articles.iter().map(|a| rank_hashtags(a, &test, k, config.threshold))),
        model,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MediumReport {
    /// Distinct (article, hashtag) positives derived from linking tweets.
    pub url_positives: usize,
    /// Those positives that are candidate pairs in the test window.
    pub evaluated: usize,
    pub recall: f64,
    /// Equal to recall: every evaluated pair is positive.
    pub accuracy: f64,
    pub most_frequent_top3_recall: f64,
    pub highest_cosine_top3_recall: f64,
    pub model: LogisticModel,
}

/// Train on manual labels, evaluate recall on URL-derived positives of window B.
pub fn medium(data: &ExperimentData, config: &EvalConfig) -> Result<MediumReport> {
    let positives = data.url_positives(&data.test_run);
    if positives.is_empty() {
        return Err(Error::Config(format!(
            "no URL-derived ground truth: no tweet in window {} links an article",
            data.test_run.window.label
        )));
    }
    let (model, _) = data.train_manual(config)?;
    let wanted: BTreeSet<(&str, &str)> = positives
        .iter()
        .map(|l| (l.article_id.as_str(), l.hashtag.as_str()))
        .collect();
    let mut pairs = data.test_run.pairs.clone();
    model.score_all(&mut pairs);
    let evaluated: Vec<&ScoredPair> = pairs
        .iter()
        .filter(|p| wanted.contains(&(p.article_id.as_str(), p.hashtag.as_str())))
        .collect();
    if evaluated.is_empty() {
        return Err(Error::UndefinedMetric(
            "no URL-derived positive is a candidate pair".into(),
        ));
    }
    let hits = evaluated
        .iter()
        .filter(|p| classify(p.score.unwrap_or(0.0), config.threshold))
        .count();
    let recall = hits as f64 / evaluated.len() as f64;
    let baseline_recall = |key| {
        let mut by_article: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        for p in &evaluated {
            by_article
                .entry(p.article_id.as_str())
                .or_default()
                .insert(p.hashtag.as_str());
        }
        let found: usize = by_article
            .iter()
            .map(|(a, tags)| {
                baseline_top_k(a, &pairs, key, config.top_k)
                    .iter()
                    .filter(|p| tags.contains(p.hashtag.as_str()))
                    .count()
            })
            .sum();
        found as f64 / evaluated.len() as f64
    };
    Ok(MediumReport {
        url_positives: positives.len(),
        evaluated: evaluated.len(),
        recall,
        accuracy: recall,
        most_frequent_top3_recall: baseline_recall(BaselineKey::LocalFreq),
        highest_cosine_top3_recall: baseline_recall(BaselineKey::LocalCosine),
        model,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LargeReport {
    pub articles_ranked: usize,
    pub articles_judged: usize,
    pub judged_entries: usize,
    pub precision: f64,
    pub precision_at_1: MeanCi,
    pub ndcg_at_3: MeanCi,
    pub model: LogisticModel,
}

/// Per-article ranked lists restricted to judged entries, empty lists dropped.
pub fn judged_lists(pairs: &[ScoredPair], k: usize, threshold: f64, judgments: &[PairLabel]) -> Vec<RankedJudgedList> {
    let grades: BTreeMap<(&str, &str), u8> = judgments
        .iter()
        .map(|l| {
            (
                (l.article_id.as_str(), l.hashtag.as_str()),
                l.grade.unwrap_or(l.relevant as u8),
            )
        })
        .collect();
    let mut lists: BTreeMap<String, Vec<(String, u8)>> = BTreeMap::new();
    for row in rank_all(pairs, k, threshold) {
        let entry = lists.entry(row.article_id.clone()).or_default();
        if let Some(&g) = grades.get(&(row.article_id.as_str(), row.hashtag.as_str())) {
            entry.push((row.hashtag, g));
        }
    }
    lists
        .into_iter()
        .filter(|(_, e)| !e.is_empty())
        .map(|(article_id, entries)| RankedJudgedList { article_id, entries })
        .collect()
}

/// Train on manual plus URL-derived labels, rank every article of both
/// windows, and grade the top-k against the manual judgments.
pub fn large(data: &ExperimentData, config: &EvalConfig) -> Result<LargeReport> {
    let manual = data.manual()?;
    let mut train_pairs = data.labeled(&data.train_run)?;
    let mut url: Vec<PairLabel> = data.url_positives(&data.train_run);
    url.extend(data.url_positives(&data.test_run));
    let mut extra = data.test_run.pairs.clone();
    apply_labels(&mut extra, &url);
    let labeled_train: BTreeSet<(String, String)> = train_pairs
        .iter()
        .filter(|p| p.binary_label.is_some())
        .map(|p| (p.article_id.clone(), p.hashtag.clone()))
        .collect();
    for p in train_pairs.iter_mut().filter(|p| p.binary_label.is_none()) {
        if url
            .iter()
            .any(|l| l.article_id == p.article_id && l.hashtag == p.hashtag)
        {
            p.binary_label = Some(true);
        }
    }
    train_pairs.extend(
        extra.into_iter().filter(|p| {
            p.binary_label.is_some() && !labeled_train.contains(&(p.article_id.clone(), p.hashtag.clone()))
        }),
    );
    let model = train(&train_pairs, &config.train).map_err(|e| e.in_stage("train"))?;

    let mut all: Vec<ScoredPair> = data
        .train_run
        .pairs
        .iter()
        .chain(&data.test_run.pairs)
        .cloned()
        .collect();
    model.score_all(&mut all);
    let articles_ranked = rank_all(&all, config.top_k, config.threshold)
        .iter()
        .map(|r| r.article_id.as_str())
        .collect::<BTreeSet<_>>()
        .len();
    let lists = judged_lists(&all, config.top_k, config.threshold, &manual.pairs);
    if lists.is_empty() {
        return Err(Error::UndefinedMetric("no ranked entry was judged".into()));
    }
    let judged_entries: usize = lists.iter().map(|l| l.entries.len()).sum();
    let relevant = lists.iter().flat_map(|l| &l.entries).filter(|(_, g)| *g >= 1).count();
    let p1 = precision_at_1_values(&lists)?;
    let ndcg: Vec<f64> = lists.iter().map(|l| ndcg_at_k(&l.grades(), 3)).collect();
    Ok(LargeReport {
        articles_ranked,
        articles_judged: lists.len(),
        judged_entries,
        precision: relevant as f64 / judged_entries as f64,
        precision_at_1: t_interval(&p1, config.confidence)?,
        ndcg_at_3: t_interval(&ndcg, config.confidence)?,
        model,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "experiment", rename_all = "lowercase")]
pub enum Report {
    Small(SmallReport),
    Medium(MediumReport),
    Large(LargeReport),
}

pub fn run_experiment(kind: ExperimentKind, data: &ExperimentData, config: &EvalConfig) -> Result<Report> {
    Ok(match kind {
        ExperimentKind::Small => Report::Small(small(data, config)?),
        ExperimentKind::Medium => Report::Medium(medium(data, config)?),
        ExperimentKind::Large => Report::Large(large(data, config)?),
    })
}

/// Generate a corpus, process its first two days, and label every candidate
/// pair with two simulated annotators.
pub fn synthetic_data(
    synth: &SynthConfig,
    pipeline: &PipelineConfig,
    annotator_error: f64,
) -> Result<(SynthCorpus, ExperimentData)> {
    if synth.n_days < 2 {
        return Err(Error::Config("synthetic experiments need at least two days".into()));
    }
    let corpus = generate(synth)?;
    let a = StreamWindow::day(synth.start);
    let b = StreamWindow::day(synth.start + 86_400);
    let mut data = ExperimentData::new(corpus.articles.clone(), corpus.tweets.clone(), &a, &b, None, pipeline)?;
    let pairs: Vec<(String, String)> = data
        .train_run
        .pairs
        .iter()
        .chain(&data.test_run.pairs)
        .map(|p| (p.article_id.clone(), p.hashtag.clone()))
        .collect();
    let first = simulate_annotations(
        &corpus,
        &pairs,
        "annotator-1",
        annotator_error,
        synth.seed.wrapping_add(1),
    );
    let second = simulate_annotations(
        &corpus,
        &pairs,
        "annotator-2",
        annotator_error,
        synth.seed.wrapping_add(2),
    );
    data.labels = Some(agreement_filter(&first, &second)?);
    Ok((corpus, data))
}

fn pct(x: f64) -> String {
    format!("{:.1}%", 100.0 * x)
}

impl fmt::Display for SmallReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "annotator agreement: {:.3}", self.agreement_rate)?;
        writeln!(
            f,
            "train pairs: {} ({} relevant, {} irrelevant)",
            self.train_pairs,
            pct(self.train_positive_fraction),
            pct(1.0 - self.train_positive_fraction)
        )?;
        writeln!(
            f,
            "test pairs:  {} ({} relevant, {} irrelevant)",
            self.test_pairs,
            pct(self.test_positive_fraction),
            pct(1.0 - self.test_positive_fraction)
        )?;
        writeln!(
            f,
            "{:<10} {:>9} {:>9} {:>9} {:>9} {:>9}",
            "model", "accuracy", "precision", "recall", "f1", "auc"
        )?;
        let m = &self.metrics;
        writeln!(
            f,
            "{:<10} {:>9.3} {:>9.3} {:>9.3} {:>9.3} {:>9.3}",
            "logistic", m.accuracy.value, m.precision.value, m.recall.value, m.f1.value, self.auc
        )?;
        writeln!(f, "{:<24} {:>9}", "top-3 ranking", "precision")?;
        writeln!(f, "{:<24} {:>9.3}", "most frequent", self.most_frequent_top3_precision)?;
        writeln!(
            f,
            "{:<24} {:>9.3}",
            "highest cosine", self.highest_cosine_top3_precision
        )?;
        write!(f, "{:<24} {:>9.3}", "logistic", self.logistic_top3_precision)
    }
}

impl fmt::Display for MediumReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "URL-derived positives: {} ({} are candidate pairs)",
            self.url_positives, self.evaluated
        )?;
        writeln!(f, "{:<24} {:>9}", "model", "recall")?;
        writeln!(f, "{:<24} {:>9.3}", "logistic", self.recall)?;
        writeln!(
            f,
            "{:<24} {:>9.3}",
            "most frequent top-3", self.most_frequent_top3_recall
        )?;
        writeln!(
            f,
            "{:<24} {:>9.3}",
            "highest cosine top-3", self.highest_cosine_top3_recall
        )?;
        write!(
            f,
            "accuracy equals recall ({:.3}): every evaluated pair is positive",
            self.accuracy
        )
    }
}

impl fmt::Display for LargeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let headers = [
            format!("Precision (over {} pairs)", self.judged_entries),
            format!("Precision@1 (over {} articles)", self.precision_at_1.n),
            format!("NDCG@3 (over {} articles)", self.ndcg_at_3.n),
        ];
        let values = [
            format!("{:.3}", self.precision),
            self.precision_at_1.to_string(),
            self.ndcg_at_3.to_string(),
        ];
        let widths: Vec<usize> = headers
            .iter()
            .zip(&values)
            .map(|(h, v)| h.chars().count().max(v.chars().count()))
            .collect();
        let row = |cells: &[String]| {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect::<Vec<_>>()
                .join(" | ")
        };
        writeln!(f, "{}", row(&headers))?;
        writeln!(f, "{}", row(&values))?;
        write!(f, "articles ranked: {}", self.articles_ranked)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Report::Small(r) => r.fmt(f),
            Report::Medium(r) => r.fmt(f),
            Report::Large(r) => r.fmt(f),
        }
    }
}
