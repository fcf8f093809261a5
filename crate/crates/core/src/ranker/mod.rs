//! Pair features, the logistic scorer, and per-article hashtag ranking.

mod logistic;
mod rank;

pub use logistic::{
    gradient, log_loss, read_model, sigmoid, train, train_samples, train_with_history, write_model, LogisticModel,
    Sample, TrainConfig, MODEL_HEADER,
};
pub use rank::{
    baseline_top_k, classify, group_articles_by_hashtag, rank_all, rank_hashtags, read_pairs, read_ranked, write_pairs,
    write_ranked, BaselineKey, RankedRow, ScoredPair, DEFAULT_THRESHOLD, DEFAULT_TOP_K,
};

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcher::{ArticleProfile, HashtagProfile, TermWeights};

pub const FEATURE_NAMES: [&str; 4] = ["local_freq", "local_cosine", "global_freq", "global_cosine"];

/// The four pair features, each in [0,1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct FeatureVector([f64; 4]);

impl FeatureVector {
    pub fn new(values: [f64; 4]) -> Result<Self> {
        for (name, v) in FEATURE_NAMES.iter().zip(values) {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(Error::Validation(format!("feature {name} = {v} outside [0,1]")));
            }
        }
        Ok(FeatureVector(values))
    }

    pub fn zero() -> Self {
        FeatureVector([0.0; 4])
    }

    pub fn values(&self) -> [f64; 4] {
        self.0
    }

    pub fn local_freq(&self) -> f64 {
        self.0[0]
    }

    pub fn local_cosine(&self) -> f64 {
        self.0[1]
    }

    pub fn global_freq(&self) -> f64 {
        self.0[2]
    }

    pub fn global_cosine(&self) -> f64 {
        self.0[3]
    }
}

impl TryFrom<[f64; 4]> for FeatureVector {
    type Error = Error;

    fn try_from(values: [f64; 4]) -> Result<Self> {
        FeatureVector::new(values)
    }
}

impl From<FeatureVector> for [f64; 4] {
    fn from(f: FeatureVector) -> Self {
        f.0
    }
}

/// Cosine similarity of two non-negative sparse vectors, 0 if either is zero.
pub fn cosine(u: &TermWeights, v: &TermWeights) -> f64 {
    let (small, large) = if u.len() <= v.len() { (u, v) } else { (v, u) };
    let dot: f64 = small.iter().filter_map(|(t, a)| large.get(t).map(|b| a * b)).sum();
    let norm = |w: &TermWeights| w.values().map(|x| x * x).sum::<f64>().sqrt();
    let denom = norm(u) * norm(v);
    if denom == 0.0 || dot <= 0.0 {
        return 0.0;
    }
    (dot / denom).clamp(0.0, 1.0)
}

/// `(x - min) / (max - min)`, or 1.0 when every value is equal.
pub fn min_max(x: f64, min: f64, max: f64) -> f64 {
    if max > min {
        ((x - min) / (max - min)).clamp(0.0, 1.0)
    } else {
        1.0
    }
}

/// Window-wide global profiles with their tweet-count range.
#[derive(Debug, Clone, Default)]
pub struct GlobalProfiles<'a> {
    by_tag: HashMap<&'a str, &'a HashtagProfile>,
    min_count: f64,
    max_count: f64,
}

impl<'a> GlobalProfiles<'a> {
    pub fn new(profiles: impl IntoIterator<Item = &'a HashtagProfile>) -> Self {
        let by_tag: HashMap<&str, &HashtagProfile> = profiles.into_iter().map(|p| (p.tag.as_str(), p)).collect();
        let counts = by_tag.values().map(|p| p.tweet_count as f64);
        let min_count = counts.clone().fold(f64::INFINITY, f64::min);
        let max_count = counts.fold(f64::NEG_INFINITY, f64::max);
        GlobalProfiles {
            by_tag,
            min_count,
            max_count,
        }
    }

    pub fn get(&self, tag: &str) -> Option<&'a HashtagProfile> {
        self.by_tag.get(tag).copied()
    }

    pub fn contains(&self, tag: &str) -> bool {
        self.by_tag.contains_key(tag)
    }
}

/// Features for one (article, hashtag) pair.
///
/// `candidates` are all local profiles of the article; the hashtag's own
/// profile must be among them. A hashtag without a global profile gets 0 for
/// both global features; callers check [`GlobalProfiles::contains`] to report it.
pub fn compute_features(
    article: &ArticleProfile,
    hashtag: &str,
    candidates: &[&HashtagProfile],
    globals: &GlobalProfiles<'_>,
) -> Result<FeatureVector> {
    let local = candidates
        .iter()
        .find(|p| p.tag == hashtag)
        .ok_or_else(|| Error::Precondition(format!("no local profile for ({}, {hashtag})", article.article_id)))?;
    let counts = candidates.iter().map(|p| p.tweet_count as f64);
    let min = counts.clone().fold(f64::INFINITY, f64::min);
    let max = counts.fold(f64::NEG_INFINITY, f64::max);
    let local_freq = min_max(local.tweet_count as f64, min, max);
    let local_cosine = cosine(&article.term_weights, &local.term_weights);
    let (global_freq, global_cosine) = match globals.get(hashtag) {
        Some(g) => (
            min_max(g.tweet_count as f64, globals.min_count, globals.max_count),
            cosine(&local.term_weights, &g.term_weights),
        ),
        None => (0.0, 0.0),
    };
    FeatureVector::new([local_freq, local_cosine, global_freq, global_cosine])
}

/// An (article id, hashtag) key.
pub type ArticleTag = (String, String);

/// Unlabeled, unscored pairs for every local profile of every profiled article.
///
/// Returns the pairs (ordered by article, then hashtag) and the hashtags that had
/// no global profile.
pub fn featurize(
    articles: &[ArticleProfile],
    local_profiles: &[HashtagProfile],
    globals: &GlobalProfiles<'_>,
) -> Result<(Vec<ScoredPair>, Vec<ArticleTag>)> {
    let mut by_article: BTreeMap<&str, Vec<&HashtagProfile>> = BTreeMap::new();
    for p in local_profiles {
        if let crate::matcher::ProfileScope::Local(a) = &p.scope {
            by_article.entry(a.as_str()).or_default().push(p);
        }
    }
    let mut articles: Vec<&ArticleProfile> = articles.iter().collect();
    articles.sort_by(|a, b| a.article_id.cmp(&b.article_id));
    let mut pairs = Vec::new();
    let mut missing = Vec::new();
    for article in articles {
        let Some(candidates) = by_article.get_mut(article.article_id.as_str()) else {
            continue;
        };
        candidates.sort_by(|a, b| a.tag.cmp(&b.tag));
        for p in candidates.iter() {
            if !globals.contains(&p.tag) {
                missing.push((article.article_id.clone(), p.tag.clone()));
            }
            pairs.push(ScoredPair::new(
                &article.article_id,
                &p.tag,
                compute_features(article, &p.tag, candidates, globals)?,
            ));
        }
    }
    Ok((pairs, missing))
}
