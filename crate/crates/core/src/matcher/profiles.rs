use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::TweetBag;
use crate::corpus::{Article, Tweet};
use crate::textproc::{normalize_text, TokenizerConfig};

/// Sparse term weights, ordered by term so that float reductions are reproducible.
pub type TermWeights = BTreeMap<String, f64>;

/// Smoothed tf.idf: `tf * (ln((n + 1) / (df + 1)) + 1)`.
pub fn tfidf_weight(tf: f64, df: usize, n_docs: usize) -> f64 {
    tf * (((n_docs as f64 + 1.0) / (df as f64 + 1.0)).ln() + 1.0)
}

/// Weight every document of a collection of raw term counts.
pub fn tfidf<K: Ord + Clone + std::hash::Hash + Eq>(docs: &[HashMap<K, usize>]) -> Vec<BTreeMap<K, f64>> {
    let mut df: HashMap<&K, usize> = HashMap::new();
    for doc in docs {
        for (term, &count) in doc {
            if count > 0 {
                *df.entry(term).or_default() += 1;
            }
        }
    }
    docs.iter()
        .map(|doc| {
            doc.iter()
                .filter(|(_, &c)| c > 0)
                .map(|(t, &c)| (t.clone(), tfidf_weight(c as f64, df[t], docs.len())))
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileScope {
    /// Built from one article's tweet-bag.
    Local(String),
    /// Built from a whole window's tweets; carries the window label.
    Global(String),
}

impl std::fmt::Display for ProfileScope {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ProfileScope::Local(a) => write!(f, "local:{a}"),
            ProfileScope::Global(w) => write!(f, "global:{w}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HashtagProfile {
    pub scope: ProfileScope,
    pub tag: String,
    pub term_weights: TermWeights,
    pub tweet_count: usize,
}

impl HashtagProfile {
    /// The `k` heaviest terms, ties by term.
    pub fn top_terms(&self, k: usize) -> Vec<(&str, f64)> {
        let mut terms: Vec<(&str, f64)> = self.term_weights.iter().map(|(t, &w)| (t.as_str(), w)).collect();
        terms.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        terms.truncate(k);
        terms
    }

    /// One dump line: scope, tag, tweet count, top terms.
    pub fn dump_line(&self, k: usize) -> String {
        let terms: Vec<String> = self
            .top_terms(k)
            .into_iter()
            .map(|(t, w)| format!("{t}:{w:.4}"))
            .collect();
        format!(
            "{}\t{}\t{}\t{}",
            self.scope,
            self.tag,
            self.tweet_count,
            terms.join(" ")
        )
    }
}

/// Term ids shared by all pseudo-documents of one window.
#[derive(Default)]
struct Interner {
    ids: HashMap<String, u32>,
    terms: Vec<String>,
}

impl Interner {
    fn id(&mut self, term: &str) -> u32 {
        if let Some(&id) = self.ids.get(term) {
            return id;
        }
        let id = self.terms.len() as u32;
        self.ids.insert(term.to_string(), id);
        self.terms.push(term.to_string());
        id
    }

    fn resolve(&self, weights: BTreeMap<u32, f64>) -> TermWeights {
        weights
            .into_iter()
            .map(|(id, w)| (self.terms[id as usize].clone(), w))
            .collect()
    }
}

fn add_tweet(doc: &mut HashMap<u32, usize>, ids: &[u32]) {
    for &id in ids {
        *doc.entry(id).or_default() += 1;
    }
}

/// One profile per (article, hashtag) in the bags, with idf over all of them.
///
/// `tweets` must be the tweets the bags index into.
pub fn build_local_profiles(bags: &[TweetBag], tweets: &[Tweet]) -> Vec<HashtagProfile> {
    let by_id: HashMap<&str, &Tweet> = tweets.iter().map(|t| (t.id.as_str(), t)).collect();
    let mut interner = Interner::default();
    let mut token_ids: HashMap<&str, Vec<u32>> = HashMap::new();
    let mut keys: Vec<(String, String, usize)> = Vec::new();
    let mut docs: Vec<HashMap<u32, usize>> = Vec::new();

    for bag in bags {
        let mut per_tag: BTreeMap<&str, HashMap<u32, usize>> = BTreeMap::new();
        for tid in &bag.tweet_ids {
            let Some(tweet) = by_id.get(tid.as_str()) else {
                continue;
            };
            if tweet.hashtags.is_empty() {
                continue;
            }
            let ids = token_ids
                .entry(tweet.id.as_str())
                .or_insert_with(|| tweet.tokens.iter().map(|t| interner.id(t)).collect());
            for tag in &tweet.hashtags {
                add_tweet(per_tag.entry(tag.as_str()).or_default(), ids);
            }
        }
        for (tag, doc) in per_tag {
            let count = bag.hashtag_counts.get(tag).copied().unwrap_or(0);
            keys.push((bag.article_id.clone(), tag.to_string(), count));
            docs.push(doc);
        }
    }

    tfidf(&docs)
        .into_iter()
        .zip(keys)
        .map(|(weights, (article, tag, tweet_count))| HashtagProfile {
            scope: ProfileScope::Local(article),
            tag,
            term_weights: interner.resolve(weights),
            tweet_count,
        })
        .collect()
}

/// One profile per hashtag over every tweet of the window.
pub fn build_global_profiles(tweets: &[Tweet], window_label: &str) -> Vec<HashtagProfile> {
    let mut interner = Interner::default();
    let mut per_tag: BTreeMap<&str, (HashMap<u32, usize>, usize)> = BTreeMap::new();
    for tweet in tweets.iter().filter(|t| !t.hashtags.is_empty()) {
        let ids: Vec<u32> = tweet.tokens.iter().map(|t| interner.id(t)).collect();
        for tag in &tweet.hashtags {
            let (doc, n) = per_tag.entry(tag.as_str()).or_default();
            add_tweet(doc, &ids);
            *n += 1;
        }
    }
    let (tags, docs): (Vec<_>, Vec<_>) = per_tag.into_iter().map(|(tag, (doc, n))| ((tag, n), doc)).unzip();
    tfidf(&docs)
        .into_iter()
        .zip(tags)
        .map(|(weights, (tag, n))| HashtagProfile {
            scope: ProfileScope::Global(window_label.to_string()),
            tag: tag.to_string(),
            term_weights: interner.resolve(weights),
            tweet_count: n,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArticleProfile {
    pub article_id: String,
    pub term_weights: TermWeights,
}

/// Article tf.idf profiles for one window's article corpus.
///
/// Terms come from the headline and sub-headline only; term frequency is
/// counted over the whole article, document frequency over the corpus.
pub struct ArticleProfiler<'a> {
    config: &'a TokenizerConfig,
    df: HashMap<String, usize>,
    n_docs: usize,
}

impl<'a> ArticleProfiler<'a> {
    pub fn new(corpus: &[Article], config: &'a TokenizerConfig) -> Self {
        let mut df: HashMap<String, usize> = HashMap::new();
        for article in corpus {
            let mut terms = full_text_terms(article, config);
            terms.sort_unstable();
            terms.dedup();
            for t in terms {
                *df.entry(t).or_default() += 1;
            }
        }
        ArticleProfiler {
            config,
            df,
            n_docs: corpus.len(),
        }
    }

    pub fn profile(&self, article: &Article) -> ArticleProfile {
        let mut tf: HashMap<String, usize> = HashMap::new();
        for t in full_text_terms(article, self.config) {
            *tf.entry(t).or_default() += 1;
        }
        let head = format!("{}\n{}", article.headline, article.subheadline);
        let mut term_weights = TermWeights::new();
        for term in normalize_text(&head, self.config) {
            if term_weights.contains_key(&term) {
                continue;
            }
            let count = tf[&term];
            // An article outside the corpus still counts as containing its own terms.
            let df = self.df.get(&term).copied().unwrap_or(0).max(1);
            let n = self.n_docs.max(df);
            term_weights.insert(term, tfidf_weight(count as f64, df, n));
        }
        ArticleProfile {
            article_id: article.id.clone(),
            term_weights,
        }
    }
}

fn full_text_terms(article: &Article, config: &TokenizerConfig) -> Vec<String> {
    let text = format!("{}\n{}\n{}", article.headline, article.subheadline, article.body);
    normalize_text(&text, config)
}

/// Profile one article against a corpus.
pub fn build_article_profile(article: &Article, corpus: &[Article], config: &TokenizerConfig) -> ArticleProfile {
    ArticleProfiler::new(corpus, config).profile(article)
}
