//! Synthetic article and tweet corpora with planted hashtag relevance.
//!
//! Each topic owns a block of pseudo-words, one or two two-word named
//! entities, a few specific hashtags (grade 2) and one of a small set of
//! general hashtags shared between topics (grade 1). Relevant tweets reuse the
//! topic's words and carry its hashtags. Noise tweets (grade 0 hashtags) either
//! mention an article among background words and carry a spam hashtag, or are
//! trending chatter that shares only everyday words with the headlines.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::Path;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{write_articles, write_tweets, Article, Timestamp, Tweet, DEFAULT_MAX_TWEET_LEN};
use crate::error::{Error, Result};
use crate::eval::{write_labels, AnnotationRecord};
use crate::textproc::{porter, TokenizerConfig};

const CORE_TERMS: usize = 12;
const EXTENDED_TERMS: usize = 24;
const MIN_BACKGROUND: usize = 100;
const DAY: i64 = 86_400;
/// 2013-10-23T00:00:00Z.
pub const DEFAULT_START: Timestamp = 1_382_486_400;
pub const TRUTH_ANNOTATOR: &str = "truth";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub n_articles: usize,
    pub n_topics: usize,
    /// Tweets generated per topic, noise included.
    pub tweets_per_topic: usize,
    /// Specific tags per topic plus one general tag.
    pub relevant_tags_per_article: usize,
    pub noise_tweet_fraction: f64,
    pub vocab_size: usize,
    pub seed: u64,
    pub n_days: usize,
    /// Midnight UTC of the first day.
    pub start: Timestamp,
    pub n_general_tags: usize,
    pub n_noise_tags: usize,
    /// Fraction of articles that get tweets echoing headline, URL and tags.
    pub url_echo_fraction: f64,
    pub url_echo_tweets: usize,
    /// Shared everyday words; every headline carries two of them.
    pub n_generic_terms: usize,
    /// Hashtags of off-topic trending chatter.
    pub n_trending_tags: usize,
    /// Share of noise tweets that are trending chatter built from generic
    /// words; the rest mention an article directly.
    pub chatter_fraction: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_articles: 500,
            n_topics: 20,
            tweets_per_topic: 2500,
            relevant_tags_per_article: 3,
            noise_tweet_fraction: 0.2,
            vocab_size: 2000,
            seed: 42,
            n_days: 2,
            start: DEFAULT_START,
            n_general_tags: 4,
            n_noise_tags: 60,
            url_echo_fraction: 0.0,
            url_echo_tweets: 3,
            n_generic_terms: 10,
            n_trending_tags: 3,
            chatter_fraction: 0.5,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("n_articles", self.n_articles),
            ("n_topics", self.n_topics),
            ("tweets_per_topic", self.tweets_per_topic),
            ("relevant_tags_per_article", self.relevant_tags_per_article),
            ("vocab_size", self.vocab_size),
            ("n_days", self.n_days),
            ("n_general_tags", self.n_general_tags),
            ("n_noise_tags", self.n_noise_tags),
            ("n_trending_tags", self.n_trending_tags),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be at least 1")));
            }
        }
        for (name, v) in [
            ("noise_tweet_fraction", self.noise_tweet_fraction),
            ("url_echo_fraction", self.url_echo_fraction),
            ("chatter_fraction", self.chatter_fraction),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("{name} must be in [0,1], got {v}")));
            }
        }
        let needed = self.n_topics * (CORE_TERMS + EXTENDED_TERMS) + MIN_BACKGROUND;
        if self.vocab_size < needed {
            return Err(Error::Generation(format!(
                "vocab_size {} is too small for {} topics (need at least {needed})",
                self.vocab_size, self.n_topics
            )));
        }
        if self.n_generic_terms < 2 {
            return Err(Error::Config("n_generic_terms must be at least 2".into()));
        }
        if self.start.rem_euclid(DAY) != 0 {
            return Err(Error::Config("start must be midnight UTC".into()));
        }
        Ok(())
    }

    fn specific_tags(&self) -> usize {
        self.relevant_tags_per_article.saturating_sub(1).max(1)
    }

    fn uses_general(&self) -> bool {
        self.relevant_tags_per_article >= 2
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Topic {
    pub name: String,
    pub core_terms: Vec<String>,
    pub extended_terms: Vec<String>,
    /// Capitalized two-word names.
    pub entities: Vec<String>,
    pub specific_tags: Vec<String>,
    pub general_tag: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthCorpus {
    pub articles: Vec<Article>,
    pub tweets: Vec<Tweet>,
    pub topics: Vec<Topic>,
    /// Topic index of every article, by article id.
    pub article_topic: BTreeMap<String, usize>,
    /// Graded relevance of planted pairs; absent pairs are grade 0.
    pub truth: BTreeMap<(String, String), u8>,
    pub noise_tags: Vec<String>,
}

impl SynthCorpus {
    pub fn grade(&self, article_id: &str, hashtag: &str) -> u8 {
        self.truth
            .get(&(article_id.to_string(), hashtag.to_string()))
            .copied()
            .unwrap_or(0)
    }

    /// The truth table in label-file form.
    pub fn truth_records(&self) -> Vec<AnnotationRecord> {
        self.truth
            .iter()
            .map(|((a, h), &g)| AnnotationRecord {
                article_id: a.clone(),
                hashtag: h.clone(),
                annotator_id: TRUTH_ANNOTATOR.into(),
                grade: g,
            })
            .collect()
    }

    /// Write `articles.jsonl`, `tweets.jsonl` and `truth.csv` into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_articles(dir.join("articles.jsonl"), &self.articles)?;
        write_tweets(dir.join("tweets.jsonl"), &self.tweets)?;
        write_labels(dir.join("truth.csv"), &self.truth_records())
    }
}

/// Pronounceable lowercase words with pairwise distinct stems that survive
/// tokenization untouched.
struct WordSource {
    rng: ChaCha8Rng,
    stems: HashSet<String>,
    config: TokenizerConfig,
}

impl WordSource {
    const ONSETS: [&'static str; 16] = [
        "b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "tr",
    ];
    const VOWELS: [&'static str; 5] = ["a", "e", "i", "o", "u"];
    const CODAS: [&'static str; 6] = ["", "", "n", "r", "l", "k"];

    fn next(&mut self) -> String {
        loop {
            let syllables = self.rng.random_range(2..=3);
            let mut w = String::new();
            for _ in 0..syllables {
                w.push_str(Self::ONSETS.choose(&mut self.rng).unwrap());
                w.push_str(Self::VOWELS.choose(&mut self.rng).unwrap());
            }
            w.push_str(Self::CODAS.choose(&mut self.rng).unwrap());
            let stem = porter::stem(&w);
            if w.len() >= 4 && !self.config.is_stopword(&w) && stem.len() >= 3 && self.stems.insert(stem) {
                return w;
            }
        }
    }

    fn take(&mut self, n: usize) -> Vec<String> {
        (0..n).map(|_| self.next()).collect()
    }
}

fn capitalize(w: &str) -> String {
    let mut c = w.chars();
    c.next()
        .map(|f| f.to_uppercase().collect::<String>() + c.as_str())
        .unwrap_or_default()
}

/// Stopwords used to glue headline fragments.
const GLUE: [&str; 8] = ["over", "after", "as", "with", "for", "into", "about", "against"];

fn pick<'a, R: Rng>(rng: &mut R, items: &'a [String], n: usize) -> Vec<&'a String> {
    items.choose_multiple(rng, n).collect()
}

/// Between `lo` and `hi` distinct items, cloned.
fn pick_between<R: Rng>(rng: &mut R, items: &[String], lo: usize, hi: usize) -> Vec<String> {
    let n = rng.random_range(lo..=hi);
    pick(rng, items, n).into_iter().cloned().collect()
}

/// Zipf-like weights so a few spam tags dominate.
fn zipf_index<R: Rng>(rng: &mut R, n: usize) -> usize {
    let total: f64 = (1..=n).map(|r| 1.0 / r as f64).sum();
    let mut x = rng.random::<f64>() * total;
    for r in 1..=n {
        x -= 1.0 / r as f64;
        if x <= 0.0 {
            return r - 1;
        }
    }
    n - 1
}

struct Draft {
    time: Timestamp,
    text: String,
}

struct ArticleMeta {
    topic: usize,
    entity: String,
    headline_terms: Vec<String>,
}

pub fn generate(config: &SynthConfig) -> Result<SynthCorpus> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut words = WordSource {
        rng: ChaCha8Rng::seed_from_u64(config.seed ^ 0x5eed_0fc0_ffee),
        stems: HashSet::new(),
        config: TokenizerConfig::default(),
    };

    let general_tags: Vec<String> = words.take(config.n_general_tags);
    let noise_tags: Vec<String> = words.take(config.n_noise_tags);
    let trending_tags: Vec<String> = words.take(config.n_trending_tags);
    let generic: Vec<String> = words.take(config.n_generic_terms);
    let mut topics = Vec::with_capacity(config.n_topics);
    for t in 0..config.n_topics {
        let n_entities = rng.random_range(1..=2);
        let entities = (0..n_entities)
            .map(|_| format!("{} {}", capitalize(&words.next()), capitalize(&words.next())))
            .collect();
        topics.push(Topic {
            name: words.next(),
            core_terms: words.take(CORE_TERMS),
            extended_terms: words.take(EXTENDED_TERMS),
            entities,
            specific_tags: words.take(config.specific_tags()),
            general_tag: config
                .uses_general()
                .then(|| general_tags[t % general_tags.len()].clone()),
        });
    }
    let used = config.n_topics * (CORE_TERMS + EXTENDED_TERMS);
    let background = words.take(config.vocab_size - used);

    // Articles: topics round-robin, days alternating within each topic.
    let mut articles = Vec::with_capacity(config.n_articles);
    let mut metas = Vec::with_capacity(config.n_articles);
    for i in 0..config.n_articles {
        let t = i % config.n_topics;
        let topic = &topics[t];
        let day = (i / config.n_topics) % config.n_days;
        let published_at = config.start + day as i64 * DAY + rng.random_range(6 * 3600..18 * 3600);
        let entity = topic.entities.choose(&mut rng).unwrap().clone();
        let core = pick(&mut rng, &topic.core_terms, 6);
        let ext = pick(&mut rng, &topic.extended_terms, 2);
        let glue = |rng: &mut ChaCha8Rng| *GLUE.choose(rng).unwrap();
        let headline = if rng.random_bool(0.5) {
            format!(
                "{entity} {} {} {} {} {}",
                core[0],
                core[1],
                glue(&mut rng),
                core[2],
                core[3]
            )
        } else {
            format!(
                "{} {} {} {entity} {} {}",
                capitalize(core[0]),
                core[1],
                glue(&mut rng),
                core[2],
                core[3]
            )
        };
        let everyday = pick(&mut rng, &generic, 2);
        let subheadline = format!(
            "The {} {} {} {} {} {} and {}",
            everyday[0],
            core[4],
            glue(&mut rng),
            core[5],
            everyday[1],
            ext[0],
            ext[1]
        );
        let body = article_body(&mut rng, topic, &core, &background, &generic, &entity);
        let slug: String = headline.to_lowercase().split_whitespace().collect::<Vec<_>>().join("-");
        let id = format!("https://news.example.org/{}/{slug}-1.{}", topic.name, 1_000_000 + i);
        articles.push(Article::new(id, published_at, headline, subheadline, body)?);
        metas.push(ArticleMeta {
            topic: t,
            entity,
            headline_terms: core.into_iter().cloned().collect(),
        });
    }

    let mut by_topic: Vec<Vec<usize>> = vec![Vec::new(); config.n_topics];
    for (i, m) in metas.iter().enumerate() {
        by_topic[m.topic].push(i);
    }

    let mut drafts: Vec<Draft> = Vec::new();
    let tweet_time = |rng: &mut ChaCha8Rng, a: &Article| {
        let day_end = (a.published_at.div_euclid(DAY) + 1) * DAY;
        let latest = (a.published_at + 5 * 3600).min(day_end - 60);
        rng.random_range(a.published_at + 35 * 60..=latest)
    };
    for (t, members) in by_topic.iter().enumerate() {
        if members.is_empty() {
            continue;
        }
        let topic = &topics[t];
        let n_noise = (config.tweets_per_topic as f64 * config.noise_tweet_fraction).round() as usize;
        let n_chatter = (n_noise as f64 * config.chatter_fraction).round() as usize;
        for k in 0..config.tweets_per_topic {
            let a = *members.choose(&mut rng).unwrap();
            let time = tweet_time(&mut rng, &articles[a]);
            let text = if k < n_chatter {
                chatter_tweet(&mut rng, &generic, &background, &trending_tags)
            } else if k < n_noise {
                noise_tweet(&mut rng, &metas[a], &background, &noise_tags)
            } else {
                relevant_tweet(&mut rng, topic, &metas[a], &background)
            };
            drafts.push(Draft { time, text });
        }
    }

    let n_echo = (config.n_articles as f64 * config.url_echo_fraction).round() as usize;
    let mut echo: Vec<usize> = (0..config.n_articles).collect();
    echo.shuffle(&mut rng);
    echo.truncate(n_echo);
    echo.sort_unstable();
    for a in echo {
        let topic = &topics[metas[a].topic];
        for _ in 0..config.url_echo_tweets {
            let time = tweet_time(&mut rng, &articles[a]);
            let mut text = format!("{} {}", articles[a].headline, articles[a].id);
            for tag in &topic.specific_tags {
                text.push_str(&format!(" #{tag}"));
            }
            if let Some(g) = topic.general_tag.as_ref().filter(|_| rng.random_bool(0.3)) {
                text.push_str(&format!(" #{g}"));
            }
            drafts.push(Draft { time, text });
        }
    }

    // Stable sort keeps generation order among equal timestamps.
    drafts.sort_by_key(|d| d.time);
    let tweets = drafts
        .into_iter()
        .enumerate()
        .map(|(i, d)| {
            Tweet::from_raw(
                format!("{}", 4_000_000_000u64 + i as u64),
                d.time,
                d.text,
                DEFAULT_MAX_TWEET_LEN,
            )
        })
        .collect::<Result<Vec<_>>>()?;

    let mut truth = BTreeMap::new();
    let mut article_topic = BTreeMap::new();
    for (a, m) in articles.iter().zip(&metas) {
        article_topic.insert(a.id.clone(), m.topic);
        let topic = &topics[m.topic];
        for tag in &topic.specific_tags {
            truth.insert((a.id.clone(), tag.clone()), 2);
        }
        if let Some(g) = &topic.general_tag {
            truth.insert((a.id.clone(), g.clone()), 1);
        }
    }

    Ok(SynthCorpus {
        articles,
        tweets,
        topics,
        article_topic,
        truth,
        noise_tags,
    })
}

fn article_body(
    rng: &mut ChaCha8Rng,
    topic: &Topic,
    headline_terms: &[&String],
    background: &[String],
    generic: &[String],
    entity: &str,
) -> String {
    let mut sentences = Vec::new();
    for _ in 0..rng.random_range(5..9) {
        let mut s: Vec<String> = Vec::new();
        for _ in 0..rng.random_range(8..14) {
            let r: f64 = rng.random();
            let w = if r < 0.3 {
                (*headline_terms.choose(rng).unwrap()).clone()
            } else if r < 0.5 {
                topic.core_terms.choose(rng).unwrap().clone()
            } else if r < 0.75 {
                topic.extended_terms.choose(rng).unwrap().clone()
            } else if r < 0.82 {
                GLUE.choose(rng).unwrap().to_string()
            } else if r < 0.87 {
                generic.choose(rng).unwrap().clone()
            } else {
                background.choose(rng).unwrap().clone()
            };
            s.push(w);
        }
        if rng.random_bool(0.3) {
            let at = rng.random_range(0..s.len());
            s.insert(at, entity.to_string());
        }
        s[0] = capitalize(&s[0]);
        sentences.push(s.join(" ") + ".");
    }
    sentences.join(" ")
}

fn relevant_tweet(rng: &mut ChaCha8Rng, topic: &Topic, meta: &ArticleMeta, background: &[String]) -> String {
    let mut words: Vec<String> = Vec::new();
    words.extend(pick(rng, &meta.headline_terms, 2).into_iter().cloned());
    words.extend(pick_between(rng, &topic.core_terms, 1, 2));
    words.extend(pick_between(rng, &topic.extended_terms, 1, 3));
    words.extend(pick_between(rng, background, 1, 2));
    words.shuffle(rng);
    if rng.random_bool(0.5) {
        let at = rng.random_range(0..=words.len());
        words.insert(at, meta.entity.clone());
    }
    let mut tags: Vec<&String> = topic.specific_tags.iter().filter(|_| rng.random_bool(0.55)).collect();
    if tags.is_empty() {
        tags.push(topic.specific_tags.choose(rng).unwrap());
    }
    if let Some(g) = topic.general_tag.as_ref().filter(|_| rng.random_bool(0.3)) {
        tags.push(g);
    }
    for tag in tags {
        let at = rng.random_range(words.len() / 2..=words.len());
        words.insert(at, format!("#{tag}"));
    }
    words.join(" ")
}

fn noise_tweet(rng: &mut ChaCha8Rng, meta: &ArticleMeta, background: &[String], noise_tags: &[String]) -> String {
    let mut words: Vec<String> = pick_between(rng, background, 5, 7);
    if rng.random_bool(0.5) {
        let at = rng.random_range(0..=words.len());
        words.insert(at, meta.entity.clone());
    } else {
        words.extend(pick(rng, &meta.headline_terms, 2).into_iter().cloned());
        words.shuffle(rng);
    }
    let n_tags = if rng.random_bool(0.2) { 2 } else { 1 };
    let mut tags = BTreeSet::new();
    while tags.len() < n_tags.min(noise_tags.len()) {
        tags.insert(zipf_index(rng, noise_tags.len()));
    }
    for i in tags {
        words.push(format!("#{}", noise_tags[i]));
    }
    words.join(" ")
}

/// Off-topic chat about a trending subject: everyday words, background words
/// and a trending hashtag. It reaches a bag when it happens to contain both
/// everyday words of a headline.
fn chatter_tweet(rng: &mut ChaCha8Rng, generic: &[String], background: &[String], trending: &[String]) -> String {
    let mut words = pick_between(rng, generic, 2, 4);
    words.extend(pick_between(rng, background, 3, 5));
    words.shuffle(rng);
    words.push(format!("#{}", trending[zipf_index(rng, trending.len())]));
    words.join(" ")
}

/// Grades from a simulated annotator: the true grade, replaced by a different
/// random grade with probability `error_rate`.
pub fn simulate_annotations(
    corpus: &SynthCorpus,
    pairs: &[(String, String)],
    annotator_id: &str,
    error_rate: f64,
    seed: u64,
) -> Vec<AnnotationRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    pairs
        .iter()
        .map(|(a, h)| {
            let truth = corpus.grade(a, h);
            let grade = if rng.random_bool(error_rate.clamp(0.0, 1.0)) {
                let others: Vec<u8> = (0..=2).filter(|&g| g != truth).collect();
                *others.choose(&mut rng).unwrap()
            } else {
                truth
            };
            AnnotationRecord {
                article_id: a.clone(),
                hashtag: h.clone(),
                annotator_id: annotator_id.into(),
                grade,
            }
        })
        .collect()
}
