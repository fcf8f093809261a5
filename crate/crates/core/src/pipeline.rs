//! One window of the streaming pipeline: keyword extraction, predicate pool
//! refreshes, tweet matching, profiles and pair features.

use std::collections::BTreeSet;

use crate::corpus::{replay_filter, Article, StreamWindow, Timestamp, Tweet};
use crate::error::{Error, Result};
use crate::filtergen::{
    build_predicates, ArticlePredicates, PredicatePool, Refresher, DEFAULT_POOL_CAP, DEFAULT_REFRESH_PERIOD,
};
use crate::matcher::{
    build_global_profiles, build_local_profiles, ArticleProfile, ArticleProfiler, BagAssignment, BagBuilder,
    HashtagProfile, PredicateIndex, TweetBag,
};
use crate::ranker::{featurize, GlobalProfiles, ScoredPair};
use crate::textproc::{extract_keywords, normalize_tweet, TokenizerConfig};

pub const DEFAULT_MAX_KEYWORDS: usize = 10;

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub cap: usize,
    pub refresh_period: i64,
    pub max_keywords: usize,
    pub tokenizer: TokenizerConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            cap: DEFAULT_POOL_CAP,
            refresh_period: DEFAULT_REFRESH_PERIOD,
            max_keywords: DEFAULT_MAX_KEYWORDS,
            tokenizer: TokenizerConfig::default(),
        }
    }
}

/// Everything one window produces.
#[derive(Debug, Clone)]
pub struct WindowRun {
    pub window: StreamWindow,
    /// Articles published inside the window, by id.
    pub article_ids: Vec<String>,
    pub tweets_in_window: usize,
    pub refreshes: usize,
    /// The last pool snapshot used for matching.
    pub final_pool: PredicatePool,
    pub assignments: Vec<BagAssignment>,
    pub bags: Vec<TweetBag>,
    pub local_profiles: Vec<HashtagProfile>,
    pub global_profiles: Vec<HashtagProfile>,
    pub article_profiles: Vec<ArticleProfile>,
    /// Candidate pairs with features, unscored.
    pub pairs: Vec<ScoredPair>,
    pub diagnostics: Vec<String>,
}

/// Fill in missing keywords and sort articles by publication time, then id.
pub fn prepare_articles(articles: &mut [Article], config: &PipelineConfig) -> Result<()> {
    for a in articles.iter_mut() {
        a.validate()?;
        if a.keywords.is_empty() {
            a.keywords = extract_keywords(&a.headline, &a.subheadline, config.max_keywords, &config.tokenizer)
                .map_err(|e| e.in_stage("extract"))?;
        }
    }
    articles.sort_by(|a, b| a.published_at.cmp(&b.published_at).then_with(|| a.id.cmp(&b.id)));
    let mut ids = BTreeSet::new();
    for a in articles.iter() {
        if !ids.insert(a.id.as_str()) {
            return Err(Error::Integrity(format!("duplicate article id {}", a.id)).in_stage("extract"));
        }
    }
    Ok(())
}

/// Normalize tweet text into tokens and sort by time, keeping file order for ties.
pub fn prepare_tweets(tweets: &mut [Tweet], config: &PipelineConfig) {
    for t in tweets.iter_mut() {
        t.tokens = normalize_tweet(&t.raw_text, &config.tokenizer);
    }
    tweets.sort_by_key(|t| t.created_at);
}

/// Run one window over prepared articles and tweets.
///
/// The pool is rebuilt at refresh ticks (multiples of the refresh period);
/// an article joins at the first tick at or after its publication. Every
/// article published since the start of the stream competes for the pool,
/// but only articles published inside the window get bags.
pub fn run_window(
    articles: &[Article],
    tweets: &[Tweet],
    window: &StreamWindow,
    config: &PipelineConfig,
) -> Result<WindowRun> {
    let mut diagnostics = Vec::new();
    let mut refresher = Refresher::new(config.cap, config.refresh_period)?;
    let period = config.refresh_period;
    let window_articles: Vec<&Article> = articles.iter().filter(|a| window.contains(a.published_at)).collect();
    let article_ids: Vec<String> = window_articles.iter().map(|a| a.id.clone()).collect();
    let window_tweets = replay_filter(tweets, window);

    let mut next_article = 0;
    let mut index = PredicateIndex::default();
    let mut refreshes = 0;
    let mut bags = BagBuilder::new(article_ids.iter().map(String::as_str));
    let mut advance = |tick: Timestamp,
                       next_article: &mut usize,
                       index: &mut PredicateIndex,
                       diagnostics: &mut Vec<String>|
     -> Result<()> {
        let mut arrived: Vec<ArticlePredicates> = Vec::new();
        while *next_article < articles.len() && articles[*next_article].published_at <= tick {
            let a = &articles[*next_article];
            *next_article += 1;
            if a.keywords.is_empty() {
                diagnostics.push(format!("article {} has no keywords and cannot be matched", a.id));
                continue;
            }
            let preds = build_predicates(&a.keywords, &a.id).map_err(|e| e.in_stage("pool"))?;
            if let Some(t) = &preds.dropped_singleton {
                diagnostics.push(format!("article {} has a single keyword {t:?}, no pair formed", a.id));
            }
            arrived.push(preds);
        }
        if !arrived.is_empty() && refresher.refresh(arrived, tick).map_err(|e| e.in_stage("pool"))? {
            *index = PredicateIndex::build(refresher.pool(), &config.tokenizer);
            refreshes += 1;
        }
        Ok(())
    };

    let mut last_tick: Option<Timestamp> = None;
    for tweet in window_tweets {
        let tick = tweet.created_at.div_euclid(period) * period;
        if last_tick != Some(tick) {
            advance(tick, &mut next_article, &mut index, &mut diagnostics)?;
            last_tick = Some(tick);
        }
        bags.add(tweet, &index);
    }
    let final_pool = refresher.pool().clone();
    let (bags, assignments) = bags.finish();

    let local_profiles = build_local_profiles(&bags, window_tweets);
    let global_profiles = build_global_profiles(window_tweets, &window.label);
    let corpus: Vec<Article> = window_articles.iter().map(|a| (*a).clone()).collect();
    let profiler = ArticleProfiler::new(&corpus, &config.tokenizer);
    let article_profiles: Vec<ArticleProfile> = corpus.iter().map(|a| profiler.profile(a)).collect();
    let globals = GlobalProfiles::new(&global_profiles);
    let (pairs, missing) =
        featurize(&article_profiles, &local_profiles, &globals).map_err(|e| e.in_stage("featurize"))?;
    for (a, h) in missing {
        diagnostics.push(format!(
            "no global profile for #{h} (article {a}); global features set to 0"
        ));
    }

    Ok(WindowRun {
        window: window.clone(),
        article_ids,
        tweets_in_window: window_tweets.len(),
        refreshes,
        final_pool,
        assignments,
        bags,
        local_profiles,
        global_profiles,
        article_profiles,
        pairs,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthgen::{generate, SynthConfig, DEFAULT_START};

    fn corpus() -> (Vec<Article>, Vec<Tweet>, crate::synthgen::SynthCorpus) {
        let c = generate(&SynthConfig {
            n_articles: 40,
            n_topics: 4,
            tweets_per_topic: 300,
            vocab_size: 400,
            noise_tweet_fraction: 0.0,
            ..Default::default()
        })
        .unwrap();
        let config = PipelineConfig::default();
        let mut articles = c.articles.clone();
        prepare_articles(&mut articles, &config).unwrap();
        let mut tweets = c.tweets.clone();
        prepare_tweets(&mut tweets, &config);
        (articles, tweets, c)
    }

    #[test]
    fn planted_pairs_become_candidates_without_noise() {
        let (articles, tweets, c) = corpus();
        let config = PipelineConfig::default();
        for day in 0..2 {
            let run = run_window(
                &articles,
                &tweets,
                &StreamWindow::day(DEFAULT_START + day * 86_400),
                &config,
            )
            .unwrap();
            let candidates: BTreeSet<(String, String)> = run
                .pairs
                .iter()
                .map(|p| (p.article_id.clone(), p.hashtag.clone()))
                .collect();
            for id in &run.article_ids {
                let topic = &c.topics[c.article_topic[id]];
                for tag in &topic.specific_tags {
                    assert!(candidates.contains(&(id.clone(), tag.clone())), "{id} #{tag}");
                }
            }
            assert!(run
                .pairs
                .iter()
                .all(|p| p.features.values().iter().all(|v| (0.0..=1.0).contains(v))));
            assert!(run.refreshes >= 1);
        }
    }

    #[test]
    fn empty_tweet_stream() {
        let (articles, _, _) = corpus();
        let run = run_window(
            &articles,
            &[],
            &StreamWindow::day(DEFAULT_START),
            &PipelineConfig::default(),
        )
        .unwrap();
        assert!(run.pairs.is_empty());
        assert!(run.bags.iter().all(|b| b.tweet_ids.is_empty()));
    }

    #[test]
    fn articles_wait_for_the_next_tick() {
        let config = PipelineConfig::default();
        let mut articles = vec![Article::new("a", 1000, "Enda Kenny seanad vote", "", "").unwrap()];
        prepare_articles(&mut articles, &config).unwrap();
        let mut tweets = vec![
            Tweet::from_raw("1", 1500, "Enda Kenny #seanad", 280).unwrap(),
            Tweet::from_raw("2", 1800, "Enda Kenny #seanad", 280).unwrap(),
        ];
        prepare_tweets(&mut tweets, &config);
        let window = StreamWindow::new(0, 86_400, "d").unwrap();
        let run = run_window(&articles, &tweets, &window, &config).unwrap();
        assert_eq!(run.bags[0].tweet_ids, vec!["2"]);
    }

    #[test]
    fn duplicate_article_ids_are_rejected() {
        let mut articles = vec![
            Article::new("a", 0, "One headline", "", "").unwrap(),
            Article::new("a", 5, "Other headline", "", "").unwrap(),
        ];
        let err = prepare_articles(&mut articles, &PipelineConfig::default()).unwrap_err();
        assert!(matches!(err.root(), Error::Integrity(_)));
    }
}
