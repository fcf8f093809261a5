//! Shared fixtures for the benchmarks.

use newstag::pipeline::{prepare_articles, prepare_tweets};
use newstag::synthgen::generate;
use newstag::{Article, PipelineConfig, StreamWindow, SynthConfig, Tweet};

/// A prepared synthetic corpus and the window of its second day.
pub struct Fixture {
    pub articles: Vec<Article>,
    pub tweets: Vec<Tweet>,
    pub window: StreamWindow,
    pub config: PipelineConfig,
}

pub fn fixture(n_articles: usize, tweets_per_topic: usize) -> Fixture {
    let synth = SynthConfig {
        n_articles,
        tweets_per_topic,
        ..SynthConfig::default()
    };
    let corpus = generate(&synth).expect("valid synthetic config");
    let config = PipelineConfig::default();
    let mut articles = corpus.articles;
    let mut tweets = corpus.tweets;
    prepare_articles(&mut articles, &config).expect("synthetic articles are valid");
    prepare_tweets(&mut tweets, &config);
    Fixture {
        articles,
        tweets,
        window: StreamWindow::day(synth.start + 86_400),
        config,
    }
}
