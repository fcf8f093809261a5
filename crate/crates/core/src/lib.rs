//! Hashtag recommendation for news articles from a replayed tweet stream.
//!
//! Articles contribute keyword predicates to a capped pool; tweets matching a
//! predicate join the article's tweet-bag; tf.idf profiles of the bag's
//! hashtags yield four features per (article, hashtag) pair, which a logistic
//! model scores and ranks.

pub mod config;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod filtergen;
pub mod matcher;
pub mod pipeline;
pub mod ranker;
pub mod synthgen;
pub mod textproc;

pub use config::RunConfig;
pub use corpus::{Article, KeywordPhrase, State, StreamWindow, Timestamp, Tweet};
pub use error::{Error, Result};
pub use filtergen::{FilterPredicate, PredicatePool};
pub use matcher::{ArticleProfile, HashtagProfile, PredicateIndex, TweetBag};
pub use pipeline::{PipelineConfig, WindowRun};
pub use ranker::{FeatureVector, LogisticModel, ScoredPair, TrainConfig};
pub use synthgen::{SynthConfig, SynthCorpus};
