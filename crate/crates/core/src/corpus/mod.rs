//! Domain data model, file replay of the article and tweet streams, and
//! persistence of derived state.

mod io;
mod replay;
mod state;

pub use io::{
    format_timestamp, load_articles, load_tweets, parse_timestamp, write_articles, write_tweets, TweetReader,
    TweetReaderOptions,
};
pub use replay::{daily_windows, replay, replay_filter};
pub use state::{load_state, save_state, State, STATE_FORMAT_VERSION};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Seconds since the Unix epoch, UTC.
pub type Timestamp = i64;

/// Default upper bound on tweet length, in code points.
pub const DEFAULT_MAX_TWEET_LEN: usize = 280;

/// Anything carrying a stream timestamp.
pub trait Timestamped {
    fn timestamp(&self) -> Timestamp;
}

/// One news item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Article {
    /// Canonical URL of the article.
    pub id: String,
    pub published_at: Timestamp,
    pub headline: String,
    pub subheadline: String,
    pub body: String,
    /// Filled by keyword extraction.
    #[serde(default)]
    pub keywords: Vec<KeywordPhrase>,
}

impl Article {
    pub fn new(
        id: impl Into<String>,
        published_at: Timestamp,
        headline: impl Into<String>,
        subheadline: impl Into<String>,
        body: impl Into<String>,
    ) -> Result<Self> {
        let article = Article {
            id: id.into(),
            published_at,
            headline: headline.into(),
            subheadline: subheadline.into(),
            body: body.into(),
            keywords: Vec::new(),
        };
        article.validate()?;
        Ok(article)
    }

    pub fn validate(&self) -> Result<()> {
        if self.id.is_empty() {
            return Err(Error::Validation("article id is empty".into()));
        }
        if self.headline.trim().is_empty() {
            return Err(Error::Validation(format!("article {} has an empty headline", self.id)));
        }
        Ok(())
    }
}

impl Timestamped for Article {
    fn timestamp(&self) -> Timestamp {
        self.published_at
    }
}

/// One micro-post.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tweet {
    pub id: String,
    pub created_at: Timestamp,
    pub raw_text: String,
    /// Normalized, stemmed terms. Filled by [`crate::textproc::normalize_tweet`].
    #[serde(default)]
    pub tokens: Vec<String>,
    /// Lowercase, sigil-free, in order of first appearance.
    pub hashtags: Vec<String>,
    pub urls: Vec<String>,
}

impl Tweet {
    /// Build a tweet from raw text, deriving hashtags and URLs.
    pub fn from_raw(
        id: impl Into<String>,
        created_at: Timestamp,
        raw_text: impl Into<String>,
        max_len: usize,
    ) -> Result<Self> {
        let id = id.into();
        let raw_text = raw_text.into();
        if id.is_empty() {
            return Err(Error::Validation("tweet id is empty".into()));
        }
        let len = raw_text.chars().count();
        if len > max_len {
            return Err(Error::Validation(format!(
                "tweet {id} has {len} code points, limit is {max_len}"
            )));
        }
        Ok(Tweet {
            hashtags: extract_hashtags(&raw_text),
            urls: extract_urls(&raw_text),
            id,
            created_at,
            raw_text,
            tokens: Vec::new(),
        })
    }

    pub fn has_hashtag(&self, tag: &str) -> bool {
        self.hashtags.iter().any(|h| h == tag)
    }
}

impl Timestamped for Tweet {
    fn timestamp(&self) -> Timestamp {
        self.created_at
    }
}

/// An extracted article keyword: a single term or a frozen named-entity phrase.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct KeywordPhrase {
    pub terms: Vec<String>,
    /// Named entity, matched as a contiguous unit.
    pub frozen: bool,
}

impl KeywordPhrase {
    pub fn term(term: impl Into<String>) -> Self {
        KeywordPhrase {
            terms: vec![term.into()],
            frozen: false,
        }
    }

    pub fn phrase<S: Into<String>>(terms: impl IntoIterator<Item = S>) -> Self {
        KeywordPhrase {
            terms: terms.into_iter().map(Into::into).collect(),
            frozen: true,
        }
    }

    pub fn text(&self) -> String {
        self.terms.join(" ")
    }

    pub fn is_valid(&self) -> bool {
        !self.terms.is_empty() && (self.frozen || self.terms.len() == 1)
    }
}

/// A half-open processing period `[start, end)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamWindow {
    pub start: Timestamp,
    pub end: Timestamp,
    pub label: String,
}

impl StreamWindow {
    pub fn new(start: Timestamp, end: Timestamp, label: impl Into<String>) -> Result<Self> {
        if start >= end {
            return Err(Error::Validation(format!(
                "window start {start} is not before end {end}"
            )));
        }
        Ok(StreamWindow {
            start,
            end,
            label: label.into(),
        })
    }

    /// The UTC calendar day starting at `start`.
    pub fn day(start: Timestamp) -> Self {
        let start = start.div_euclid(86_400) * 86_400;
        StreamWindow {
            start,
            end: start + 86_400,
            label: format_timestamp(start)[..10].to_string(),
        }
    }

    /// Parse `YYYY-MM-DD` (one UTC day) or `START..END` (ISO-8601 instants).
    pub fn parse(spec: &str) -> Result<Self> {
        if let Some((start, end)) = spec.split_once("..") {
            let start = parse_timestamp(start.trim()).map_err(|e| Error::Config(format!("window start: {e}")))?;
            let end = parse_timestamp(end.trim()).map_err(|e| Error::Config(format!("window end: {e}")))?;
            return StreamWindow::new(start, end, spec).map_err(|e| Error::Config(e.to_string()));
        }
        let day = chrono::NaiveDate::parse_from_str(spec.trim(), "%Y-%m-%d")
            .map_err(|e| Error::Config(format!("bad window {spec:?}: {e}")))?;
        let start = day.and_hms_opt(0, 0, 0).expect("midnight exists").and_utc().timestamp();
        Ok(StreamWindow::day(start))
    }

    pub fn contains(&self, t: Timestamp) -> bool {
        self.start <= t && t < self.end
    }
}

/// Hashtags of `text`: maximal runs of word characters after `#`, lowercased.
pub fn extract_hashtags(text: &str) -> Vec<String> {
    let mut tags: Vec<String> = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        if c != '#' {
            continue;
        }
        let mut tag = String::new();
        while let Some(&next) = chars.peek() {
            if next.is_alphanumeric() || next == '_' {
                tag.extend(next.to_lowercase());
                chars.next();
            } else {
                break;
            }
        }
        if !tag.is_empty() && !tags.contains(&tag) {
            tags.push(tag);
        }
    }
    tags
}

/// Substrings starting `http://` or `https://`, up to the next whitespace.
pub fn extract_urls(text: &str) -> Vec<String> {
    url_spans(text)
        .into_iter()
        .map(|(start, end)| text[start..end].to_string())
        .collect()
}

/// Byte ranges of URLs in `text`.
pub(crate) fn url_spans(text: &str) -> Vec<(usize, usize)> {
    let mut spans = Vec::new();
    let mut from = 0;
    while from < text.len() {
        let rest = &text[from..];
        let next = [rest.find("http://"), rest.find("https://")]
            .into_iter()
            .flatten()
            .min();
        let Some(offset) = next else { break };
        let start = from + offset;
        let end = text[start..]
            .find(char::is_whitespace)
            .map_or(text.len(), |e| start + e);
        spans.push((start, end));
        from = end;
    }
    spans
}
