use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Lines, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use super::{Article, Timestamp, Tweet, DEFAULT_MAX_TWEET_LEN};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArticleRecord {
    id: String,
    published_at: String,
    headline: String,
    subheadline: String,
    body: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TweetRecord {
    id: String,
    created_at: String,
    text: String,
}

pub fn parse_timestamp(s: &str) -> std::result::Result<Timestamp, String> {
    DateTime::parse_from_rfc3339(s)
        .map(|dt| dt.with_timezone(&Utc).timestamp())
        .map_err(|e| format!("bad timestamp {s:?}: {e}"))
}

pub fn format_timestamp(t: Timestamp) -> String {
    DateTime::<Utc>::from_timestamp(t, 0)
        .unwrap_or_default()
        .to_rfc3339_opts(SecondsFormat::Secs, true)
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e))
}

/// Read an article file, one JSON record per line, sorted by publication time.
pub fn load_articles(path: impl AsRef<Path>) -> Result<Vec<Article>> {
    let path = path.as_ref();
    let mut articles = Vec::new();
    let mut seen = HashSet::new();
    for (n, line) in open(path)?.lines().enumerate() {
        let line_no = n + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: ArticleRecord =
            serde_json::from_str(&line).map_err(|e| Error::parse(path, line_no, e.to_string()))?;
        let published_at = parse_timestamp(&record.published_at).map_err(|e| Error::parse(path, line_no, e))?;
        let article = Article::new(
            record.id,
            published_at,
            record.headline,
            record.subheadline,
            record.body,
        )
        .map_err(|e| Error::parse(path, line_no, e.to_string()))?;
        if !seen.insert(article.id.clone()) {
            return Err(Error::Integrity(format!(
                "duplicate article id {:?} at {}:{line_no}",
                article.id,
                path.display()
            )));
        }
        articles.push(article);
    }
    articles.sort_by_key(|a| a.published_at);
    Ok(articles)
}

pub fn write_articles(path: impl AsRef<Path>, articles: &[Article]) -> Result<()> {
    let path = path.as_ref();
    write_lines(
        path,
        articles.iter().map(|a| ArticleRecord {
            id: a.id.clone(),
            published_at: format_timestamp(a.published_at),
            headline: a.headline.clone(),
            subheadline: a.subheadline.clone(),
            body: a.body.clone(),
        }),
    )
}

pub fn write_tweets(path: impl AsRef<Path>, tweets: &[Tweet]) -> Result<()> {
    let path = path.as_ref();
    write_lines(
        path,
        tweets.iter().map(|t| TweetRecord {
            id: t.id.clone(),
            created_at: format_timestamp(t.created_at),
            text: t.raw_text.clone(),
        }),
    )
}

fn write_lines<T: Serialize>(path: &Path, records: impl Iterator<Item = T>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for record in records {
        let line = serde_json::to_string(&record).expect("records serialize");
        writeln!(out, "{line}").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone)]
pub struct TweetReaderOptions {
    pub max_len: usize,
    /// Skip malformed records (counting them) instead of failing.
    pub permissive: bool,
}

impl Default for TweetReaderOptions {
    fn default() -> Self {
        TweetReaderOptions {
            max_len: DEFAULT_MAX_TWEET_LEN,
            permissive: false,
        }
    }
}

/// Streaming reader over a tweet file. Yields tweets in file order.
pub struct TweetReader {
    path: PathBuf,
    lines: Lines<BufReader<File>>,
    line_no: usize,
    options: TweetReaderOptions,
    skipped: usize,
    failed: bool,
}

impl TweetReader {
    pub fn open(path: impl AsRef<Path>, options: TweetReaderOptions) -> Result<Self> {
        let path = path.as_ref();
        Ok(TweetReader {
            lines: open(path)?.lines(),
            path: path.to_path_buf(),
            line_no: 0,
            options,
            skipped: 0,
            failed: false,
        })
    }

    /// Number of malformed records skipped in permissive mode.
    pub fn skipped(&self) -> usize {
        self.skipped
    }

    fn parse(&self, line: &str) -> Result<Tweet> {
        let record: TweetRecord =
            serde_json::from_str(line).map_err(|e| Error::parse(&self.path, self.line_no, e.to_string()))?;
        let created_at = parse_timestamp(&record.created_at).map_err(|e| Error::parse(&self.path, self.line_no, e))?;
        Tweet::from_raw(record.id, created_at, record.text, self.options.max_len)
            .map_err(|e| Error::parse(&self.path, self.line_no, e.to_string()))
    }
}

impl Iterator for TweetReader {
    type Item = Result<Tweet>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        loop {
            let line = match self.lines.next()? {
                Ok(line) => line,
                Err(e) => {
                    self.failed = true;
                    return Some(Err(Error::io(&self.path, e)));
                }
            };
            self.line_no += 1;
            if line.trim().is_empty() {
                continue;
            }
            match self.parse(&line) {
                Ok(tweet) => return Some(Ok(tweet)),
                Err(_) if self.options.permissive => self.skipped += 1,
                Err(e) => {
                    self.failed = true;
                    return Some(Err(e));
                }
            }
        }
    }
}

/// Open a tweet file with default options (fail fast, 280 code points).
pub fn load_tweets(path: impl AsRef<Path>) -> Result<TweetReader> {
    TweetReader::open(path, TweetReaderOptions::default())
}
