//! Tokenization, tweet normalization, stemming and heuristic keyword
//! extraction from article headlines.

mod keywords;
pub mod porter;

pub use keywords::extract_keywords;

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::url_spans;
use crate::error::{Error, Result};

const DEFAULT_STOPWORDS: &str = include_str!("../../data/stopwords.txt");
const DEFAULT_ACRONYMS: &str = include_str!("../../data/acronyms.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StemmerKind {
    #[default]
    Porter,
    /// Surface forms, no stemming.
    None,
}

impl StemmerKind {
    pub fn stem(self, word: &str) -> String {
        match self {
            StemmerKind::Porter => porter::stem(word),
            StemmerKind::None => word.to_string(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TokenizerConfig {
    pub stopwords: HashSet<String>,
    /// Short terms kept as article keywords despite `min_keyword_len`.
    pub acronyms: HashSet<String>,
    pub min_token_len: usize,
    pub min_keyword_len: usize,
    pub stemmer: StemmerKind,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        TokenizerConfig {
            stopwords: parse_term_list(DEFAULT_STOPWORDS),
            acronyms: parse_term_list(DEFAULT_ACRONYMS),
            min_token_len: 2,
            min_keyword_len: 3,
            stemmer: StemmerKind::Porter,
        }
    }
}

/// On-disk tokenizer settings. Paths are relative to the settings file.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TokenizerSettings {
    pub stopwords: Option<String>,
    pub acronyms: Option<String>,
    pub min_token_len: Option<usize>,
    pub min_keyword_len: Option<usize>,
    pub stemmer: Option<StemmerKind>,
}

impl TokenizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.stopwords.is_empty() {
            return Err(Error::Config("stopword list is empty".into()));
        }
        if self.min_token_len == 0 {
            return Err(Error::Config("min_token_len must be at least 1".into()));
        }
        Ok(())
    }

    /// Load a TOML settings file, falling back to the built-in lists.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let settings: TokenizerSettings =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let mut config = TokenizerConfig::default();
        if let Some(p) = settings.stopwords {
            config.stopwords = load_term_list(base.join(p))?;
        }
        if let Some(p) = settings.acronyms {
            config.acronyms = load_term_list(base.join(p))?;
        }
        if let Some(n) = settings.min_token_len {
            config.min_token_len = n;
        }
        if let Some(n) = settings.min_keyword_len {
            config.min_keyword_len = n;
        }
        if let Some(s) = settings.stemmer {
            config.stemmer = s;
        }
        config.validate()?;
        Ok(config)
    }

    pub fn is_stopword(&self, lower: &str) -> bool {
        self.stopwords.contains(lower)
    }
}

/// One term per line; blank lines and `#` comments ignored.
pub fn parse_term_list(text: &str) -> HashSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

pub fn load_term_list(path: impl AsRef<Path>) -> Result<HashSet<String>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_term_list(&text))
}

fn is_joiner(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}' | '-')
}

/// Split on every non-alphanumeric character except apostrophes and hyphens
/// sitting between two alphanumerics. Case is preserved.
pub fn tokenize(text: &str) -> Vec<&str> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut tokens = Vec::new();
    let mut start: Option<usize> = None;
    for (i, &(pos, c)) in chars.iter().enumerate() {
        let inside = c.is_alphanumeric()
            || (is_joiner(c) && start.is_some() && chars.get(i + 1).is_some_and(|&(_, n)| n.is_alphanumeric()));
        match (inside, start) {
            (true, None) => start = Some(pos),
            (false, Some(s)) => {
                tokens.push(&text[s..pos]);
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        tokens.push(&text[s..]);
    }
    tokens
}

/// Lowercase a token and drop a trailing possessive `'s`.
pub(crate) fn fold_token(token: &str) -> String {
    let lower = token.to_lowercase().replace('\u{2019}', "'");
    match lower.strip_suffix("'s") {
        Some(stem) if !stem.is_empty() => stem.to_string(),
        _ => lower,
    }
}

/// Blank out URLs and `@` mentions.
fn strip_urls_and_mentions(raw: &str) -> String {
    let mut text = String::with_capacity(raw.len());
    let mut last = 0;
    for (start, end) in url_spans(raw) {
        text.push_str(&raw[last..start]);
        text.push(' ');
        last = end;
    }
    text.push_str(&raw[last..]);

    let mut out = String::with_capacity(text.len());
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        if c == '@' {
            while chars.peek().is_some_and(|n| n.is_alphanumeric() || *n == '_') {
                chars.next();
            }
            out.push(' ');
        } else {
            out.push(c);
        }
    }
    out
}

/// Normalize a single token to a stemmed term, or `None` if it is filtered out.
pub fn normalize_token(token: &str, config: &TokenizerConfig) -> Option<String> {
    let lower = fold_token(token);
    if lower.contains("http") || config.is_stopword(&lower) || lower.chars().count() < config.min_token_len {
        return None;
    }
    let stemmed = config.stemmer.stem(&lower);
    if stemmed.is_empty() || config.is_stopword(&stemmed) {
        return None;
    }
    Some(stemmed)
}

/// Stemmed terms of a tweet, with URLs, mentions, punctuation and stopwords removed.
///
/// Hashtags keep their word as an ordinary term.
pub fn normalize_tweet(raw_text: &str, config: &TokenizerConfig) -> Vec<String> {
    let cleaned = strip_urls_and_mentions(raw_text);
    tokenize(&cleaned)
        .into_iter()
        .filter_map(|t| normalize_token(t, config))
        .collect()
}

/// Stemmed terms of arbitrary prose (article text), same filtering as tweets.
pub fn normalize_text(text: &str, config: &TokenizerConfig) -> Vec<String> {
    tokenize(text)
        .into_iter()
        .filter_map(|t| normalize_token(t, config))
        .collect()
}
