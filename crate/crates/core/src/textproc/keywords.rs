use std::collections::HashMap;

use super::{fold_token, tokenize, TokenizerConfig};
use crate::corpus::KeywordPhrase;
use crate::error::{Error, Result};

struct Token {
    lower: String,
    capitalized: bool,
    stopword: bool,
    possessive: bool,
}

/// Sentences of `text`, split after `.`, `!` or `?` followed by whitespace.
fn sentences(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if matches!(c, '.' | '!' | '?') && chars.peek().is_none_or(|&(_, n)| n.is_whitespace()) {
            out.push(&text[start..i + c.len_utf8()]);
            start = i + c.len_utf8();
        }
    }
    out.push(&text[start..]);
    out.retain(|s| !s.trim().is_empty());
    out
}

fn analyse(sentence: &str, config: &TokenizerConfig) -> Vec<Token> {
    tokenize(sentence)
        .into_iter()
        .map(|raw| {
            let lower = fold_token(raw);
            let possessive = raw.len() > 2 && {
                let l = raw.to_lowercase();
                l.ends_with("'s") || l.ends_with("\u{2019}s")
            };
            Token {
                capitalized: raw.chars().next().is_some_and(char::is_uppercase),
                stopword: config.is_stopword(&lower),
                possessive,
                lower,
            }
        })
        .collect()
}

/// Article keywords from the headline and sub-headline only.
///
/// Named entities are runs of capitalized non-stopword tokens: two or more
/// anywhere, ending after a possessive. They become frozen phrases. A single
/// capitalized token (sentence-initial or not) is treated like any other
/// content word. Remaining non-stopword tokens of at least `min_keyword_len`
/// characters, or whitelisted acronyms, become single terms.
///
/// Over `max_phrases`, frozen phrases are kept first, then single terms by
/// descending frequency; ties go to the lexicographically smaller text.
pub fn extract_keywords(
    headline: &str,
    subheadline: &str,
    max_phrases: usize,
    config: &TokenizerConfig,
) -> Result<Vec<KeywordPhrase>> {
    if headline.trim().is_empty() {
        return Err(Error::Precondition("headline is empty".into()));
    }
    let mut frozen: HashMap<Vec<String>, usize> = HashMap::new();
    let mut singles: HashMap<String, usize> = HashMap::new();

    for sentence in sentences(headline).into_iter().chain(sentences(subheadline)) {
        let tokens = analyse(sentence, config);
        let mut i = 0;
        while i < tokens.len() {
            let mut end = i;
            while end < tokens.len() && tokens[end].capitalized && !tokens[end].stopword {
                end += 1;
                if tokens[end - 1].possessive {
                    break;
                }
            }
            if end - i >= 2 {
                let terms: Vec<String> = tokens[i..end].iter().map(|t| t.lower.clone()).collect();
                *frozen.entry(terms).or_default() += 1;
                i = end;
                continue;
            }
            let t = &tokens[i];
            let long_enough = t.lower.chars().count() >= config.min_keyword_len;
            if !t.stopword && (long_enough || config.acronyms.contains(&t.lower)) {
                *singles.entry(t.lower.clone()).or_default() += 1;
            }
            i += 1;
        }
    }

    let mut frozen: Vec<(Vec<String>, usize)> = frozen.into_iter().collect();
    frozen.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let mut singles: Vec<(String, usize)> = singles.into_iter().collect();
    singles.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));

    Ok(frozen
        .into_iter()
        .map(|(terms, _)| KeywordPhrase { terms, frozen: true })
        .chain(singles.into_iter().map(|(t, _)| KeywordPhrase::term(t)))
        .take(max_phrases)
        .collect())
}
