//! Conjunctive filter predicates built from article keywords, and the
//! capped, periodically refreshed predicate pool.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{KeywordPhrase, Timestamp};
use crate::error::{Error, Result};

pub const DEFAULT_POOL_CAP: usize = 400;
pub const DEFAULT_REFRESH_PERIOD: i64 = 30 * 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PredicateKind {
    Phrase,
    Pair,
}

/// A frozen phrase, or an unordered pair of distinct single keywords.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterPredicate {
    pub kind: PredicateKind,
    /// Phrase tokens, or the two pair terms in lexicographic order.
    pub terms: Vec<String>,
    pub source_articles: BTreeSet<String>,
}

impl FilterPredicate {
    pub fn phrase(terms: Vec<String>, article_id: &str) -> Self {
        FilterPredicate {
            kind: PredicateKind::Phrase,
            terms,
            source_articles: BTreeSet::from([article_id.to_string()]),
        }
    }

    /// A pair predicate; `None` if the terms are equal.
    pub fn pair(a: &str, b: &str, article_id: &str) -> Option<Self> {
        let (lo, hi) = match a.cmp(b) {
            std::cmp::Ordering::Less => (a, b),
            std::cmp::Ordering::Greater => (b, a),
            std::cmp::Ordering::Equal => return None,
        };
        Some(FilterPredicate {
            kind: PredicateKind::Pair,
            terms: vec![lo.to_string(), hi.to_string()],
            source_articles: BTreeSet::from([article_id.to_string()]),
        })
    }

    /// Identity used for deduplication.
    pub fn key(&self) -> (PredicateKind, &[String]) {
        (self.kind, &self.terms)
    }

    pub fn is_valid(&self) -> bool {
        match self.kind {
            PredicateKind::Phrase => !self.terms.is_empty(),
            PredicateKind::Pair => self.terms.len() == 2 && self.terms[0] < self.terms[1],
        }
    }
}

/// Dump line: `P:<phrase>` or `2:<term1> <term2>`.
impl fmt::Display for FilterPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            PredicateKind::Phrase => write!(f, "P:{}", self.terms.join(" ")),
            PredicateKind::Pair => write!(f, "2:{} {}", self.terms[0], self.terms[1]),
        }
    }
}

/// Output of [`build_predicates`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ArticlePredicates {
    pub predicates: Vec<FilterPredicate>,
    /// Set when the article had exactly one single keyword, which forms no pair.
    pub dropped_singleton: Option<String>,
}

/// Phrase predicates for frozen keywords and all unordered pairs of the single ones.
pub fn build_predicates(keywords: &[KeywordPhrase], article_id: &str) -> Result<ArticlePredicates> {
    if keywords.is_empty() {
        return Err(Error::Precondition(format!("article {article_id} has no keywords")));
    }
    let mut out = ArticlePredicates::default();
    let mut singles: Vec<&str> = Vec::new();
    for kw in keywords {
        if kw.frozen {
            let p = FilterPredicate::phrase(kw.terms.clone(), article_id);
            if !out.predicates.contains(&p) {
                out.predicates.push(p);
            }
        } else if let Some(t) = kw.terms.first() {
            if !singles.contains(&t.as_str()) {
                singles.push(t);
            }
        }
    }
    for (i, a) in singles.iter().enumerate() {
        for b in &singles[i + 1..] {
            if let Some(p) = FilterPredicate::pair(a, b, article_id) {
                out.predicates.push(p);
            }
        }
    }
    if singles.len() == 1 {
        out.dropped_singleton = Some(singles[0].to_string());
    }
    Ok(out)
}

/// An immutable snapshot of pooled predicates.
#[derive(Debug, Clone, PartialEq)]
pub struct PredicatePool {
    pub predicates: Vec<FilterPredicate>,
    pub cap: usize,
    pub refresh_period: i64,
    /// Time of the rebuild that produced this snapshot.
    pub built_at: Option<Timestamp>,
}

impl PredicatePool {
    pub fn empty(cap: usize, refresh_period: i64) -> Self {
        PredicatePool {
            predicates: Vec::new(),
            cap,
            refresh_period,
            built_at: None,
        }
    }

    pub fn len(&self) -> usize {
        self.predicates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predicates.is_empty()
    }

    pub fn dump(&self) -> String {
        self.predicates.iter().map(|p| format!("{p}\n")).collect()
    }

    pub fn write_dump(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.dump()).map_err(|e| Error::io(path, e))
    }
}

/// Merge duplicate predicates, unioning their source articles. First-seen order.
pub fn dedup_predicates<'a>(lists: impl IntoIterator<Item = &'a [FilterPredicate]>) -> Vec<FilterPredicate> {
    let mut merged: Vec<FilterPredicate> = Vec::new();
    let mut position: HashMap<(PredicateKind, Vec<String>), usize> = HashMap::new();
    for list in lists {
        for p in list {
            match position.get(&(p.kind, p.terms.clone())) {
                Some(&i) => merged[i].source_articles.extend(p.source_articles.iter().cloned()),
                None => {
                    position.insert((p.kind, p.terms.clone()), merged.len());
                    merged.push(p.clone());
                }
            }
        }
    }
    merged
}

/// Pool predicates from all articles under a cap.
///
/// Phrases come first, by descending number of source articles; pairs follow,
/// by descending sum of their terms' frequencies (the number of articles
/// whose pairs mention the term). Remaining ties sort by dump text.
pub fn pool(lists: &[&[FilterPredicate]], cap: usize) -> Result<Vec<FilterPredicate>> {
    if cap == 0 {
        return Err(Error::Precondition("pool cap must be at least 1".into()));
    }
    let merged = dedup_predicates(lists.iter().copied());

    let mut term_articles: HashMap<&str, BTreeSet<&str>> = HashMap::new();
    for p in merged.iter().filter(|p| p.kind == PredicateKind::Pair) {
        for t in &p.terms {
            term_articles
                .entry(t)
                .or_default()
                .extend(p.source_articles.iter().map(String::as_str));
        }
    }
    let freq = |t: &str| term_articles.get(t).map_or(0, BTreeSet::len);

    let mut ranked: Vec<(u8, usize, String, &FilterPredicate)> = merged
        .iter()
        .map(|p| match p.kind {
            PredicateKind::Phrase => (0, p.source_articles.len(), p.to_string(), p),
            PredicateKind::Pair => (1, freq(&p.terms[0]) + freq(&p.terms[1]), p.to_string(), p),
        })
        .collect();
    ranked.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)).then_with(|| a.2.cmp(&b.2)));
    Ok(ranked.into_iter().take(cap).map(|r| r.3.clone()).collect())
}

/// Rebuilds the pool from every article seen so far, at most once per refresh period.
///
/// Articles handed to [`Refresher::refresh`] are remembered immediately but
/// only reach the pool on the next rebuild.
#[derive(Debug, Clone)]
pub struct Refresher {
    seen: Vec<ArticlePredicates>,
    snapshot: PredicatePool,
    pending: bool,
}

impl Refresher {
    pub fn new(cap: usize, refresh_period: i64) -> Result<Self> {
        if cap == 0 {
            return Err(Error::Config("predicate cap must be at least 1".into()));
        }
        if refresh_period <= 0 {
            return Err(Error::Config("refresh period must be positive".into()));
        }
        Ok(Refresher {
            seen: Vec::new(),
            snapshot: PredicatePool::empty(cap, refresh_period),
            pending: false,
        })
    }

    pub fn pool(&self) -> &PredicatePool {
        &self.snapshot
    }

    /// Returns true when a new snapshot was built.
    pub fn refresh(&mut self, arrived: impl IntoIterator<Item = ArticlePredicates>, clock: Timestamp) -> Result<bool> {
        let before = self.seen.len();
        self.seen.extend(arrived);
        self.pending |= self.seen.len() > before;
        if let Some(last) = self.snapshot.built_at {
            if clock < last {
                return Err(Error::Precondition(format!(
                    "refresh clock {clock} precedes last refresh {last}"
                )));
            }
            if clock - last < self.snapshot.refresh_period {
                return Ok(false);
            }
        }
        let lists: Vec<&[FilterPredicate]> = self.seen.iter().map(|a| a.predicates.as_slice()).collect();
        let predicates = pool(&lists, self.snapshot.cap)?;
        self.snapshot = PredicatePool {
            predicates,
            built_at: Some(clock),
            ..self.snapshot.clone()
        };
        self.pending = false;
        Ok(true)
    }

    /// Articles remembered but not yet part of the snapshot.
    pub fn has_pending(&self) -> bool {
        self.pending
    }
}
