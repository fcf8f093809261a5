use std::collections::{BTreeSet, HashMap, HashSet};

use crate::filtergen::{FilterPredicate, PredicateKind, PredicatePool};
use crate::textproc::{normalize_token, TokenizerConfig};

/// A pooled predicate with its terms normalized into tweet-token space.
#[derive(Debug, Clone)]
struct Compiled {
    kind: PredicateKind,
    terms: Vec<String>,
}

/// Inverted index from normalized term to the predicates that mention it.
///
/// Pair predicates are reachable from both terms; phrase predicates from
/// their first term, with the full phrase checked at match time.
#[derive(Debug, Clone, Default)]
pub struct PredicateIndex {
    predicates: Vec<FilterPredicate>,
    compiled: Vec<Option<Compiled>>,
    postings: HashMap<String, Vec<usize>>,
}

impl PredicateIndex {
    /// Index a pool. Predicate terms go through the same normalization as tweets
    /// (so stemmed matching under the default tokenizer, surface matching with
    /// `StemmerKind::None`).
    pub fn build(pool: &PredicatePool, config: &TokenizerConfig) -> Self {
        Self::from_predicates(pool.predicates.clone(), config)
    }

    pub fn from_predicates(predicates: Vec<FilterPredicate>, config: &TokenizerConfig) -> Self {
        let mut postings: HashMap<String, Vec<usize>> = HashMap::new();
        let mut compiled = Vec::with_capacity(predicates.len());
        for (id, p) in predicates.iter().enumerate() {
            let c = compile(p, config);
            if let Some(c) = &c {
                let keys: &[String] = match c.kind {
                    PredicateKind::Phrase => &c.terms[..1],
                    PredicateKind::Pair => &c.terms,
                };
                let mut seen = HashSet::new();
                for k in keys {
                    if seen.insert(k) {
                        postings.entry(k.clone()).or_default().push(id);
                    }
                }
            }
            compiled.push(c);
        }
        PredicateIndex {
            predicates,
            compiled,
            postings,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.postings.is_empty()
    }

    pub fn predicate(&self, id: usize) -> &FilterPredicate {
        &self.predicates[id]
    }

    pub fn predicates(&self) -> &[FilterPredicate] {
        &self.predicates
    }

    /// Predicate ids posted under `term`.
    pub fn lookup(&self, term: &str) -> &[usize] {
        self.postings.get(term).map_or(&[], Vec::as_slice)
    }

    /// Ids of the predicates that fire on a normalized token list, ascending.
    pub fn fired(&self, tokens: &[String]) -> Vec<usize> {
        let present: HashSet<&str> = tokens.iter().map(String::as_str).collect();
        let mut fired = BTreeSet::new();
        for term in &present {
            for &id in self.lookup(term) {
                if !fired.contains(&id) && self.fires(id, tokens, &present) {
                    fired.insert(id);
                }
            }
        }
        fired.into_iter().collect()
    }

    fn fires(&self, id: usize, tokens: &[String], present: &HashSet<&str>) -> bool {
        let Some(c) = &self.compiled[id] else {
            return false;
        };
        match c.kind {
            PredicateKind::Pair => c.terms.iter().all(|t| present.contains(t.as_str())),
            PredicateKind::Phrase => contains_run(tokens, &c.terms),
        }
    }

    /// Articles whose bag the tweet joins.
    pub fn match_tokens(&self, tokens: &[String]) -> BTreeSet<String> {
        self.fired(tokens)
            .into_iter()
            .flat_map(|id| self.predicates[id].source_articles.iter().cloned())
            .collect()
    }
}

fn compile(p: &FilterPredicate, config: &TokenizerConfig) -> Option<Compiled> {
    match p.kind {
        PredicateKind::Pair => {
            let terms: Option<Vec<String>> = p.terms.iter().map(|t| normalize_token(t, config)).collect();
            Some(Compiled {
                kind: p.kind,
                terms: terms?,
            })
        }
        PredicateKind::Phrase => {
            // Tokens the tweet normalizer would drop are dropped here too, so
            // contiguity is judged in the same token space.
            let terms: Vec<String> = p.terms.iter().filter_map(|t| normalize_token(t, config)).collect();
            (!terms.is_empty()).then_some(Compiled { kind: p.kind, terms })
        }
    }
}

pub(crate) fn contains_run(tokens: &[String], run: &[String]) -> bool {
    !run.is_empty() && tokens.windows(run.len()).any(|w| w == run)
}
