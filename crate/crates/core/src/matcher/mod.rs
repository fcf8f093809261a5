//! Tweet-to-article matching over an inverted predicate index, tweet-bags,
//! and the tf.idf profiles built from them.

mod index;
mod profiles;

pub use index::PredicateIndex;
pub use profiles::{
    build_article_profile, build_global_profiles, build_local_profiles, tfidf, tfidf_weight, ArticleProfile,
    ArticleProfiler, HashtagProfile, ProfileScope, TermWeights,
};

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::corpus::Tweet;

/// Tweets assigned to one article within a window.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TweetBag {
    pub article_id: String,
    pub tweet_ids: Vec<String>,
    /// Hashtag to number of bag tweets carrying it.
    pub hashtag_counts: BTreeMap<String, usize>,
}

/// A (article, tweet, predicate) firing, as written to the bag dump.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct BagAssignment {
    pub article_id: String,
    pub tweet_id: String,
    pub predicate: String,
}

/// Accumulates bags for a fixed set of window articles.
#[derive(Debug, Clone, Default)]
pub struct BagBuilder {
    bags: BTreeMap<String, TweetBag>,
    assignments: Vec<BagAssignment>,
}

impl BagBuilder {
    pub fn new<'a>(article_ids: impl IntoIterator<Item = &'a str>) -> Self {
        BagBuilder {
            bags: article_ids
                .into_iter()
                .map(|id| {
                    (
                        id.to_string(),
                        TweetBag {
                            article_id: id.to_string(),
                            ..Default::default()
                        },
                    )
                })
                .collect(),
            assignments: Vec::new(),
        }
    }

    /// Match a normalized tweet against the index and file it into bags.
    /// Articles outside this builder's set are ignored. Returns the articles joined.
    pub fn add(&mut self, tweet: &Tweet, index: &PredicateIndex) -> BTreeSet<String> {
        let mut joined = BTreeSet::new();
        for id in index.fired(&tweet.tokens) {
            let predicate = index.predicate(id);
            for article in &predicate.source_articles {
                let Some(bag) = self.bags.get_mut(article) else {
                    continue;
                };
                self.assignments.push(BagAssignment {
                    article_id: article.clone(),
                    tweet_id: tweet.id.clone(),
                    predicate: predicate.to_string(),
                });
                if joined.insert(article.clone()) {
                    bag.tweet_ids.push(tweet.id.clone());
                    for tag in &tweet.hashtags {
                        *bag.hashtag_counts.entry(tag.clone()).or_default() += 1;
                    }
                }
            }
        }
        joined
    }

    pub fn finish(self) -> (Vec<TweetBag>, Vec<BagAssignment>) {
        (self.bags.into_values().collect(), self.assignments)
    }
}

/// Assign every tweet against a fixed index.
pub fn assign_bags<'a>(
    tweets: &[Tweet],
    index: &PredicateIndex,
    article_ids: impl IntoIterator<Item = &'a str>,
) -> Vec<TweetBag> {
    let mut builder = BagBuilder::new(article_ids);
    for tweet in tweets {
        builder.add(tweet, index);
    }
    builder.finish().0
}

/// Tab-separated bag dump, one line per firing.
pub fn bag_dump(assignments: &[BagAssignment]) -> String {
    assignments
        .iter()
        .map(|a| format!("{}\t{}\t{}\n", a.article_id, a.tweet_id, a.predicate))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Article, KeywordPhrase};
    use crate::filtergen::{build_predicates, pool, FilterPredicate, PredicateKind, PredicatePool};
    use crate::textproc::{normalize_tweet, TokenizerConfig};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    fn tweet(id: &str, text: &str, config: &TokenizerConfig) -> Tweet {
        let mut t = Tweet::from_raw(id, 0, text, 280).unwrap();
        t.tokens = normalize_tweet(&t.raw_text, config);
        t
    }

    fn kenny_pool() -> PredicatePool {
        let kws = vec![
            KeywordPhrase::phrase(["enda", "kenny"]),
            KeywordPhrase::phrase(["fine", "gael"]),
            KeywordPhrase::term("fg"),
            KeywordPhrase::term("fears"),
            KeywordPhrase::term("seanad"),
        ];
        PredicatePool {
            predicates: build_predicates(&kws, "fg-fears-day-of-reckoning").unwrap().predicates,
            ..PredicatePool::empty(400, 1800)
        }
    }

    #[test]
    fn empty_pool_empty_index() {
        let idx = PredicateIndex::build(&PredicatePool::empty(400, 1800), &TokenizerConfig::default());
        assert!(idx.is_empty());
        assert!(idx.fired(&["seanad".to_string()]).is_empty());
    }

    #[test]
    fn pair_reachable_from_both_terms() {
        let config = TokenizerConfig::default();
        let p = FilterPredicate::pair("fears", "seanad", "a").unwrap();
        let idx = PredicateIndex::from_predicates(vec![p], &config);
        assert_eq!(idx.lookup("fear"), &[0]);
        assert_eq!(idx.lookup("seanad"), &[0]);
    }

    #[test]
    fn headline_tweet_matches_its_article() {
        let config = TokenizerConfig::default();
        let idx = PredicateIndex::build(&kenny_pool(), &config);
        let t = tweet(
            "5",
            "FG fears day of reckoning over Enda Kenny #Seanad gamble - The Daily Times - Mon, Oct 07, http://t.co/8FtnVxV86d",
            &config,
        );
        let fired: Vec<String> = idx
            .fired(&t.tokens)
            .into_iter()
            .map(|i| idx.predicate(i).to_string())
            .collect();
        assert!(fired.contains(&"P:enda kenny".to_string()));
        assert!(fired.contains(&"2:fears fg".to_string()));
        assert_eq!(
            idx.match_tokens(&t.tokens),
            BTreeSet::from(["fg-fears-day-of-reckoning".to_string()])
        );
    }

    #[test]
    fn one_pair_term_is_not_enough() {
        let config = TokenizerConfig::default();
        let idx =
            PredicateIndex::from_predicates(vec![FilterPredicate::pair("fears", "seanad", "a").unwrap()], &config);
        assert!(idx
            .match_tokens(&tweet("1", "the #seanad vote", &config).tokens)
            .is_empty());
        assert_eq!(idx.match_tokens(&tweet("2", "seanad fears", &config).tokens).len(), 1);
    }

    #[test]
    fn phrase_needs_contiguity() {
        let config = TokenizerConfig::default();
        let idx = PredicateIndex::from_predicates(
            vec![FilterPredicate::phrase(vec!["enda".into(), "kenny".into()], "a")],
            &config,
        );
        assert!(idx
            .match_tokens(&tweet("1", "Kenny and Enda", &config).tokens)
            .is_empty());
        assert!(idx
            .match_tokens(&tweet("2", "Enda jokes Kenny", &config).tokens)
            .is_empty());
        assert_eq!(
            idx.match_tokens(&tweet("3", "poor Enda Kenny's day", &config).tokens)
                .len(),
            1
        );
    }

    #[test]
    fn surface_matching_switch() {
        let config = TokenizerConfig {
            stemmer: crate::textproc::StemmerKind::None,
            ..Default::default()
        };
        let idx =
            PredicateIndex::from_predicates(vec![FilterPredicate::pair("fears", "seanad", "a").unwrap()], &config);
        assert!(idx
            .match_tokens(&tweet("1", "fear the seanad", &config).tokens)
            .is_empty());
        assert_eq!(
            idx.match_tokens(&tweet("2", "fears the seanad", &config).tokens).len(),
            1
        );
    }

    /// Evaluate every predicate directly against the tweet's tokens.
    fn brute_force(preds: &[FilterPredicate], tokens: &[String], config: &TokenizerConfig) -> BTreeSet<String> {
        let norm = |t: &String| crate::textproc::normalize_token(t, config);
        let mut out = BTreeSet::new();
        for p in preds {
            let fires = match p.kind {
                PredicateKind::Pair => p.terms.iter().all(|t| norm(t).is_some_and(|n| tokens.contains(&n))),
                PredicateKind::Phrase => {
                    let run: Vec<String> = p.terms.iter().filter_map(norm).collect();
                    !run.is_empty() && (0..tokens.len()).any(|i| tokens[i..].starts_with(&run))
                }
            };
            if fires {
                out.extend(p.source_articles.iter().cloned());
            }
        }
        out
    }

    #[test]
    fn index_agrees_with_linear_scan() {
        let config = TokenizerConfig::default();
        let words: Vec<String> = (0..60)
            .map(|i| format!("word{}x", (b'a' + (i % 26) as u8) as char).repeat(1) + &i.to_string())
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut lists = Vec::new();
        for a in 0..80 {
            let mut kws: Vec<KeywordPhrase> = (0..rng.random_range(1..6))
                .map(|_| KeywordPhrase::term(words[rng.random_range(0..60)].clone()))
                .collect();
            if rng.random_bool(0.5) {
                kws.push(KeywordPhrase::phrase([
                    words[rng.random_range(0..60)].clone(),
                    words[rng.random_range(0..60)].clone(),
                ]));
            }
            kws.dedup();
            lists.push(build_predicates(&kws, &format!("art{a}")).unwrap().predicates);
        }
        let refs: Vec<&[FilterPredicate]> = lists.iter().map(Vec::as_slice).collect();
        let pooled = pool(&refs, 400).unwrap();
        let idx = PredicateIndex::from_predicates(pooled.clone(), &config);
        for i in 0..1000 {
            let text: Vec<&str> = (0..rng.random_range(1..12))
                .map(|_| words[rng.random_range(0..60)].as_str())
                .collect();
            let t = tweet(&i.to_string(), &text.join(" "), &config);
            assert_eq!(idx.match_tokens(&t.tokens), brute_force(&pooled, &t.tokens, &config));
        }
    }

    #[test]
    fn bag_counts_and_soundness() {
        let config = TokenizerConfig::default();
        let idx = PredicateIndex::build(&kenny_pool(), &config);
        let tweets = vec![
            tweet("1", "Enda Kenny #seanad #vinb", &config),
            tweet("2", "fg fears #seanad", &config),
            tweet("3", "unrelated #seanad", &config),
        ];
        let bags = assign_bags(&tweets, &idx, ["fg-fears-day-of-reckoning", "other"]);
        assert_eq!(bags.len(), 2);
        let bag = bags
            .iter()
            .find(|b| b.article_id == "fg-fears-day-of-reckoning")
            .unwrap();
        assert_eq!(bag.tweet_ids, vec!["1", "2"]);
        assert_eq!(
            bag.hashtag_counts,
            BTreeMap::from([("seanad".into(), 2), ("vinb".into(), 1)])
        );
        assert!(bags
            .iter()
            .find(|b| b.article_id == "other")
            .unwrap()
            .tweet_ids
            .is_empty());
    }

    #[test]
    fn single_tweet_local_profile() {
        let config = TokenizerConfig::default();
        let tweets = vec![tweet("1", "#seanad kenny reform", &config)];
        let bag = TweetBag {
            article_id: "a".into(),
            tweet_ids: vec!["1".into()],
            hashtag_counts: BTreeMap::from([("seanad".into(), 1)]),
        };
        let profiles = build_local_profiles(&[bag], &tweets);
        assert_eq!(profiles.len(), 1);
        let p = &profiles[0];
        assert_eq!(p.tweet_count, 1);
        assert_eq!(p.scope, ProfileScope::Local("a".into()));
        for term in ["kenni", "reform", "seanad"] {
            assert!(p.term_weights[term] > 0.0);
        }
        // N = df = 1: ln(2/2) + 1 = 1, so weights equal raw counts.
        assert_eq!(p.term_weights["reform"], 1.0);
    }

    #[test]
    fn hashtag_absent_from_bag_has_no_profile() {
        let config = TokenizerConfig::default();
        let tweets = vec![tweet("1", "kenny reform", &config)];
        let bag = TweetBag {
            article_id: "a".into(),
            tweet_ids: vec!["1".into()],
            hashtag_counts: BTreeMap::new(),
        };
        assert!(build_local_profiles(&[bag], &tweets).is_empty());
        assert!(build_global_profiles(&tweets, "w").is_empty());
    }

    /// Recompute local tf.idf by hand: explicit pseudo-document counts, df and the smoothed formula.
    #[test]
    fn local_profiles_match_hand_computation() {
        let config = TokenizerConfig::default();
        let tweets = vec![
            tweet("1", "#xx alpha beta", &config),
            tweet("2", "#xx alpha gamma #yy", &config),
            tweet("3", "#yy delta", &config),
            tweet("4", "#xx alpha", &config),
        ];
        let bag = |a: &str, ids: &[&str]| {
            let mut counts = BTreeMap::new();
            for id in ids {
                for h in &tweets.iter().find(|t| t.id == *id).unwrap().hashtags {
                    *counts.entry(h.clone()).or_insert(0) += 1;
                }
            }
            TweetBag {
                article_id: a.into(),
                tweet_ids: ids.iter().map(|s| s.to_string()).collect(),
                hashtag_counts: counts,
            }
        };
        let bags = vec![bag("a1", &["1", "2"]), bag("a2", &["2", "3"]), bag("a3", &["4"])];
        let profiles = build_local_profiles(&bags, &tweets);
        // Pseudo-documents: (a1,xx)={xx:2,alpha:2,beta:1,gamma:1,yy:1} (a1,yy)={xx:1,alpha:1,gamma:1,yy:1}
        // (a2,xx)={xx:1,alpha:1,gamma:1,yy:1} (a2,yy)={xx:1,alpha:1,gamma:1,yy:2,delta:1} (a3,xx)={xx:1,alpha:1}
        let n = 5.0f64;
        let w = |tf: f64, df: f64| tf * (((n + 1.0) / (df + 1.0)).ln() + 1.0);
        let get = |a: &str, tag: &str| {
            profiles
                .iter()
                .find(|p| p.scope == ProfileScope::Local(a.into()) && p.tag == tag)
                .unwrap()
        };
        let a1x = get("a1", "xx");
        assert_eq!(a1x.tweet_count, 2);
        assert!((a1x.term_weights["alpha"] - w(2.0, 5.0)).abs() < 1e-12);
        assert!((a1x.term_weights["beta"] - w(1.0, 1.0)).abs() < 1e-12);
        assert!((a1x.term_weights["gamma"] - w(1.0, 4.0)).abs() < 1e-12);
        let a2y = get("a2", "yy");
        assert!((a2y.term_weights["delta"] - w(1.0, 1.0)).abs() < 1e-12);
        assert!((a2y.term_weights["yy"] - w(2.0, 4.0)).abs() < 1e-12);
        assert_eq!(get("a3", "xx").term_weights.len(), 2);
        assert_eq!(profiles.len(), 5);
    }

    #[test]
    fn global_profiles_match_hand_computation() {
        let config = TokenizerConfig::default();
        let tweets = vec![
            tweet("1", "#xx alpha beta", &config),
            tweet("2", "#xx alpha #yy", &config),
            tweet("3", "#yy delta", &config),
        ];
        let profiles = build_global_profiles(&tweets, "2013-10-23");
        // (xx)={xx:2,alpha:2,beta:1,yy:1} (yy)={xx:1,alpha:1,yy:2,delta:1}; N = 2
        let w = |tf: f64, df: f64| tf * ((3.0 / (df + 1.0)).ln() + 1.0);
        let x = profiles.iter().find(|p| p.tag == "xx").unwrap();
        assert_eq!(x.tweet_count, 2);
        assert!((x.term_weights["alpha"] - w(2.0, 2.0)).abs() < 1e-12);
        assert!((x.term_weights["beta"] - w(1.0, 1.0)).abs() < 1e-12);
        let y = profiles.iter().find(|p| p.tag == "yy").unwrap();
        assert!((y.term_weights["delta"] - w(1.0, 1.0)).abs() < 1e-12);
        assert_eq!(y.scope, ProfileScope::Global("2013-10-23".into()));
    }

    #[test]
    fn article_profile_counts_whole_article() {
        let config = TokenizerConfig::default();
        let a = Article::new(
            "a",
            0,
            "Seanad vote",
            "",
            "seanad seanad seanad seanad seanad. Lonely bodyword.",
        )
        .unwrap();
        let b = Article::new("b", 0, "Budget day", "", "cuts").unwrap();
        let p = build_article_profile(&a, &[a.clone(), b.clone()], &config);
        // tf(seanad) = 1 headline + 5 body; df = 1 of N = 2
        let expected = 6.0 * ((3.0f64 / 2.0).ln() + 1.0);
        assert!((p.term_weights["seanad"] - expected).abs() < 1e-12);
        assert!(!p.term_weights.contains_key("bodyword"));
        assert!(!p.term_weights.contains_key("lone"));

        // Single-article corpus: idf is constant, weights proportional to tf.
        let solo = build_article_profile(&a, std::slice::from_ref(&a), &config);
        let ratio = solo.term_weights["seanad"] / solo.term_weights["vote"];
        assert!((ratio - 6.0).abs() < 1e-12);
    }

    #[test]
    fn weights_are_finite_and_nonnegative() {
        let docs: Vec<HashMap<&str, usize>> =
            vec![HashMap::from([("a", 3), ("b", 0)]), HashMap::from([("a", 1), ("c", 2)])];
        let w = tfidf(&docs);
        assert!(!w[0].contains_key("b"));
        for doc in &w {
            for v in doc.values() {
                assert!(v.is_finite() && *v >= 0.0);
            }
        }
    }
}
