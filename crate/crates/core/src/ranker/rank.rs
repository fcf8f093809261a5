use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::FeatureVector;
use crate::error::{Error, Result};

pub const DEFAULT_THRESHOLD: f64 = 0.5;
pub const DEFAULT_TOP_K: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredPair {
    pub article_id: String,
    pub hashtag: String,
    pub features: FeatureVector,
    pub score: Option<f64>,
    /// Graded relevance: 2 specific, 1 general, 0 irrelevant.
    pub label: Option<u8>,
    pub binary_label: Option<bool>,
}

impl ScoredPair {
    pub fn new(article_id: &str, hashtag: &str, features: FeatureVector) -> Self {
        ScoredPair {
            article_id: article_id.to_string(),
            hashtag: hashtag.to_string(),
            features,
            score: None,
            label: None,
            binary_label: None,
        }
    }

    /// Attach a graded label and the binary label it implies.
    pub fn with_grade(mut self, grade: u8) -> Self {
        self.label = Some(grade);
        self.binary_label = Some(grade >= 1);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(g) = self.label {
            if g > 2 {
                return Err(Error::Validation(format!(
                    "grade {g} for ({}, {}) is not in 0..=2",
                    self.article_id, self.hashtag
                )));
            }
            if self.binary_label.is_some_and(|b| b != (g >= 1)) {
                return Err(Error::Validation(format!(
                    "binary label disagrees with grade {g} for ({}, {})",
                    self.article_id, self.hashtag
                )));
            }
        }
        if let Some(s) = self.score {
            if !(s > 0.0 && s < 1.0) {
                return Err(Error::Validation(format!("score {s} outside (0,1)")));
            }
        }
        Ok(())
    }
}

/// Relevant iff `score > threshold`.
pub fn classify(score: f64, threshold: f64) -> bool {
    score > threshold
}

/// Descending by `key`, then higher local cosine, then hashtag.
fn by_key(a: &ScoredPair, b: &ScoredPair, key: impl Fn(&ScoredPair) -> f64) -> Ordering {
    key(b)
        .total_cmp(&key(a))
        .then_with(|| b.features.local_cosine().total_cmp(&a.features.local_cosine()))
        .then_with(|| a.hashtag.cmp(&b.hashtag))
}

/// Up to `k` of the article's pairs scoring above `threshold`, best first.
pub fn rank_hashtags<'a>(article_id: &str, pairs: &'a [ScoredPair], k: usize, threshold: f64) -> Vec<&'a ScoredPair> {
    let mut kept: Vec<&ScoredPair> = pairs
        .iter()
        .filter(|p| p.article_id == article_id && p.score.is_some_and(|s| classify(s, threshold)))
        .collect();
    kept.sort_by(|a, b| by_key(a, b, |p| p.score.unwrap_or(0.0)));
    kept.truncate(k);
    kept
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineKey {
    LocalFreq,
    LocalCosine,
}

impl BaselineKey {
    fn value(self, p: &ScoredPair) -> f64 {
        match self {
            BaselineKey::LocalFreq => p.features.local_freq(),
            BaselineKey::LocalCosine => p.features.local_cosine(),
        }
    }
}

/// Non-learning ranking by one raw feature, no threshold.
pub fn baseline_top_k<'a>(
    article_id: &str,
    pairs: &'a [ScoredPair],
    key: BaselineKey,
    k: usize,
) -> Vec<&'a ScoredPair> {
    let mut all: Vec<&ScoredPair> = pairs.iter().filter(|p| p.article_id == article_id).collect();
    all.sort_by(|a, b| by_key(a, b, |p| key.value(p)));
    all.truncate(k);
    all
}

/// One line of the ranked output.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedRow {
    pub article_id: String,
    pub rank: usize,
    pub hashtag: String,
    pub score: f64,
    pub features: FeatureVector,
}

/// Rank every article's pairs; rows ordered by article id, then rank.
pub fn rank_all(pairs: &[ScoredPair], k: usize, threshold: f64) -> Vec<RankedRow> {
    let mut by_article: BTreeMap<&str, Vec<&ScoredPair>> = BTreeMap::new();
    for p in pairs {
        if p.score.is_some_and(|s| classify(s, threshold)) {
            by_article.entry(p.article_id.as_str()).or_default().push(p);
        }
    }
    let mut rows = Vec::new();
    for (article, mut ps) in by_article {
        ps.sort_by(|a, b| by_key(a, b, |p| p.score.unwrap_or(0.0)));
        for (i, p) in ps.into_iter().take(k).enumerate() {
            rows.push(RankedRow {
                article_id: article.to_string(),
                rank: i + 1,
                hashtag: p.hashtag.clone(),
                score: p.score.unwrap_or(0.0),
                features: p.features,
            });
        }
    }
    rows
}

/// Articles whose top-`k` contains `hashtag`, by descending score for it
/// (ties by article id).
pub fn group_articles_by_hashtag(hashtag: &str, pairs: &[ScoredPair], k: usize, threshold: f64) -> Vec<(String, f64)> {
    let mut out: Vec<(String, f64)> = rank_all(pairs, k, threshold)
        .into_iter()
        .filter(|r| r.hashtag == hashtag)
        .map(|r| (r.article_id, r.score))
        .collect();
    out.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    out
}

const RANKED_HEADER: [&str; 8] = ["article_id", "rank", "hashtag", "score", "lfr", "lco", "gfr", "gco"];

/// Ranked rows as CSV. An empty ranking is an empty file, without header.
pub fn write_ranked<W: std::io::Write>(out: W, rows: &[RankedRow]) -> std::result::Result<(), csv::Error> {
    if rows.is_empty() {
        return Ok(());
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RANKED_HEADER)?;
    for r in rows {
        let f = r.features.values();
        w.write_record([
            r.article_id.clone(),
            r.rank.to_string(),
            r.hashtag.clone(),
            format!("{:?}", r.score),
            format!("{:?}", f[0]),
            format!("{:?}", f[1]),
            format!("{:?}", f[2]),
            format!("{:?}", f[3]),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn open_csv(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Reader::from_reader(file))
}

/// Parses fields of one CSV record, reporting errors at its line.
struct Fields<'a> {
    path: &'a Path,
    line: usize,
    rec: csv::StringRecord,
}

impl Fields<'_> {
    fn num(&self, j: usize) -> Result<f64> {
        self.rec[j]
            .parse::<f64>()
            .map_err(|_| Error::parse(self.path, self.line, format!("bad number {:?}", &self.rec[j])))
    }

    fn features(&self, first: usize) -> Result<FeatureVector> {
        let values = [
            self.num(first)?,
            self.num(first + 1)?,
            self.num(first + 2)?,
            self.num(first + 3)?,
        ];
        FeatureVector::new(values).map_err(|e| Error::parse(self.path, self.line, e.to_string()))
    }
}

fn records<'a>(path: &'a Path, width: usize) -> Result<impl Iterator<Item = Result<Fields<'a>>>> {
    let mut reader = open_csv(path)?;
    reader.headers().map_err(|e| Error::parse(path, 1, e.to_string()))?;
    Ok(reader.into_records().enumerate().map(move |(i, rec)| {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::parse(path, line, e.to_string()))?;
        if rec.len() != width {
            return Err(Error::parse(
                path,
                line,
                format!("expected {width} fields, found {}", rec.len()),
            ));
        }
        Ok(Fields { path, line, rec })
    }))
}

pub fn read_ranked(path: impl AsRef<Path>) -> Result<Vec<RankedRow>> {
    let path = path.as_ref();
    records(path, RANKED_HEADER.len())?
        .map(|f| {
            let f = f?;
            Ok(RankedRow {
                article_id: f.rec[0].to_string(),
                rank: f.rec[1]
                    .parse()
                    .map_err(|_| Error::parse(path, f.line, format!("bad rank {:?}", &f.rec[1])))?,
                hashtag: f.rec[2].to_string(),
                score: f.num(3)?,
                features: f.features(4)?,
            })
        })
        .collect()
}

const PAIRS_HEADER: [&str; 6] = ["article_id", "hashtag", "lfr", "lco", "gfr", "gco"];

/// Candidate pairs and their features as CSV, in the given order.
pub fn write_pairs<W: std::io::Write>(out: W, pairs: &[ScoredPair]) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(PAIRS_HEADER)?;
    for p in pairs {
        let f = p.features.values();
        w.write_record([
            p.article_id.clone(),
            p.hashtag.clone(),
            format!("{:?}", f[0]),
            format!("{:?}", f[1]),
            format!("{:?}", f[2]),
            format!("{:?}", f[3]),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Pairs written by [`write_pairs`], unscored and unlabeled.
pub fn read_pairs(path: impl AsRef<Path>) -> Result<Vec<ScoredPair>> {
    let path = path.as_ref();
    records(path, PAIRS_HEADER.len())?
        .map(|f| {
            let f = f?;
            Ok(ScoredPair::new(&f.rec[0], &f.rec[1], f.features(2)?))
        })
        .collect()
}
