use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs::OpenOptions;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{Article, Tweet};
use crate::error::{Error, Result};
use crate::ranker::ScoredPair;

/// One annotator's grade for one (article, hashtag) pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub article_id: String,
    pub hashtag: String,
    pub annotator_id: String,
    pub grade: u8,
}

/// A pair with a consensus label.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct PairLabel {
    pub article_id: String,
    pub hashtag: String,
    pub relevant: bool,
    /// Graded relevance, when known.
    pub grade: Option<u8>,
}

pub fn read_labels(path: impl AsRef<Path>) -> Result<Vec<AnnotationRecord>> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::parse(path, 0, format!("{other:?}")),
    })?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (i, rec) in reader.deserialize::<AnnotationRecord>().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::parse(path, line, e.to_string()))?;
        if rec.grade > 2 {
            return Err(Error::parse(path, line, format!("grade {} is not in 0..=2", rec.grade)));
        }
        if !seen.insert((rec.article_id.clone(), rec.hashtag.clone(), rec.annotator_id.clone())) {
            return Err(Error::Integrity(format!(
                "{}:{line}: annotator {} graded ({}, {}) twice",
                path.display(),
                rec.annotator_id,
                rec.article_id,
                rec.hashtag
            )));
        }
        out.push(rec);
    }
    Ok(out)
}

pub fn write_labels(path: impl AsRef<Path>, records: &[AnnotationRecord]) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::parse(path, 0, e.to_string()))?;
    for r in records {
        w.serialize(r).map_err(|e| Error::parse(path, 0, e.to_string()))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Append records, writing the header only when the file is new or empty.
pub fn append_labels(path: impl AsRef<Path>, records: &[AnnotationRecord]) -> Result<()> {
    let path = path.as_ref();
    let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| Error::io(path, e))?;
    let mut w = csv::WriterBuilder::new().has_headers(fresh).from_writer(file);
    for r in records {
        w.serialize(r).map_err(|e| Error::parse(path, 0, e.to_string()))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Agreement {
    /// Pairs both annotators put on the same side, graded by the higher grade.
    pub pairs: Vec<PairLabel>,
    /// Agreed pairs over pairs graded by both.
    pub rate: f64,
    pub compared: usize,
}

/// Keep the pairs on which two annotators agree about relevance (grade >= 1).
pub fn agreement_filter(first: &[AnnotationRecord], second: &[AnnotationRecord]) -> Result<Agreement> {
    let index = |records: &[AnnotationRecord]| -> BTreeMap<(String, String), u8> {
        records
            .iter()
            .map(|r| ((r.article_id.clone(), r.hashtag.clone()), r.grade))
            .collect()
    };
    let a = index(first);
    let b = index(second);
    let mut pairs = Vec::new();
    let mut compared = 0;
    for (key, &ga) in &a {
        let Some(&gb) = b.get(key) else { continue };
        compared += 1;
        if (ga >= 1) == (gb >= 1) {
            pairs.push(PairLabel {
                article_id: key.0.clone(),
                hashtag: key.1.clone(),
                relevant: ga >= 1,
                grade: Some(ga.max(gb)),
            });
        }
    }
    if compared == 0 {
        return Err(Error::Coverage(format!(
            "the annotators share no pairs ({} and {} graded)",
            a.len(),
            b.len()
        )));
    }
    Ok(Agreement {
        rate: pairs.len() as f64 / compared as f64,
        pairs,
        compared,
    })
}

/// Split mixed records by annotator and filter on agreement. Exactly two
/// annotators must be present.
pub fn agreement_from_records(records: &[AnnotationRecord]) -> Result<Agreement> {
    let mut by: BTreeMap<&str, Vec<AnnotationRecord>> = BTreeMap::new();
    for r in records {
        by.entry(r.annotator_id.as_str()).or_default().push(r.clone());
    }
    let groups: Vec<Vec<AnnotationRecord>> = by.into_values().collect();
    match groups.as_slice() {
        [a, b] => agreement_filter(a, b),
        _ => Err(Error::Coverage(format!(
            "expected two annotators, found {}",
            groups.len()
        ))),
    }
}

/// Every hashtag of a tweet that links an article exactly becomes a positive
/// (article, hashtag) label.
pub fn derive_url_ground_truth(tweets: &[Tweet], articles: &[Article]) -> Vec<PairLabel> {
    let ids: HashSet<&str> = articles.iter().map(|a| a.id.as_str()).collect();
    let mut out: BTreeSet<(String, String)> = BTreeSet::new();
    for t in tweets {
        for url in t.urls.iter().filter(|u| ids.contains(u.as_str())) {
            for tag in &t.hashtags {
                out.insert((url.clone(), tag.clone()));
            }
        }
    }
    out.into_iter()
        .map(|(article_id, hashtag)| PairLabel {
            article_id,
            hashtag,
            relevant: true,
            grade: None,
        })
        .collect()
}

/// Copy labels onto matching pairs. Returns how many pairs were labeled.
pub fn apply_labels(pairs: &mut [ScoredPair], labels: &[PairLabel]) -> usize {
    let by: BTreeMap<(&str, &str), &PairLabel> = labels
        .iter()
        .map(|l| ((l.article_id.as_str(), l.hashtag.as_str()), l))
        .collect();
    let mut n = 0;
    for p in pairs {
        if let Some(l) = by.get(&(p.article_id.as_str(), p.hashtag.as_str())) {
            p.binary_label = Some(l.relevant);
            p.label = l.grade;
            n += 1;
        }
    }
    n
}
