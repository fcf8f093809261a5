//! Terminal labeling of candidate pairs.

use std::collections::{BTreeMap, HashSet};
use std::io::{BufRead, Write};
use std::path::Path;

use newstag::eval::{append_labels, read_labels, AnnotationRecord};
use newstag::{HashtagProfile, ScoredPair};

use crate::error::{CliError, CliResult};

/// What the prompt shows besides the pair itself.
pub struct PromptContext<'a> {
    pub headlines: &'a BTreeMap<String, String>,
    /// Local profiles by (article, hashtag).
    pub profiles: &'a BTreeMap<(String, String), &'a HashtagProfile>,
    pub top_terms: usize,
}

#[derive(Debug, Default, PartialEq, Eq)]
pub struct Summary {
    pub total: usize,
    pub already: usize,
    pub graded: usize,
    pub skipped: usize,
}

impl Summary {
    pub fn remaining(&self) -> usize {
        self.total - self.already - self.graded
    }
}

enum Answer {
    Grade(u8),
    Skip,
    Quit,
}

fn parse_answer(line: &str) -> Option<Answer> {
    match line.trim() {
        "0" => Some(Answer::Grade(0)),
        "1" => Some(Answer::Grade(1)),
        "2" => Some(Answer::Grade(2)),
        "s" | "S" => Some(Answer::Skip),
        "q" | "Q" => Some(Answer::Quit),
        _ => None,
    }
}

/// Prompt for every pair `annotator` has not graded yet in `labels_path`,
/// appending each grade as soon as it is entered.
pub fn run<R: BufRead, W: Write>(
    pairs: &[ScoredPair],
    annotator: &str,
    labels_path: &Path,
    context: &PromptContext<'_>,
    input: &mut R,
    out: &mut W,
) -> CliResult<Summary> {
    let done: HashSet<(String, String)> = if labels_path.exists() {
        read_labels(labels_path)?
            .into_iter()
            .filter(|r| r.annotator_id == annotator)
            .map(|r| (r.article_id, r.hashtag))
            .collect()
    } else {
        HashSet::new()
    };
    let todo: Vec<&ScoredPair> = pairs
        .iter()
        .filter(|p| !done.contains(&(p.article_id.clone(), p.hashtag.clone())))
        .collect();
    let mut summary = Summary {
        total: pairs.len(),
        already: pairs.len() - todo.len(),
        ..Summary::default()
    };
    let io = |e| CliError::io("<terminal>", e);
    if todo.is_empty() {
        writeln!(out, "all {} pairs already graded by {annotator}", pairs.len()).map_err(io)?;
        return Ok(summary);
    }
    writeln!(
        out,
        "grading {} of {} pairs as {annotator}: 2 specific, 1 general, 0 irrelevant, s skip, q quit",
        todo.len(),
        pairs.len()
    )
    .map_err(io)?;

    'pairs: for (i, p) in todo.iter().enumerate() {
        show(out, i + 1, todo.len(), p, context).map_err(io)?;
        loop {
            write!(out, "grade> ").map_err(io)?;
            out.flush().map_err(io)?;
            let mut line = String::new();
            if input.read_line(&mut line).map_err(io)? == 0 {
                writeln!(out).map_err(io)?;
                break 'pairs;
            }
            match parse_answer(&line) {
                Some(Answer::Grade(grade)) => {
                    let record = AnnotationRecord {
                        article_id: p.article_id.clone(),
                        hashtag: p.hashtag.clone(),
                        annotator_id: annotator.to_string(),
                        grade,
                    };
                    append_labels(labels_path, &[record])?;
                    summary.graded += 1;
                    break;
                }
                Some(Answer::Skip) => {
                    summary.skipped += 1;
                    break;
                }
                Some(Answer::Quit) => break 'pairs,
                None => writeln!(out, "please answer 0, 1, 2, s or q").map_err(io)?,
            }
        }
    }
    writeln!(
        out,
        "graded {}, skipped {}, {} left for {annotator}",
        summary.graded,
        summary.skipped,
        summary.remaining()
    )
    .map_err(io)?;
    Ok(summary)
}

fn show<W: Write>(
    out: &mut W,
    n: usize,
    of: usize,
    p: &ScoredPair,
    context: &PromptContext<'_>,
) -> std::io::Result<()> {
    writeln!(out)?;
    writeln!(out, "[{n}/{of}] {}", p.article_id)?;
    if let Some(h) = context.headlines.get(&p.article_id) {
        writeln!(out, "  headline: {h}")?;
    }
    writeln!(out, "  hashtag:  #{}", p.hashtag)?;
    if let Some(profile) = context.profiles.get(&(p.article_id.clone(), p.hashtag.clone())) {
        let terms: Vec<&str> = profile
            .top_terms(context.top_terms)
            .into_iter()
            .map(|(t, _)| t)
            .collect();
        writeln!(out, "  terms:    {}", terms.join(" "))?;
    }
    let f = p.features;
    writeln!(
        out,
        "  features: lfr {:.2}  lco {:.2}  gfr {:.2}  gco {:.2}",
        f.local_freq(),
        f.local_cosine(),
        f.global_freq(),
        f.global_cosine()
    )
}
