//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
//!
//! Run with `cargo test -p newstag-core --test acceptance`.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use newstag::corpus::{load_state, save_state, DEFAULT_MAX_TWEET_LEN};
use newstag::eval::{dcg_at_k, large, medium, ndcg_at_k, roc_auc, small, synthetic_data, EvalConfig};
use newstag::filtergen::{build_predicates, pool, FilterPredicate, PredicateKind};
use newstag::matcher::ProfileScope;
use newstag::ranker::{gradient, log_loss, rank_all, train, train_samples, train_with_history, write_ranked, Sample};
use newstag::textproc::{normalize_token, normalize_tweet, TokenizerConfig};
use newstag::{
    FeatureVector, HashtagProfile, KeywordPhrase, LogisticModel, PipelineConfig, PredicateIndex, ScoredPair, State,
    SynthConfig, TrainConfig, Tweet,
};

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn check(passed: bool, detail: impl Into<String>) -> Self {
        Outcome {
            passed,
            detail: detail.into(),
        }
    }
}

fn run(id: u32, name: &str, budget: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = f();
    let elapsed = start.elapsed();
    let in_time = budget.is_none_or(|b| elapsed < b);
    let passed = outcome.passed && in_time;
    let budget_note = match budget {
        Some(b) if !in_time => format!(", over the {:.0}s budget", b.as_secs_f64()),
        Some(b) => format!(" of {:.0}s", b.as_secs_f64()),
        None => String::new(),
    };
    println!(
        "{} criterion {id} ({name}): {} [{:.2}s{budget_note}]",
        if passed { "PASS" } else { "FAIL" },
        outcome.detail,
        elapsed.as_secs_f64(),
    );
    passed
}

// ---------------------------------------------------------------- criterion 1

fn brute_auc(scores: &[f64], labels: &[bool]) -> f64 {
    let mut credit = 0.0;
    let mut pairs = 0u64;
    for (i, &li) in labels.iter().enumerate() {
        if !li {
            continue;
        }
        for (j, &lj) in labels.iter().enumerate() {
            if lj {
                continue;
            }
            pairs += 1;
            if scores[i] > scores[j] {
                credit += 1.0;
            } else if scores[i] == scores[j] {
                credit += 0.5;
            }
        }
    }
    credit / pairs as f64
}

fn auc_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for instance in 0..1000 {
        let n = rng.random_range(2..=500);
        let tied = instance % 2 == 0;
        let scores: Vec<f64> = (0..n)
            .map(|_| {
                if tied {
                    rng.random_range(0..8) as f64 / 8.0
                } else {
                    rng.random::<f64>()
                }
            })
            .collect();
        let mut labels: Vec<bool> = (0..n).map(|_| rng.random_bool(0.4)).collect();
        labels[0] = true;
        labels[1] = false;
        let fast = match roc_auc(&scores, &labels) {
            Ok(v) => v,
            Err(e) => return Outcome::check(false, format!("instance {instance}: {e}")),
        };
        worst = worst.max((fast - brute_auc(&scores, &labels)).abs());
    }
    Outcome::check(
        worst <= 1e-12,
        format!("1000 instances, max |rank - pairwise| = {worst:.1e}"),
    )
}

// ---------------------------------------------------------------- criterion 2

fn ndcg_checks() -> Outcome {
    let inv_log2_3 = std::f64::consts::LN_2 / 3f64.ln();
    let dcg = dcg_at_k(&[2, 1, 0], 3);
    let spot = [
        ("dcg(2,1,0)@3", dcg, 3.0 + inv_log2_3),
        ("ndcg(2,1,0)@3", ndcg_at_k(&[2, 1, 0], 3), 1.0),
        ("ndcg(0,2)@2", ndcg_at_k(&[0, 2], 2), inv_log2_3),
        ("ndcg(0,0,0)@3", ndcg_at_k(&[0, 0, 0], 3), 0.0),
    ];
    let mut failures: Vec<String> = spot
        .iter()
        .filter(|(_, got, want)| (got - want).abs() > 1e-9)
        .map(|(name, got, want)| format!("{name} = {got}, expected {want}"))
        .collect();
    if format!("{dcg:.4}") != "3.6309" || format!("{:.4}", ndcg_at_k(&[0, 2], 2)) != "0.6309" {
        failures.push("rounded values differ from 3.6309 / 0.6309".into());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut out_of_range = 0;
    for _ in 0..10_000 {
        let len = rng.random_range(0..=12);
        let grades: Vec<u8> = (0..len).map(|_| rng.random_range(0..=2)).collect();
        let k = rng.random_range(1..=15);
        let v = ndcg_at_k(&grades, k);
        if !(0.0..=1.0).contains(&v) {
            out_of_range += 1;
        }
    }
    if out_of_range > 0 {
        failures.push(format!("{out_of_range} fuzzed lists outside [0,1]"));
    }
    let ok = failures.is_empty();
    Outcome::check(
        ok,
        if ok {
            format!(
                "dcg {dcg:.4}, ndcg {:.4}, conventions 0/1, 10000 fuzzed lists in [0,1]",
                inv_log2_3
            )
        } else {
            failures.join("; ")
        },
    )
}

// ---------------------------------------------------------------- criterion 3

fn random_samples(rng: &mut ChaCha8Rng, n: usize) -> Vec<Sample> {
    (0..n)
        .map(|_| {
            let x = [rng.random(), rng.random(), rng.random(), rng.random()];
            (x, rng.random_bool(0.5))
        })
        .collect()
}

fn gradient_check() -> (f64, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for _ in 0..100 {
        let n = rng.random_range(5..60);
        let data = random_samples(&mut rng, n);
        let lambda = rng.random_range(0.0..0.1);
        let w: [f64; 4] = std::array::from_fn(|_| rng.random_range(-3.0..3.0));
        let b = rng.random_range(-2.0..2.0);
        let (gw, gb) = gradient(&w, b, &data, lambda);
        let analytic: Vec<f64> = gw.iter().copied().chain([gb]).collect();
        for (i, &g) in analytic.iter().enumerate() {
            let shift = |d: f64| {
                let mut w2 = w;
                let mut b2 = b;
                if i < 4 {
                    w2[i] += d;
                } else {
                    b2 += d;
                }
                log_loss(&w2, b2, &data, lambda)
            };
            let numeric = (shift(h) - shift(-h)) / (2.0 * h);
            let scale = g.abs().max(numeric.abs());
            // Components that are zero to machine precision carry no relative error.
            if scale > 1e-8 {
                worst = worst.max((g - numeric).abs() / scale);
            }
            checked += 1;
        }
    }
    (worst, checked)
}

fn trainer_checks() -> Outcome {
    let (worst, checked) = gradient_check();
    let mut failures = Vec::new();
    if worst > 1e-6 {
        failures.push(format!("gradient relative error {worst:.2e}"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let data = random_samples(&mut rng, 300);
    let config = TrainConfig {
        learning_rate: 0.01,
        epochs: 2000,
        ..TrainConfig::default()
    };
    let increases = match train_with_history(&data, &config) {
        Ok((_, history)) => {
            let mut losses = vec![log_loss(&[0.0; 4], 0.0, &data, config.l2_lambda)];
            losses.extend(history);
            losses.windows(2).filter(|w| w[1] > w[0]).count()
        }
        Err(e) => {
            failures.push(format!("training failed: {e}"));
            0
        }
    };
    if increases > 0 {
        failures.push(format!("loss increased in {increases} epochs"));
    }

    let separable: Vec<Sample> = (0..200)
        .map(|i| {
            let positive = i % 2 == 0;
            let x0 = if positive {
                rng.random_range(0.6..1.0)
            } else {
                rng.random_range(0.0..0.4)
            };
            ([x0, rng.random(), rng.random(), rng.random()], positive)
        })
        .collect();
    let accuracy = match train_samples(&separable, &TrainConfig::default()) {
        Ok(model) => {
            let correct = separable
                .iter()
                .filter(|(x, y)| (model.score(&FeatureVector::new(*x).unwrap()) > 0.5) == *y)
                .count();
            correct as f64 / separable.len() as f64
        }
        Err(e) => {
            failures.push(format!("separable training failed: {e}"));
            0.0
        }
    };
    if accuracy < 1.0 {
        failures.push(format!("separable accuracy {accuracy}"));
    }
    let ok = failures.is_empty();
    Outcome::check(
        ok,
        if ok {
            format!(
                "max gradient relative error {worst:.1e} over {checked} components, loss non-increasing over 2000 epochs, separable accuracy {accuracy:.1}"
            )
        } else {
            failures.join("; ")
        },
    )
}

// ---------------------------------------------------------------- criterion 4

/// Every predicate evaluated directly against the token list.
fn brute_force_fired(predicates: &[FilterPredicate], tokens: &[String], config: &TokenizerConfig) -> Vec<usize> {
    let present: BTreeSet<&str> = tokens.iter().map(String::as_str).collect();
    predicates
        .iter()
        .enumerate()
        .filter(|(_, p)| {
            let normalized: Vec<Option<String>> = p.terms.iter().map(|t| normalize_token(t, config)).collect();
            match p.kind {
                PredicateKind::Pair => normalized
                    .iter()
                    .all(|t| t.as_deref().is_some_and(|t| present.contains(t))),
                PredicateKind::Phrase => {
                    let run: Vec<String> = normalized.into_iter().flatten().collect();
                    !run.is_empty() && tokens.windows(run.len()).any(|w| w == run.as_slice())
                }
            }
        })
        .map(|(i, _)| i)
        .collect()
}

fn random_corpus_check(rng: &mut ChaCha8Rng, config: &TokenizerConfig) -> Result<usize, String> {
    let vocab: Vec<String> = (0..rng.random_range(40..300))
        .map(|i| {
            let stem: String = (0..rng.random_range(3..8))
                .map(|_| rng.random_range(b'a'..=b'z') as char)
                .collect();
            format!("{stem}{}", ["", "s", "ing", "ed"][i % 4])
        })
        .collect();
    let target = rng.random_range(1..=400);
    let mut lists = Vec::new();
    let mut total = 0;
    let mut a = 0;
    while total < target {
        let mut keywords: Vec<KeywordPhrase> = (0..rng.random_range(1..5))
            .map(|_| KeywordPhrase::term(vocab[rng.random_range(0..vocab.len())].clone()))
            .collect();
        for _ in 0..rng.random_range(0..3) {
            let len = rng.random_range(2..4);
            keywords.push(KeywordPhrase::phrase(
                (0..len).map(|_| vocab[rng.random_range(0..vocab.len())].clone()),
            ));
        }
        let preds = build_predicates(&keywords, &format!("article-{a}")).map_err(|e| e.to_string())?;
        total += preds.predicates.len();
        lists.push(preds.predicates);
        a += 1;
    }
    let refs: Vec<&[FilterPredicate]> = lists.iter().map(Vec::as_slice).collect();
    let pooled = pool(&refs, 400).map_err(|e| e.to_string())?;
    let index = PredicateIndex::from_predicates(pooled.clone(), config);
    let n_tweets = rng.random_range(1..=1000);
    let mut fired_total = 0;
    for i in 0..n_tweets {
        let words: Vec<&str> = (0..rng.random_range(1..15))
            .map(|_| vocab[rng.random_range(0..vocab.len())].as_str())
            .collect();
        let text = words.join(" ");
        let tweet = Tweet::from_raw(i.to_string(), 0, &text, DEFAULT_MAX_TWEET_LEN).map_err(|e| e.to_string())?;
        let tokens = normalize_tweet(&tweet.raw_text, config);
        let indexed = index.fired(&tokens);
        let brute = brute_force_fired(&pooled, &tokens, config);
        if indexed != brute {
            return Err(format!("tweet {text:?}: index {indexed:?} vs brute force {brute:?}"));
        }
        fired_total += brute.len();
    }
    Ok(fired_total)
}

fn permutation_example_check() -> Result<(), String> {
    let keywords = vec![
        KeywordPhrase::phrase(["enda", "kenny"]),
        KeywordPhrase::phrase(["fine", "gael"]),
        KeywordPhrase::term("fg"),
        KeywordPhrase::term("fears"),
        KeywordPhrase::term("seanad"),
    ];
    // Right-hand column of the permutation table, top to bottom.
    let table = ["enda kenny", "fine gael", "fg fears", "fg seanad", "fears seanad"];
    let built = build_predicates(&keywords, "fg-fears").map_err(|e| e.to_string())?;
    if built.predicates.len() != table.len() {
        return Err(format!(
            "{} predicates, table has {}",
            built.predicates.len(),
            table.len()
        ));
    }
    for (p, row) in built.predicates.iter().zip(table) {
        let row_terms: Vec<&str> = row.split(' ').collect();
        let same = match p.kind {
            PredicateKind::Phrase => p.terms == row_terms,
            // Pairs are unordered; they are stored with terms sorted.
            PredicateKind::Pair => {
                let mut sorted = row_terms.clone();
                sorted.sort_unstable();
                p.terms == sorted
            }
        };
        if !same {
            return Err(format!("predicate {p} does not match row {row:?}"));
        }
    }
    Ok(())
}

fn matcher_checks() -> Outcome {
    let config = TokenizerConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut fired = 0;
    for corpus in 0..50 {
        match random_corpus_check(&mut rng, &config) {
            Ok(n) => fired += n,
            Err(e) => return Outcome::check(false, format!("corpus {corpus}: {e}")),
        }
    }
    if let Err(e) = permutation_example_check() {
        return Outcome::check(false, format!("permutation table: {e}"));
    }
    Outcome::check(
        true,
        format!("50 corpora agree with brute force ({fired} firings), permutation table reproduced"),
    )
}

// ------------------------------------------------------------ criteria 5 to 7

const ANNOTATOR_ERROR: f64 = 0.05;

fn small_analogue() -> Outcome {
    let (_, data) = match synthetic_data(&SynthConfig::default(), &PipelineConfig::default(), ANNOTATOR_ERROR) {
        Ok(d) => d,
        Err(e) => return Outcome::check(false, e.to_string()),
    };
    let report = match small(&data, &EvalConfig::default()) {
        Ok(r) => r,
        Err(e) => return Outcome::check(false, e.to_string()),
    };
    let precision = report.metrics.precision.value;
    let ok = precision >= 0.90
        && report.auc >= 0.95
        && report.highest_cosine_top3_precision > report.most_frequent_top3_precision;
    Outcome::check(
        ok,
        format!(
            "precision {precision:.3} (>= 0.90), AUC {:.3} (>= 0.95), top-3 highest cosine {:.3} vs most frequent {:.3}; {} test pairs",
            report.auc, report.highest_cosine_top3_precision, report.most_frequent_top3_precision, report.test_pairs
        ),
    )
}

fn medium_analogue() -> Outcome {
    let synth = SynthConfig {
        url_echo_fraction: 0.3,
        ..SynthConfig::default()
    };
    let (_, data) = match synthetic_data(&synth, &PipelineConfig::default(), ANNOTATOR_ERROR) {
        Ok(d) => d,
        Err(e) => return Outcome::check(false, e.to_string()),
    };
    match medium(&data, &EvalConfig::default()) {
        Ok(r) => Outcome::check(
            r.recall >= 0.80,
            format!(
                "recall {:.3} (>= 0.80) over {} URL-derived positives",
                r.recall, r.evaluated
            ),
        ),
        Err(e) => Outcome::check(false, e.to_string()),
    }
}

fn large_analogue() -> Outcome {
    let (_, data) = match synthetic_data(&SynthConfig::default(), &PipelineConfig::default(), ANNOTATOR_ERROR) {
        Ok(d) => d,
        Err(e) => return Outcome::check(false, e.to_string()),
    };
    match large(&data, &EvalConfig::default()) {
        Ok(r) => {
            let has_ci = r.precision_at_1.half_width.is_some() && r.ndcg_at_3.half_width.is_some();
            let ok = r.precision_at_1.mean >= 0.85 && r.ndcg_at_3.mean >= 0.85 && has_ci;
            println!("{r}");
            Outcome::check(
                ok,
                format!(
                    "P@1 {:.3} (>= 0.85), NDCG@3 {:.3} (>= 0.85), 95% t intervals {}",
                    r.precision_at_1.mean,
                    r.ndcg_at_3.mean,
                    if has_ci { "present" } else { "missing" }
                ),
            )
        }
        Err(e) => Outcome::check(false, e.to_string()),
    }
}

// ---------------------------------------------------------------- criterion 8

fn ranked_output(seed: u64) -> Result<Vec<u8>, String> {
    let synth = SynthConfig {
        n_articles: 150,
        tweets_per_topic: 800,
        seed,
        ..SynthConfig::default()
    };
    let (_, data) = synthetic_data(&synth, &PipelineConfig::default(), ANNOTATOR_ERROR).map_err(|e| e.to_string())?;
    let agreed = &data.labels.as_ref().ok_or("no labels")?.pairs;
    let mut train_pairs = data.train_run.pairs.clone();
    newstag::eval::apply_labels(&mut train_pairs, agreed);
    let config = TrainConfig {
        batch_size: Some(32),
        seed,
        ..TrainConfig::default()
    };
    let model = train(&train_pairs, &config).map_err(|e| e.to_string())?;
    let mut pairs = data.test_run.pairs.clone();
    model.score_all(&mut pairs);
    let rows = rank_all(&pairs, 3, 0.5);
    let mut out = Vec::new();
    write_ranked(&mut out, &rows).map_err(|e| e.to_string())?;
    out.extend(model.to_text().into_bytes());
    Ok(out)
}

fn random_f64(rng: &mut ChaCha8Rng) -> f64 {
    match rng.random_range(0..6) {
        0 => rng.random::<f64>() * 1e-300,
        1 => rng.random::<f64>() * 1e300,
        2 => f64::from_bits(rng.random_range(1..(1u64 << 52))),
        3 => 1.0 / 3.0,
        _ => rng.random::<f64>(),
    }
}

fn random_word(rng: &mut ChaCha8Rng) -> String {
    const CHARS: &[char] = &['a', 'z', '_', '0', 'é', 'ß', '\u{1F600}', '"', ',', '\\', ' '];
    (0..rng.random_range(1..10))
        .map(|_| CHARS[rng.random_range(0..CHARS.len())])
        .collect()
}

fn random_state(rng: &mut ChaCha8Rng) -> State {
    let profiles = (0..rng.random_range(0..6))
        .map(|_| HashtagProfile {
            scope: if rng.random_bool(0.5) {
                ProfileScope::Local(random_word(rng))
            } else {
                ProfileScope::Global(random_word(rng))
            },
            tag: random_word(rng),
            term_weights: (0..rng.random_range(0..12))
                .map(|_| (random_word(rng), random_f64(rng)))
                .collect::<BTreeMap<_, _>>(),
            tweet_count: rng.random_range(0..100_000),
        })
        .collect();
    let model = rng.random_bool(0.7).then(|| LogisticModel {
        weights: std::array::from_fn(|_| random_f64(rng) - 0.5),
        bias: random_f64(rng) - 0.5,
        hyperparams: TrainConfig {
            learning_rate: random_f64(rng).max(1e-9),
            epochs: rng.random_range(1..5000),
            l2_lambda: random_f64(rng),
            seed: rng.random(),
            batch_size: rng.random_bool(0.5).then(|| rng.random_range(1..512)),
        },
        final_loss: rng.random_bool(0.8).then(|| random_f64(rng)),
    });
    let scored_pairs = (0..rng.random_range(0..10))
        .map(|_| {
            let features = FeatureVector::new(std::array::from_fn(|_| rng.random::<f64>())).unwrap();
            let mut p = ScoredPair::new(&random_word(rng), &random_word(rng), features);
            p.score = rng.random_bool(0.6).then(|| rng.random::<f64>());
            p.label = rng.random_bool(0.5).then(|| rng.random_range(0..=2));
            p.binary_label = rng.random_bool(0.5).then(|| rng.random_bool(0.5));
            p
        })
        .collect();
    State {
        profiles,
        model,
        scored_pairs,
    }
}

fn determinism_checks() -> Outcome {
    let first = ranked_output(7);
    let second = ranked_output(7);
    let (first, second) = match (first, second) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return Outcome::check(false, e),
    };
    if first != second {
        return Outcome::check(false, "seeded runs produced different ranked output");
    }
    let lines = first.iter().filter(|&&b| b == b'\n').count();

    let dir = match tempfile::tempdir() {
        Ok(d) => d,
        Err(e) => return Outcome::check(false, e.to_string()),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..200 {
        let state = random_state(&mut rng);
        let path = dir.path().join(format!("state-{i}.json"));
        let loaded = save_state(&path, &state).and_then(|()| load_state(&path));
        match loaded {
            Ok(s) if s == state => {}
            Ok(_) => return Outcome::check(false, format!("state {i} changed across save/load")),
            Err(e) => return Outcome::check(false, format!("state {i}: {e}")),
        }
    }
    Outcome::check(
        true,
        format!(
            "two seeded runs byte-identical ({} bytes, {lines} lines), 200 state round trips exact",
            first.len()
        ),
    )
}

fn main() {
    let secs = Duration::from_secs;
    let results = [
        run(1, "AUC oracle", Some(secs(10)), auc_oracle),
        run(2, "DCG/NDCG", None, ndcg_checks),
        run(3, "trainer", None, trainer_checks),
        run(4, "matcher", None, matcher_checks),
        run(5, "small synthetic", Some(secs(120)), small_analogue),
        run(6, "medium synthetic", Some(secs(60)), medium_analogue),
        run(7, "large synthetic", Some(secs(120)), large_analogue),
        run(8, "determinism and persistence", None, determinism_checks),
    ];
    let failed = results.iter().filter(|&&ok| !ok).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
