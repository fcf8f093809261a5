use std::cell::OnceCell;
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;

use newstag::corpus::{daily_windows, load_articles, load_state, load_tweets, save_state};
use newstag::eval::{
    agreement_from_records, apply_labels, confusion_metrics, read_labels, roc_auc, run_experiment, write_labels,
    Agreement, AnnotationRecord, ConfusionCounts, ConfusionMetrics, EvalConfig, ExperimentData,
};
use newstag::matcher::{bag_dump, ProfileScope};
use newstag::pipeline::{prepare_articles, prepare_tweets, run_window};
use newstag::ranker::{classify, rank_all, read_model, read_pairs, train, write_pairs, write_ranked};
use newstag::synthgen::{generate, simulate_annotations};
use newstag::{
    Article, Error, KeywordPhrase, LogisticModel, PipelineConfig, RunConfig, State, StreamWindow, SynthConfig, Tweet,
    WindowRun,
};

use crate::args::{EvalArgs, LabelArgs, ModelArgs, Overrides, SynthArgs};
use crate::error::{CliError, CliResult};
use crate::label::{self, PromptContext};
use crate::output::{Lock, Staging};

pub const EFFECTIVE_CONFIG: &str = "effective_config.toml";
const PROFILE_DUMP_TERMS: usize = 10;

/// Resolved configuration of one invocation.
pub struct Ctx {
    pub config: RunConfig,
    pub pipeline: PipelineConfig,
    agreement: OnceCell<Option<Agreement>>,
}

impl Ctx {
    pub fn new(overrides: &Overrides) -> CliResult<Self> {
        let mut config = match &overrides.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        overrides.apply(&mut config);
        config.validate()?;
        let pipeline = config.pipeline()?;
        Ok(Ctx {
            config,
            pipeline,
            agreement: OnceCell::new(),
        })
    }

    fn out_dir(&self) -> CliResult<PathBuf> {
        Ok(self
            .config
            .require("out_dir (--out)", &self.config.paths.out_dir)?
            .to_path_buf())
    }

    fn state_dir(&self) -> CliResult<PathBuf> {
        match &self.config.paths.state_dir {
            Some(dir) => Ok(dir.clone()),
            None => Ok(self.out_dir()?.join("state")),
        }
    }

    fn window(&self) -> CliResult<StreamWindow> {
        let spec = self
            .config
            .window
            .as_deref()
            .ok_or_else(|| Error::Config("missing window (--window)".into()))?;
        Ok(StreamWindow::parse(spec)?)
    }

    /// The training window, falling back to the processing window.
    fn train_window(&self) -> CliResult<StreamWindow> {
        match &self.config.train_window {
            Some(spec) => Ok(StreamWindow::parse(spec)?),
            None => self.window(),
        }
    }

    /// A configured input file, which must exist.
    fn input(&self, what: &str, slot: &Option<PathBuf>) -> CliResult<PathBuf> {
        let path = self.config.require(what, slot)?;
        existing(what, path)?;
        Ok(path.to_path_buf())
    }

    fn raw_inputs(&self) -> CliResult<(Vec<Article>, Vec<Tweet>)> {
        let paths = &self.config.paths;
        let articles = load_articles(&self.input("articles (--articles)", &paths.articles)?)?;
        let tweets =
            load_tweets(&self.input("tweets (--tweets)", &paths.tweets)?)?.collect::<newstag::Result<Vec<_>>>()?;
        Ok((articles, tweets))
    }

    fn inputs(&self) -> CliResult<(Vec<Article>, Vec<Tweet>)> {
        let (mut articles, mut tweets) = self.raw_inputs()?;
        prepare_articles(&mut articles, &self.pipeline)?;
        prepare_tweets(&mut tweets, &self.pipeline);
        Ok((articles, tweets))
    }

    fn run(&self, window: &StreamWindow) -> CliResult<WindowRun> {
        let (articles, tweets) = self.inputs()?;
        let run = run_window(&articles, &tweets, window, &self.pipeline)?;
        report_diagnostics(&run);
        Ok(run)
    }

    /// Agreed labels from the configured annotation files, loaded once.
    fn agreement(&self) -> CliResult<Option<&Agreement>> {
        if let Some(cached) = self.agreement.get() {
            return Ok(cached.as_ref());
        }
        let loaded = self.load_agreement()?;
        Ok(self.agreement.get_or_init(|| loaded).as_ref())
    }

    fn load_agreement(&self) -> CliResult<Option<Agreement>> {
        if self.config.paths.labels.is_empty() {
            return Ok(None);
        }
        let mut records: Vec<AnnotationRecord> = Vec::new();
        for path in &self.config.paths.labels {
            existing("labels (--labels)", path)?;
            records.extend(read_labels(path)?);
        }
        let agreement = agreement_from_records(&records)?;
        println!(
            "annotators agree on {} of {} pairs ({:.3})",
            agreement.pairs.len(),
            agreement.compared,
            agreement.rate
        );
        Ok(Some(agreement))
    }

    fn eval_config(&self) -> EvalConfig {
        EvalConfig {
            train: self.config.train,
            threshold: self.config.threshold,
            top_k: self.config.top_k,
            ..EvalConfig::default()
        }
    }

    fn stage(&self, dir: &Path) -> CliResult<Staging> {
        let mut staging = Staging::new(dir)?;
        staging.write(EFFECTIVE_CONFIG, self.config.to_toml())?;
        Ok(staging)
    }
}

fn existing(what: &str, path: &Path) -> CliResult<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(Error::Config(format!("{what}: {} does not exist", path.display())).into())
    }
}

fn report_diagnostics(run: &WindowRun) {
    for d in &run.diagnostics {
        eprintln!("note: {d}");
    }
}

fn announce(written: &[PathBuf]) {
    for p in written {
        if !p.ends_with(EFFECTIVE_CONFIG) {
            println!("wrote {}", p.display());
        }
    }
}

fn json<T: Serialize>(what: &'static str, value: &T) -> CliResult<String> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| CliError::Internal {
            what,
            message: e.to_string(),
        })
}

/// Load the state file if present, apply `update`, and stage the result.
fn stage_state(staging: &mut Staging, update: impl FnOnce(&mut State)) -> CliResult<()> {
    let existing = staging.final_path(STATE_FILE);
    let mut state = if existing.exists() {
        load_state(&existing)?
    } else {
        State::default()
    };
    update(&mut state);
    let tmp = staging.staged_path(STATE_FILE)?;
    save_state(&tmp, &state)?;
    Ok(())
}

const STATE_FILE: &str = "state.json";

fn profiles_of(run: &WindowRun) -> Vec<newstag::HashtagProfile> {
    run.local_profiles.iter().chain(&run.global_profiles).cloned().collect()
}

fn profile_dump(run: &WindowRun) -> String {
    run.local_profiles
        .iter()
        .chain(&run.global_profiles)
        .map(|p| p.dump_line(PROFILE_DUMP_TERMS) + "\n")
        .collect()
}

#[derive(Serialize)]
struct KeywordLine<'a> {
    id: &'a str,
    keywords: &'a [KeywordPhrase],
}

fn keyword_lines(articles: &[Article]) -> CliResult<String> {
    let mut out = String::new();
    for a in articles {
        let line = serde_json::to_string(&KeywordLine {
            id: &a.id,
            keywords: &a.keywords,
        })
        .map_err(|e| CliError::Internal {
            what: "keywords",
            message: e.to_string(),
        })?;
        out.push_str(&line);
        out.push('\n');
    }
    Ok(out)
}

fn pairs_csv(run: &WindowRun) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    write_pairs(&mut buf, &run.pairs)?;
    Ok(buf)
}

// ------------------------------------------------------------------ stages

pub fn extract(ctx: &Ctx) -> CliResult<()> {
    let state_dir = ctx.state_dir()?;
    let _lock = Lock::acquire(&state_dir)?;
    let (articles, _) = ctx.inputs()?;
    let mut staging = ctx.stage(&state_dir)?;
    staging.write("keywords.jsonl", keyword_lines(&articles)?)?;
    let without = articles.iter().filter(|a| a.keywords.is_empty()).count();
    println!(
        "extracted keywords for {} articles ({without} without keywords)",
        articles.len()
    );
    announce(&staging.commit()?);
    Ok(())
}

pub fn pool(ctx: &Ctx) -> CliResult<()> {
    let state_dir = ctx.state_dir()?;
    let _lock = Lock::acquire(&state_dir)?;
    let run = ctx.run(&ctx.window()?)?;
    let mut staging = ctx.stage(&state_dir)?;
    staging.write("pool.txt", run.final_pool.dump())?;
    println!(
        "{} predicates in the pool after {} refreshes",
        run.final_pool.len(),
        run.refreshes
    );
    announce(&staging.commit()?);
    Ok(())
}

pub fn match_tweets(ctx: &Ctx) -> CliResult<()> {
    let state_dir = ctx.state_dir()?;
    let _lock = Lock::acquire(&state_dir)?;
    let run = ctx.run(&ctx.window()?)?;
    let mut staging = ctx.stage(&state_dir)?;
    staging.write("bags.tsv", bag_dump(&run.assignments))?;
    staging.write("profiles.txt", profile_dump(&run))?;
    stage_state(&mut staging, |s| s.profiles = profiles_of(&run))?;
    let matched: usize = run.bags.iter().map(|b| b.tweet_ids.len()).sum();
    println!(
        "{} tweets in window, {matched} bag memberships over {} articles, {} local and {} global profiles",
        run.tweets_in_window,
        run.bags.len(),
        run.local_profiles.len(),
        run.global_profiles.len()
    );
    announce(&staging.commit()?);
    Ok(())
}

pub fn featurize(ctx: &Ctx) -> CliResult<()> {
    let state_dir = ctx.state_dir()?;
    let _lock = Lock::acquire(&state_dir)?;
    let run = ctx.run(&ctx.window()?)?;
    let mut staging = ctx.stage(&state_dir)?;
    staging.write("pairs.csv", pairs_csv(&run)?)?;
    stage_state(&mut staging, |s| {
        s.profiles = profiles_of(&run);
        s.scored_pairs = run.pairs.clone();
    })?;
    if run.pairs.is_empty() {
        println!("no candidate pairs in window {}", run.window.label);
    } else {
        println!("{} candidate pairs", run.pairs.len());
    }
    announce(&staging.commit()?);
    Ok(())
}

fn train_model(ctx: &Ctx, agreement: &Agreement) -> CliResult<(LogisticModel, usize)> {
    let window = ctx.train_window()?;
    let run = ctx.run(&window)?;
    let mut pairs = run.pairs;
    let labeled = apply_labels(&mut pairs, &agreement.pairs);
    if labeled == 0 {
        return Err(Error::Coverage(format!(
            "no labeled candidate pairs in training window {}",
            window.label
        ))
        .into());
    }
    let model = train(&pairs, &ctx.config.train).map_err(|e| e.in_stage("train"))?;
    Ok((model, labeled))
}

pub fn train_cmd(ctx: &Ctx) -> CliResult<()> {
    let state_dir = ctx.state_dir()?;
    let out_dir = ctx.out_dir()?;
    let _lock = Lock::acquire(&state_dir)?;
    let agreement = ctx
        .agreement()?
        .ok_or_else(|| Error::Config("training needs label files (--labels)".into()))?;
    let (model, labeled) = train_model(ctx, agreement)?;
    println!(
        "trained on {labeled} labeled pairs, final loss {:.6}",
        model.final_loss.unwrap_or(f64::NAN)
    );
    let mut out = ctx.stage(&out_dir)?;
    out.write("model.txt", model.to_text())?;
    let mut state = ctx.stage(&state_dir)?;
    stage_state(&mut state, |s| s.model = Some(model.clone()))?;
    announce(&out.commit()?);
    announce(&state.commit()?);
    Ok(())
}

/// The model named on the command line, else (with `use_saved`)
/// `<out>/model.txt`, else one trained from the configured labels. The flag
/// tells whether the model was trained here.
fn obtain_model(ctx: &Ctx, args: &ModelArgs, use_saved: bool) -> CliResult<(LogisticModel, bool)> {
    if let Some(path) = &args.model {
        return Ok((read_model(path)?, false));
    }
    let saved = ctx.out_dir()?.join("model.txt");
    if use_saved && saved.exists() {
        return Ok((read_model(&saved)?, false));
    }
    let agreement = ctx
        .agreement()?
        .ok_or_else(|| Error::Config("no model: pass --model, train one first, or configure label files".into()))?;
    let (model, labeled) = train_model(ctx, agreement)?;
    println!("trained on {labeled} labeled pairs");
    Ok((model, true))
}

pub fn rank(ctx: &Ctx, args: &ModelArgs) -> CliResult<()> {
    let state_dir = ctx.state_dir()?;
    let out_dir = ctx.out_dir()?;
    let _lock = Lock::acquire(&state_dir)?;
    let mut run = ctx.run(&ctx.window()?)?;
    let mut out = ctx.stage(&out_dir)?;
    if run.pairs.is_empty() {
        println!("no candidate pairs in window {}", run.window.label);
        out.write("ranked.csv", "")?;
        announce(&out.commit()?);
        return Ok(());
    }
    let (model, _) = obtain_model(ctx, args, true)?;
    model.score_all(&mut run.pairs);
    let rows = rank_all(&run.pairs, ctx.config.top_k, ctx.config.threshold);
    write_ranked(out.create("ranked.csv")?, &rows)?;
    println!("ranked {} hashtags for {} articles", rows.len(), ranked_articles(&rows));
    announce(&out.commit()?);
    Ok(())
}

fn ranked_articles(rows: &[newstag::ranker::RankedRow]) -> usize {
    rows.iter().filter(|r| r.rank == 1).count()
}

#[derive(Serialize)]
struct ReportFile<'a, T: Serialize> {
    config: &'a RunConfig,
    report: &'a T,
}

pub fn eval(ctx: &Ctx, args: &EvalArgs) -> CliResult<()> {
    let out_dir = ctx.out_dir()?;
    let agreement = ctx.agreement()?;
    let (articles, tweets) = ctx.raw_inputs()?;
    let data = ExperimentData::new(
        articles,
        tweets,
        &ctx.train_window()?,
        &ctx.window()?,
        agreement.cloned(),
        &ctx.pipeline,
    )?;
    let report = run_experiment(args.experiment.into(), &data, &ctx.eval_config())?;
    let name = format!("report-{}", format!("{:?}", args.experiment).to_lowercase());
    let text = report.to_string();
    println!("{text}");
    let mut out = ctx.stage(&out_dir)?;
    out.write(&format!("{name}.txt"), text + "\n")?;
    out.write(
        &format!("{name}.json"),
        json(
            "report",
            &ReportFile {
                config: &ctx.config,
                report: &report,
            },
        )?,
    )?;
    announce(&out.commit()?);
    Ok(())
}

pub fn label(ctx: &Ctx, args: &LabelArgs) -> CliResult<()> {
    let pairs_path = match &args.pairs {
        Some(p) => p.clone(),
        None => ctx.state_dir()?.join("pairs.csv"),
    };
    let output = match &args.output {
        Some(p) => p.clone(),
        None => {
            let dir = ctx.out_dir()?;
            std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
            dir.join(format!("labels-{}.csv", args.annotator))
        }
    };
    let pairs = read_pairs(&pairs_path)?;
    let headlines: BTreeMap<String, String> = match &ctx.config.paths.articles {
        Some(path) => load_articles(path)?.into_iter().map(|a| (a.id, a.headline)).collect(),
        None => BTreeMap::new(),
    };
    let state_path = pairs_path.with_file_name(STATE_FILE);
    let state = if state_path.exists() {
        load_state(&state_path)?
    } else {
        State::default()
    };
    let profiles = state
        .profiles
        .iter()
        .filter_map(|p| match &p.scope {
            ProfileScope::Local(a) => Some(((a.clone(), p.tag.clone()), p)),
            ProfileScope::Global(_) => None,
        })
        .collect();
    let context = PromptContext {
        headlines: &headlines,
        profiles: &profiles,
        top_terms: 8,
    };
    let stdin = std::io::stdin();
    let mut input = stdin.lock();
    let mut stdout = std::io::stdout();
    label::run(&pairs, &args.annotator, &output, &context, &mut input, &mut stdout)?;
    Ok(())
}

// ----------------------------------------------------------------- pipeline

#[derive(Debug, Serialize)]
pub struct WindowEvaluation {
    pub labeled_pairs: usize,
    pub counts: ConfusionCounts,
    pub metrics: ConfusionMetrics,
    /// Absent when the labeled pairs hold a single class.
    pub auc: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct PipelineSummary {
    pub window: String,
    pub articles_in_window: usize,
    pub tweets_in_window: usize,
    pub refreshes: usize,
    pub pool_size: usize,
    pub bag_memberships: usize,
    pub candidate_pairs: usize,
    pub ranked_articles: usize,
    pub ranked_rows: usize,
    pub evaluation: Option<WindowEvaluation>,
}

impl fmt::Display for PipelineSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "window:             {}", self.window)?;
        writeln!(f, "articles in window: {}", self.articles_in_window)?;
        writeln!(f, "tweets in window:   {}", self.tweets_in_window)?;
        writeln!(
            f,
            "pool refreshes:     {} (final pool {})",
            self.refreshes, self.pool_size
        )?;
        writeln!(f, "bag memberships:    {}", self.bag_memberships)?;
        writeln!(f, "candidate pairs:    {}", self.candidate_pairs)?;
        write!(
            f,
            "ranked:             {} hashtags for {} articles",
            self.ranked_rows, self.ranked_articles
        )?;
        if let Some(e) = &self.evaluation {
            let m = &e.metrics;
            writeln!(f)?;
            writeln!(f, "against {} labeled pairs:", e.labeled_pairs)?;
            write!(
                f,
                "  accuracy {:.3}  precision {:.3}  recall {:.3}  f1 {:.3}",
                m.accuracy.value, m.precision.value, m.recall.value, m.f1.value
            )?;
            if let Some(auc) = e.auc {
                write!(f, "  auc {auc:.3}")?;
            }
        }
        Ok(())
    }
}

fn evaluate_window(pairs: &[newstag::ScoredPair], agreement: &Agreement, threshold: f64) -> Option<WindowEvaluation> {
    let mut labeled = pairs.to_vec();
    apply_labels(&mut labeled, &agreement.pairs);
    let judged: Vec<(f64, bool)> = labeled
        .iter()
        .filter_map(|p| Some((p.score?, p.binary_label?)))
        .collect();
    if judged.is_empty() {
        return None;
    }
    let counts = ConfusionCounts::from_predictions(judged.iter().map(|&(s, y)| (classify(s, threshold), y)));
    let scores: Vec<f64> = judged.iter().map(|p| p.0).collect();
    let labels: Vec<bool> = judged.iter().map(|p| p.1).collect();
    Some(WindowEvaluation {
        labeled_pairs: judged.len(),
        metrics: confusion_metrics(&counts),
        counts,
        auc: roc_auc(&scores, &labels).ok(),
    })
}

pub fn pipeline(ctx: &Ctx, args: &ModelArgs) -> CliResult<()> {
    let state_dir = ctx.state_dir()?;
    let out_dir = ctx.out_dir()?;
    let _lock = Lock::acquire(&state_dir)?;
    let window = ctx.window()?;
    let (articles, tweets) = ctx.inputs()?;
    let mut run = run_window(&articles, &tweets, &window, &ctx.pipeline)?;
    report_diagnostics(&run);

    let mut state = ctx.stage(&state_dir)?;
    state.write("keywords.jsonl", keyword_lines(&articles)?)?;
    state.write("pool.txt", run.final_pool.dump())?;
    state.write("bags.tsv", bag_dump(&run.assignments))?;
    state.write("profiles.txt", profile_dump(&run))?;
    state.write("pairs.csv", pairs_csv(&run)?)?;

    let mut out = ctx.stage(&out_dir)?;
    let mut model = None;
    let mut evaluation = None;
    let mut rows = Vec::new();
    if run.pairs.is_empty() {
        println!("no candidate pairs in window {}", window.label);
    } else {
        let (m, trained) = obtain_model(ctx, args, false)?;
        m.score_all(&mut run.pairs);
        rows = rank_all(&run.pairs, ctx.config.top_k, ctx.config.threshold);
        if trained {
            out.write("model.txt", m.to_text())?;
        }
        if let Some(agreement) = ctx.agreement()? {
            evaluation = evaluate_window(&run.pairs, agreement, ctx.config.threshold);
        }
        model = Some(m);
    }
    write_ranked(out.create("ranked.csv")?, &rows)?;

    let summary = PipelineSummary {
        window: window.label.clone(),
        articles_in_window: run.article_ids.len(),
        tweets_in_window: run.tweets_in_window,
        refreshes: run.refreshes,
        pool_size: run.final_pool.len(),
        bag_memberships: run.assignments.len(),
        candidate_pairs: run.pairs.len(),
        ranked_articles: ranked_articles(&rows),
        ranked_rows: rows.len(),
        evaluation,
    };
    println!("{summary}");
    out.write("report.txt", format!("{summary}\n"))?;
    out.write(
        "report.json",
        json(
            "report",
            &ReportFile {
                config: &ctx.config,
                report: &summary,
            },
        )?,
    )?;
    stage_state(&mut state, |s| {
        s.profiles = profiles_of(&run);
        s.scored_pairs = run.pairs.clone();
        if model.is_some() {
            s.model = model.clone();
        }
    })?;
    announce(&state.commit()?);
    announce(&out.commit()?);
    Ok(())
}

// -------------------------------------------------------------------- synth

pub fn synth(ctx: &Ctx, args: &SynthArgs) -> CliResult<()> {
    let out_dir = ctx.out_dir()?;
    let synth = SynthConfig {
        n_articles: args.n_articles,
        n_topics: args.n_topics,
        tweets_per_topic: args.tweets_per_topic,
        noise_tweet_fraction: args.noise,
        url_echo_fraction: args.url_echo,
        n_days: args.days,
        seed: ctx.config.seed,
        ..SynthConfig::default()
    };
    let corpus = generate(&synth)?;
    let mut out = Staging::new(&out_dir)?;
    write_synth_files(&mut out, &corpus)?;
    out.write("synth_config.toml", toml_string(&synth)?)?;

    let days = daily_windows(synth.start, synth.start + (synth.n_days as i64 - 1) * 86_400);
    let mut labels = Vec::new();
    if !args.no_annotators {
        let mut articles = corpus.articles.clone();
        let mut tweets = corpus.tweets.clone();
        prepare_articles(&mut articles, &ctx.pipeline)?;
        prepare_tweets(&mut tweets, &ctx.pipeline);
        let mut pairs = Vec::new();
        for day in &days {
            let run = run_window(&articles, &tweets, day, &ctx.pipeline)?;
            pairs.extend(run.pairs.into_iter().map(|p| (p.article_id, p.hashtag)));
        }
        for n in 1..=2u64 {
            let annotator = format!("annotator-{n}");
            let records = simulate_annotations(
                &corpus,
                &pairs,
                &annotator,
                args.annotator_error,
                ctx.config.seed.wrapping_add(n),
            );
            let name = format!("labels-{annotator}.csv");
            write_labels(out.staged_path(&name)?, &records)?;
            labels.push(PathBuf::from(name));
        }
        println!("simulated two annotators over {} candidate pairs", pairs.len());
    }

    let run_config = RunConfig {
        seed: ctx.config.seed,
        window: days.get(1).or(days.first()).map(|d| d.label.clone()),
        train_window: days.first().map(|d| d.label.clone()),
        paths: newstag::config::Paths {
            articles: Some("articles.jsonl".into()),
            tweets: Some("tweets.jsonl".into()),
            labels,
            state_dir: Some("state".into()),
            out_dir: Some("run".into()),
            tokenizer: None,
        },
        ..RunConfig::default()
    };
    out.write("run.toml", run_config.to_toml())?;
    println!(
        "generated {} articles and {} tweets over {} days",
        corpus.articles.len(),
        corpus.tweets.len(),
        synth.n_days
    );
    announce(&out.commit()?);
    Ok(())
}

fn write_synth_files(out: &mut Staging, corpus: &newstag::SynthCorpus) -> CliResult<()> {
    let tmp = out.staged_path("articles.jsonl")?;
    let dir = tmp.parent().expect("staged file has a parent").to_path_buf();
    out.staged_path("tweets.jsonl")?;
    out.staged_path("truth.csv")?;
    corpus.write(&dir)?;
    Ok(())
}

fn toml_string<T: Serialize>(value: &T) -> CliResult<String> {
    toml::to_string(value).map_err(|e| CliError::Internal {
        what: "synthetic config",
        message: e.to_string(),
    })
}
