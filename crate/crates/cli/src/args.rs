use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use newstag::eval::ExperimentKind;
use newstag::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "newstag", version, about = "Link streamed news articles to Twitter hashtags")]
pub struct Cli {
    #[command(flatten)]
    pub overrides: Overrides,

    #[command(subcommand)]
    pub command: Command,
}

/// Settings shared by all subcommands. Flags override the config file.
#[derive(Debug, Default, Args)]
pub struct Overrides {
    /// Run configuration file (TOML).
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Article file, one JSON record per line.
    #[arg(long, global = true, value_name = "FILE")]
    pub articles: Option<PathBuf>,
    /// Tweet file, one JSON record per line.
    #[arg(long, global = true, value_name = "FILE")]
    pub tweets: Option<PathBuf>,
    /// Annotation file; repeat for each annotator. Replaces configured files.
    #[arg(long = "labels", global = true, value_name = "FILE")]
    pub labels: Vec<PathBuf>,
    /// Directory for intermediate artifacts [default: <out>/state].
    #[arg(long, global = true, value_name = "DIR")]
    pub state_dir: Option<PathBuf>,
    /// Directory for final outputs.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Tokenizer settings file.
    #[arg(long, global = true, value_name = "FILE")]
    pub tokenizer: Option<PathBuf>,
    /// Processing window: YYYY-MM-DD or START..END (RFC 3339).
    #[arg(long, global = true)]
    pub window: Option<String>,
    /// Window whose labels train the classifier.
    #[arg(long, global = true)]
    pub train_window: Option<String>,
    /// Maximum number of pooled predicates.
    #[arg(long, global = true)]
    pub cap: Option<usize>,
    /// Seconds between predicate pool rebuilds.
    #[arg(long, global = true, value_name = "SECONDS")]
    pub refresh_period: Option<i64>,
    /// Keywords kept per article.
    #[arg(long, global = true)]
    pub max_keywords: Option<usize>,
    /// Classifier threshold; scores strictly above it are relevant.
    #[arg(long, global = true)]
    pub threshold: Option<f64>,
    /// Hashtags ranked per article.
    #[arg(long, global = true)]
    pub top_k: Option<usize>,
    /// Seed for minibatch shuffles.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Gradient descent step size.
    #[arg(long, global = true)]
    pub learning_rate: Option<f64>,
    /// Training epochs.
    #[arg(long, global = true)]
    pub epochs: Option<usize>,
    /// L2 penalty on the weights.
    #[arg(long, global = true)]
    pub l2_lambda: Option<f64>,
    /// Minibatch size; full-batch when absent.
    #[arg(long, global = true)]
    pub batch_size: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, config: &mut RunConfig) {
        let p = &mut config.paths;
        for (slot, value) in [
            (&mut p.articles, &self.articles),
            (&mut p.tweets, &self.tweets),
            (&mut p.state_dir, &self.state_dir),
            (&mut p.out_dir, &self.out),
            (&mut p.tokenizer, &self.tokenizer),
        ] {
            if value.is_some() {
                slot.clone_from(value);
            }
        }
        if !self.labels.is_empty() {
            p.labels.clone_from(&self.labels);
        }
        if self.window.is_some() {
            config.window.clone_from(&self.window);
        }
        if self.train_window.is_some() {
            config.train_window.clone_from(&self.train_window);
        }
        let set = |slot: &mut usize, v: Option<usize>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut config.cap, self.cap);
        set(&mut config.max_keywords, self.max_keywords);
        set(&mut config.top_k, self.top_k);
        set(&mut config.train.epochs, self.epochs);
        if let Some(v) = self.refresh_period {
            config.refresh_period = v;
        }
        if let Some(v) = self.threshold {
            config.threshold = v;
        }
        if let Some(v) = self.seed {
            config.seed = v;
        }
        if let Some(v) = self.learning_rate {
            config.train.learning_rate = v;
        }
        if let Some(v) = self.l2_lambda {
            config.train.l2_lambda = v;
        }
        if self.batch_size.is_some() {
            config.train.batch_size = self.batch_size;
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic corpus with simulated annotations and a run config.
    Synth(SynthArgs),
    /// Extract article keywords.
    Extract,
    /// Replay the window and dump the final predicate pool.
    Pool,
    /// Build tweet-bags and hashtag profiles for the window.
    Match,
    /// Compute pair features for the window.
    Featurize,
    /// Train the classifier on the labels of the training window.
    Train,
    /// Score and rank the window's candidate pairs with a trained model.
    Rank(ModelArgs),
    /// Run one of the evaluation experiments.
    Eval(EvalArgs),
    /// Grade candidate pairs interactively.
    Label(LabelArgs),
    /// Run every stage for the window.
    Pipeline(ModelArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 500)]
    pub n_articles: usize,
    #[arg(long, default_value_t = 20)]
    pub n_topics: usize,
    #[arg(long, default_value_t = 2500)]
    pub tweets_per_topic: usize,
    /// Fraction of noise tweets.
    #[arg(long, default_value_t = 0.2)]
    pub noise: f64,
    /// Fraction of articles that get tweets linking to them.
    #[arg(long, default_value_t = 0.0)]
    pub url_echo: f64,
    #[arg(long, default_value_t = 2)]
    pub days: usize,
    /// Probability that a simulated annotator gives a wrong grade.
    #[arg(long, default_value_t = 0.05)]
    pub annotator_error: f64,
    /// Skip the simulated annotators.
    #[arg(long)]
    pub no_annotators: bool,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Trained model file [default: <out>/model.txt, or train from labels].
    #[arg(long, value_name = "FILE")]
    pub model: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Experiment {
    Small,
    Medium,
    Large,
}

impl From<Experiment> for ExperimentKind {
    fn from(e: Experiment) -> Self {
        match e {
            Experiment::Small => ExperimentKind::Small,
            Experiment::Medium => ExperimentKind::Medium,
            Experiment::Large => ExperimentKind::Large,
        }
    }
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, value_enum)]
    pub experiment: Experiment,
}

#[derive(Debug, Args)]
pub struct LabelArgs {
    /// Who is grading.
    #[arg(long)]
    pub annotator: String,
    /// Pairs file written by `featurize` [default: <state-dir>/pairs.csv].
    #[arg(long, value_name = "FILE")]
    pub pairs: Option<PathBuf>,
    /// Label file to append to [default: <out>/labels-<annotator>.csv].
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}
