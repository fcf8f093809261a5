use newstag::corpus::{load_articles, load_tweets};
use newstag::pipeline::{prepare_articles, prepare_tweets, run_window};
use newstag::ranker::{rank_all, read_ranked, train, write_ranked};
use newstag::synthgen::{generate, DEFAULT_START};
use newstag::{Article, PipelineConfig, StreamWindow, SynthConfig, TrainConfig, Tweet, WindowRun};

fn small() -> SynthConfig {
    SynthConfig {
        n_articles: 80,
        tweets_per_topic: 400,
        ..SynthConfig::default()
    }
}

fn run(mut articles: Vec<Article>, mut tweets: Vec<Tweet>) -> WindowRun {
    let config = PipelineConfig::default();
    prepare_articles(&mut articles, &config).unwrap();
    prepare_tweets(&mut tweets, &config);
    run_window(&articles, &tweets, &StreamWindow::day(DEFAULT_START + 86_400), &config).unwrap()
}

#[test]
fn corpus_files_reproduce_the_in_memory_run() {
    let corpus = generate(&small()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    corpus.write(dir.path()).unwrap();

    let articles = load_articles(dir.path().join("articles.jsonl")).unwrap();
    let tweets: Vec<Tweet> = load_tweets(dir.path().join("tweets.jsonl"))
        .unwrap()
        .collect::<newstag::Result<_>>()
        .unwrap();
    assert_eq!(articles.len(), corpus.articles.len());
    assert_eq!(tweets.len(), corpus.tweets.len());

    let from_files = run(articles, tweets);
    let in_memory = run(corpus.articles.clone(), corpus.tweets.clone());
    assert!(!from_files.pairs.is_empty());
    assert_eq!(from_files.pairs, in_memory.pairs);
    assert_eq!(from_files.final_pool.dump(), in_memory.final_pool.dump());
}

#[test]
fn ranked_output_survives_a_file_round_trip() {
    let corpus = generate(&small()).unwrap();
    let mut pairs = run(corpus.articles.clone(), corpus.tweets.clone()).pairs;
    for p in &mut pairs {
        p.binary_label = Some(corpus.grade(&p.article_id, &p.hashtag) > 0);
    }
    let model = train(&pairs, &TrainConfig::default()).unwrap();
    model.score_all(&mut pairs);
    let rows = rank_all(&pairs, 3, 0.5);
    assert!(!rows.is_empty());

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ranked.csv");
    write_ranked(std::fs::File::create(&path).unwrap(), &rows).unwrap();
    assert_eq!(read_ranked(&path).unwrap(), rows);
}
