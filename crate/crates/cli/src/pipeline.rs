//! Stage functions shared by the subcommands and `run-all`.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use log::{info, warn};
use serde_json::Value;
use sha2::{Digest, Sha256};

use tweetnet_core::analytics::{
    attach_region_values, hashtag_frequencies, load_stopwords, ngram_frequencies, parse_stopwords,
    region_histogram, write_geo_csv, write_hashtags_csv, write_ngrams_csv, Gazetteer,
};
use tweetnet_core::botdetect::{
    bot_report, cross_validate, default_collection_date, feature_label_correlation, train_forest,
    write_bot_csv, write_correlation_csv, write_forest, write_importance_csv, BotReport, CvResult, ForestParams,
};
use tweetnet_core::graph::write_rtg;
use tweetnet_core::ingest::{filter_by_keywords, load_keywords, parse_corpus, write_jsonl, Corpus};
use tweetnet_core::offense::{
    load_labeled_csv, offense_report, train_baseline, write_offense_csv, ExternalScores, OffenseReport,
    TrainOptions, TweetScorer,
};
use tweetnet_core::partition::{write_cores_csv, write_partition_csv};
use tweetnet_core::{
    build_retweet_graph, BotForest, Dataset, KSelection, Partition, RetweetGraph, TweetRecord, UserProfile,
};

use crate::config::{PipelineConfig, ScorerKind};
use crate::error::{CliError, Result, StageExt};
use crate::provenance::{digest_bytes, Provenance};
use crate::tables::{emit_community_table, load_labels, render_summary, write_community_table, SummaryInput};

pub const DEFAULT_STOPWORDS: &str = include_str!("../../../data/stopwords_fr.txt");
pub const DEFAULT_GAZETTEER: &str = include_str!("../../../data/gazetteer_fr.csv");
pub const DEFAULT_REGION_SHAPES: &str = include_str!("../../../data/regions_fr_coarse.geojson");

/// Seed of a named random stream derived from the run seed.
pub fn substream(seed: u64, name: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(name.as_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("8 bytes"))
}

pub fn stopwords(path: Option<&Path>) -> Result<HashSet<String>> {
    match path {
        Some(p) => Ok(load_stopwords(p)?),
        None => Ok(parse_stopwords(DEFAULT_STOPWORDS)),
    }
}

pub fn gazetteer(path: Option<&Path>) -> Result<Gazetteer> {
    match path {
        Some(p) => Ok(Gazetteer::load(p)?),
        None => Ok(Gazetteer::parse(DEFAULT_GAZETTEER, "built-in gazetteer")?),
    }
}

pub fn region_shapes(path: Option<&Path>) -> Result<Value> {
    let text = match path {
        Some(p) => fs::read_to_string(p).map_err(|e| CliError::io(p, e))?,
        None => DEFAULT_REGION_SHAPES.to_string(),
    };
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("region shapes: {e}")))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn write_geojson(path: &Path, shapes: &Value, header: &str) -> Result<()> {
    let stamped = crate::tables::stamp_geojson(shapes.clone(), header);
    let mut text = serde_json::to_string_pretty(&stamped).expect("json value serializes");
    text.push('\n');
    write_text(path, &text)
}

/// Keyword-filtered corpus.
pub fn ingest(tweets: &Path, users: &Path, keywords: &Path) -> Result<Corpus> {
    let mut corpus = parse_corpus(tweets, users)?;
    let kw = load_keywords(keywords)?;
    let before = corpus.tweets.len();
    corpus.tweets = filter_by_keywords(&corpus.tweets, &kw)?;
    info!(
        "ingest: {} of {} tweets match {} keywords; {} users ({} malformed tweet lines, {} duplicates)",
        corpus.tweets.len(),
        before,
        kw.len(),
        corpus.users.len(),
        corpus.tweet_stats.malformed,
        corpus.tweet_stats.duplicates
    );
    Ok(corpus)
}

pub fn write_ingest(corpus: &Corpus, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    write_jsonl(&dir.join(tweetnet_core::ingest::TWEETS_FILE), &corpus.tweets)?;
    write_jsonl(&dir.join(tweetnet_core::ingest::USERS_FILE), &corpus.users)?;
    Ok(())
}

/// Community detection on the undirected projection of a directed retweet graph.
pub fn communities(directed: &RetweetGraph, min_size: usize, seed: u64) -> tweetnet_core::Result<KSelection> {
    let undirected = directed.to_undirected()?;
    let sel = tweetnet_core::partition::select_k(&undirected, min_size, seed)?;
    info!(
        "communities: k = {}, {} nodes in core, {} communities, Q = {:.6}",
        sel.k,
        sel.core.node_count(),
        sel.partition.community_count(),
        sel.partition.modularity()
    );
    Ok(sel)
}

pub fn write_communities(sel: &KSelection, dir: &Path, header: &str) -> Result<()> {
    write_cores_csv(&sel.decomposition, &dir.join("core.csv"), Some(header))?;
    write_partition_csv(&sel.partition, &dir.join("partition.csv"), Some(header))?;
    let mut text = format!("# {header}\nk,core_nodes,smallest_community,selected\n");
    for d in &sel.diagnostics {
        text.push_str(&format!(
            "{},{},{},{}\n",
            d.k,
            d.core_nodes,
            d.smallest_community,
            u8::from(d.k == sel.k)
        ));
    }
    write_text(&dir.join("k_selection.csv"), &text)
}

pub fn offense_scorer(
    kind: ScorerKind,
    scores: Option<&Path>,
    train: Option<&Path>,
    seed: u64,
) -> Result<Option<Box<dyn TweetScorer>>> {
    match kind {
        ScorerKind::Disabled => Ok(None),
        ScorerKind::External => {
            let p = scores.ok_or_else(|| CliError::Config("external scorer needs a scores file".into()))?;
            Ok(Some(Box::new(ExternalScores::load(p)?)))
        }
        ScorerKind::Baseline => {
            let p = train.ok_or_else(|| CliError::Config("baseline scorer needs a training file".into()))?;
            let data = load_labeled_csv(p)?;
            let trained = train_baseline(
                &data,
                TrainOptions {
                    seed,
                    ..Default::default()
                },
            )?;
            info!(
                "offense: baseline trained on {} rows, held-out F1 {:.3} on {}",
                trained.train_size, trained.heldout_f1, trained.test_size
            );
            Ok(Some(Box::new(trained.model)))
        }
    }
}

pub struct BotTraining {
    pub forest: BotForest,
    pub cv: CvResult,
    pub data: Dataset,
}

pub fn load_bot_data(path: &Path, raw: bool, collection_date: Option<DateTime<Utc>>) -> Result<Dataset> {
    if raw {
        let date = collection_date
            .ok_or_else(|| CliError::Config("raw bot training data needs a collection date".into()))?;
        Ok(Dataset::load_raw_csv(path, date)?)
    } else {
        Ok(Dataset::load_csv(path)?)
    }
}

/// Cross-validates, then fits the final forest on all rows.
pub fn train_bots(data: Dataset, n_trees: usize, folds: usize, seed: u64) -> tweetnet_core::Result<BotTraining> {
    let params = ForestParams {
        n_trees,
        ..ForestParams::with_seed(substream(seed, "forest"))
    };
    let cv = cross_validate(&data, folds, substream(seed, "folds"), params, 0.5)?;
    info!("bot: {folds}-fold CV mean F1 {:.4}", cv.mean_f1);
    let forest = train_forest(&data, params)?;
    Ok(BotTraining { forest, cv, data })
}

pub fn write_cv_csv(cv: &CvResult, path: &Path, header: &str) -> Result<()> {
    let mut text = format!("# {header}\nfold,f1\n");
    for (i, f) in cv.fold_f1.iter().enumerate() {
        text.push_str(&format!("{i},{f:.6}\n"));
    }
    text.push_str(&format!("mean,{:.6}\n", cv.mean_f1));
    write_text(path, &text)
}

pub fn write_bot_training(t: &BotTraining, dir: &Path, header: &str) -> Result<()> {
    write_forest(&t.forest, &dir.join("model.bf"))?;
    write_cv_csv(&t.cv, &dir.join("bot_cv.csv"), header)?;
    let corr = feature_label_correlation(&t.data)?;
    write_correlation_csv(&corr, &dir.join("correlation.csv"), Some(header))?;
    let imp = t.forest.feature_importance();
    if imp.degenerate {
        warn!("bot: no tree split on any feature; importance is uniform");
    }
    write_importance_csv(&imp, &dir.join("importance.csv"), Some(header))?;
    Ok(())
}

pub fn collection_date(
    configured: Option<DateTime<Utc>>,
    users: &[UserProfile],
    tweets: &[TweetRecord],
) -> Result<DateTime<Utc>> {
    configured
        .or_else(|| default_collection_date(users, tweets))
        .ok_or_else(|| CliError::Core(tweetnet_core::Error::Data("cannot infer a collection date from an empty corpus".into())))
}

/// Everything `run-all` produced, kept for the summary.
#[derive(Debug)]
pub struct RunOutcome {
    pub out_dir: PathBuf,
    pub k: usize,
    pub modularity: f64,
    pub community_sizes: Vec<usize>,
    pub offense: Option<OffenseReport>,
    pub bots: Option<BotReport>,
    pub cv_f1: Option<f64>,
}

fn provenance(cfg: &PipelineConfig) -> Result<Provenance> {
    let mut p = Provenance::new(Some(cfg.seed));
    let inputs: [(&str, &Option<PathBuf>); 10] = [
        ("tweets", &cfg.tweets),
        ("users", &cfg.users),
        ("keywords", &cfg.keywords),
        ("stopwords", &cfg.stopwords),
        ("gazetteer", &cfg.gazetteer),
        ("region_shapes", &cfg.region_shapes),
        ("labels", &cfg.labels),
        ("offense_scores", &cfg.offense_scores),
        ("offense_train", &cfg.offense_train),
        ("bot_train", &cfg.bot_train),
    ];
    for (name, path) in inputs {
        if let Some(path) = path {
            p = p.input(name, path)?;
        }
    }
    // built-in tables are digested too, so a changed default shows up in the header
    let builtins = [
        ("stopwords", &cfg.stopwords, DEFAULT_STOPWORDS),
        ("gazetteer", &cfg.gazetteer, DEFAULT_GAZETTEER),
        ("region_shapes", &cfg.region_shapes, DEFAULT_REGION_SHAPES),
    ];
    for (name, path, text) in builtins {
        if path.is_none() {
            p = p.input_digest(&format!("{name}(builtin)"), digest_bytes(text.as_bytes()));
        }
    }
    Ok(p)
}

fn staging_dir(out: &Path) -> PathBuf {
    let name = out.file_name().map_or_else(|| "out".into(), |n| n.to_string_lossy().into_owned());
    out.with_file_name(format!(".{name}.partial"))
}

/// Runs every stage into `out`. Output is staged in a sibling directory and
/// moved into place only when all stages succeed.
pub fn run_pipeline(cfg: &PipelineConfig, out: &Path) -> Result<RunOutcome> {
    cfg.validate()?;
    let stage_dir = staging_dir(out);
    if stage_dir.exists() {
        fs::remove_dir_all(&stage_dir).map_err(|e| CliError::io(&stage_dir, e))?;
    }
    fs::create_dir_all(&stage_dir).map_err(|e| CliError::io(&stage_dir, e))?;
    match run_stages(cfg, &stage_dir) {
        Ok(mut outcome) => {
            if out.exists() {
                fs::remove_dir_all(out).map_err(|e| CliError::io(out, e))?;
            }
            fs::rename(&stage_dir, out).map_err(|e| CliError::io(out, e))?;
            outcome.out_dir = out.to_path_buf();
            Ok(outcome)
        }
        Err(e) => {
            let _ = fs::remove_dir_all(&stage_dir);
            Err(e)
        }
    }
}

fn run_stages(cfg: &PipelineConfig, dir: &Path) -> Result<RunOutcome> {
    let required = |p: &Option<PathBuf>| p.clone().expect("validated");
    // inputs the later stages need are loaded up front so configuration
    // problems surface before any heavy work
    let header = provenance(cfg)?.to_string();
    let stop = stopwords(cfg.stopwords.as_deref())?;
    let gaz = gazetteer(cfg.gazetteer.as_deref())?;
    let shapes = region_shapes(cfg.region_shapes.as_deref())?;

    let corpus = ingest(&required(&cfg.tweets), &required(&cfg.users), &required(&cfg.keywords)).stage_of("ingest")?;
    write_ingest(&corpus, &dir.join("ingest")).stage_of("ingest")?;

    let graph = build_retweet_graph(&corpus.tweets);
    info!("graph: {} users, {} directed edges", graph.node_count(), graph.edge_count());
    write_rtg(&graph, &dir.join("graph.rtg")).stage("graph")?;

    let sel = communities(&graph, cfg.min_community_size, substream(cfg.seed, "louvain")).stage("communities")?;
    write_communities(&sel, dir, &header).stage_of("communities")?;
    let partition: &Partition = &sel.partition;

    let hashtags = hashtag_frequencies(&corpus.tweets, partition, cfg.top_n_hashtags);
    write_hashtags_csv(&hashtags, &dir.join("hashtags_top.csv"), Some(&header)).stage("analytics")?;
    let ngrams = ngram_frequencies(&corpus.tweets, partition, &stop, cfg.top_n_ngrams);
    write_ngrams_csv(&ngrams, &dir.join("ngrams_top.csv"), Some(&header)).stage("analytics")?;
    let geo = region_histogram(&corpus.users, partition, &gaz);
    write_geo_csv(&geo, &dir.join("geo_regions.csv"), Some(&header)).stage("analytics")?;
    let joined = attach_region_values(&shapes, &geo).stage("analytics")?;
    write_geojson(&dir.join("geo_regions.geojson"), &joined, &header).stage_of("analytics")?;

    let scorer = offense_scorer(
        cfg.offense_scorer,
        cfg.offense_scores.as_deref(),
        cfg.offense_train.as_deref(),
        substream(cfg.seed, "offense"),
    )
    .stage_of("offense")?;
    let offense = match scorer {
        Some(s) => {
            let report = offense_report(&corpus.tweets, partition, s.as_ref(), cfg.offense_threshold).stage("offense")?;
            write_offense_csv(&report, &dir.join("offense_stats.csv"), Some(&header)).stage("offense")?;
            Some(report)
        }
        None => None,
    };

    let (bots, cv_f1) = match &cfg.bot_train {
        Some(path) => {
            let date = collection_date(cfg.collection_date, &corpus.users, &corpus.tweets).stage_of("bot")?;
            let data = load_bot_data(path, cfg.bot_train_raw, Some(date)).stage_of("bot")?;
            let trained = train_bots(data, cfg.n_trees, cfg.cv_folds, cfg.seed).stage("bot")?;
            write_bot_training(&trained, dir, &header).stage_of("bot")?;
            let report = bot_report(&corpus.users, &corpus.tweets, partition, &trained.forest, cfg.bot_threshold, date);
            write_bot_csv(&report, &dir.join("bot_stats.csv"), Some(&header)).stage("bot")?;
            (Some(report), Some(trained.cv.mean_f1))
        }
        None => (None, None),
    };

    let labels = match &cfg.labels {
        Some(p) => load_labels(p, partition.community_count())?,
        None => BTreeMap::new(),
    };
    let table = emit_community_table(&partition.community_sizes(), &hashtags.communities, &labels);
    write_community_table(&table, &dir.join("community_table.csv"), &header)?;

    let q = partition.modularity();
    let mut extra = vec![
        ("tweets after keyword filter".to_string(), corpus.tweets.len().to_string()),
        ("retweet graph".to_string(), format!("{} users, {} edges", graph.node_count(), graph.edge_count())),
    ];
    if let Some(f1) = cv_f1 {
        extra.push(("bot classifier CV F1".to_string(), format!("{f1:.4}")));
    }
    let summary = render_summary(&SummaryInput {
        header: header.clone(),
        k: Some(sel.k),
        modularity: Some(q),
        communities: &table,
        offense: offense.as_ref(),
        bots: bots.as_ref(),
        extra,
    });
    write_text(&dir.join("summary.md"), &summary)?;

    Ok(RunOutcome {
        out_dir: dir.to_path_buf(),
        k: sel.k,
        modularity: q,
        community_sizes: partition.community_sizes(),
        offense,
        bots,
        cv_f1,
    })
}

/// Tags any CLI error with a stage name.
trait StageOf<T> {
    fn stage_of(self, stage: &'static str) -> Result<T>;
}

impl<T> StageOf<T> for Result<T> {
    fn stage_of(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| match e {
            CliError::Core(source) => CliError::Stage { stage, source },
            other => other,
        })
    }
}
