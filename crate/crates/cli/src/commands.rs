//! Subcommand definitions and dispatch.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use tweetnet_core::analytics::{
    attach_region_values, hashtag_frequencies, ngram_frequencies, region_histogram, write_geo_csv,
    write_hashtags_csv, write_ngrams_csv,
};
use tweetnet_core::botdetect::{
    bot_report, read_forest, write_bot_csv, DEFAULT_BOT_THRESHOLD, DEFAULT_N_TREES,
};
use tweetnet_core::graph::{read_rtg, write_rtg};
use tweetnet_core::ingest::{parse_tweets, parse_users, tweets_path, users_path};
use tweetnet_core::offense::{offense_report, write_offense_csv, DEFAULT_OFFENSE_THRESHOLD};
use tweetnet_core::partition::{core_decomposition, read_partition_csv, write_cores_csv, DEFAULT_MIN_COMMUNITY_SIZE};
use tweetnet_core::{build_retweet_graph, Partition};

use crate::config::{parse_date, PipelineConfig, ScorerKind};
use crate::error::{CliError, Result, StageExt};
use crate::pipeline;
use crate::provenance::Provenance;
use crate::synth;
use crate::tables;

#[derive(Debug, Parser)]
#[command(name = "tweetnet", version, about = "Retweet-network community analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and keyword-filter raw tweet and user files.
    Ingest {
        #[arg(long)]
        tweets: PathBuf,
        #[arg(long)]
        users: PathBuf,
        #[arg(long)]
        keywords: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build the directed retweet graph.
    BuildGraph {
        /// Ingest directory or tweets file.
        #[arg(long)]
        tweets: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Core number of every user.
    Kcore {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Pick k and partition the k-core with Louvain.
    Communities {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MIN_COMMUNITY_SIZE)]
        min_size: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Most used hashtags per community.
    Hashtags {
        #[command(flatten)]
        input: CommunityInput,
        #[arg(long, default_value_t = 50)]
        top_n: usize,
    },
    /// Most frequent unigrams and bigrams per community.
    Ngrams {
        #[command(flatten)]
        input: CommunityInput,
        #[arg(long, default_value_t = 100)]
        top_n: usize,
        #[arg(long)]
        stopwords: Option<PathBuf>,
    },
    /// Users per metropolitan region and community.
    Geo {
        #[command(flatten)]
        input: CommunityInput,
        /// Ingest directory or users file; defaults to the tweets location.
        #[arg(long)]
        users: Option<PathBuf>,
        #[arg(long)]
        gazetteer: Option<PathBuf>,
        #[arg(long)]
        region_shapes: Option<PathBuf>,
    },
    /// Offensive-tweet proportion per community.
    Offense {
        #[command(flatten)]
        input: CommunityInput,
        #[arg(long, value_enum)]
        scorer: ScorerArg,
        #[arg(long)]
        scores: Option<PathBuf>,
        #[arg(long)]
        train: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_OFFENSE_THRESHOLD)]
        threshold: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Train the bot forest; writes the model plus CV, correlation and importance tables.
    BotTrain {
        #[command(flatten)]
        data: BotData,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_N_TREES)]
        trees: usize,
        #[arg(long, default_value_t = 10)]
        folds: usize,
        /// Model path; the tables go next to it.
        #[arg(long)]
        out: PathBuf,
    },
    /// Cross-validated F1 of the bot forest.
    BotEval {
        #[command(flatten)]
        data: BotData,
        #[arg(long, default_value_t = 10)]
        folds: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_N_TREES)]
        trees: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify community members with a trained model.
    BotApply {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        users: PathBuf,
        #[arg(long)]
        tweets: PathBuf,
        #[arg(long)]
        partition: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BOT_THRESHOLD)]
        threshold: f64,
        #[arg(long)]
        collection_date: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Community table and summary.md from a directory of stage outputs.
    Report {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long)]
        labels: Option<PathBuf>,
    },
    /// Every stage from a config file.
    RunAll {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// `key=value` override, repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Write the synthetic demo corpus.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = synth::DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
pub struct CommunityInput {
    /// Ingest directory or tweets file.
    #[arg(long)]
    pub tweets: PathBuf,
    #[arg(long)]
    pub partition: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BotData {
    #[arg(long)]
    pub data: PathBuf,
    /// The data file holds raw profiles rather than feature vectors.
    #[arg(long)]
    pub raw: bool,
    #[arg(long)]
    pub collection_date: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ScorerArg {
    External,
    Baseline,
}

fn require(path: &Path, what: &str) -> Result<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{what}: {} does not exist", path.display())))
    }
}

fn out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn out_parent(file: &Path) -> Result<()> {
    match file.parent() {
        Some(p) if !p.as_os_str().is_empty() => out_dir(p),
        _ => Ok(()),
    }
}

fn load_partition(path: &Path) -> Result<Partition> {
    require(path, "partition")?;
    Ok(read_partition_csv(path)?)
}

impl BotData {
    fn load(&self) -> Result<(tweetnet_core::Dataset, Provenance)> {
        require(&self.data, "data")?;
        let date = self.collection_date.as_deref().map(parse_date).transpose()?;
        let data = pipeline::load_bot_data(&self.data, self.raw, date)?;
        Ok((data, Provenance::new(None).input("data", &self.data)?))
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest {
            tweets,
            users,
            keywords,
            out,
        } => {
            for (p, what) in [(&tweets, "tweets"), (&users, "users"), (&keywords, "keywords")] {
                require(p, what)?;
            }
            let corpus = pipeline::ingest(&tweets, &users, &keywords)?;
            pipeline::write_ingest(&corpus, &out)
        }
        Command::BuildGraph { tweets, out } => {
            let path = tweets_path(&tweets);
            require(&path, "tweets")?;
            let (records, _) = parse_tweets(&path)?;
            let g = build_retweet_graph(&records);
            info!("{} users, {} directed edges", g.node_count(), g.edge_count());
            out_parent(&out)?;
            Ok(write_rtg(&g, &out)?)
        }
        Command::Kcore { graph, out } => {
            require(&graph, "graph")?;
            let g = read_rtg(&graph)?.to_undirected()?;
            let dec = core_decomposition(&g)?;
            let header = Provenance::new(None).input("graph", &graph)?.to_string();
            out_parent(&out)?;
            Ok(write_cores_csv(&dec, &out, Some(&header))?)
        }
        Command::Communities {
            graph,
            min_size,
            seed,
            out,
        } => {
            require(&graph, "graph")?;
            let g = read_rtg(&graph)?;
            let sel = pipeline::communities(&g, min_size, seed).stage("communities")?;
            let header = Provenance::new(Some(seed)).input("graph", &graph)?.to_string();
            out_dir(&out)?;
            pipeline::write_communities(&sel, &out, &header)
        }
        Command::Hashtags { input, top_n } => {
            let (tweets, partition, header) = community_input(&input, None)?;
            let table = hashtag_frequencies(&tweets, &partition, top_n);
            Ok(write_hashtags_csv(&table, &input.out.join("hashtags_top.csv"), Some(&header))?)
        }
        Command::Ngrams {
            input,
            top_n,
            stopwords,
        } => {
            if let Some(p) = &stopwords {
                require(p, "stopwords")?;
            }
            let stop = pipeline::stopwords(stopwords.as_deref())?;
            let (tweets, partition, header) = community_input(&input, None)?;
            let table = ngram_frequencies(&tweets, &partition, &stop, top_n);
            Ok(write_ngrams_csv(&table, &input.out.join("ngrams_top.csv"), Some(&header))?)
        }
        Command::Geo {
            input,
            users,
            gazetteer,
            region_shapes,
        } => {
            for (p, what) in [(&gazetteer, "gazetteer"), (&region_shapes, "region_shapes")] {
                if let Some(p) = p {
                    require(p, what)?;
                }
            }
            let gaz = pipeline::gazetteer(gazetteer.as_deref())?;
            let shapes = pipeline::region_shapes(region_shapes.as_deref())?;
            let users_file = users_path(users.as_ref().unwrap_or(&input.tweets));
            require(&users_file, "users")?;
            let (_, partition, header) = community_input(&input, Some(&users_file))?;
            let (profiles, _) = parse_users(&users_file)?;
            let hist = region_histogram(&profiles, &partition, &gaz);
            write_geo_csv(&hist, &input.out.join("geo_regions.csv"), Some(&header))?;
            let joined = attach_region_values(&shapes, &hist)?;
            pipeline::write_geojson(&input.out.join("geo_regions.geojson"), &joined, &header)
        }
        Command::Offense {
            input,
            scorer,
            scores,
            train,
            threshold,
            seed,
        } => {
            let kind = match scorer {
                ScorerArg::External => ScorerKind::External,
                ScorerArg::Baseline => ScorerKind::Baseline,
            };
            for (p, what) in [(&scores, "scores"), (&train, "train")] {
                if let Some(p) = p {
                    require(p, what)?;
                }
            }
            let scorer = pipeline::offense_scorer(kind, scores.as_deref(), train.as_deref(), seed)?
                .expect("scorer enabled");
            let (tweets, partition, header) = community_input(&input, None)?;
            let report = offense_report(&tweets, &partition, scorer.as_ref(), threshold)?;
            Ok(write_offense_csv(&report, &input.out.join("offense_stats.csv"), Some(&header))?)
        }
        Command::BotTrain {
            data,
            seed,
            trees,
            folds,
            out,
        } => {
            let (dataset, prov) = data.load()?;
            let header = Provenance { seed: Some(seed), ..prov }.to_string();
            let trained = pipeline::train_bots(dataset, trees, folds, seed).stage("bot")?;
            out_parent(&out)?;
            let dir = out.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
            pipeline::write_bot_training(&trained, dir, &header)?;
            if out != dir.join("model.bf") {
                fs::rename(dir.join("model.bf"), &out).map_err(|e| CliError::io(&out, e))?;
            }
            println!("cv_f1={:.4}", trained.cv.mean_f1);
            Ok(())
        }
        Command::BotEval {
            data,
            folds,
            seed,
            trees,
            out,
        } => {
            let (dataset, prov) = data.load()?;
            let params = tweetnet_core::botdetect::ForestParams {
                n_trees: trees,
                ..tweetnet_core::botdetect::ForestParams::with_seed(pipeline::substream(seed, "forest"))
            };
            let cv = tweetnet_core::botdetect::cross_validate(&dataset, folds, pipeline::substream(seed, "folds"), params, 0.5)
                .stage("bot")?;
            println!("mean_f1={:.4}", cv.mean_f1);
            if let Some(out) = out {
                out_parent(&out)?;
                let header = Provenance { seed: Some(seed), ..prov }.to_string();
                pipeline::write_cv_csv(&cv, &out, &header)?;
            }
            Ok(())
        }
        Command::BotApply {
            model,
            users,
            tweets,
            partition,
            threshold,
            collection_date,
            out,
        } => {
            require(&model, "model")?;
            let users_file = users_path(&users);
            let tweets_file = tweets_path(&tweets);
            require(&users_file, "users")?;
            require(&tweets_file, "tweets")?;
            let forest = read_forest(&model)?;
            let partition = load_partition(&partition)?;
            let (profiles, _) = parse_users(&users_file)?;
            let (records, _) = parse_tweets(&tweets_file)?;
            let configured = collection_date.as_deref().map(parse_date).transpose()?;
            let date = pipeline::collection_date(configured, &profiles, &records)?;
            let report = bot_report(&profiles, &records, &partition, &forest, threshold, date);
            let header = Provenance::new(Some(forest.seed()))
                .input("model", &model)?
                .input("users", &users_file)?
                .input("tweets", &tweets_file)?
                .to_string();
            out_dir(&out)?;
            Ok(write_bot_csv(&report, &out.join("bot_stats.csv"), Some(&header))?)
        }
        Command::Report { dir, labels } => report(&dir, labels.as_deref()),
        Command::RunAll {
            config,
            out,
            overrides,
        } => {
            let mut cfg = PipelineConfig::load(&config)?;
            cfg.apply_overrides(&overrides)?;
            let outcome = pipeline::run_pipeline(&cfg, &out)?;
            println!(
                "k={} communities={} modularity={:.6} out={}",
                outcome.k,
                outcome.community_sizes.len(),
                outcome.modularity,
                outcome.out_dir.display()
            );
            Ok(())
        }
        Command::Synth { out, seed } => synth::write_corpus(&out, seed),
    }
}

fn community_input(
    input: &CommunityInput,
    extra: Option<&Path>,
) -> Result<(Vec<tweetnet_core::TweetRecord>, Partition, String)> {
    let tweets_file = tweets_path(&input.tweets);
    require(&tweets_file, "tweets")?;
    let partition = load_partition(&input.partition)?;
    let (tweets, _) = parse_tweets(&tweets_file)?;
    let mut prov = Provenance::new(None)
        .input("tweets", &tweets_file)?
        .input("partition", &input.partition)?;
    if let Some(p) = extra {
        prov = prov.input("users", p)?;
    }
    out_dir(&input.out)?;
    Ok((tweets, partition, prov.to_string()))
}

/// Rebuilds `community_table.csv` and `summary.md` from files already in `dir`.
fn report(dir: &Path, labels: Option<&Path>) -> Result<()> {
    let partition_file = dir.join("partition.csv");
    let sizes = tables::read_partition_sizes(&partition_file)?;
    let mut prov = Provenance::new(None).input("partition", &partition_file)?;
    let hashtags_file = dir.join("hashtags_top.csv");
    let hashtags = if hashtags_file.exists() {
        prov = prov.input("hashtags", &hashtags_file)?;
        tables::read_hashtags_csv(&hashtags_file)?
    } else {
        Vec::new()
    };
    let label_map = match labels {
        Some(p) => {
            require(p, "labels")?;
            prov = prov.input("labels", p)?;
            tables::load_labels(p, sizes.len())?
        }
        None => BTreeMap::new(),
    };
    let offense_file = dir.join("offense_stats.csv");
    let offense = if offense_file.exists() {
        prov = prov.input("offense", &offense_file)?;
        Some(tables::read_offense_csv(&offense_file)?)
    } else {
        None
    };
    let bot_file = dir.join("bot_stats.csv");
    let bots = if bot_file.exists() {
        prov = prov.input("bots", &bot_file)?;
        Some(tables::read_bot_csv(&bot_file)?)
    } else {
        None
    };
    let header = prov.to_string();
    let rows = tables::emit_community_table(&sizes, &hashtags, &label_map);
    tables::write_community_table(&rows, &dir.join("community_table.csv"), &header)?;
    let md = tables::render_summary(&tables::SummaryInput {
        header,
        k: None,
        modularity: None,
        communities: &rows,
        offense: offense.as_ref(),
        bots: bots.as_ref(),
        extra: Vec::new(),
    });
    pipeline::write_text(&dir.join("summary.md"), &md)
}
