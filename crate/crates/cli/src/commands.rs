//! Subcommand implementations.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use matchbook::corpus::{
    random_dictionary, synth_corpus, Corpus, QueryEntry, QuerySet, SynthSpec, TokenSource,
};
use matchbook::eval::{curves_to_dat, retrieval_curve, tabulate, Curve};
use matchbook::fusion::{
    combine_fixed, crossval_twofold, rank_with_weights, train_ranksvm, FusionModel, TrainConfig,
};
use matchbook::noise::NoiseConfig;
use matchbook::rerank::{rankings_to_tsv, read_rankings, rerank_topk, Fallback, Ranking};
use matchbook::textindex::{build_index as build_weighted_index, WeightedIndex};
use matchbook::tokenizer::Tokenizer;
use matchbook::{Error, ScoreChannel};

use crate::{
    BenchArgs, BuildIndexArgs, CombineArgs, CorruptArgs, EvalArgs, IngestArgs, NoiseArgs,
    RankArgs, RerankArgs, SynthArgs, TextScoresArgs, TrainArgs,
};

/// Comment header recording tool version, subcommand and effective options.
fn header(subcommand: &str, config: &[(&str, String)]) -> String {
    let mut s = format!(
        "# matchbook {}\n# subcommand: {}\n",
        env!("CARGO_PKG_VERSION"),
        subcommand
    );
    for (key, value) in config {
        let _ = writeln!(s, "# {key}: {value}");
    }
    s
}

fn write_output(
    path: &Path,
    subcommand: &str,
    config: &[(&str, String)],
    payload: &str,
) -> Result<()> {
    let content = format!("{}{}", header(subcommand, config), payload);
    fs::write(path, content).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn paths_value(paths: &[PathBuf]) -> String {
    paths
        .iter()
        .map(|p| p.display().to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn floats_value(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn load_corpora(paths: &[PathBuf]) -> Result<Corpus> {
    let mut merged: Option<Corpus> = None;
    for path in paths {
        let corpus = Corpus::load(path)?;
        merged = Some(match merged {
            None => corpus,
            Some(acc) => acc.merge(corpus)?,
        });
    }
    merged.ok_or_else(|| Error::EmptyCorpus.into())
}

fn channel_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "channel".to_string())
}

fn load_channels(paths: &[PathBuf]) -> Result<Vec<ScoreChannel>> {
    paths
        .iter()
        .map(|p| Ok(ScoreChannel::read(p, None)?))
        .collect()
}

/// Noise settings: config file first, then flag overrides, then the seed.
fn resolve_noise(args: &NoiseArgs, seed: Option<u64>) -> Result<NoiseConfig> {
    let mut cfg = match &args.noise_config {
        Some(path) => NoiseConfig::from_kv_file(path)?,
        None => NoiseConfig::default(),
    };
    if let Some(v) = args.sub_rate {
        cfg.sub_rate = v;
    }
    if let Some(v) = args.del_rate {
        cfg.del_rate = v;
    }
    if let Some(v) = args.ins_rate {
        cfg.ins_rate = v;
    }
    if let Some(v) = args.word_drop_rate {
        cfg.word_drop_rate = v;
    }
    if let Some(v) = args.reversed_line_rate {
        cfg.reversed_line_rate = v;
    }
    if let Some(v) = args.spurious_singles {
        cfg.spurious_singles = v;
    }
    if let Some(v) = args.spurious_words {
        cfg.spurious_words = v;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn noise_config_pairs(cfg: &NoiseConfig) -> Vec<(&'static str, String)> {
    vec![
        ("sub_rate", cfg.sub_rate.to_string()),
        ("del_rate", cfg.del_rate.to_string()),
        ("ins_rate", cfg.ins_rate.to_string()),
        ("word_drop_rate", cfg.word_drop_rate.to_string()),
        ("reversed_line_rate", cfg.reversed_line_rate.to_string()),
        ("spurious_singles", cfg.spurious_singles.to_string()),
        ("spurious_words", cfg.spurious_words.to_string()),
        ("seed", cfg.seed.to_string()),
    ]
}

pub fn ingest(args: IngestArgs) -> Result<()> {
    let corpus = Corpus::load(&args.corpus)?;
    let (real, distractors) = corpus.counts();
    let indexable = corpus.records().iter().filter(|r| r.is_indexable()).count();
    println!("records\t{}", corpus.len());
    println!("non_distractors\t{real}");
    println!("distractors\t{distractors}");
    println!("indexable\t{indexable}");
    if let Some(qpath) = &args.queries {
        let queries = QuerySet::load(qpath)?;
        queries.validate_against(&corpus)?;
        println!("queries\t{}", queries.len());
    }
    if let Some(out) = &args.out {
        let config = [("corpus", args.corpus.display().to_string())];
        write_output(out, "ingest", &config, &corpus.to_tsv()?)?;
    }
    Ok(())
}

fn load_dictionary(args: &SynthArgs) -> Result<Vec<String>> {
    if let Some(n) = args.random_dictionary {
        if args.word_len_min == 0 || args.word_len_min > args.word_len_max {
            bail!(Error::Config(format!(
                "invalid word length range {}..={}",
                args.word_len_min, args.word_len_max
            )));
        }
        return Ok(random_dictionary(
            n,
            (args.word_len_min, args.word_len_max),
            args.seed ^ 0x9e3779b97f4a7c15,
        ));
    }
    match &args.dictionary {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Io {
                    path: path.clone(),
                    source: e,
                })?;
            let words: Vec<String> = text
                .lines()
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(|l| l.trim().to_string())
                .collect();
            Ok(words)
        }
        None => Ok(matchbook::words::BASIC_WORDS
            .iter()
            .map(|w| w.to_string())
            .collect()),
    }
}

pub fn synth(args: SynthArgs) -> Result<()> {
    let dictionary = load_dictionary(&args)?;
    let spec = SynthSpec::new(args.num_docs, args.min_words, args.max_words, args.seed)
        .id_prefix(args.id_prefix.clone())
        .distractor(args.distractor);
    let corpus = synth_corpus(&spec, &dictionary)?;
    let config = [
        ("num_docs", args.num_docs.to_string()),
        ("min_words", args.min_words.to_string()),
        ("max_words", args.max_words.to_string()),
        ("seed", args.seed.to_string()),
        (
            "dictionary",
            match (&args.dictionary, args.random_dictionary) {
                (Some(p), _) => p.display().to_string(),
                (None, Some(n)) => format!("random:{n}"),
                (None, None) => "builtin".to_string(),
            },
        ),
        ("distractor", args.distractor.to_string()),
        ("id_prefix", args.id_prefix.clone()),
    ];
    write_output(&args.out, "synth", &config, &corpus.to_tsv()?)?;
    Ok(())
}

pub fn corrupt(args: CorruptArgs) -> Result<()> {
    let corpus = Corpus::load(&args.corpus)?;
    let noise = resolve_noise(&args.noise, args.seed)?;
    if args.queries_per_doc == 0 {
        bail!(Error::Config("queries_per_doc must be >= 1".into()));
    }
    let mut entries = Vec::new();
    let eligible = corpus
        .records()
        .iter()
        .filter(|r| args.include_distractors || !r.distractor);
    for (i, record) in eligible.enumerate() {
        for rep in 0..args.queries_per_doc {
            let query_id = if args.queries_per_doc == 1 {
                format!("{}{i:06}", args.id_prefix)
            } else {
                format!("{}{i:06}-{rep}", args.id_prefix)
            };
            let per_rep = NoiseConfig {
                seed: noise.seed.wrapping_add(rep as u64),
                ..noise.clone()
            };
            entries.push(QueryEntry {
                query_id,
                ground_truth: record.doc_id.clone(),
                source: TokenSource::Inline(matchbook::noise::corrupt(
                    &record.annotation(),
                    &per_rep,
                )),
            });
        }
    }
    let queries = QuerySet::from_entries(entries)?;
    let mut config = vec![
        ("corpus", args.corpus.display().to_string()),
        ("queries_per_doc", args.queries_per_doc.to_string()),
        ("include_distractors", args.include_distractors.to_string()),
        ("id_prefix", args.id_prefix.clone()),
    ];
    config.extend(noise_config_pairs(&noise));
    write_output(&args.out, "corrupt", &config, &queries.to_tsv()?)?;
    Ok(())
}

pub fn build_index(args: BuildIndexArgs) -> Result<()> {
    let corpus = load_corpora(&args.corpus)?;
    let index = build_weighted_index(&corpus, args.n)?;
    let config = [
        ("corpus", paths_value(&args.corpus)),
        ("n", args.n.to_string()),
        ("docs", index.num_docs().to_string()),
    ];
    write_output(&args.out, "build-index", &config, &index.to_snapshot())?;
    Ok(())
}

pub fn text_scores(args: TextScoresArgs) -> Result<()> {
    let index = WeightedIndex::load(&args.index)?;
    let queries = QuerySet::load(&args.queries)?;
    let tokenizer = Tokenizer::new(index.n())?;
    let top = if args.top == 0 { None } else { Some(args.top) };

    let rankings: Vec<Ranking> = queries
        .entries()
        .par_iter()
        .map(|entry| {
            let text = entry.load_text()?;
            let scores = index.query_scores(&tokenizer.tokenize(&text))?;
            Ok(Ranking::from_scores(
                &entry.query_id,
                scores.into_iter().map(|(d, s)| (d.to_string(), s)),
            ))
        })
        .collect::<matchbook::Result<_>>()?;

    let mut channel = ScoreChannel::new(channel_name(&args.out));
    for ranking in &rankings {
        channel.add_ranking(ranking, top);
    }
    let config = [
        ("index", args.index.display().to_string()),
        ("queries", args.queries.display().to_string()),
        ("n", index.n().to_string()),
        ("top", args.top.to_string()),
    ];
    write_output(&args.out, "text-scores", &config, &channel.to_tsv())?;
    Ok(())
}

pub fn combine(args: CombineArgs) -> Result<()> {
    let channels = load_channels(&args.channel)?;
    let combined = combine_fixed(&channels, &args.lambda)?;
    let config = [
        ("channels", paths_value(&args.channel)),
        ("lambdas", floats_value(&args.lambda)),
    ];
    write_output(&args.out, "combine", &config, &combined.to_tsv())?;
    Ok(())
}

fn train_config(opts: &crate::TrainOpts) -> TrainConfig {
    TrainConfig {
        c_param: opts.c_param,
        epochs: opts.epochs,
        seed: opts.seed,
        max_negatives: opts.max_negatives,
        standardize: opts.standardize,
    }
}

fn train_opt_pairs(opts: &crate::TrainOpts) -> Vec<(&'static str, String)> {
    vec![
        ("c_param", opts.c_param.to_string()),
        ("epochs", opts.epochs.to_string()),
        ("seed", opts.seed.to_string()),
        ("max_negatives", opts.max_negatives.to_string()),
        ("standardize", opts.standardize.to_string()),
    ]
}

pub fn train(args: TrainArgs) -> Result<()> {
    let channels = load_channels(&args.channel)?;
    let queries = QuerySet::load(&args.queries)?;
    let pairs: Vec<(String, String)> = queries
        .entries()
        .iter()
        .map(|e| (e.query_id.clone(), e.ground_truth.clone()))
        .collect();
    let model = train_ranksvm(&channels, &pairs, &train_config(&args.opts))?;
    let mut config = vec![
        ("channels", paths_value(&args.channel)),
        ("queries", args.queries.display().to_string()),
    ];
    config.extend(train_opt_pairs(&args.opts));
    write_output(&args.out, "train", &config, &model.to_json())?;
    Ok(())
}

pub fn rank(args: RankArgs) -> Result<()> {
    let channels = load_channels(&args.channel)?;
    let queries = QuerySet::load(&args.queries)?;
    let allow_missing = args.missing == "empty";

    let covered = |entry: &QueryEntry| channels.iter().any(|c| c.has_query(&entry.query_id));
    let mut rankings: Vec<Ranking>;
    let mut config = vec![
        ("channels", paths_value(&args.channel)),
        ("queries", args.queries.display().to_string()),
        ("missing", args.missing.clone()),
    ];

    if args.crossval {
        let kept: Vec<QueryEntry> = if allow_missing {
            queries.entries().iter().filter(|e| covered(e)).cloned().collect()
        } else {
            queries.entries().to_vec()
        };
        let subset = QuerySet::from_entries(kept)?;
        let cv = crossval_twofold(&channels, &subset, &train_config(&args.opts))?;
        rankings = cv.rankings;
        if allow_missing {
            for entry in queries.entries() {
                if !covered(entry) {
                    rankings.push(Ranking::from_scores(
                        &entry.query_id,
                        Vec::<(String, f64)>::new(),
                    ));
                }
            }
        }
        if let Some(prefix) = &args.model_out {
            for (i, model) in cv.models.iter().enumerate() {
                let path = PathBuf::from(format!("{}.fold{i}.json", prefix.display()));
                let mut model_config = config.clone();
                model_config.extend(train_opt_pairs(&args.opts));
                model_config.push(("fold", i.to_string()));
                write_output(&path, "rank", &model_config, &model.to_json())?;
            }
        }
        config.push(("mode", "crossval".to_string()));
        config.extend(train_opt_pairs(&args.opts));
    } else {
        enum Scorer {
            Model(Box<FusionModel>),
            Lambdas(Vec<f64>),
        }
        let scorer = if let Some(path) = &args.model {
            config.push(("model", path.display().to_string()));
            Scorer::Model(Box::new(FusionModel::load(path)?))
        } else if !args.lambda.is_empty() {
            config.push(("lambdas", floats_value(&args.lambda)));
            Scorer::Lambdas(args.lambda.clone())
        } else {
            bail!(Error::Config(
                "rank needs one of --model, --lambda or --crossval".into()
            ));
        };
        rankings = Vec::with_capacity(queries.len());
        for entry in queries.entries() {
            if allow_missing && !covered(entry) {
                rankings.push(Ranking::from_scores(
                    &entry.query_id,
                    Vec::<(String, f64)>::new(),
                ));
                continue;
            }
            let ranking = match &scorer {
                Scorer::Model(m) => m.rank(&channels, &entry.query_id)?,
                Scorer::Lambdas(l) => rank_with_weights(l, &channels, &entry.query_id)?,
            };
            rankings.push(ranking);
        }
    }

    write_output(&args.out, "rank", &config, &rankings_to_tsv(&rankings))?;
    Ok(())
}

pub fn rerank(args: RerankArgs) -> Result<()> {
    let rankings = read_rankings(&args.rankings)?;
    let expensive = ScoreChannel::read(&args.channel, None)?;
    let fallback: Fallback = args.fallback.parse()?;
    let reranked: Vec<Ranking> = rankings
        .iter()
        .map(|r| rerank_topk(r, &expensive, args.k, fallback))
        .collect();
    let config = [
        ("rankings", args.rankings.display().to_string()),
        ("channel", args.channel.display().to_string()),
        ("k", args.k.to_string()),
        ("fallback", args.fallback.clone()),
    ];
    write_output(&args.out, "rerank", &config, &rankings_to_tsv(&reranked))?;
    Ok(())
}

pub fn eval(args: EvalArgs) -> Result<()> {
    if !args.label.is_empty() && args.label.len() != args.rankings.len() {
        bail!(Error::Config(format!(
            "{} labels for {} rankings files",
            args.label.len(),
            args.rankings.len()
        )));
    }
    let queries = QuerySet::load(&args.queries)?;
    let mut curves: Vec<Curve> = Vec::new();
    for (i, path) in args.rankings.iter().enumerate() {
        let rankings = read_rankings(path)?;
        let label = args
            .label
            .get(i)
            .cloned()
            .unwrap_or_else(|| channel_name(path));
        curves.push(retrieval_curve(&rankings, &queries, args.max_k, label)?);
    }
    let table = tabulate(&curves, &args.ks)?;

    let config = [
        ("rankings", paths_value(&args.rankings)),
        ("queries", args.queries.display().to_string()),
        ("max_k", args.max_k.to_string()),
        (
            "ks",
            args.ks
                .iter()
                .map(|k| k.to_string())
                .collect::<Vec<_>>()
                .join(","),
        ),
    ];
    if let Some(dat) = &args.dat {
        write_output(dat, "eval", &config, &curves_to_dat(&curves)?)?;
    }
    if let Some(out) = &args.table {
        write_output(out, "eval", &config, &table.to_tsv())?;
    }
    print!("{}", table.to_aligned());
    Ok(())
}

pub fn bench(args: BenchArgs) -> Result<()> {
    let corpus = match &args.corpus {
        Some(path) => Corpus::load(path)?,
        None => {
            let dictionary: Vec<String> = matchbook::words::BASIC_WORDS
                .iter()
                .map(|w| w.to_string())
                .collect();
            synth_corpus(
                &SynthSpec::new(args.docs, 4, 6, args.seed).id_prefix("b"),
                &dictionary,
            )?
        }
    };
    let noise = resolve_noise(&args.noise, Some(args.seed))?;
    let build_start = Instant::now();
    let index = build_weighted_index(&corpus, args.n)?;
    let build_ms = build_start.elapsed().as_secs_f64() * 1e3;
    let tokenizer = Tokenizer::new(args.n)?;

    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(args.seed.wrapping_add(1));
    let mut latencies = Vec::with_capacity(args.queries);
    for _ in 0..args.queries {
        let record = &corpus.records()[rng.gen_range(0..corpus.len())];
        let text = matchbook::noise::corrupt(&record.annotation(), &noise);
        let bag = tokenizer.tokenize(&text);
        let begin = Instant::now();
        let scores = index.query_scores(&bag)?;
        let ranking = Ranking::from_scores(
            &record.doc_id,
            scores.into_iter().map(|(d, s)| (d.to_string(), s)),
        );
        latencies.push(begin.elapsed().as_secs_f64() * 1e3);
        std::hint::black_box(ranking);
    }
    latencies.sort_by(f64::total_cmp);
    let median = latencies.get(latencies.len() / 2).copied().unwrap_or(0.0);
    let p99_idx = ((latencies.len() as f64 * 0.99).ceil() as usize).saturating_sub(1);
    let p99 = latencies.get(p99_idx).copied().unwrap_or(0.0);

    let payload = format!(
        "docs\tqueries\tmedian_ms\tp99_ms\n{}\t{}\t{median:.3}\t{p99:.3}\n",
        index.num_docs(),
        latencies.len()
    );
    print!("{payload}");
    eprintln!("index build: {build_ms:.1} ms");
    if let Some(out) = &args.out {
        let mut config = vec![
            (
                "corpus",
                args.corpus
                    .as_ref()
                    .map(|p| p.display().to_string())
                    .unwrap_or_else(|| format!("synth:{}", args.docs)),
            ),
            ("n", args.n.to_string()),
            ("queries", args.queries.to_string()),
            ("seed", args.seed.to_string()),
        ];
        config.extend(noise_config_pairs(&noise));
        write_output(out, "bench", &config, &payload)?;
    }
    Ok(())
}
