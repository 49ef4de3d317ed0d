//! Shared helpers for integration tests: an independent dense tf-idf oracle
//! and builders for the seeded retrieval experiments.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use matchbook::corpus::{CatalogueRecord, Corpus, QueryEntry, QuerySet, TokenSource};
use matchbook::noise::{corrupt, NoiseConfig};
use matchbook::rerank::Ranking;
use matchbook::tokenizer::{TokenBag, Tokenizer};
use matchbook::ScoreChannel;
use matchbook::WeightedIndex;

fn l2_normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Brute-force dense tf-idf similarity of `query` against every document,
/// computed literally from the normalization scheme: document vectors are
/// L2(L2(f) * gamma), the query vector is L2(L1(f) * gamma) with the L1
/// denominator taken over the full bag and grams outside the document
/// vocabulary skipped. Entirely independent of the inverted-index code path.
pub fn dense_tfidf_scores(doc_bags: &[(String, TokenBag)], query: &TokenBag) -> Vec<(String, f64)> {
    let mut vocab: BTreeSet<String> = BTreeSet::new();
    for (_, bag) in doc_bags {
        for (g, _) in bag.iter() {
            vocab.insert(g.to_string());
        }
    }
    let vocab: Vec<String> = vocab.into_iter().collect();
    let vindex: HashMap<&str, usize> = vocab
        .iter()
        .enumerate()
        .map(|(i, g)| (g.as_str(), i))
        .collect();

    let num_docs = doc_bags.len() as f64;
    let mut df = vec![0usize; vocab.len()];
    for (_, bag) in doc_bags {
        for (g, _) in bag.iter() {
            df[vindex[g]] += 1;
        }
    }
    let gamma: Vec<f64> = df.iter().map(|&d| (num_docs / d as f64).ln()).collect();

    let doc_vectors: Vec<Vec<f64>> = doc_bags
        .iter()
        .map(|(_, bag)| {
            let mut v = vec![0.0; vocab.len()];
            for (g, c) in bag.iter() {
                v[vindex[g]] = f64::from(c);
            }
            l2_normalize(&mut v);
            for (x, g) in v.iter_mut().zip(&gamma) {
                *x *= g;
            }
            l2_normalize(&mut v);
            v
        })
        .collect();

    let mut q = vec![0.0; vocab.len()];
    let total = query.total() as f64;
    if total > 0.0 {
        for (g, c) in query.iter() {
            if let Some(&i) = vindex.get(g) {
                q[i] = f64::from(c) / total * gamma[i];
            }
        }
    }
    l2_normalize(&mut q);

    doc_bags
        .iter()
        .zip(&doc_vectors)
        .map(|((id, _), dv)| (id.clone(), dot(dv, &q)))
        .collect()
}

/// Random corpus over a tiny alphabet so documents share grams heavily and
/// the gram vocabulary stays small.
pub fn small_alphabet_corpus(num_docs: usize, seed: u64) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let records = (0..num_docs)
        .map(|i| CatalogueRecord {
            doc_id: format!("d{i:04}"),
            title: random_small_alphabet_text(&mut rng, 2..=5),
            author: String::new(),
            distractor: false,
        })
        .collect();
    Corpus::from_records(records).unwrap()
}

pub fn random_small_alphabet_text(
    rng: &mut ChaCha8Rng,
    words: std::ops::RangeInclusive<usize>,
) -> String {
    let n_words = rng.gen_range(words);
    (0..n_words)
        .map(|_| {
            let len = rng.gen_range(3..=6);
            (0..len)
                .map(|_| (b'a' + rng.gen_range(0..3u8)) as char)
                .collect::<String>()
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Tokenized annotation bags of every indexable record, in corpus order.
pub fn corpus_bags(corpus: &Corpus, n: usize) -> Vec<(String, TokenBag)> {
    let tok = Tokenizer::new(n).unwrap();
    corpus
        .records()
        .iter()
        .filter(|r| r.is_indexable())
        .map(|r| (r.doc_id.clone(), tok.tokenize(&r.annotation())))
        .collect()
}

/// One corrupted query per record: query `q<i>` holds the noisy annotation
/// of record `i` as inline payload.
pub fn corrupted_queries(corpus: &Corpus, noise: &NoiseConfig) -> QuerySet {
    let entries = corpus
        .records()
        .iter()
        .enumerate()
        .map(|(i, r)| QueryEntry {
            query_id: format!("q{i:05}"),
            ground_truth: r.doc_id.clone(),
            source: TokenSource::Inline(corrupt(&r.annotation(), noise)),
        })
        .collect();
    QuerySet::from_entries(entries).unwrap()
}

/// Full text-similarity ranking of every query.
pub fn text_rankings(index: &WeightedIndex, queries: &QuerySet) -> Vec<Ranking> {
    let tok = Tokenizer::new(index.n()).unwrap();
    queries
        .entries()
        .iter()
        .map(|e| {
            let bag = tok.tokenize(&e.load_text().unwrap());
            let scores = index.query_scores(&bag).unwrap();
            Ranking::from_scores(
                &e.query_id,
                scores.into_iter().map(|(d, s)| (d.to_string(), s)),
            )
        })
        .collect()
}

/// Collect rankings into a channel, keeping only the top entries of each.
pub fn channel_from_rankings(name: &str, rankings: &[Ranking], top: usize) -> ScoreChannel {
    let mut ch = ScoreChannel::new(name);
    for r in rankings {
        ch.add_ranking(r, Some(top));
    }
    ch
}

/// Fraction of queries whose ground truth is ranked first.
pub fn top1_rate(rankings: &[Ranking], queries: &QuerySet) -> f64 {
    let by_query: HashMap<&str, &Ranking> = rankings.iter().map(|r| (r.query_id(), r)).collect();
    let hits = queries
        .entries()
        .iter()
        .filter(|e| {
            by_query
                .get(e.query_id.as_str())
                .and_then(|r| r.position(&e.ground_truth))
                == Some(1)
        })
        .count();
    hits as f64 / queries.len() as f64
}

/// Rank every query by a single channel's scores.
pub fn rankings_from_channel(channel: &ScoreChannel, queries: &QuerySet) -> Vec<Ranking> {
    queries
        .entries()
        .iter()
        .map(|e| {
            let scores: Vec<(String, f64)> = channel
                .docs_for_query(&e.query_id)
                .map(|docs| docs.iter().map(|(d, &s)| (d.clone(), s)).collect())
                .unwrap_or_default();
            Ranking::from_scores(&e.query_id, scores)
        })
        .collect()
}

/// Synthetic expensive/visual channel: the ground truth of every query
/// scores 1.0; a seeded fraction of queries is corrupted by heavy-tailed
/// noise that pushes a few wrong documents above the ground truth, while the
/// remaining queries get harmless sub-unit noise.
pub fn synthetic_visual_channel(
    name: &str,
    queries: &QuerySet,
    doc_ids: &[String],
    corrupt_fraction: f64,
    noise_docs: usize,
    seed: u64,
) -> ScoreChannel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..queries.len()).collect();
    order.shuffle(&mut rng);
    let n_corrupt = (corrupt_fraction * queries.len() as f64).floor() as usize;
    let corrupted: std::collections::HashSet<usize> = order[..n_corrupt].iter().copied().collect();

    let mut ch = ScoreChannel::new(name);
    for (i, e) in queries.entries().iter().enumerate() {
        ch.insert(&e.query_id, &e.ground_truth, 1.0);
        let mut picked = std::collections::HashSet::new();
        while picked.len() < noise_docs {
            let did = &doc_ids[rng.gen_range(0..doc_ids.len())];
            if *did != e.ground_truth && picked.insert(did.clone()) {
                let score = if corrupted.contains(&i) {
                    // Lomax/Pareto-tailed excess over the ground-truth
                    // score: P(excess > x) = (1 + x/0.2)^-2.
                    let u: f64 = rng.gen();
                    let tail = 0.2 * ((1.0 - u).powf(-0.5) - 1.0);
                    (1.0 + tail).min(50.0)
                } else {
                    rng.gen_range(0.0..0.8)
                };
                ch.insert(&e.query_id, did, score);
            }
        }
    }
    ch
}

/// Corpus for the seeded noisy-retrieval experiments: dictionary-word titles
/// with enough vocabulary overlap that corruption causes real confusions.
pub fn experiment_corpus() -> Corpus {
    let dictionary: Vec<String> = matchbook::words::BASIC_WORDS[..250]
        .iter()
        .map(|w| w.to_string())
        .collect();
    matchbook::corpus::synth_corpus(
        &matchbook::SynthSpec::new(1000, 2, 4, 1003),
        &dictionary,
    )
    .unwrap()
}

/// The corruption profile the experiments run under.
pub fn experiment_noise() -> NoiseConfig {
    NoiseConfig {
        sub_rate: 0.15,
        word_drop_rate: 0.1,
        spurious_singles: 3,
        spurious_words: 2,
        seed: 7,
        ..NoiseConfig::default()
    }
}

/// 100k distractor records mixing dictionary words with pseudo-words.
pub fn distractor_corpus() -> Corpus {
    let mut dictionary: Vec<String> = matchbook::words::BASIC_WORDS[..250]
        .iter()
        .map(|w| w.to_string())
        .collect();
    dictionary.extend(matchbook::corpus::random_dictionary(4000, (3, 9), 77));
    matchbook::corpus::synth_corpus(
        &matchbook::SynthSpec::new(100_000, 2, 6, 1007)
            .id_prefix("x")
            .distractor(true),
        &dictionary,
    )
    .unwrap()
}
