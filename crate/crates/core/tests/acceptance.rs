//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line. Rates produced by the seeded experiments were derived
//! from their first run and are pinned as exact regression values.

mod common;

use std::collections::HashMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use matchbook::corpus::{synth_corpus, QueryEntry, QuerySet, SynthSpec, TokenSource};
use matchbook::eval::{retrieval_curve, tabulate, Curve};
use matchbook::fusion::{crossval_twofold, rank_with_weights, train_ranksvm, TrainConfig};
use matchbook::rerank::{rerank_topk, Fallback, Ranking};
use matchbook::textindex::{build_index, InnerNorm};
use matchbook::tokenizer::Tokenizer;
use matchbook::ScoreChannel;

macro_rules! check {
    ($cond:expr, $($msg:tt)+) => {
        if !($cond) {
            return Err(format!($($msg)+));
        }
    };
}

fn criterion(id: u32, name: &str, body: impl FnOnce() -> Result<String, String>) {
    match body() {
        Ok(detail) => println!("ACCEPTANCE {id} ({name}): PASS {detail}"),
        Err(msg) => {
            println!("ACCEPTANCE {id} ({name}): FAIL {msg}");
            panic!("acceptance criterion {id} ({name}) failed: {msg}");
        }
    }
}

#[test]
fn criterion_1_oracle_equivalence() {
    criterion(1, "oracle equivalence", || {
        let start = Instant::now();
        let mut pairs_checked = 0usize;
        for i in 0..50u64 {
            let num_docs = 20 + (i as usize * 37) % 481;
            let num_queries = 5 + (i as usize * 7) % 46;
            let corpus = common::small_alphabet_corpus(num_docs, 9000 + i);
            let bags = common::corpus_bags(&corpus, 3);
            let index = build_index(&corpus, 3).unwrap();
            let tok = Tokenizer::new(3).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(10_000 + i);
            for q in 0..num_queries {
                // Mix free-form queries with exact document titles.
                let text = if q % 3 == 0 {
                    corpus.records()[q % num_docs].title.clone()
                } else {
                    common::random_small_alphabet_text(&mut rng, 1..=4)
                };
                let bag = tok.tokenize(&text);
                let fast: HashMap<String, f64> = index
                    .query_scores(&bag)
                    .unwrap()
                    .into_iter()
                    .map(|(d, s)| (d.to_string(), s))
                    .collect();
                for (doc_id, expected) in common::dense_tfidf_scores(&bags, &bag) {
                    let got = fast.get(&doc_id).copied().unwrap_or(0.0);
                    check!(
                        (got - expected).abs() < 1e-9,
                        "corpus {i} query {q} doc {doc_id}: index {got} vs oracle {expected}"
                    );
                    pairs_checked += 1;
                }
            }
        }
        let elapsed = start.elapsed();
        check!(
            elapsed.as_secs_f64() < 10.0,
            "took {elapsed:?}, budget is 10 s"
        );
        Ok(format!("({pairs_checked} pairs, {elapsed:?})"))
    });
}

#[test]
fn criterion_2_normalization_exactness() {
    criterion(2, "inner-norm invariance", || {
        let corpus = common::small_alphabet_corpus(200, 555);
        let index = build_index(&corpus, 3).unwrap();
        let tok = Tokenizer::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(556);
        let mut non_empty = 0usize;
        for i in 0..1000 {
            // Words over a-e so some grams fall outside the indexed
            // vocabulary.
            let n_words = rng.gen_range(0..=6);
            let text = (0..n_words)
                .map(|_| {
                    let len = rng.gen_range(1..=6);
                    (0..len)
                        .map(|_| (b'a' + rng.gen_range(0..5u8)) as char)
                        .collect::<String>()
                })
                .collect::<Vec<_>>()
                .join(" ");
            let bag = tok.tokenize(&text);
            let l1 = index.query_vector_with(&bag, InnerNorm::L1).unwrap();
            let l2 = index.query_vector_with(&bag, InnerNorm::L2).unwrap();
            let folded = index.query_vector(&bag).unwrap();
            check!(
                l1.len() == l2.len() && l1.len() == folded.len(),
                "bag {i}: component counts differ ({}, {}, {})",
                l1.len(),
                l2.len(),
                folded.len()
            );
            for ((ga, va), (gb, vb)) in l1.iter().zip(&l2) {
                check!(ga == gb, "bag {i}: gram order differs");
                check!(
                    (va - vb).abs() < 1e-12,
                    "bag {i} gram {ga}: L1 {va} vs L2 {vb}"
                );
            }
            for ((ga, va), (gb, vb)) in l1.iter().zip(&folded) {
                check!(ga == gb, "bag {i}: gram order differs from folded path");
                check!(
                    (va - vb).abs() < 1e-12,
                    "bag {i} gram {ga}: L1 {va} vs folded {vb}"
                );
            }
            if !l1.is_empty() {
                non_empty += 1;
            }
        }
        Ok(format!("(1000 bags, {non_empty} non-empty)"))
    });
}

#[test]
fn criterion_3_ngram_length_ordering() {
    criterion(3, "n=3 beats n=1 under corruption", || {
        let start = Instant::now();
        let corpus = common::experiment_corpus();
        let queries = common::corrupted_queries(&corpus, &common::experiment_noise());
        let index3 = build_index(&corpus, 3).unwrap();
        let index1 = build_index(&corpus, 1).unwrap();
        let rankings3 = common::text_rankings(&index3, &queries);
        let rankings1 = common::text_rankings(&index1, &queries);
        let curve3 = retrieval_curve(&rankings3, &queries, corpus.len(), "ocr-3").unwrap();
        let curve1 = retrieval_curve(&rankings1, &queries, corpus.len(), "ocr-1").unwrap();

        let top1_3 = curve3.rate_at(1).unwrap();
        let top1_1 = curve1.rate_at(1).unwrap();
        check!(
            top1_3 - top1_1 >= 0.3,
            "top-1 gap {} below 0.3 (n=3 {top1_3}, n=1 {top1_1})",
            top1_3 - top1_1
        );
        let end_1 = curve1.rate_at(corpus.len()).unwrap();
        check!(
            end_1 >= 0.99,
            "n=1 end-of-curve rate {end_1} does not approach 1"
        );

        // Pinned regression values from the seeded run.
        check!(top1_3 == 0.803, "n=3 top-1 {top1_3} != pinned 0.803");
        check!(top1_1 == 0.028, "n=1 top-1 {top1_1} != pinned 0.028");
        check!(end_1 == 1.0, "n=1 end rate {end_1} != pinned 1.0");
        let end_3 = curve3.rate_at(corpus.len()).unwrap();
        check!(end_3 == 0.986, "n=3 end rate {end_3} != pinned 0.986");

        let elapsed = start.elapsed();
        check!(
            elapsed.as_secs_f64() < 60.0,
            "took {elapsed:?}, budget is 60 s"
        );
        Ok(format!(
            "(n=3 top-1 {top1_3}, n=1 top-1 {top1_1}, {elapsed:?})"
        ))
    });
}

#[test]
fn criterion_4_fusion_gain() {
    criterion(4, "fusion beats best single channel", || {
        let corpus = common::experiment_corpus();
        let queries = common::corrupted_queries(&corpus, &common::experiment_noise());
        let index3 = build_index(&corpus, 3).unwrap();
        let rankings3 = common::text_rankings(&index3, &queries);
        let text_channel = common::channel_from_rankings("text", &rankings3, 100);
        let doc_ids: Vec<String> = corpus.records().iter().map(|r| r.doc_id.clone()).collect();
        let visual =
            common::synthetic_visual_channel("visual", &queries, &doc_ids, 0.4, 5, 2004);

        let text_top1 = common::top1_rate(
            &common::rankings_from_channel(&text_channel, &queries),
            &queries,
        );
        let visual_top1 = common::top1_rate(
            &common::rankings_from_channel(&visual, &queries),
            &queries,
        );
        let cfg = TrainConfig {
            c_param: 10.0,
            seed: 404,
            ..TrainConfig::default()
        };
        let channels = vec![text_channel, visual];
        let cv = crossval_twofold(&channels, &queries, &cfg).unwrap();
        let fused_top1 = common::top1_rate(&cv.rankings, &queries);

        let best_single = text_top1.max(visual_top1);
        check!(
            fused_top1 - best_single >= 0.05,
            "fused {fused_top1} vs best single {best_single}: gain {} below 0.05",
            fused_top1 - best_single
        );
        // Pinned regression values from the seeded run.
        check!(text_top1 == 0.803, "text top-1 {text_top1} != pinned 0.803");
        check!(visual_top1 == 0.6, "visual top-1 {visual_top1} != pinned 0.6");
        check!(fused_top1 == 0.962, "fused top-1 {fused_top1} != pinned 0.962");
        Ok(format!(
            "(text {text_top1}, visual {visual_top1}, fused {fused_top1})"
        ))
    });
}

#[test]
fn criterion_5_ranksvm_correctness() {
    criterion(5, "rankSVM reaches zero violations", || {
        // Linearly separable: 3 channels, 20 queries, 10 candidates each;
        // channel 0 alone separates with margin to spare.
        let mut useful = ScoreChannel::new("useful");
        let mut noise1 = ScoreChannel::new("noise1");
        let mut noise2 = ScoreChannel::new("noise2");
        let mut train = Vec::new();
        for q in 0..20usize {
            let qid = format!("q{q:02}");
            let gt = format!("d{q:02}-00");
            for d in 0..10usize {
                let did = format!("d{q:02}-{d:02}");
                let useful_score = if d == 0 { 1.0 } else { 0.1 + 0.02 * d as f64 };
                useful.insert(&qid, &did, useful_score);
                noise1.insert(&qid, &did, ((q * 31 + d * 17) % 10) as f64 / 10.0);
                noise2.insert(&qid, &did, ((q * 13 + d * 7) % 10) as f64 / 20.0);
            }
            train.push((qid, gt));
        }
        let channels = vec![useful, noise1, noise2];
        let cfg = TrainConfig {
            c_param: 10.0,
            epochs: 200,
            ..TrainConfig::default()
        };
        let model = train_ranksvm(&channels, &train, &cfg).unwrap();

        check!(
            model.train_report.violated_constraints == 0,
            "report counts {} violated constraints",
            model.train_report.violated_constraints
        );
        // Exhaustive enumeration of all 20 * 9 constraints.
        let mut enumerated = 0usize;
        for (qid, gt) in &train {
            let phi = |did: &str| -> Vec<f64> {
                channels.iter().map(|c| c.get(qid, did)).collect()
            };
            let score = |did: &str| -> f64 {
                phi(did)
                    .iter()
                    .zip(&model.weights)
                    .map(|(x, w)| x * w)
                    .sum()
            };
            let gt_score = score(gt);
            for d in 0..10usize {
                let did = format!("{}-{d:02}", &gt[..3]);
                if &did == gt {
                    continue;
                }
                let margin = gt_score - score(&did);
                check!(
                    margin >= 1.0 - 1e-9,
                    "constraint ({qid}, {did}) margin {margin} < 1"
                );
                enumerated += 1;
            }
        }
        check!(enumerated == 180, "enumerated {enumerated} constraints, expected 180");

        let history = &model.train_report.objective_history;
        check!(history.len() == 201, "history length {}", history.len());
        for (e, win) in history.windows(2).enumerate() {
            check!(
                win[1] <= win[0] + 1e-9,
                "objective rose at epoch {e}: {} -> {}",
                win[0],
                win[1]
            );
        }
        Ok(format!(
            "(0 violations in 180 constraints, final objective {:.6})",
            model.train_report.final_objective
        ))
    });
}

#[test]
fn criterion_6_rerank_contract() {
    criterion(6, "rerank window contract", || {
        // Property sweep over 1000 random rankings.
        let mut rng = ChaCha8Rng::seed_from_u64(660);
        for case in 0..1000 {
            let len = rng.gen_range(0..40usize);
            let k = rng.gen_range(0..50usize);
            let scores: Vec<(String, f64)> = (0..len)
                .map(|d| (format!("d{d:02}"), rng.gen_range(0.0..1.0)))
                .collect();
            let ranking = Ranking::from_scores("q", scores);
            let mut expensive = ScoreChannel::new("exp");
            for d in 0..len {
                if rng.gen::<f64>() < 0.5 {
                    expensive.insert("q", &format!("d{d:02}"), rng.gen_range(0.0..1.0));
                }
            }
            let fallback = if rng.gen::<bool>() {
                Fallback::Keep
            } else {
                Fallback::Zero
            };
            let reranked = rerank_topk(&ranking, &expensive, k, fallback);

            let cut = k.min(len);
            let mut before: Vec<&str> = ranking.entries()[..cut]
                .iter()
                .map(|e| e.doc_id.as_str())
                .collect();
            let mut after: Vec<&str> = reranked.entries()[..cut]
                .iter()
                .map(|e| e.doc_id.as_str())
                .collect();
            before.sort_unstable();
            after.sort_unstable();
            check!(before == after, "case {case}: top-K set changed");
            check!(
                ranking.entries()[cut..] == reranked.entries()[cut..],
                "case {case}: suffix changed"
            );
            if k == 0 {
                check!(&reranked == &ranking, "case {case}: k=0 not identity");
            }
        }

        // Seeded top-heavy oracle: reranking lifts top-1 sharply and the
        // curve is flat beyond the window size.
        let (base, expensive, qset) = flattening_setup();
        let k = 10;
        let reranked: Vec<Ranking> = base
            .iter()
            .map(|r| rerank_topk(r, &expensive, k, Fallback::Keep))
            .collect();
        let base_curve = retrieval_curve(&base, &qset, 30, "base").unwrap();
        let rr_curve = retrieval_curve(&reranked, &qset, 30, "rr").unwrap();

        let base1 = base_curve.rate_at(1).unwrap();
        let rr1 = rr_curve.rate_at(1).unwrap();
        check!(rr1 > base1, "rerank did not improve top-1 ({base1} -> {rr1})");
        let plateau = rr_curve.rate_at(k).unwrap();
        for kk in k..=30 {
            let r = rr_curve.rate_at(kk).unwrap();
            check!(
                r == plateau,
                "curve not flat beyond K: rate({kk}) = {r} vs {plateau}"
            );
        }
        // Pinned regression values from the seeded run.
        check!(base1 == 0.085, "base top-1 {base1} != pinned 0.085");
        check!(rr1 == 0.745, "reranked top-1 {rr1} != pinned 0.745");
        check!(plateau == 0.925, "plateau {plateau} != pinned 0.925");
        Ok(format!(
            "(1000 random rankings; top-1 {base1} -> {rr1}, plateau {plateau})"
        ))
    });
}

#[test]
fn criterion_7_distractor_degradation() {
    criterion(7, "distractors degrade, fusion holds", || {
        let corpus = common::experiment_corpus();
        let queries = common::corrupted_queries(&corpus, &common::experiment_noise());
        let index3 = build_index(&corpus, 3).unwrap();
        let rankings3 = common::text_rankings(&index3, &queries);
        let text_top1 = common::top1_rate(&rankings3, &queries);

        let merged = corpus.clone().merge(common::distractor_corpus()).unwrap();
        check!(merged.len() == 101_000, "merged corpus has {} docs", merged.len());
        let index_d = build_index(&merged, 3).unwrap();
        let rankings_d: Vec<Ranking> = common::text_rankings(&index_d, &queries)
            .into_iter()
            .map(|r| r.truncate(200))
            .collect();
        let text_top1_d = common::top1_rate(&rankings_d, &queries);
        check!(
            text_top1_d < text_top1,
            "text top-1 did not drop: {text_top1} -> {text_top1_d}"
        );

        let text_channel_d = common::channel_from_rankings("text", &rankings_d, 200);
        let merged_ids: Vec<String> =
            merged.records().iter().map(|r| r.doc_id.clone()).collect();
        let visual_d =
            common::synthetic_visual_channel("visual", &queries, &merged_ids, 0.4, 5, 2007);
        let visual_top1_d = common::top1_rate(
            &common::rankings_from_channel(&visual_d, &queries),
            &queries,
        );
        let cfg = TrainConfig {
            c_param: 10.0,
            seed: 707,
            ..TrainConfig::default()
        };
        let channels = vec![text_channel_d, visual_d];
        let cv = crossval_twofold(&channels, &queries, &cfg).unwrap();
        let fused_top1_d = common::top1_rate(&cv.rankings, &queries);

        check!(
            fused_top1_d >= text_top1_d && fused_top1_d >= visual_top1_d,
            "fused {fused_top1_d} below a single channel (text {text_top1_d}, visual {visual_top1_d})"
        );
        // Pinned regression values from the seeded run.
        check!(text_top1 == 0.803, "clean text top-1 {text_top1} != pinned 0.803");
        check!(text_top1_d == 0.681, "distracted text top-1 {text_top1_d} != pinned 0.681");
        check!(visual_top1_d == 0.6, "visual top-1 {visual_top1_d} != pinned 0.6");
        check!(fused_top1_d == 0.956, "fused top-1 {fused_top1_d} != pinned 0.956");
        Ok(format!(
            "(text {text_top1} -> {text_top1_d} with 100k distractors, fused {fused_top1_d})"
        ))
    });
}

#[test]
fn criterion_8_query_latency() {
    criterion(8, "query latency at 100k documents", || {
        let dictionary: Vec<String> = matchbook::words::BASIC_WORDS
            .iter()
            .map(|w| w.to_string())
            .collect();
        let corpus = synth_corpus(
            &SynthSpec::new(100_000, 4, 6, 88).id_prefix("b"),
            &dictionary,
        )
        .unwrap();
        let index = build_index(&corpus, 3).unwrap();
        let tok = Tokenizer::new(3).unwrap();

        let mut rng = ChaCha8Rng::seed_from_u64(881);
        let mut latencies = Vec::with_capacity(300);
        for _ in 0..300 {
            let record = &corpus.records()[rng.gen_range(0..corpus.len())];
            let bag = tok.tokenize(&record.annotation());
            let begin = Instant::now();
            let scores = index.query_scores(&bag).unwrap();
            let ranking = Ranking::from_scores(
                &record.doc_id,
                scores.into_iter().map(|(d, s)| (d.to_string(), s)),
            );
            latencies.push(begin.elapsed().as_secs_f64() * 1e3);
            assert!(!ranking.is_empty());
        }
        latencies.sort_by(f64::total_cmp);
        let median = latencies[latencies.len() / 2];
        let p99 = latencies[(latencies.len() as f64 * 0.99).ceil() as usize - 1];
        check!(median < 50.0, "median latency {median:.2} ms >= 50 ms");
        check!(p99 < 200.0, "p99 latency {p99:.2} ms >= 200 ms");
        Ok(format!("(median {median:.2} ms, p99 {p99:.2} ms)"))
    });
}

#[test]
fn criterion_9_fixed_point_reproduction() {
    criterion(9, "fixed-point table from channel files", || {
        // Stand-in channel files with the same shape as externally supplied
        // per-query scores; top-1 rates are 0.84, 0.65 and 0.68 by
        // construction.
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let num_queries = 100;
        let entries: Vec<QueryEntry> = (0..num_queries)
            .map(|i| QueryEntry {
                query_id: format!("q{i:03}"),
                ground_truth: format!("g{i:03}"),
                source: TokenSource::Inline(String::new()),
            })
            .collect();
        let queries = QuerySet::from_entries(entries).unwrap();

        let methods: &[(&str, usize)] = &[("rsvm", 84), ("ocr-3", 65), ("vlad", 68)];
        let mut curves: Vec<Curve> = Vec::new();
        for &(name, correct) in methods {
            let mut ch = ScoreChannel::new(name);
            for (i, e) in queries.entries().iter().enumerate() {
                let (gt_score, other_score) = if i < correct { (0.9, 0.4) } else { (0.4, 0.9) };
                ch.insert(&e.query_id, &e.ground_truth, gt_score);
                ch.insert(&e.query_id, &format!("o{i:03}"), other_score);
            }
            // Round-trip through the documented file format, with a comment
            // header as tool-written files carry.
            let path = dir.path().join(format!("{name}.tsv"));
            std::fs::write(
                &path,
                format!("# synthetic stand-in channel\n{}", ch.to_tsv()),
            )
            .map_err(|e| e.to_string())?;
            let loaded = ScoreChannel::read(&path, Some(name)).map_err(|e| e.to_string())?;
            check!(loaded.len() == ch.len(), "channel {name} lost entries in the file");

            let rankings: Vec<Ranking> = queries
                .entries()
                .iter()
                .map(|e| rank_with_weights(&[1.0], std::slice::from_ref(&loaded), &e.query_id))
                .collect::<matchbook::Result<_>>()
                .map_err(|e| e.to_string())?;
            curves.push(retrieval_curve(&rankings, &queries, 5, name).map_err(|e| e.to_string())?);
        }

        let table = tabulate(&curves, &[1, 5]).unwrap();
        check!(table.values[0] == vec![0.84, 0.65, 0.68], "rate(1) row is {:?}", table.values[0]);
        check!(
            table.flags[0] == vec![true, false, false],
            "rsvm must be the flagged maximum at k=1"
        );
        check!(table.values[1] == vec![1.0, 1.0, 1.0], "rate(5) row is {:?}", table.values[1]);
        let aligned = table.to_aligned();
        check!(aligned.contains("0.84*"), "aligned table missing flagged 0.84");
        let tsv = table.to_tsv();
        check!(tsv.contains("0.84\t0.65\t0.68"), "tsv table missing raw row");
        Ok("(rate(1) = 0.84 / 0.65 / 0.68 from files)".to_string())
    });
}

/// Base rankings where 90% of ground truths sit inside the top-10 window
/// and the rest are absent, plus a top-heavy expensive oracle that fires for
/// 80% of windowed ground truths.
fn flattening_setup() -> (Vec<Ranking>, ScoreChannel, QuerySet) {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let num_queries = 200;
    let k = 10;
    let list_len = 30;
    let mut rankings = Vec::new();
    let mut expensive = ScoreChannel::new("expensive");
    let mut entries = Vec::new();
    for q in 0..num_queries {
        let qid = format!("q{q:03}");
        let gt = format!("g{q:03}");
        entries.push(QueryEntry {
            query_id: qid.clone(),
            ground_truth: gt.clone(),
            source: TokenSource::Inline(String::new()),
        });
        let gt_pos = if rng.gen::<f64>() < 0.9 {
            Some(rng.gen_range(0..k))
        } else {
            None
        };
        let mut ids: Vec<String> = Vec::new();
        let mut filler = 0usize;
        for pos in 0..list_len {
            if Some(pos) == gt_pos {
                ids.push(gt.clone());
            } else {
                ids.push(format!("f{q:03}-{filler:02}"));
                filler += 1;
            }
        }
        if gt_pos.is_some() && rng.gen::<f64>() < 0.8 {
            expensive.insert(&qid, &gt, 1.0);
        }
        for d in &ids {
            if *d != gt && rng.gen::<f64>() < 0.3 {
                expensive.insert(&qid, d, rng.gen_range(0.0..0.5));
            }
        }
        let n = ids.len();
        rankings.push(Ranking::from_scores(
            &qid,
            ids.into_iter()
                .enumerate()
                .map(|(i, d)| (d, (n - i) as f64 / n as f64)),
        ));
    }
    (rankings, expensive, QuerySet::from_entries(entries).unwrap())
}
