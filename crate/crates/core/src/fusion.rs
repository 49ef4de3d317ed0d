//! Combining score channels into final rankings.
//!
//! Two combiners are provided: a fixed linear mix with hand-chosen weights,
//! and a learned pairwise ranking SVM. The SVM minimizes
//!
//! ```text
//!   0.5 * w'w + C * sum over (i, j) of max(0, 1 - w'(phi(i, gt_i) - phi(i, d_j)))
//! ```
//!
//! over all training queries i and candidate documents d_j, i.e. the correct
//! document must outscore every other candidate by a unit margin, slack
//! allowed. The optimizer is deterministic full-batch subgradient descent
//! with base step 1/t and two safeguards: steps that would raise the
//! objective are halved until they do not (so the recorded objective is
//! non-increasing per epoch), and when all margins are positive but some sit
//! below 1, the weight vector is rescaled to clear the margin whenever that
//! lowers the objective (which lets separable instances reach exactly zero
//! violated constraints instead of hovering at the kink).

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::ScoreChannel;
use crate::corpus::QuerySet;
use crate::error::{Error, Result};
use crate::rerank::Ranking;

/// Margins within this distance of the unit margin count as satisfied when
/// tallying violated constraints.
const MARGIN_TOL: f64 = 1e-9;

/// Training configuration for the ranking SVM.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Slack penalty C > 0.
    pub c_param: f64,
    /// Fixed number of epochs.
    pub epochs: usize,
    /// Recorded in the model and used for fold shuffling in cross
    /// validation; the optimizer itself is deterministic.
    pub seed: u64,
    /// Per-query cap on negative candidates; beyond it only the candidates
    /// with the highest max-channel score are kept.
    pub max_negatives: usize,
    /// Min-max scale each channel using statistics from the training fold.
    pub standardize: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            c_param: 1.0,
            epochs: 200,
            seed: 0,
            max_negatives: 1000,
            standardize: false,
        }
    }
}

/// Optimization summary stored alongside the learned weights.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainReport {
    pub epochs_run: usize,
    pub final_objective: f64,
    /// Total slack, sum of max(0, 1 - margin) over all constraints.
    pub total_slack: f64,
    /// Constraints with margin below 1 (up to numerical tolerance).
    pub violated_constraints: usize,
    /// Objective after initialization and after each epoch.
    pub objective_history: Vec<f64>,
}

/// Learned channel weighting.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FusionModel {
    pub channel_names: Vec<String>,
    pub weights: Vec<f64>,
    pub c_param: f64,
    pub seed: u64,
    /// Per-channel (min, max) from the training fold when standardization
    /// was enabled.
    pub scaling: Option<Vec<(f64, f64)>>,
    pub train_report: TrainReport,
}

impl FusionModel {
    /// Rank one query with this model. The channels must match the model's
    /// channel order by name.
    pub fn rank(&self, channels: &[ScoreChannel], query_id: &str) -> Result<Ranking> {
        let names: Vec<&str> = channels.iter().map(|c| c.name()).collect();
        if names.len() != self.channel_names.len()
            || names
                .iter()
                .zip(&self.channel_names)
                .any(|(a, b)| *a != b.as_str())
        {
            return Err(Error::Config(format!(
                "channel order {:?} does not match model channels {:?}",
                names, self.channel_names
            )));
        }
        rank_impl(&self.weights, channels, query_id, self.scaling.as_deref())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str, origin: impl AsRef<Path>) -> Result<Self> {
        // Tool-written files may carry '#' comment headers before the JSON.
        let body: String = text
            .lines()
            .filter(|l| !l.starts_with('#'))
            .collect::<Vec<_>>()
            .join("\n");
        serde_json::from_str(&body).map_err(|e| {
            Error::format(
                origin.as_ref(),
                e.line(),
                format!("invalid model file: {e}"),
            )
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text, path)
    }
}

fn validate_channel_set(channels: &[ScoreChannel]) -> Result<()> {
    if channels.is_empty() {
        return Err(Error::Config("channel set is empty".into()));
    }
    let mut seen = HashSet::new();
    for c in channels {
        if !seen.insert(c.name()) {
            return Err(Error::Config(format!(
                "duplicate channel name '{}'",
                c.name()
            )));
        }
    }
    Ok(())
}

/// Weighted sum of channels over the union of their supports. Pairs absent
/// from a channel contribute that channel's default of 0; every pair present
/// in any input appears explicitly in the output.
pub fn combine_fixed(channels: &[ScoreChannel], lambdas: &[f64]) -> Result<ScoreChannel> {
    validate_channel_set(channels)?;
    if channels.len() != lambdas.len() {
        return Err(Error::ChannelCountMismatch {
            channels: channels.len(),
            weights: lambdas.len(),
        });
    }
    let mut out = ScoreChannel::new("combined");
    // Union of supports, assembled deterministically.
    let mut queries: Vec<&str> = Vec::new();
    let mut seen_q = HashSet::new();
    for ch in channels {
        for q in ch.query_ids_sorted() {
            if seen_q.insert(q.to_string()) {
                queries.push(q);
            }
        }
    }
    for qid in queries {
        let mut docs: Vec<&str> = Vec::new();
        let mut seen_d = HashSet::new();
        for ch in channels {
            if let Some(m) = ch.docs_for_query(qid) {
                let mut ids: Vec<&str> = m.keys().map(|s| s.as_str()).collect();
                ids.sort_unstable();
                for d in ids {
                    if seen_d.insert(d.to_string()) {
                        docs.push(d);
                    }
                }
            }
        }
        for did in docs {
            let score: f64 = channels
                .iter()
                .zip(lambdas)
                .map(|(ch, l)| l * ch.get(qid, did))
                .sum();
            out.insert(qid, did, score);
        }
    }
    Ok(out)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn scale_value(v: f64, scaling: Option<&(f64, f64)>) -> f64 {
    match scaling {
        Some(&(lo, hi)) if hi > lo => (v - lo) / (hi - lo),
        Some(_) => 0.0,
        None => v,
    }
}

fn feature_vector(
    channels: &[ScoreChannel],
    query_id: &str,
    doc_id: &str,
    scaling: Option<&[(f64, f64)]>,
) -> Vec<f64> {
    channels
        .iter()
        .enumerate()
        .map(|(m, ch)| scale_value(ch.get(query_id, doc_id), scaling.map(|s| &s[m])))
        .collect()
}

/// Candidate documents for a query: the union of all channel supports,
/// sorted by doc_id.
fn candidate_docs<'a>(channels: &'a [ScoreChannel], query_id: &str) -> Vec<&'a str> {
    let mut docs: Vec<&str> = Vec::new();
    let mut seen = HashSet::new();
    for ch in channels {
        if let Some(m) = ch.docs_for_query(query_id) {
            for d in m.keys() {
                if seen.insert(d.as_str()) {
                    docs.push(d.as_str());
                }
            }
        }
    }
    docs.sort_unstable();
    docs
}

fn rank_impl(
    weights: &[f64],
    channels: &[ScoreChannel],
    query_id: &str,
    scaling: Option<&[(f64, f64)]>,
) -> Result<Ranking> {
    validate_channel_set(channels)?;
    if weights.len() != channels.len() {
        return Err(Error::ChannelCountMismatch {
            channels: channels.len(),
            weights: weights.len(),
        });
    }
    if !channels.iter().any(|c| c.has_query(query_id)) {
        return Err(Error::UnknownQuery(query_id.to_string()));
    }
    let scores: Vec<(String, f64)> = candidate_docs(channels, query_id)
        .into_iter()
        .map(|did| {
            let phi = feature_vector(channels, query_id, did, scaling);
            (did.to_string(), dot(weights, &phi))
        })
        .collect();
    Ok(Ranking::from_scores(query_id, scores))
}

/// Rank a query by a fixed weight vector (for example a lambda mix), no
/// feature scaling.
pub fn rank_with_weights(
    weights: &[f64],
    channels: &[ScoreChannel],
    query_id: &str,
) -> Result<Ranking> {
    rank_impl(weights, channels, query_id, None)
}

/// Pairwise difference vectors for the training objective.
fn build_deltas(
    channels: &[ScoreChannel],
    train: &[(String, String)],
    cfg: &TrainConfig,
    scaling: Option<&[(f64, f64)]>,
) -> Result<Vec<Vec<f64>>> {
    let mut deltas = Vec::new();
    for (qid, gt) in train {
        let phi_gt = feature_vector(channels, qid, gt, scaling);
        if phi_gt.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteFeature {
                query_id: qid.clone(),
                doc_id: gt.clone(),
            });
        }
        let mut negatives: Vec<&str> = candidate_docs(channels, qid)
            .into_iter()
            .filter(|d| *d != gt.as_str())
            .collect();
        if negatives.len() > cfg.max_negatives {
            // Keep the hardest candidates: highest max-channel score first.
            let mut keyed: Vec<(f64, &str)> = negatives
                .into_iter()
                .map(|d| {
                    let best = channels
                        .iter()
                        .map(|ch| ch.get(qid, d))
                        .fold(f64::NEG_INFINITY, f64::max);
                    (best, d)
                })
                .collect();
            keyed.sort_unstable_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1)));
            keyed.truncate(cfg.max_negatives);
            negatives = keyed.into_iter().map(|(_, d)| d).collect();
        }
        for did in negatives {
            let phi_d = feature_vector(channels, qid, did, scaling);
            if phi_d.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFiniteFeature {
                    query_id: qid.clone(),
                    doc_id: did.to_string(),
                });
            }
            let delta: Vec<f64> = phi_gt.iter().zip(&phi_d).map(|(a, b)| a - b).collect();
            deltas.push(delta);
        }
    }
    if deltas.is_empty() {
        return Err(Error::NoTrainingPairs);
    }
    Ok(deltas)
}

fn objective(w: &[f64], deltas: &[Vec<f64>], c: f64) -> f64 {
    let quad = 0.5 * dot(w, w);
    let hinge: f64 = deltas
        .iter()
        .map(|d| (1.0 - dot(w, d)).max(0.0))
        .sum();
    quad + c * hinge
}

/// Train the ranking SVM on `(query_id, ground_truth)` pairs.
///
/// Deterministic: pair construction, gradient order and step control are all
/// fixed, so identical inputs give identical models.
pub fn train_ranksvm(
    channels: &[ScoreChannel],
    train: &[(String, String)],
    cfg: &TrainConfig,
) -> Result<FusionModel> {
    validate_channel_set(channels)?;
    if !(cfg.c_param > 0.0) || !cfg.c_param.is_finite() {
        return Err(Error::Config(format!(
            "c_param must be positive, got {}",
            cfg.c_param
        )));
    }
    if cfg.epochs == 0 {
        return Err(Error::Config("epochs must be >= 1".into()));
    }

    let scaling: Option<Vec<(f64, f64)>> = if cfg.standardize {
        let mut bounds = vec![(f64::INFINITY, f64::NEG_INFINITY); channels.len()];
        for (qid, gt) in train {
            let mut docs = candidate_docs(channels, qid);
            if !docs.contains(&gt.as_str()) {
                docs.push(gt);
            }
            for did in docs {
                for (m, ch) in channels.iter().enumerate() {
                    let v = ch.get(qid, did);
                    bounds[m].0 = bounds[m].0.min(v);
                    bounds[m].1 = bounds[m].1.max(v);
                }
            }
        }
        Some(bounds)
    } else {
        None
    };

    let deltas = build_deltas(channels, train, cfg, scaling.as_deref())?;
    let m = channels.len();
    let c = cfg.c_param;

    let mut w = vec![0.0f64; m];
    let mut history = Vec::with_capacity(cfg.epochs + 1);
    history.push(objective(&w, &deltas, c));
    let mut prev_step = 1.0f64;
    for t in 1..=cfg.epochs {
        let mut grad = w.clone();
        for d in &deltas {
            if dot(&w, d) < 1.0 {
                for j in 0..m {
                    grad[j] -= c * d[j];
                }
            }
        }
        let current = objective(&w, &deltas, c);
        // Base step 1/t, but pick up near the last accepted step so
        // backtracking stays short once steps get small.
        let mut step = (1.0 / t as f64).min(prev_step * 4.0);
        for _ in 0..60 {
            let cand: Vec<f64> = w.iter().zip(&grad).map(|(wi, gi)| wi - step * gi).collect();
            if objective(&cand, &deltas, c) <= current {
                w = cand;
                prev_step = step;
                break;
            }
            step *= 0.5;
        }

        let min_margin = deltas
            .iter()
            .map(|d| dot(&w, d))
            .fold(f64::INFINITY, f64::min);
        if min_margin > 0.0 && min_margin < 1.0 {
            // Slight overshoot so the rescaled minimum margin lands above 1
            // instead of rounding just under it.
            let factor = 1.0 / (min_margin * (1.0 - 1e-9));
            let cand: Vec<f64> = w.iter().map(|wi| wi * factor).collect();
            if objective(&cand, &deltas, c) <= objective(&w, &deltas, c) {
                w = cand;
            }
        }
        history.push(objective(&w, &deltas, c));
    }

    let total_slack: f64 = deltas
        .iter()
        .map(|d| (1.0 - dot(&w, d)).max(0.0))
        .sum();
    let violated = deltas
        .iter()
        .filter(|d| dot(&w, d) < 1.0 - MARGIN_TOL)
        .count();
    let final_objective = *history.last().expect("history non-empty");

    Ok(FusionModel {
        channel_names: channels.iter().map(|c| c.name().to_string()).collect(),
        weights: w,
        c_param: cfg.c_param,
        seed: cfg.seed,
        scaling,
        train_report: TrainReport {
            epochs_run: cfg.epochs,
            final_objective,
            total_slack,
            violated_constraints: violated,
            objective_history: history,
        },
    })
}

/// Output of two-fold cross validation.
#[derive(Debug)]
pub struct CrossvalResult {
    /// One ranking per query, in the query set's order; each query is ranked
    /// by the model trained on the other fold.
    pub rankings: Vec<Ranking>,
    pub models: Vec<FusionModel>,
    /// (query_id, fold index) for every query.
    pub assignments: Vec<(String, usize)>,
}

/// Split the queries into two seeded folds (shuffle, then alternate), train
/// on each fold and rank the other, so no query is ranked by a model that
/// saw it.
pub fn crossval_twofold(
    channels: &[ScoreChannel],
    queries: &QuerySet,
    cfg: &TrainConfig,
) -> Result<CrossvalResult> {
    if queries.len() < 2 {
        return Err(Error::TooFewQueries {
            need: 2,
            got: queries.len(),
        });
    }
    validate_channel_set(channels)?;

    let mut order: Vec<usize> = (0..queries.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    order.shuffle(&mut rng);

    let mut fold_of = vec![0usize; queries.len()];
    for (pos, &qi) in order.iter().enumerate() {
        fold_of[qi] = pos % 2;
    }

    let fold_pairs = |fold: usize| -> Vec<(String, String)> {
        queries
            .entries()
            .iter()
            .enumerate()
            .filter(|(i, _)| fold_of[*i] == fold)
            .map(|(_, e)| (e.query_id.clone(), e.ground_truth.clone()))
            .collect()
    };
    let models = vec![
        train_ranksvm(channels, &fold_pairs(0), cfg)?,
        train_ranksvm(channels, &fold_pairs(1), cfg)?,
    ];

    let mut rankings = Vec::with_capacity(queries.len());
    let mut assignments = Vec::with_capacity(queries.len());
    for (i, e) in queries.entries().iter().enumerate() {
        let evaluator = &models[1 - fold_of[i]];
        rankings.push(evaluator.rank(channels, &e.query_id)?);
        assignments.push((e.query_id.clone(), fold_of[i]));
    }
    Ok(CrossvalResult {
        rankings,
        models,
        assignments,
    })
}
