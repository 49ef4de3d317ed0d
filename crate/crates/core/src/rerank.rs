//! Ranked retrieval lists and expensive-channel reranking of their prefix.

use std::collections::HashSet;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::channel::ScoreChannel;
use crate::error::{Error, Result};

/// One candidate in a ranking.
#[derive(Debug, Clone, PartialEq)]
pub struct RankEntry {
    pub doc_id: String,
    pub score: f64,
}

/// An ordered retrieval list for one query.
///
/// Rankings built by [`Ranking::from_scores`] are ordered by descending
/// score with ties broken by ascending doc_id. After [`rerank_topk`] the
/// position order is authoritative and may disagree with the retained
/// scores; consumers must trust positions, which is why the persisted form
/// carries an explicit rank column.
#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    query_id: String,
    entries: Vec<RankEntry>,
}

impl Ranking {
    /// Build a ranking from raw scores: descending score, doc_id tie-break.
    pub fn from_scores<I, S>(query_id: impl Into<String>, scores: I) -> Self
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let mut entries: Vec<RankEntry> = scores
            .into_iter()
            .map(|(d, s)| RankEntry {
                doc_id: d.into(),
                score: s,
            })
            .collect();
        entries.sort_unstable_by(|a, b| {
            b.score
                .total_cmp(&a.score)
                .then_with(|| a.doc_id.cmp(&b.doc_id))
        });
        Ranking {
            query_id: query_id.into(),
            entries,
        }
    }

    /// Wrap an already-ordered list. Validates uniqueness and finiteness but
    /// not score-order, since reranked lists are positional.
    pub fn from_ordered(query_id: impl Into<String>, entries: Vec<RankEntry>) -> Result<Self> {
        let query_id = query_id.into();
        let mut seen = HashSet::with_capacity(entries.len());
        for e in &entries {
            if !e.score.is_finite() {
                return Err(Error::Config(format!(
                    "ranking for '{query_id}' has non-finite score on '{}'",
                    e.doc_id
                )));
            }
            if !seen.insert(e.doc_id.as_str()) {
                return Err(Error::DuplicateDocId(e.doc_id.clone()));
            }
        }
        Ok(Ranking { query_id, entries })
    }

    pub fn query_id(&self) -> &str {
        &self.query_id
    }

    pub fn entries(&self) -> &[RankEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// 1-based rank of a document, if present.
    pub fn position(&self, doc_id: &str) -> Option<usize> {
        self.entries
            .iter()
            .position(|e| e.doc_id == doc_id)
            .map(|i| i + 1)
    }

    /// Keep only the first `len` entries.
    pub fn truncate(mut self, len: usize) -> Self {
        self.entries.truncate(len);
        self
    }
}

/// How to place top-K entries that the expensive channel does not score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fallback {
    /// Keep unscored entries in their original relative order, below every
    /// scored entry.
    #[default]
    Keep,
    /// Treat unscored entries as scoring 0 in the expensive channel.
    Zero,
}

impl FromStr for Fallback {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "keep" => Ok(Fallback::Keep),
            "zero" => Ok(Fallback::Zero),
            other => Err(Error::Config(format!(
                "unknown fallback '{other}', expected 'keep' or 'zero'"
            ))),
        }
    }
}

/// Re-sort the first `min(k, len)` entries of `ranking` by the expensive
/// channel's scores (descending, doc_id tie-break). The set of documents in
/// the top-K block is preserved exactly and positions beyond K are
/// untouched; entries the channel does not cover follow `fallback`.
pub fn rerank_topk(
    ranking: &Ranking,
    expensive: &ScoreChannel,
    k: usize,
    fallback: Fallback,
) -> Ranking {
    let cut = k.min(ranking.entries.len());
    let qid = ranking.query_id();
    let block = &ranking.entries[..cut];
    let rest = &ranking.entries[cut..];

    let mut scored: Vec<(usize, &RankEntry, f64)> = Vec::with_capacity(cut);
    let mut unscored: Vec<&RankEntry> = Vec::new();
    for (i, e) in block.iter().enumerate() {
        if expensive.contains(qid, &e.doc_id) {
            scored.push((i, e, expensive.get(qid, &e.doc_id)));
        } else {
            match fallback {
                Fallback::Zero => scored.push((i, e, 0.0)),
                Fallback::Keep => unscored.push(e),
            }
        }
    }
    scored.sort_unstable_by(|a, b| {
        b.2.total_cmp(&a.2).then_with(|| a.1.doc_id.cmp(&b.1.doc_id))
    });

    let mut entries = Vec::with_capacity(ranking.entries.len());
    entries.extend(scored.into_iter().map(|(_, e, _)| e.clone()));
    entries.extend(unscored.into_iter().cloned());
    entries.extend(rest.iter().cloned());
    Ranking {
        query_id: qid.to_string(),
        entries,
    }
}

/// Serialize a set of rankings: header `query_id\tdoc_id\trank\tscore`, rows
/// grouped per query in rank order, queries in lexicographic order. An empty
/// ranking (a query with no candidates) is kept as a sentinel row with rank
/// 0 and an empty doc_id.
pub fn rankings_to_tsv(rankings: &[Ranking]) -> String {
    let mut order: Vec<&Ranking> = rankings.iter().collect();
    order.sort_unstable_by(|a, b| a.query_id.cmp(&b.query_id));
    let mut out = String::from("query_id\tdoc_id\trank\tscore\n");
    for r in order {
        if r.entries.is_empty() {
            out.push_str(&format!("{}\t\t0\t0\n", r.query_id));
            continue;
        }
        for (i, e) in r.entries.iter().enumerate() {
            out.push_str(&format!("{}\t{}\t{}\t{}\n", r.query_id, e.doc_id, i + 1, e.score));
        }
    }
    out
}

pub fn write_rankings(rankings: &[Ranking], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, rankings_to_tsv(rankings)).map_err(|e| Error::io(path, e))
}

pub fn read_rankings(path: impl AsRef<Path>) -> Result<Vec<Ranking>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_rankings(&text, path)
}

/// Parse a rankings file; `origin` only labels error messages. Rows for one
/// query must be contiguous with ranks running 1, 2, 3, ...
pub fn parse_rankings(text: &str, origin: impl AsRef<Path>) -> Result<Vec<Ranking>> {
    let origin = origin.as_ref();
    let mut saw_header = false;
    let mut rankings: Vec<Ranking> = Vec::new();
    let mut seen_queries: HashSet<String> = HashSet::new();
    let mut current: Option<Ranking> = None;
    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            if line != "query_id\tdoc_id\trank\tscore" {
                return Err(Error::format(
                    origin,
                    lineno,
                    "expected header 'query_id\\tdoc_id\\trank\\tscore'",
                ));
            }
            saw_header = true;
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 {
            return Err(Error::format(
                origin,
                lineno,
                format!("expected 4 tab-separated columns, got {}", cols.len()),
            ));
        }
        let rank: usize = cols[2]
            .parse()
            .map_err(|_| Error::format(origin, lineno, format!("invalid rank '{}'", cols[2])))?;
        let score: f64 = cols[3]
            .parse()
            .map_err(|_| Error::format(origin, lineno, format!("invalid score '{}'", cols[3])))?;
        if !score.is_finite() {
            return Err(Error::format(origin, lineno, "scores must be finite"));
        }

        // Sentinel for an empty ranking: rank 0, no doc.
        if rank == 0 {
            if !cols[1].is_empty() {
                return Err(Error::format(
                    origin,
                    lineno,
                    "rank 0 is reserved for the empty-ranking sentinel",
                ));
            }
            let fresh = seen_queries.insert(cols[0].to_string())
                && current.as_ref().map_or(true, |r| r.query_id != cols[0]);
            if !fresh {
                return Err(Error::format(
                    origin,
                    lineno,
                    format!("empty-ranking sentinel for '{}' clashes with other rows", cols[0]),
                ));
            }
            if let Some(done) = current.take() {
                rankings.push(done);
            }
            rankings.push(Ranking {
                query_id: cols[0].to_string(),
                entries: Vec::new(),
            });
            continue;
        }

        let start_new = current.as_ref().map_or(true, |r| r.query_id != cols[0]);
        if start_new {
            if let Some(done) = current.take() {
                rankings.push(done);
            }
            if !seen_queries.insert(cols[0].to_string()) {
                return Err(Error::format(
                    origin,
                    lineno,
                    format!("rows for query '{}' are not contiguous", cols[0]),
                ));
            }
            current = Some(Ranking {
                query_id: cols[0].to_string(),
                entries: Vec::new(),
            });
        }
        let r = current.as_mut().expect("just set");
        if rank != r.entries.len() + 1 {
            return Err(Error::format(
                origin,
                lineno,
                format!("expected rank {}, got {rank}", r.entries.len() + 1),
            ));
        }
        if r.entries.iter().any(|e| e.doc_id == cols[1]) {
            return Err(Error::format(
                origin,
                lineno,
                format!("duplicate doc '{}' in query '{}'", cols[1], cols[0]),
            ));
        }
        r.entries.push(RankEntry {
            doc_id: cols[1].to_string(),
            score,
        });
    }
    if !saw_header {
        return Err(Error::format(origin, 1, "missing rankings header line"));
    }
    if let Some(done) = current.take() {
        rankings.push(done);
    }
    Ok(rankings)
}
