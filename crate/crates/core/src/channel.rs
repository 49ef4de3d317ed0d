//! Named per-(query, document) similarity channels and their file format.
//!
//! A channel is a sparse map from `(query_id, doc_id)` to a finite score;
//! absent pairs score 0. The on-disk format is UTF-8 TSV with a mandatory
//! column header `query_id\tdoc_id\tscore`, `.` as the decimal separator,
//! and `#`-prefixed comment lines.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::rerank::Ranking;

/// One similarity measure over (query, document) pairs.
#[derive(Debug, Clone)]
pub struct ScoreChannel {
    name: String,
    by_query: HashMap<String, HashMap<String, f64>>,
    entries: usize,
}

impl ScoreChannel {
    pub fn new(name: impl Into<String>) -> Self {
        ScoreChannel {
            name: name.into(),
            by_query: HashMap::new(),
            entries: 0,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    /// Insert or overwrite one pair. Scores must be finite.
    pub fn insert(&mut self, query_id: &str, doc_id: &str, score: f64) {
        assert!(score.is_finite(), "score for ({query_id}, {doc_id}) must be finite");
        let docs = self.by_query.entry(query_id.to_string()).or_default();
        if docs.insert(doc_id.to_string(), score).is_none() {
            self.entries += 1;
        }
    }

    /// Score of a pair, 0 for absent pairs.
    pub fn get(&self, query_id: &str, doc_id: &str) -> f64 {
        self.by_query
            .get(query_id)
            .and_then(|docs| docs.get(doc_id))
            .copied()
            .unwrap_or(0.0)
    }

    /// Whether the pair is explicitly present (an explicit 0 counts).
    pub fn contains(&self, query_id: &str, doc_id: &str) -> bool {
        self.by_query
            .get(query_id)
            .map_or(false, |docs| docs.contains_key(doc_id))
    }

    pub fn has_query(&self, query_id: &str) -> bool {
        self.by_query.contains_key(query_id)
    }

    pub fn docs_for_query(&self, query_id: &str) -> Option<&HashMap<String, f64>> {
        self.by_query.get(query_id)
    }

    pub fn query_ids_sorted(&self) -> Vec<&str> {
        let mut ids: Vec<&str> = self.by_query.keys().map(|s| s.as_str()).collect();
        ids.sort_unstable();
        ids
    }

    /// Total number of explicit pairs.
    pub fn len(&self) -> usize {
        self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries == 0
    }

    /// Record a ranking's entries, optionally only its first `top` ones.
    pub fn add_ranking(&mut self, ranking: &Ranking, top: Option<usize>) {
        let take = top.unwrap_or(usize::MAX);
        for e in ranking.entries().iter().take(take) {
            self.insert(ranking.query_id(), &e.doc_id, e.score);
        }
    }

    /// Serialize with queries and docs in lexicographic order.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("query_id\tdoc_id\tscore\n");
        for qid in self.query_ids_sorted() {
            let docs = &self.by_query[qid];
            let mut doc_ids: Vec<&str> = docs.keys().map(|s| s.as_str()).collect();
            doc_ids.sort_unstable();
            for did in doc_ids {
                out.push_str(&format!("{qid}\t{did}\t{}\n", docs[did]));
            }
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_tsv()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: impl AsRef<Path>, name: Option<&str>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let default_name = name
            .map(str::to_string)
            .or_else(|| {
                path.file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
            })
            .unwrap_or_else(|| "channel".to_string());
        Self::parse(&text, path, default_name)
    }

    /// Parse channel TSV; `origin` only labels error messages.
    pub fn parse(text: &str, origin: impl AsRef<Path>, name: impl Into<String>) -> Result<Self> {
        let origin = origin.as_ref();
        let mut channel = ScoreChannel::new(name);
        let mut saw_header = false;
        for (lineno, line) in text.lines().enumerate() {
            let lineno = lineno + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !saw_header {
                if line != "query_id\tdoc_id\tscore" {
                    return Err(Error::format(
                        origin,
                        lineno,
                        "expected header 'query_id\\tdoc_id\\tscore'",
                    ));
                }
                saw_header = true;
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 3 {
                return Err(Error::format(
                    origin,
                    lineno,
                    format!("expected 3 tab-separated columns, got {}", cols.len()),
                ));
            }
            let score: f64 = cols[2].parse().map_err(|_| {
                Error::format(origin, lineno, format!("invalid score '{}'", cols[2]))
            })?;
            if !score.is_finite() {
                return Err(Error::format(origin, lineno, "scores must be finite"));
            }
            if channel.contains(cols[0], cols[1]) {
                return Err(Error::format(
                    origin,
                    lineno,
                    format!("duplicate pair ({}, {})", cols[0], cols[1]),
                ));
            }
            channel.insert(cols[0], cols[1], score);
        }
        if !saw_header {
            return Err(Error::format(origin, 1, "missing channel header line"));
        }
        Ok(channel)
    }
}
