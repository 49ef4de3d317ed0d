//! Catalogue records, query ground truth, and synthetic corpus generation.
//!
//! A corpus is a flat list of records, each carrying a title and author
//! string. Records where both strings are empty stay in the corpus (they can
//! still be rerank or evaluation targets) but are excluded from text
//! indexing.
//!
//! File formats (UTF-8, `#`-prefixed lines are comments):
//!
//! - corpus TSV: `doc_id \t title \t author \t distractor(0|1)`
//! - query TSV:  `query_id \t ground_truth_doc_id \t payload`, where a
//!   payload starting with `@` names a token file and anything else is
//!   inline query text.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// One database entry: identifier, metadata strings, distractor flag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogueRecord {
    pub doc_id: String,
    pub title: String,
    pub author: String,
    pub distractor: bool,
}

impl CatalogueRecord {
    /// The single matchable string for this record: title and author joined
    /// by one space (or whichever of the two is non-empty).
    pub fn annotation(&self) -> String {
        match (self.title.is_empty(), self.author.is_empty()) {
            (false, false) => format!("{} {}", self.title, self.author),
            (false, true) => self.title.clone(),
            (true, false) => self.author.clone(),
            (true, true) => String::new(),
        }
    }

    /// Records with no annotation text are kept but never indexed.
    pub fn is_indexable(&self) -> bool {
        !(self.title.is_empty() && self.author.is_empty())
    }
}

/// An in-memory corpus with unique doc_ids, preserving input order.
#[derive(Debug, Clone)]
pub struct Corpus {
    records: Vec<CatalogueRecord>,
    by_id: HashMap<String, usize>,
}

impl Corpus {
    pub fn from_records(records: Vec<CatalogueRecord>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let mut by_id = HashMap::with_capacity(records.len());
        for (i, rec) in records.iter().enumerate() {
            validate_doc_id(&rec.doc_id)?;
            if by_id.insert(rec.doc_id.clone(), i).is_some() {
                return Err(Error::DuplicateDocId(rec.doc_id.clone()));
            }
        }
        Ok(Corpus { records, by_id })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    /// Parse corpus TSV; `origin` only labels error messages.
    pub fn parse(text: &str, origin: impl AsRef<Path>) -> Result<Self> {
        let origin = origin.as_ref();
        let mut records = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let lineno = lineno + 1;
            if line.is_empty() || line.starts_with('#') {
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
            let distractor = match cols[3] {
                "0" => false,
                "1" => true,
                other => {
                    return Err(Error::format(
                        origin,
                        lineno,
                        format!("distractor flag must be 0 or 1, got '{other}'"),
                    ))
                }
            };
            records.push(CatalogueRecord {
                doc_id: cols[0].to_string(),
                title: cols[1].to_string(),
                author: cols[2].to_string(),
                distractor,
            });
        }
        if records.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        Self::from_records(records)
    }

    /// Serialize as corpus TSV (records only, no comments).
    pub fn to_tsv(&self) -> Result<String> {
        let mut out = String::new();
        for rec in &self.records {
            for field in [&rec.title, &rec.author] {
                if field.contains('\t') || field.contains('\n') {
                    return Err(Error::Config(format!(
                        "record '{}' contains a tab or newline and cannot be written as TSV",
                        rec.doc_id
                    )));
                }
            }
            out.push_str(&rec.doc_id);
            out.push('\t');
            out.push_str(&rec.title);
            out.push('\t');
            out.push_str(&rec.author);
            out.push('\t');
            out.push(if rec.distractor { '1' } else { '0' });
            out.push('\n');
        }
        Ok(out)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_tsv()?).map_err(|e| Error::io(path, e))
    }

    pub fn records(&self) -> &[CatalogueRecord] {
        &self.records
    }

    pub fn get(&self, doc_id: &str) -> Option<&CatalogueRecord> {
        self.by_id.get(doc_id).map(|&i| &self.records[i])
    }

    pub fn contains(&self, doc_id: &str) -> bool {
        self.by_id.contains_key(doc_id)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// (non-distractor, distractor) record counts.
    pub fn counts(&self) -> (usize, usize) {
        let d = self.records.iter().filter(|r| r.distractor).count();
        (self.records.len() - d, d)
    }

    /// Append another corpus, keeping doc_ids unique.
    pub fn merge(mut self, other: Corpus) -> Result<Self> {
        for rec in other.records {
            if self.by_id.contains_key(&rec.doc_id) {
                return Err(Error::DuplicateDocId(rec.doc_id));
            }
            self.by_id.insert(rec.doc_id.clone(), self.records.len());
            self.records.push(rec);
        }
        Ok(self)
    }
}

fn validate_doc_id(id: &str) -> Result<()> {
    if id.is_empty() || id.chars().any(|c| c.is_whitespace()) {
        return Err(Error::Config(format!(
            "doc_id must be a non-empty token without whitespace, got '{id}'"
        )));
    }
    Ok(())
}

/// Where a query's token payload lives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenSource {
    Inline(String),
    File(PathBuf),
}

/// One query with its ground-truth document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryEntry {
    pub query_id: String,
    pub ground_truth: String,
    pub source: TokenSource,
}

impl QueryEntry {
    /// Resolve the payload to raw text. Token files hold one whitespace
    /// separated token per line and are consumed verbatim as text.
    pub fn load_text(&self) -> Result<String> {
        match &self.source {
            TokenSource::Inline(text) => Ok(text.clone()),
            TokenSource::File(path) => {
                fs::read_to_string(path).map_err(|e| Error::io(path.clone(), e))
            }
        }
    }
}

/// Query/ground-truth pairing with unique query_ids.
#[derive(Debug, Clone)]
pub struct QuerySet {
    entries: Vec<QueryEntry>,
    by_id: HashMap<String, usize>,
}

impl QuerySet {
    pub fn from_entries(entries: Vec<QueryEntry>) -> Result<Self> {
        let mut by_id = HashMap::with_capacity(entries.len());
        for (i, e) in entries.iter().enumerate() {
            if e.query_id.is_empty() || e.query_id.chars().any(|c| c.is_whitespace()) {
                return Err(Error::Config(format!(
                    "query_id must be a non-empty token without whitespace, got '{}'",
                    e.query_id
                )));
            }
            if by_id.insert(e.query_id.clone(), i).is_some() {
                return Err(Error::DuplicateQueryId(e.query_id.clone()));
            }
        }
        Ok(QuerySet { entries, by_id })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, path, base)
    }

    /// Parse query TSV; relative `@file` payloads resolve against `base`.
    pub fn parse(text: &str, origin: impl AsRef<Path>, base: &Path) -> Result<Self> {
        let origin = origin.as_ref();
        let mut entries = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let lineno = lineno + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.splitn(3, '\t').collect();
            if cols.len() != 3 {
                return Err(Error::format(
                    origin,
                    lineno,
                    format!("expected 3 tab-separated columns, got {}", cols.len()),
                ));
            }
            // A leading '@' marks a token-file reference; '@@' escapes a
            // literal '@' at the start of inline text.
            let source = if let Some(escaped) = cols[2].strip_prefix("@@") {
                TokenSource::Inline(format!("@{escaped}"))
            } else if let Some(rel) = cols[2].strip_prefix('@') {
                let p = Path::new(rel);
                let p = if p.is_absolute() {
                    p.to_path_buf()
                } else {
                    base.join(p)
                };
                TokenSource::File(p)
            } else {
                TokenSource::Inline(cols[2].to_string())
            };
            entries.push(QueryEntry {
                query_id: cols[0].to_string(),
                ground_truth: cols[1].to_string(),
                source,
            });
        }
        Self::from_entries(entries)
    }

    /// Serialize as query TSV. File payloads are written with their stored
    /// path, inline payloads verbatim.
    pub fn to_tsv(&self) -> Result<String> {
        let mut out = String::new();
        for e in &self.entries {
            let payload = match &e.source {
                TokenSource::Inline(t) => {
                    if t.contains('\t') || t.contains('\n') {
                        return Err(Error::Config(format!(
                            "query '{}' payload contains a tab or newline",
                            e.query_id
                        )));
                    }
                    if let Some(rest) = t.strip_prefix('@') {
                        format!("@@{rest}")
                    } else {
                        t.clone()
                    }
                }
                TokenSource::File(p) => format!("@{}", p.display()),
            };
            out.push_str(&format!(
                "{}\t{}\t{}\n",
                e.query_id, e.ground_truth, payload
            ));
        }
        Ok(out)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_tsv()?).map_err(|e| Error::io(path, e))
    }

    /// Check that every ground-truth doc_id resolves to a corpus record.
    pub fn validate_against(&self, corpus: &Corpus) -> Result<()> {
        for e in &self.entries {
            if !corpus.contains(&e.ground_truth) {
                return Err(Error::UnknownGroundTruth {
                    query_id: e.query_id.clone(),
                    doc_id: e.ground_truth.clone(),
                });
            }
        }
        Ok(())
    }

    pub fn entries(&self) -> &[QueryEntry] {
        &self.entries
    }

    pub fn get(&self, query_id: &str) -> Option<&QueryEntry> {
        self.by_id.get(query_id).map(|&i| &self.entries[i])
    }

    pub fn ground_truth(&self, query_id: &str) -> Option<&str> {
        self.get(query_id).map(|e| e.ground_truth.as_str())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Parameters for synthetic corpus generation.
#[derive(Debug, Clone)]
pub struct SynthSpec {
    pub num_docs: usize,
    /// Inclusive range of words per title.
    pub words_per_title: (usize, usize),
    pub seed: u64,
    pub id_prefix: String,
    pub distractor: bool,
}

impl SynthSpec {
    pub fn new(num_docs: usize, min_words: usize, max_words: usize, seed: u64) -> Self {
        SynthSpec {
            num_docs,
            words_per_title: (min_words, max_words),
            seed,
            id_prefix: "d".to_string(),
            distractor: false,
        }
    }

    pub fn id_prefix(mut self, prefix: impl Into<String>) -> Self {
        self.id_prefix = prefix.into();
        self
    }

    pub fn distractor(mut self, yes: bool) -> Self {
        self.distractor = yes;
        self
    }
}

/// Generate a deterministic synthetic corpus: titles are space-joined words
/// sampled uniformly from `dictionary`, authors are left empty.
pub fn synth_corpus(spec: &SynthSpec, dictionary: &[String]) -> Result<Corpus> {
    if dictionary.is_empty() {
        return Err(Error::EmptyDictionary);
    }
    if spec.num_docs == 0 {
        return Err(Error::Config("num_docs must be >= 1".into()));
    }
    let (lo, hi) = spec.words_per_title;
    if lo == 0 || lo > hi {
        return Err(Error::Config(format!(
            "invalid words-per-title range {lo}..={hi}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let width = digits(spec.num_docs.saturating_sub(1));
    let mut records = Vec::with_capacity(spec.num_docs);
    for i in 0..spec.num_docs {
        let words = rng.gen_range(lo..=hi);
        let title = (0..words)
            .map(|_| dictionary[rng.gen_range(0..dictionary.len())].as_str())
            .collect::<Vec<_>>()
            .join(" ");
        records.push(CatalogueRecord {
            doc_id: format!("{}{:0width$}", spec.id_prefix, i, width = width),
            title,
            author: String::new(),
            distractor: spec.distractor,
        });
    }
    Corpus::from_records(records)
}

/// Generate `num_words` distinct pseudo-words of lowercase letters with
/// lengths drawn from the inclusive range. Deterministic per seed.
pub fn random_dictionary(num_words: usize, len_range: (usize, usize), seed: u64) -> Vec<String> {
    let (lo, hi) = len_range;
    assert!(lo >= 1 && lo <= hi, "invalid length range");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::with_capacity(num_words);
    while out.len() < num_words {
        let len = rng.gen_range(lo..=hi);
        let w: String = (0..len)
            .map(|_| (b'a' + rng.gen_range(0..26u8)) as char)
            .collect();
        if seen.insert(w.clone()) {
            out.push(w);
        }
    }
    out
}

fn digits(mut v: usize) -> usize {
    let mut d = 1;
    while v >= 10 {
        v /= 10;
        d += 1;
    }
    d.max(6)
}
