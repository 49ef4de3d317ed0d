//! Retrieval-rate curves and fixed-point tables.
//!
//! `rate(k)` is the fraction of queries whose ground-truth document sits at
//! rank `k` or better; a ground truth missing from its ranking never counts
//! as retrieved. Curves serialize to whitespace-separated `.dat` files with
//! a `retrieved` column plus one column per method, which round-trip
//! bit-exactly.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::corpus::QuerySet;
use crate::error::{Error, Result};
use crate::rerank::Ranking;

/// Retrieval rate against retrieval-set size.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    label: String,
    points: Vec<(usize, f64)>,
}

impl Curve {
    /// Points must have strictly increasing k and rates in [0, 1].
    pub fn new(label: impl Into<String>, points: Vec<(usize, f64)>) -> Result<Self> {
        let label = label.into();
        if points.is_empty() {
            return Err(Error::Config(format!("curve '{label}' has no points")));
        }
        for win in points.windows(2) {
            if win[1].0 <= win[0].0 {
                return Err(Error::Config(format!(
                    "curve '{label}' k values must strictly increase"
                )));
            }
        }
        for &(k, rate) in &points {
            if k == 0 || !(0.0..=1.0).contains(&rate) {
                return Err(Error::Config(format!(
                    "curve '{label}' has invalid point ({k}, {rate})"
                )));
            }
        }
        Ok(Curve { label, points })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn points(&self) -> &[(usize, f64)] {
        &self.points
    }

    pub fn min_k(&self) -> usize {
        self.points[0].0
    }

    pub fn max_k(&self) -> usize {
        self.points[self.points.len() - 1].0
    }

    /// Rate at retrieval-set size `k`. Retrieval curves are step functions,
    /// so between recorded sizes the last recorded rate applies.
    pub fn rate_at(&self, k: usize) -> Result<f64> {
        if k < self.min_k() || k > self.max_k() {
            return Err(Error::KOutOfRange {
                k,
                min: self.min_k(),
                max: self.max_k(),
            });
        }
        let idx = self.points.partition_point(|&(pk, _)| pk <= k);
        Ok(self.points[idx - 1].1)
    }
}

/// Compute the retrieval-rate curve for `queries` over `rankings` at set
/// sizes 1..=max_k. Every query must have a ranking.
pub fn retrieval_curve(
    rankings: &[Ranking],
    queries: &QuerySet,
    max_k: usize,
    label: impl Into<String>,
) -> Result<Curve> {
    if max_k == 0 {
        return Err(Error::Config("max_k must be >= 1".into()));
    }
    let by_query: HashMap<&str, &Ranking> =
        rankings.iter().map(|r| (r.query_id(), r)).collect();
    // Histogram of ground-truth positions, then a prefix sum.
    let mut hits_at = vec![0usize; max_k + 1];
    for entry in queries.entries() {
        let ranking = by_query
            .get(entry.query_id.as_str())
            .ok_or_else(|| Error::MissingRanking(entry.query_id.clone()))?;
        if let Some(pos) = ranking.position(&entry.ground_truth) {
            if pos <= max_k {
                hits_at[pos] += 1;
            }
        }
    }
    let total = queries.len() as f64;
    let mut points = Vec::with_capacity(max_k);
    let mut cumulative = 0usize;
    for k in 1..=max_k {
        cumulative += hits_at[k];
        points.push((k, cumulative as f64 / total));
    }
    Curve::new(label, points)
}

/// Fixed-point table over several curves: one row per requested k, one
/// column per curve, with per-row maxima flagged on the raw values.
#[derive(Debug, Clone)]
pub struct Table {
    pub ks: Vec<usize>,
    pub labels: Vec<String>,
    /// values[row][col] with rows following `ks` and columns `labels`.
    pub values: Vec<Vec<f64>>,
    /// flags[row][col] marks the per-row maxima (ties all flagged).
    pub flags: Vec<Vec<bool>>,
}

pub fn tabulate(curves: &[Curve], ks: &[usize]) -> Result<Table> {
    if curves.is_empty() || ks.is_empty() {
        return Err(Error::Config("tabulate needs curves and k values".into()));
    }
    let mut values = Vec::with_capacity(ks.len());
    let mut flags = Vec::with_capacity(ks.len());
    for &k in ks {
        let row: Vec<f64> = curves
            .iter()
            .map(|c| c.rate_at(k))
            .collect::<Result<_>>()?;
        let best = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        flags.push(row.iter().map(|&v| v == best).collect());
        values.push(row);
    }
    Ok(Table {
        ks: ks.to_vec(),
        labels: curves.iter().map(|c| c.label().to_string()).collect(),
        values,
        flags,
    })
}

impl Table {
    /// Machine output: raw full-precision values.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("k");
        for l in &self.labels {
            out.push('\t');
            out.push_str(l);
        }
        out.push('\n');
        for (row, &k) in self.values.iter().zip(&self.ks) {
            out.push_str(&k.to_string());
            for v in row {
                out.push('\t');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }

    /// Display output: values rounded to two decimals, per-row maxima
    /// (decided on the raw values) marked with `*`.
    pub fn to_aligned(&self) -> String {
        let mut widths: Vec<usize> = self.labels.iter().map(|l| l.len().max(5)).collect();
        for w in &mut widths {
            *w += 1; // room for the flag marker
        }
        let kw = self
            .ks
            .iter()
            .map(|k| k.to_string().len())
            .max()
            .unwrap_or(1)
            .max(1);
        let mut out = format!("{:>kw$}", "k", kw = kw);
        for (l, w) in self.labels.iter().zip(&widths) {
            out.push_str(&format!("  {l:>w$}", w = w));
        }
        out.push('\n');
        for ((row, flag_row), &k) in self.values.iter().zip(&self.flags).zip(&self.ks) {
            out.push_str(&format!("{k:>kw$}", kw = kw));
            for ((v, &f), w) in row.iter().zip(flag_row).zip(&widths) {
                let cell = format!("{v:.2}{}", if f { "*" } else { "" });
                out.push_str(&format!("  {cell:>w$}", w = w));
            }
            out.push('\n');
        }
        out
    }
}

/// Write curves sharing one k grid as a multi-column `.dat` file.
pub fn curves_to_dat(curves: &[Curve]) -> Result<String> {
    if curves.is_empty() {
        return Err(Error::Config("no curves to export".into()));
    }
    let grid: Vec<usize> = curves[0].points().iter().map(|&(k, _)| k).collect();
    for c in curves {
        let ks: Vec<usize> = c.points().iter().map(|&(k, _)| k).collect();
        if ks != grid {
            return Err(Error::Config(format!(
                "curve '{}' has a different k grid than '{}'",
                c.label(),
                curves[0].label()
            )));
        }
        if c.label().is_empty() || c.label().chars().any(|ch| ch.is_whitespace()) {
            return Err(Error::Config(format!(
                "curve label '{}' must be a non-empty token without whitespace",
                c.label()
            )));
        }
    }
    let mut out = String::from("retrieved");
    for c in curves {
        out.push(' ');
        out.push_str(c.label());
    }
    out.push('\n');
    for (i, &k) in grid.iter().enumerate() {
        out.push_str(&k.to_string());
        for c in curves {
            out.push(' ');
            out.push_str(&c.points()[i].1.to_string());
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn export_curves_dat(curves: &[Curve], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, curves_to_dat(curves)?).map_err(|e| Error::io(path, e))
}

pub fn export_curve_dat(curve: &Curve, path: impl AsRef<Path>) -> Result<()> {
    export_curves_dat(std::slice::from_ref(curve), path)
}

/// Parse a `.dat` file back into curves; `origin` only labels errors.
pub fn parse_curves_dat(text: &str, origin: impl AsRef<Path>) -> Result<Vec<Curve>> {
    let origin = origin.as_ref();
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.starts_with('#') && !l.is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::format(origin, 1, "empty curve file"))?;
    let mut cols = header.split_whitespace();
    if cols.next() != Some("retrieved") {
        return Err(Error::format(
            origin,
            1,
            "first column must be 'retrieved'",
        ));
    }
    let labels: Vec<&str> = cols.collect();
    if labels.is_empty() {
        return Err(Error::format(origin, 1, "no curve columns"));
    }
    let mut series: Vec<Vec<(usize, f64)>> = vec![Vec::new(); labels.len()];
    for (lineno, line) in lines {
        let lineno = lineno + 1;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != labels.len() + 1 {
            return Err(Error::format(
                origin,
                lineno,
                format!("expected {} columns, got {}", labels.len() + 1, fields.len()),
            ));
        }
        let k: usize = fields[0]
            .parse()
            .map_err(|_| Error::format(origin, lineno, format!("invalid k '{}'", fields[0])))?;
        for (i, f) in fields[1..].iter().enumerate() {
            let rate: f64 = f
                .parse()
                .map_err(|_| Error::format(origin, lineno, format!("invalid rate '{f}'")))?;
            series[i].push((k, rate));
        }
    }
    labels
        .into_iter()
        .zip(series)
        .map(|(label, points)| {
            Curve::new(label, points).map_err(|e| match e {
                Error::Config(msg) => Error::format(origin, 1, msg),
                other => other,
            })
        })
        .collect()
}

pub fn import_curves_dat(path: impl AsRef<Path>) -> Result<Vec<Curve>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_curves_dat(&text, path)
}
