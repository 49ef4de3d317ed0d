//! Seeded synthetic text corruption.
//!
//! Emulates the failure classes of a noisy recognition front end on clean
//! strings: dropped words, per-character substitutions/deletions/insertions,
//! whole-line reversal, and appended spurious tokens (isolated single
//! characters and junk words). Corruption is a pure function of the input
//! text and the configuration, so experiments replay exactly.

use std::fmt;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Corruption rates and counts. All probabilities are per event in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseConfig {
    /// Per-character probability of replacement with a random letter.
    pub sub_rate: f64,
    /// Per-character probability of deletion.
    pub del_rate: f64,
    /// Per-character probability of inserting a random letter after it.
    pub ins_rate: f64,
    /// Per-word probability of dropping the whole word.
    pub word_drop_rate: f64,
    /// Probability the whole line is emitted character-reversed.
    pub reversed_line_rate: f64,
    /// Number of isolated single-character tokens appended.
    pub spurious_singles: usize,
    /// Number of random junk words appended.
    pub spurious_words: usize,
    pub seed: u64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig {
            sub_rate: 0.0,
            del_rate: 0.0,
            ins_rate: 0.0,
            word_drop_rate: 0.0,
            reversed_line_rate: 0.0,
            spurious_singles: 0,
            spurious_words: 0,
            seed: 0,
        }
    }
}

impl NoiseConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("sub_rate", self.sub_rate),
            ("del_rate", self.del_rate),
            ("ins_rate", self.ins_rate),
            ("word_drop_rate", self.word_drop_rate),
            ("reversed_line_rate", self.reversed_line_rate),
        ] {
            if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                return Err(Error::Config(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        Ok(())
    }

    /// Parse a `key = value` config file. Unknown keys are rejected; missing
    /// keys keep their defaults. `#` starts a comment line.
    pub fn from_kv_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = NoiseConfig::default();
        for (lineno, line) in text.lines().enumerate() {
            let lineno = lineno + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::format(path, lineno, "expected 'key = value'"))?;
            let key = key.trim();
            let value = value.trim();
            let bad = |what: &str| Error::format(path, lineno, format!("invalid {what}: '{value}'"));
            match key {
                "sub_rate" => cfg.sub_rate = value.parse().map_err(|_| bad("rate"))?,
                "del_rate" => cfg.del_rate = value.parse().map_err(|_| bad("rate"))?,
                "ins_rate" => cfg.ins_rate = value.parse().map_err(|_| bad("rate"))?,
                "word_drop_rate" => cfg.word_drop_rate = value.parse().map_err(|_| bad("rate"))?,
                "reversed_line_rate" => {
                    cfg.reversed_line_rate = value.parse().map_err(|_| bad("rate"))?
                }
                "spurious_singles" => {
                    cfg.spurious_singles = value.parse().map_err(|_| bad("count"))?
                }
                "spurious_words" => cfg.spurious_words = value.parse().map_err(|_| bad("count"))?,
                "seed" => cfg.seed = value.parse().map_err(|_| bad("seed"))?,
                other => {
                    return Err(Error::format(path, lineno, format!("unknown key '{other}'")))
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl fmt::Display for NoiseConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "sub_rate={} del_rate={} ins_rate={} word_drop_rate={} reversed_line_rate={} \
             spurious_singles={} spurious_words={} seed={}",
            self.sub_rate,
            self.del_rate,
            self.ins_rate,
            self.word_drop_rate,
            self.reversed_line_rate,
            self.spurious_singles,
            self.spurious_words,
            self.seed
        )
    }
}

// Stable 64-bit FNV-1a; the RNG stream must depend on the input text so a
// batch of identical-config corruptions still varies per string.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

fn random_letter(rng: &mut ChaCha8Rng) -> char {
    (b'a' + rng.gen_range(0..26u8)) as char
}

/// Apply the configured corruption to `text`. Deterministic per
/// `(text, cfg)`; an all-zero config returns the input unchanged.
pub fn corrupt(text: &str, cfg: &NoiseConfig) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ fnv1a(text.as_bytes()));

    // Word drops. Skipped entirely at rate zero so the identity
    // configuration does not normalize whitespace.
    let base = if cfg.word_drop_rate > 0.0 {
        text.split_whitespace()
            .filter(|_| rng.gen::<f64>() >= cfg.word_drop_rate)
            .collect::<Vec<_>>()
            .join(" ")
    } else {
        text.to_string()
    };

    // Per-character edits over the whole remaining line, separators included.
    let mut edited = String::with_capacity(base.len());
    for ch in base.chars() {
        if rng.gen::<f64>() < cfg.del_rate {
            // dropped
        } else if rng.gen::<f64>() < cfg.sub_rate {
            edited.push(random_letter(&mut rng));
        } else {
            edited.push(ch);
        }
        if rng.gen::<f64>() < cfg.ins_rate {
            edited.push(random_letter(&mut rng));
        }
    }

    if cfg.reversed_line_rate > 0.0 && rng.gen::<f64>() < cfg.reversed_line_rate {
        edited = edited.chars().rev().collect();
    }

    if cfg.spurious_singles == 0 && cfg.spurious_words == 0 {
        return edited;
    }
    let mut parts: Vec<String> = Vec::new();
    if !edited.is_empty() {
        parts.push(edited);
    }
    for _ in 0..cfg.spurious_singles {
        parts.push(random_letter(&mut rng).to_string());
    }
    for _ in 0..cfg.spurious_words {
        let len = rng.gen_range(3..=8);
        parts.push((0..len).map(|_| random_letter(&mut rng)).collect());
    }
    parts.join(" ")
}
