//! Character n-gram extraction.
//!
//! Text is lowercased, split into maximal runs of alphabetic characters
//! (anything else acts as a separator), and a window of size `n` slides
//! across each run. Runs shorter than `n` contribute nothing, so isolated
//! single characters vanish entirely for n >= 2 and garbage sequences only
//! produce grams that rarely occur in a real vocabulary.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Un-normalized histogram of character n-grams for one document or query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenBag {
    n: usize,
    grams: HashMap<String, u32>,
}

impl TokenBag {
    pub fn empty(n: usize) -> Self {
        TokenBag {
            n,
            grams: HashMap::new(),
        }
    }

    /// Gram length of every key in this bag.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of distinct grams.
    pub fn distinct(&self) -> usize {
        self.grams.len()
    }

    /// Total number of windows emitted, i.e. the sum of all counts.
    pub fn total(&self) -> u64 {
        self.grams.values().map(|&c| u64::from(c)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.grams.is_empty()
    }

    pub fn count(&self, gram: &str) -> u32 {
        self.grams.get(gram).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u32)> {
        self.grams.iter().map(|(g, &c)| (g.as_str(), c))
    }

    /// Grams with counts in lexicographic order. Use this wherever the
    /// iteration order feeds a floating-point reduction or an output file.
    pub fn sorted_grams(&self) -> Vec<(&str, u32)> {
        let mut v: Vec<_> = self.iter().collect();
        v.sort_unstable_by(|a, b| a.0.cmp(b.0));
        v
    }

    fn add(&mut self, gram: String) {
        *self.grams.entry(gram).or_insert(0) += 1;
    }
}

/// Sliding-window n-gram tokenizer.
///
/// By default only ASCII letters count as word characters; everything else
/// (digits, punctuation, non-ASCII letters) separates runs. Enable
/// [`Tokenizer::with_unicode_letters`] to treat any Unicode letter as a word
/// character.
#[derive(Debug, Clone)]
pub struct Tokenizer {
    n: usize,
    unicode_letters: bool,
}

impl Tokenizer {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("gram length n must be >= 1".into()));
        }
        Ok(Tokenizer {
            n,
            unicode_letters: false,
        })
    }

    pub fn with_unicode_letters(mut self, on: bool) -> Self {
        self.unicode_letters = on;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Extract the n-gram histogram of `text`.
    ///
    /// Empty or all-symbol input yields an empty bag; this is not an error.
    pub fn tokenize(&self, text: &str) -> TokenBag {
        let lowered = text.to_lowercase();
        let mut bag = TokenBag::empty(self.n);
        let mut run: Vec<char> = Vec::new();
        // Trailing sentinel flushes the final run.
        for ch in lowered.chars().chain(std::iter::once(' ')) {
            let word_char = if self.unicode_letters {
                ch.is_alphabetic()
            } else {
                ch.is_ascii_alphabetic()
            };
            if word_char {
                run.push(ch);
            } else {
                self.flush_run(&run, &mut bag);
                run.clear();
            }
        }
        bag
    }

    fn flush_run(&self, run: &[char], bag: &mut TokenBag) {
        if run.len() < self.n {
            return;
        }
        for window in run.windows(self.n) {
            bag.add(window.iter().collect());
        }
    }
}

/// Sum the counts of several bags gram by gram.
///
/// `n` also fixes the gram length of the result when `bags` is empty; every
/// bag must share it.
pub fn merge(n: usize, bags: &[TokenBag]) -> Result<TokenBag> {
    let mut out = TokenBag::empty(n);
    for bag in bags {
        if bag.n() != n {
            return Err(Error::GramLengthMismatch {
                expected: n,
                got: bag.n(),
            });
        }
        for (gram, count) in bag.iter() {
            *out.grams.entry(gram.to_string()).or_insert(0) += count;
        }
    }
    Ok(out)
}
