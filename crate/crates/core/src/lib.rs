//! Retrieval of catalogue records from noisy text evidence.
//!
//! The pipeline matches corrupted token streams (for example rough OCR
//! output) against clean title/author strings: text is broken into character
//! n-grams, documents are indexed in an idf-weighted inverted file, queries
//! run as sparse inner products, and the resulting similarity channel can be
//! fused with any number of other score channels through a fixed linear mix
//! or a learned pairwise ranking SVM. An optional stage reranks the top K
//! candidates with a more expensive channel, and the evaluation module turns
//! rankings into retrieval-rate curves and tables.
//!
//! Modules:
//!
//! - [`corpus`]: catalogue records, query sets, synthetic corpus generation
//! - [`tokenizer`]: character n-gram bags
//! - [`textindex`]: idf table, inverted index, similarity queries
//! - [`noise`]: seeded synthetic corruption of clean strings
//! - [`channel`]: named per-(query, document) score channels and their files
//! - [`fusion`]: fixed-weight combination, ranking SVM, cross validation
//! - [`rerank`]: rankings and top-K reranking by an expensive channel
//! - [`eval`]: retrieval-rate curves, tables, plot-data files

pub mod channel;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod fusion;
pub mod noise;
pub mod rerank;
pub mod textindex;
pub mod tokenizer;
pub mod words;

pub use channel::ScoreChannel;
pub use corpus::{CatalogueRecord, Corpus, QueryEntry, QuerySet, SynthSpec};
pub use error::{Error, Result};
pub use eval::{retrieval_curve, tabulate, Curve, Table};
pub use fusion::{
    combine_fixed, crossval_twofold, rank_with_weights, train_ranksvm, CrossvalResult,
    FusionModel, TrainConfig, TrainReport,
};
pub use noise::{corrupt, NoiseConfig};
pub use rerank::{rerank_topk, Fallback, RankEntry, Ranking};
pub use textindex::{build_index, sim_to_dist, InnerNorm, WeightedIndex};
pub use tokenizer::{TokenBag, Tokenizer};
