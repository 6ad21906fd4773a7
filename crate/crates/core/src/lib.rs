//! Core algorithms for turning daily social-post counts into emotion indices.
//!
//! The pipeline implemented here has four stages:
//!
//! 1. [`lexicon`] — word dictionaries for the seven emotion categories,
//!    with exclusion filters and total-count proxy phrases.
//! 2. [`ingest`] — post filtering, multi-pattern word matching, and
//!    per-day per-word count aggregation.
//! 3. [`index`] — per-word ratios, generalized-mean aggregation, and
//!    baseline normalization into one daily index per emotion.
//! 4. [`decompose`] / [`impact`] — additive trend/yearly/weekly
//!    decomposition by ridge least squares, and out-of-sample event
//!    impact measurement against model forecasts.
//!
//! [`synth`] generates series and corpora with known ground truth for
//! verifying the fitting and impact stages.
//!
//! The crate is `no_std`-compatible (requires `alloc`); file formats,
//! timezone handling, and the CLI live in the companion `kibun` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod date;
pub mod decompose;
pub mod impact;
pub mod index;
pub mod ingest;
pub mod lexicon;
mod linalg;
pub mod synth;
pub mod text;

pub use date::Day;
pub use decompose::{Decomposition, ModelFit, ModelSpec};
pub use impact::ImpactRecord;
pub use index::{IndexConfig, IndexSeries};
pub use ingest::{DailyCounts, Matcher, PostRecord, SourceClass, TotalMode};
pub use lexicon::{EmotionCategory, Lexicon, LexiconEntry, LexiconMeta};
pub use synth::SynthSpec;
