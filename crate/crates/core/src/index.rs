//! Per-emotion daily index computation.
//!
//! For each emotion `e` with word set `E_e`, each day's per-word post
//! ratios `w_k(t) / w_all(t)` are combined with a generalized (power)
//! mean of exponent `alpha`:
//!
//! ```text
//! r_e(t) = ( (1/|E_e|) * sum_k (w_k(t)/w_all(t))^alpha )^(1/alpha)
//! ```
//!
//! At the default `alpha = 0.5` the power mean damps the dominance of
//! high-volume words, so one busy word cannot swamp its category. The
//! aggregated series is then scaled so its mean over a baseline window
//! is 1.0, which makes levels comparable across emotions with different
//! dictionary sizes. The older z-score form (plain ratio sum, then
//! standardization) is kept as a comparison variant.
//!
//! Days whose total is zero or missing are gaps and stay gaps: they are
//! excluded from baseline means and standard deviations rather than
//! being filled with fabricated zeros.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

use crate::date::Day;
use crate::ingest::DailyCounts;
use crate::lexicon::{EmotionCategory, Lexicon};

#[derive(Debug, Error, PartialEq, Clone)]
pub enum IndexError {
    #[error("lexicon has no words for {0}")]
    EmotionMissing(EmotionCategory),
    #[error("no ratios to aggregate")]
    EmptyRatios,
    #[error("ratio {0} is not a finite non-negative number")]
    InvalidRatio(f64),
    #[error("alpha must be a finite positive number, got {0}")]
    InvalidAlpha(f64),
    #[error("baseline window must not end before it starts")]
    InvalidBaselineWindow,
    #[error("baseline window contains no data days")]
    EmptyBaseline,
    #[error("baseline mean is zero, cannot normalize")]
    ZeroBaselineMean,
    #[error("need at least {need} data days, got {got}")]
    TooFewDays { got: usize, need: usize },
    #[error("series is constant, standard deviation is zero")]
    ConstantSeries,
    #[error("{emotion}: {source}")]
    PerEmotion {
        emotion: EmotionCategory,
        source: Box<IndexError>,
    },
}

/// Exponent and baseline window for index construction.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IndexConfig {
    pub alpha: f64,
    pub baseline_start: Day,
    pub baseline_end: Day,
}

impl IndexConfig {
    pub fn new(alpha: f64, baseline_start: Day, baseline_end: Day) -> Result<Self, IndexError> {
        let config = IndexConfig {
            alpha,
            baseline_start,
            baseline_end,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), IndexError> {
        if !self.alpha.is_finite() || self.alpha <= 0.0 {
            return Err(IndexError::InvalidAlpha(self.alpha));
        }
        if self.baseline_start > self.baseline_end {
            return Err(IndexError::InvalidBaselineWindow);
        }
        Ok(())
    }
}

impl Default for IndexConfig {
    /// `alpha = 0.5` with a 2021-2023 baseline window.
    fn default() -> Self {
        IndexConfig {
            alpha: 0.5,
            baseline_start: Day::from_ymd(2021, 1, 1).unwrap(),
            baseline_end: Day::from_ymd(2023, 12, 31).unwrap(),
        }
    }
}

/// Per-word daily ratios for one emotion, before aggregation.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioSeries {
    pub emotion: EmotionCategory,
    /// day -> head word -> `w_k(t) / w_all(t)`; one entry per lexicon
    /// word, including zeros, so the map length is `|E_e|` on every day.
    pub ratios: BTreeMap<Day, BTreeMap<String, f64>>,
    /// Lexicon words absent from the counts vocabulary. They contribute
    /// ratio 0 on every day; callers should surface this as a warning.
    pub missing_words: Vec<String>,
}

impl RatioSeries {
    /// Number of unmeasured (vocabulary-absent) words on any given day.
    pub fn missing_per_day(&self) -> usize {
        self.missing_words.len()
    }

    /// Generalized-mean aggregation per day.
    pub fn aggregate_generalized(&self, alpha: f64) -> Result<BTreeMap<Day, f64>, IndexError> {
        let mut out = BTreeMap::new();
        let mut buf = Vec::new();
        for (day, per_word) in &self.ratios {
            buf.clear();
            buf.extend(per_word.values().copied());
            out.insert(*day, generalized_mean(&buf, alpha)?);
        }
        Ok(out)
    }

    /// Plain ratio sum per day (the legacy aggregation the z-score
    /// variant standardizes).
    pub fn aggregate_sum(&self) -> BTreeMap<Day, f64> {
        self.ratios
            .iter()
            .map(|(day, per_word)| (*day, per_word.values().sum()))
            .collect()
    }
}

/// Daily index values for one emotion.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexSeries {
    pub emotion: EmotionCategory,
    pub values: BTreeMap<Day, f64>,
    pub config: IndexConfig,
}

/// Per-word ratios `w_k(t) / w_all(t)` for one emotion.
///
/// Days with a zero or missing total become gaps. Words missing from
/// the counts vocabulary get ratio 0 everywhere and are reported in
/// [`RatioSeries::missing_words`].
pub fn ratio_series(
    counts: &DailyCounts,
    lexicon: &Lexicon,
    emotion: EmotionCategory,
) -> Result<RatioSeries, IndexError> {
    let words: Vec<&str> = lexicon.words_for(emotion).map(|e| e.word.as_str()).collect();
    if words.is_empty() {
        return Err(IndexError::EmotionMissing(emotion));
    }
    let vocabulary = counts.vocabulary();
    let missing_words = words
        .iter()
        .filter(|w| !vocabulary.contains(**w))
        .map(|w| String::from(**w))
        .collect();

    let mut ratios = BTreeMap::new();
    for (day, day_counts) in counts.day_counts() {
        if day_counts.total == 0 {
            continue; // gap: the ratio denominator is unusable
        }
        let total = day_counts.total as f64;
        let per_word: BTreeMap<String, f64> = words
            .iter()
            .map(|w| {
                let count = day_counts.words.get(**w).copied().unwrap_or(0);
                (String::from(**w), count as f64 / total)
            })
            .collect();
        ratios.insert(day, per_word);
    }
    Ok(RatioSeries {
        emotion,
        ratios,
        missing_words,
    })
}

/// Power mean `((1/n) * sum r_i^alpha)^(1/alpha)` over non-negative
/// ratios. Lies between the minimum and maximum ratio, reduces to the
/// arithmetic mean at `alpha = 1`, and scales linearly with its inputs.
pub fn generalized_mean(ratios: &[f64], alpha: f64) -> Result<f64, IndexError> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(IndexError::InvalidAlpha(alpha));
    }
    if ratios.is_empty() {
        return Err(IndexError::EmptyRatios);
    }
    for &r in ratios {
        if !r.is_finite() || r < 0.0 {
            return Err(IndexError::InvalidRatio(r));
        }
    }
    let n = ratios.len() as f64;
    let sum: f64 = ratios.iter().map(|&r| r.powf(alpha)).sum();
    Ok((sum / n).powf(1.0 / alpha))
}

/// Scales an aggregated series so its mean over the config's baseline
/// window (gaps excluded) is exactly 1.
pub fn normalize_baseline(
    emotion: EmotionCategory,
    aggregated: &BTreeMap<Day, f64>,
    config: &IndexConfig,
) -> Result<IndexSeries, IndexError> {
    config.validate()?;
    let baseline: Vec<f64> = aggregated
        .range(config.baseline_start..=config.baseline_end)
        .map(|(_, v)| *v)
        .collect();
    if baseline.is_empty() {
        return Err(IndexError::EmptyBaseline);
    }
    let mean = baseline.iter().sum::<f64>() / baseline.len() as f64;
    if mean == 0.0 || !mean.is_finite() {
        return Err(IndexError::ZeroBaselineMean);
    }
    let values = aggregated.iter().map(|(d, v)| (*d, v / mean)).collect();
    Ok(IndexSeries {
        emotion,
        values,
        config: *config,
    })
}

/// Standardizes a series to mean 0 and population standard deviation 1
/// over its non-gap days (the legacy index form).
pub fn zscore_index(aggregated: &BTreeMap<Day, f64>) -> Result<BTreeMap<Day, f64>, IndexError> {
    let n = aggregated.len();
    if n < 2 {
        return Err(IndexError::TooFewDays { got: n, need: 2 });
    }
    let mean = aggregated.values().sum::<f64>() / n as f64;
    let variance = aggregated
        .values()
        .map(|v| (v - mean) * (v - mean))
        .sum::<f64>()
        / n as f64;
    let sigma = variance.sqrt();
    if sigma == 0.0 {
        return Err(IndexError::ConstantSeries);
    }
    Ok(aggregated
        .iter()
        .map(|(d, v)| (*d, (v - mean) / sigma))
        .collect())
}

/// Missing-word warning emitted by [`build_all_indices`].
#[derive(Debug, Clone, PartialEq)]
pub struct MissingWordWarning {
    pub emotion: EmotionCategory,
    pub words: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AllIndices {
    pub series: BTreeMap<EmotionCategory, IndexSeries>,
    pub warnings: Vec<MissingWordWarning>,
}

fn named<E: Into<IndexError>>(emotion: EmotionCategory) -> impl Fn(E) -> IndexError {
    move |e| match e.into() {
        err @ IndexError::EmotionMissing(_) => err,
        other => IndexError::PerEmotion {
            emotion,
            source: Box::new(other),
        },
    }
}

/// Ratio -> generalized mean -> baseline normalization for all seven
/// emotions. Any per-emotion failure aborts, naming the emotion.
pub fn build_all_indices(
    counts: &DailyCounts,
    lexicon: &Lexicon,
    config: &IndexConfig,
) -> Result<AllIndices, IndexError> {
    config.validate()?;
    let mut series = BTreeMap::new();
    let mut warnings = Vec::new();
    for emotion in EmotionCategory::ALL {
        let ratios = ratio_series(counts, lexicon, emotion)?;
        if !ratios.missing_words.is_empty() {
            warnings.push(MissingWordWarning {
                emotion,
                words: ratios.missing_words.clone(),
            });
        }
        let aggregated = ratios
            .aggregate_generalized(config.alpha)
            .map_err(named(emotion))?;
        let index = normalize_baseline(emotion, &aggregated, config).map_err(named(emotion))?;
        series.insert(emotion, index);
    }
    Ok(AllIndices { series, warnings })
}

/// Ratio sum -> z-score for all seven emotions (comparison variant).
pub fn build_all_zscore_indices(
    counts: &DailyCounts,
    lexicon: &Lexicon,
) -> Result<BTreeMap<EmotionCategory, BTreeMap<Day, f64>>, IndexError> {
    let mut out = BTreeMap::new();
    for emotion in EmotionCategory::ALL {
        let ratios = ratio_series(counts, lexicon, emotion)?;
        let standardized = zscore_index(&ratios.aggregate_sum()).map_err(named(emotion))?;
        out.insert(emotion, standardized);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::fixtures::{entry, sample_lexicon};
    use crate::lexicon::{Lexicon, LexiconMeta};
    use alloc::vec;

    fn day(n: i64) -> Day {
        Day::from_days_since_epoch(n)
    }

    #[test]
    fn ratio_is_count_over_total() {
        let lex = sample_lexicon();
        let mut counts = DailyCounts::new();
        counts.record_day(day(0), 10, &[("元気", 3)]);
        let rs = ratio_series(&counts, &lex, EmotionCategory::Vigor).unwrap();
        assert_eq!(rs.ratios[&day(0)]["元気"], 0.3);
        assert_eq!(rs.ratios[&day(0)].len(), 3); // |E_e| entries, zeros included
        assert!(rs.missing_words.contains(&String::from("やる気")));
    }

    #[test]
    fn zero_total_days_become_gaps() {
        let lex = sample_lexicon();
        let mut counts = DailyCounts::new();
        counts.record_day(day(0), 10, &[("元気", 3)]);
        counts.record_day(day(1), 0, &[("元気", 2)]);
        let rs = ratio_series(&counts, &lex, EmotionCategory::Vigor).unwrap();
        assert!(rs.ratios.contains_key(&day(0)));
        assert!(!rs.ratios.contains_key(&day(1)));
    }

    #[test]
    fn missing_emotion_is_an_error() {
        let lex = Lexicon::new(
            vec![entry(EmotionCategory::Vigor, "元気")],
            vec![],
            vec![],
            LexiconMeta::default(),
        )
        .unwrap();
        let mut counts = DailyCounts::new();
        counts.record_day(day(0), 10, &[("元気", 3)]);
        assert_eq!(
            ratio_series(&counts, &lex, EmotionCategory::Friendliness).unwrap_err(),
            IndexError::EmotionMissing(EmotionCategory::Friendliness)
        );
    }

    #[test]
    fn generalized_mean_closed_form() {
        // sqrt(0.01) = 0.1, sqrt(0.04) = 0.2, mean 0.15, squared 0.0225
        let got = generalized_mean(&[0.01, 0.04], 0.5).unwrap();
        assert!((got - 0.0225).abs() < 1e-15, "got {got}");
    }

    #[test]
    fn generalized_mean_of_identical_values_is_that_value() {
        for alpha in [0.25, 0.5, 1.0, 2.0] {
            let got = generalized_mean(&[0.07, 0.07, 0.07], alpha).unwrap();
            assert!((got - 0.07).abs() < 1e-15, "alpha {alpha}: {got}");
        }
    }

    #[test]
    fn generalized_mean_at_alpha_one_is_arithmetic_mean() {
        let got = generalized_mean(&[0.01, 0.04], 1.0).unwrap();
        assert!((got - 0.025).abs() < 1e-15, "got {got}");
    }

    #[test]
    fn generalized_mean_rejects_bad_input() {
        assert_eq!(
            generalized_mean(&[], 0.5).unwrap_err(),
            IndexError::EmptyRatios
        );
        assert_eq!(
            generalized_mean(&[0.1, -0.2], 0.5).unwrap_err(),
            IndexError::InvalidRatio(-0.2)
        );
        assert_eq!(
            generalized_mean(&[0.1], 0.0).unwrap_err(),
            IndexError::InvalidAlpha(0.0)
        );
        assert_eq!(
            generalized_mean(&[0.1], -0.5).unwrap_err(),
            IndexError::InvalidAlpha(-0.5)
        );
    }

    #[test]
    fn generalized_mean_handles_zeros_without_flooring() {
        let got = generalized_mean(&[0.0, 0.0, 0.09], 0.5).unwrap();
        // (0 + 0 + 0.3)/3 = 0.1, squared = 0.01
        assert!((got - 0.01).abs() < 1e-15, "got {got}");
        assert_eq!(generalized_mean(&[0.0, 0.0], 0.5).unwrap(), 0.0);
    }

    #[test]
    fn power_mean_damps_dominant_words() {
        // one word at 100x the median ratio: its share of the aggregate
        // mass must shrink under alpha = 0.5 relative to a plain sum
        let mut ratios = vec![0.001; 24];
        ratios.push(0.1);
        let linear_share = 0.1 / ratios.iter().sum::<f64>();
        let sqrt_mass: f64 = ratios.iter().map(|r| r.powf(0.5)).sum();
        let damped_share = 0.1f64.powf(0.5) / sqrt_mass;
        assert!(
            damped_share < linear_share,
            "damped {damped_share} vs linear {linear_share}"
        );
    }

    #[test]
    fn baseline_normalization_hand_example() {
        let mut aggregated = BTreeMap::new();
        aggregated.insert(day(0), 2.0);
        aggregated.insert(day(1), 4.0);
        let config = IndexConfig::new(0.5, day(0), day(1)).unwrap();
        let idx = normalize_baseline(EmotionCategory::Vigor, &aggregated, &config).unwrap();
        assert_eq!(idx.values[&day(0)], 2.0 / 3.0);
        assert_eq!(idx.values[&day(1)], 4.0 / 3.0);
        let mean: f64 = idx.values.values().sum::<f64>() / 2.0;
        assert!((mean - 1.0).abs() < 1e-9);
    }

    #[test]
    fn constant_series_normalizes_to_one() {
        let aggregated: BTreeMap<Day, f64> = (0..30).map(|i| (day(i), 0.42)).collect();
        let config = IndexConfig::new(0.5, day(5), day(10)).unwrap();
        let idx = normalize_baseline(EmotionCategory::Anger, &aggregated, &config).unwrap();
        assert!(idx.values.values().all(|v| (*v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn disjoint_baseline_window_is_an_error() {
        let aggregated: BTreeMap<Day, f64> = (0..10).map(|i| (day(i), 1.0)).collect();
        let config = IndexConfig::new(0.5, day(100), day(200)).unwrap();
        assert_eq!(
            normalize_baseline(EmotionCategory::Anger, &aggregated, &config).unwrap_err(),
            IndexError::EmptyBaseline
        );
    }

    #[test]
    fn zscore_matches_two_pass_oracle() {
        let aggregated: BTreeMap<Day, f64> =
            [(day(0), 1.0), (day(1), 2.0), (day(2), 3.0)].into_iter().collect();
        let z = zscore_index(&aggregated).unwrap();

        // independent two-pass computation
        let values = [1.0, 2.0, 3.0];
        let mean = values.iter().sum::<f64>() / 3.0;
        let sigma = (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / 3.0).sqrt();
        assert!((sigma - 0.816496580927726).abs() < 1e-12);
        for (i, d) in [day(0), day(1), day(2)].into_iter().enumerate() {
            let expected = (values[i] - mean) / sigma;
            assert!((z[&d] - expected).abs() < 1e-12);
        }
        assert!((z[&day(0)] + 1.224744871391589).abs() < 1e-12);
        assert_eq!(z[&day(1)], 0.0);
    }

    #[test]
    fn zscore_output_has_mean_zero_std_one() {
        let aggregated: BTreeMap<Day, f64> = (0..50)
            .map(|i| (day(i), 0.01 * (i as f64) * (i as f64) - 0.3 * i as f64 + 2.0))
            .collect();
        let z = zscore_index(&aggregated).unwrap();
        let n = z.len() as f64;
        let mean = z.values().sum::<f64>() / n;
        let var = z.values().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        assert!(mean.abs() < 1e-9);
        assert!((var.sqrt() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zscore_rejects_degenerate_series() {
        let constant: BTreeMap<Day, f64> = (0..5).map(|i| (day(i), 2.0)).collect();
        assert_eq!(zscore_index(&constant).unwrap_err(), IndexError::ConstantSeries);
        let single: BTreeMap<Day, f64> = [(day(0), 1.0)].into_iter().collect();
        assert_eq!(
            zscore_index(&single).unwrap_err(),
            IndexError::TooFewDays { got: 1, need: 2 }
        );
    }

    fn synthetic_counts(lexicon: &Lexicon, n_days: i64, scale: u64) -> DailyCounts {
        let mut counts = DailyCounts::new();
        for i in 0..n_days {
            let words: Vec<(&str, u64)> = lexicon
                .entries()
                .iter()
                .enumerate()
                .map(|(j, e)| {
                    let c = ((i * 7 + j as i64 * 3) % 11) as u64 + 1;
                    (e.word.as_str(), c * scale)
                })
                .collect();
            counts.record_day(day(i), 200 * scale, &words);
        }
        counts
    }

    #[test]
    fn build_all_indices_yields_seven_baseline_one_series() {
        let lex = sample_lexicon();
        let counts = synthetic_counts(&lex, 40, 1);
        let config = IndexConfig::new(0.5, day(0), day(19)).unwrap();
        let all = build_all_indices(&counts, &lex, &config).unwrap();
        assert_eq!(all.series.len(), 7);
        assert!(all.warnings.is_empty());
        for (emotion, series) in &all.series {
            let baseline: Vec<f64> = series
                .values
                .range(day(0)..=day(19))
                .map(|(_, v)| *v)
                .collect();
            let mean = baseline.iter().sum::<f64>() / baseline.len() as f64;
            assert!((mean - 1.0).abs() < 1e-9, "{emotion}: baseline mean {mean}");
        }
    }

    #[test]
    fn build_all_indices_names_the_missing_emotion() {
        let lex = Lexicon::new(
            vec![entry(EmotionCategory::Vigor, "元気")],
            vec![],
            vec![],
            LexiconMeta::default(),
        )
        .unwrap();
        let mut counts = DailyCounts::new();
        counts.record_day(day(0), 10, &[("元気", 3)]);
        let err = build_all_indices(&counts, &lex, &IndexConfig::new(0.5, day(0), day(0)).unwrap())
            .unwrap_err();
        assert_eq!(err, IndexError::EmotionMissing(EmotionCategory::Anger));
        assert!(alloc::format!("{err}").contains("Anger"));
    }

    #[test]
    fn uniform_corpus_scaling_leaves_indices_bit_identical() {
        let lex = sample_lexicon();
        let config = IndexConfig::new(0.5, day(0), day(19)).unwrap();
        let base = build_all_indices(&synthetic_counts(&lex, 40, 1), &lex, &config).unwrap();
        let scaled = build_all_indices(&synthetic_counts(&lex, 40, 7), &lex, &config).unwrap();
        for emotion in EmotionCategory::ALL {
            let a = &base.series[&emotion].values;
            let b = &scaled.series[&emotion].values;
            assert_eq!(a.len(), b.len());
            for (d, v) in a {
                assert_eq!(v.to_bits(), b[d].to_bits(), "{emotion} {d}");
            }
        }
    }
}
