//! Synthetic series and corpora with known ground truth.
//!
//! Everything here is driven by one seeded ChaCha stream per output, so
//! runs are bit-reproducible. The generated components reuse the exact
//! evaluation code shapes the fitter assumes (piecewise-linear trend,
//! 365.25-day Fourier terms, day-of-week offsets), which makes these
//! generators the verification oracle for the decomposition and impact
//! stages: recovery tests compare fitted output against the parameters
//! used here.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};
use thiserror::Error;

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

use crate::date::Day;
use crate::decompose::Decomposition;
use crate::index::{IndexConfig, IndexSeries};
use crate::ingest::{PostRecord, SourceClass};
use crate::lexicon::{EmotionCategory, Lexicon};

const DAYS_PER_YEAR: f64 = 365.25;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum SynthError {
    #[error("invalid synth spec: {0}")]
    InvalidSpec(&'static str),
}

/// A one-day multiplicative shock on one emotion's series.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Shock {
    pub day: Day,
    pub emotion: EmotionCategory,
    pub factor: f64,
}

/// Ground-truth parameters for generated series.
///
/// `observed(t) = (trend(t) + yearly(t) + weekly(t) + noise(t)) * shock(t)`
/// where the shock factor applies only to the shocked emotion's stream.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SynthSpec {
    pub start: Day,
    pub end: Day,
    pub base_level: f64,
    /// Trend slope per day until the first changepoint.
    pub trend_slope: f64,
    /// `(day, new_slope)` pairs; the new slope takes effect with the
    /// step leaving `day`.
    pub changepoints: Vec<(Day, f64)>,
    /// `(fourier_order, cos_amplitude, sin_amplitude)` terms.
    pub yearly: Vec<(u32, f64, f64)>,
    /// Day-of-week offsets, Monday first; must sum to zero.
    pub weekly: [f64; 7],
    pub noise_sigma: f64,
    pub shocks: Vec<Shock>,
    pub seed: u64,
}

impl SynthSpec {
    /// A flat, quiet spec over the given span: level 1.0, no trend, no
    /// seasonality, no noise, no shocks.
    pub fn flat(start: Day, end: Day, seed: u64) -> Self {
        SynthSpec {
            start,
            end,
            base_level: 1.0,
            trend_slope: 0.0,
            changepoints: Vec::new(),
            yearly: Vec::new(),
            weekly: [0.0; 7],
            noise_sigma: 0.0,
            shocks: Vec::new(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        if self.start > self.end {
            return Err(SynthError::InvalidSpec("start is after end"));
        }
        if !self.base_level.is_finite() || !self.trend_slope.is_finite() {
            return Err(SynthError::InvalidSpec("non-finite level or slope"));
        }
        let weekly_sum: f64 = self.weekly.iter().sum();
        if weekly_sum.abs() > 1e-12 {
            return Err(SynthError::InvalidSpec("weekly pattern must sum to zero"));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(SynthError::InvalidSpec("noise_sigma must be finite and >= 0"));
        }
        for (order, _, _) in &self.yearly {
            if *order == 0 {
                return Err(SynthError::InvalidSpec("yearly order must be >= 1"));
            }
        }
        for shock in &self.shocks {
            if !(shock.factor > 0.0 && shock.factor.is_finite()) {
                return Err(SynthError::InvalidSpec("shock factor must be finite and > 0"));
            }
        }
        Ok(())
    }

    fn trend_values(&self) -> BTreeMap<Day, f64> {
        let mut changepoints = self.changepoints.clone();
        changepoints.sort_by_key(|(day, _)| *day);
        let mut out = BTreeMap::new();
        let mut level = self.base_level;
        let mut slope = self.trend_slope;
        let mut next_cp = 0;
        let mut day = self.start;
        loop {
            while next_cp < changepoints.len() && changepoints[next_cp].0 <= day {
                slope = changepoints[next_cp].1;
                next_cp += 1;
            }
            out.insert(day, level);
            if day == self.end {
                break;
            }
            level += slope;
            day = day.succ();
        }
        out
    }

    fn yearly_at(&self, day: Day) -> f64 {
        let tau = day.days_since(self.start) as f64;
        self.yearly
            .iter()
            .map(|(m, a, b)| {
                let angle = 2.0 * PI * (*m as f64) * tau / DAYS_PER_YEAR;
                a * angle.cos() + b * angle.sin()
            })
            .sum()
    }

    fn shock_factor(&self, day: Day, emotion: EmotionCategory) -> f64 {
        self.shocks
            .iter()
            .filter(|s| s.day == day && s.emotion == emotion)
            .map(|s| s.factor)
            .product()
    }
}

/// Standard normal deviate by Box-Muller over the raw RNG stream.
fn gaussian(rng: &mut ChaCha12Rng) -> f64 {
    // (0, 1] uniforms so the log is always finite
    let u1 = ((rng.next_u64() >> 11) + 1) as f64 / (1u64 << 53) as f64;
    let u2 = ((rng.next_u64() >> 11) + 1) as f64 / (1u64 << 53) as f64;
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

fn emotion_rng(seed: u64, emotion: EmotionCategory) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let stream = EmotionCategory::ALL
        .iter()
        .position(|e| *e == emotion)
        .unwrap() as u64;
    rng.set_stream(stream);
    rng
}

/// Generates one emotion's observed series and its exact components.
///
/// The residual in the returned ground truth is defined the same way
/// the decomposition stage defines it — observed minus the other three
/// components — so it absorbs the noise and any shock distortion and
/// the reconstruction identity holds exactly.
pub fn gen_index_series(
    spec: &SynthSpec,
    emotion: EmotionCategory,
) -> Result<(IndexSeries, Decomposition), SynthError> {
    spec.validate()?;
    let mut rng = emotion_rng(spec.seed, emotion);

    let trend = spec.trend_values();
    let mut yearly = BTreeMap::new();
    let mut weekly = BTreeMap::new();
    let mut residual = BTreeMap::new();
    let mut values = BTreeMap::new();
    for (&day, &t) in &trend {
        let y = spec.yearly_at(day);
        let w = spec.weekly[day.weekday()];
        let noise = spec.noise_sigma * gaussian(&mut rng);
        let observed = (((t + y) + w) + noise) * spec.shock_factor(day, emotion);
        yearly.insert(day, y);
        weekly.insert(day, w);
        residual.insert(day, observed - ((t + y) + w));
        values.insert(day, observed);
    }

    let series = IndexSeries {
        emotion,
        values,
        // synthetic series live directly in index space (level ~ 1); the
        // config records the span the values cover rather than implying a
        // normalization pass
        config: IndexConfig {
            alpha: 0.5,
            baseline_start: spec.start,
            baseline_end: spec.end,
        },
    };
    let truth = Decomposition {
        trend,
        yearly,
        weekly,
        residual,
    };
    Ok((series, truth))
}

/// One series per emotion, each on its own RNG stream; shocks apply to
/// their target emotion only.
pub fn gen_all_series(
    spec: &SynthSpec,
) -> Result<BTreeMap<EmotionCategory, (IndexSeries, Decomposition)>, SynthError> {
    EmotionCategory::ALL
        .into_iter()
        .map(|e| gen_index_series(spec, e).map(|pair| (e, pair)))
        .collect()
}

/// Share of posts carrying each filterable attribute in a generated corpus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlagRates {
    pub url: f64,
    pub reply: f64,
    pub retweet: f64,
    pub mass_media: f64,
    /// Posts that embed an exclusion term in their text.
    pub spam: f64,
    /// Posts that end with a proxy phrase.
    pub proxy: f64,
}

impl Default for FlagRates {
    fn default() -> Self {
        FlagRates {
            url: 0.10,
            reply: 0.05,
            retweet: 0.05,
            mass_media: 0.02,
            spam: 0.03,
            proxy: 0.92,
        }
    }
}

/// What the corpus generator intended, for verification against what a
/// pipeline run observes.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusTruth {
    /// Base inclusion probability per head word.
    pub base_prob: BTreeMap<String, f64>,
    /// Per-day multiplier applied to every word of an emotion
    /// (component value times shock factor).
    pub day_factor: BTreeMap<(Day, EmotionCategory), f64>,
    pub rates: FlagRates,
    pub posts_per_day: u32,
}

impl CorpusTruth {
    /// Intended inclusion probability for `word` on `day`.
    pub fn word_probability(&self, day: Day, emotion: EmotionCategory, word: &str) -> f64 {
        let base = self.base_prob.get(word).copied().unwrap_or(0.0);
        let factor = self.day_factor.get(&(day, emotion)).copied().unwrap_or(0.0);
        (base * factor).clamp(0.0, 1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthCorpus {
    pub posts: Vec<PostRecord>,
    pub truth: CorpusTruth,
}

fn uniform(rng: &mut ChaCha12Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

/// Filler characters for post bodies: a kanji range that cannot spell
/// any multi-character dictionary word whose characters are not all
/// inside it. Keeps accidental matches out of the sample lexicons used
/// in tests.
fn filler_char(rng: &mut ChaCha12Rng) -> char {
    let offset = (rng.next_u64() % 0x200) as u32;
    char::from_u32(0x4E00 + offset).unwrap()
}

/// Generates a post stream whose per-word inclusion probabilities track
/// the spec's daily component values, with default flag rates.
pub fn gen_corpus(
    spec: &SynthSpec,
    lexicon: &Lexicon,
    posts_per_day: u32,
) -> Result<SynthCorpus, SynthError> {
    gen_corpus_with(spec, lexicon, posts_per_day, FlagRates::default())
}

/// [`gen_corpus`] with explicit flag rates.
pub fn gen_corpus_with(
    spec: &SynthSpec,
    lexicon: &Lexicon,
    posts_per_day: u32,
    rates: FlagRates,
) -> Result<SynthCorpus, SynthError> {
    spec.validate()?;
    if posts_per_day == 0 {
        return Err(SynthError::InvalidSpec("posts_per_day must be at least 1"));
    }

    let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
    rng.set_stream(0x636f7270); // distinct stream from the series generators

    let base_prob: BTreeMap<String, f64> = lexicon
        .entries()
        .iter()
        .map(|e| (e.word.clone(), 0.02 + 0.04 * uniform(&mut rng)))
        .collect();

    let trend = spec.trend_values();
    let mut day_factor = BTreeMap::new();
    for (&day, &t) in &trend {
        let component = ((t + spec.yearly_at(day)) + spec.weekly[day.weekday()]).max(0.0);
        for emotion in EmotionCategory::ALL {
            day_factor.insert((day, emotion), component * spec.shock_factor(day, emotion));
        }
    }

    let truth = CorpusTruth {
        base_prob,
        day_factor,
        rates,
        posts_per_day,
    };

    let mut posts = Vec::with_capacity(trend.len() * posts_per_day as usize);
    let mut id = 0u64;
    for &day in trend.keys() {
        // JST civil day: UTC midnight of `day` minus 9h starts the day
        let day_start_epoch = day.days_since_epoch() * 86_400 - 9 * 3600;
        for _ in 0..posts_per_day {
            let epoch = day_start_epoch + (rng.next_u64() % 86_400) as i64;
            let mut text = String::new();
            let filler_len = 8 + (rng.next_u64() % 16) as usize;
            for _ in 0..filler_len {
                text.push(filler_char(&mut rng));
            }
            for entry in lexicon.entries() {
                let p = truth.word_probability(day, entry.emotion, &entry.word);
                if uniform(&mut rng) < p {
                    // sometimes write a variant so merging gets exercised
                    if !entry.variants.is_empty() && uniform(&mut rng) < 0.3 {
                        let pick = (rng.next_u64() % entry.variants.len() as u64) as usize;
                        text.push_str(&entry.variants[pick]);
                    } else {
                        text.push_str(&entry.word);
                    }
                }
            }
            let spam = uniform(&mut rng) < rates.spam && !lexicon.exclusion_terms().is_empty();
            if spam {
                let pick = (rng.next_u64() % lexicon.exclusion_terms().len() as u64) as usize;
                text.push_str(&lexicon.exclusion_terms()[pick]);
            }
            if uniform(&mut rng) < rates.proxy && !lexicon.proxy_phrases().is_empty() {
                text.push_str(&lexicon.proxy_phrases()[0]);
            }
            posts.push(PostRecord {
                id: format!("s{id:08}"),
                epoch_seconds: epoch,
                text,
                is_reply: uniform(&mut rng) < rates.reply,
                is_retweet: uniform(&mut rng) < rates.retweet,
                has_url: uniform(&mut rng) < rates.url,
                source: if uniform(&mut rng) < rates.mass_media {
                    SourceClass::MassMedia
                } else {
                    SourceClass::Individual
                },
            });
            id += 1;
        }
    }
    Ok(SynthCorpus { posts, truth })
}
