//! Emotion-word dictionaries.
//!
//! A [`Lexicon`] maps each of the seven emotion categories to a set of
//! surface words (plus spelling variants that share the head word's
//! counter), and carries two global word lists: exclusion terms that
//! drop a post entirely, and proxy phrases used to estimate daily post
//! totals when a true total is unavailable.
//!
//! All strings are NFKC-normalized on construction, and every invariant
//! is checked against the normalized forms.

use alloc::string::String;
use alloc::vec::Vec;
use alloc::collections::{BTreeMap, BTreeSet};
use core::fmt;

use thiserror::Error;

use crate::date::month_bounds;
use crate::ingest::DailyCounts;
use crate::text::nfkc_owned;

/// The seven mood categories. `Friendliness` is the seventh, added on
/// top of the classic six POMS categories by POMS2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EmotionCategory {
    Anger,
    Confusion,
    Depression,
    Fatigue,
    Friendliness,
    Tension,
    Vigor,
}

impl EmotionCategory {
    /// All seven categories in canonical (alphabetical) order.
    pub const ALL: [EmotionCategory; 7] = [
        EmotionCategory::Anger,
        EmotionCategory::Confusion,
        EmotionCategory::Depression,
        EmotionCategory::Fatigue,
        EmotionCategory::Friendliness,
        EmotionCategory::Tension,
        EmotionCategory::Vigor,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EmotionCategory::Anger => "Anger",
            EmotionCategory::Confusion => "Confusion",
            EmotionCategory::Depression => "Depression",
            EmotionCategory::Fatigue => "Fatigue",
            EmotionCategory::Friendliness => "Friendliness",
            EmotionCategory::Tension => "Tension",
            EmotionCategory::Vigor => "Vigor",
        }
    }

    /// Parses the exact English label (case-sensitive).
    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.as_str() == s)
    }
}

impl fmt::Display for EmotionCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for EmotionCategory {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for EmotionCategory {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = <&str as serde::Deserialize>::deserialize(deserializer)?;
        EmotionCategory::parse(s)
            .ok_or_else(|| serde::de::Error::custom(format_args!("unknown emotion category {s:?}")))
    }
}

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum LexiconError {
    #[error("{emotion} entry is empty after normalization")]
    EmptyWord { emotion: EmotionCategory },
    #[error("word {word:?} appears in both {first} and {second}")]
    DuplicateWord {
        word: String,
        first: EmotionCategory,
        second: EmotionCategory,
    },
    #[error("surface {surface:?} of {emotion} word {word:?} duplicates another surface form")]
    DuplicateVariant {
        emotion: EmotionCategory,
        word: String,
        surface: String,
    },
    #[error("{emotion} word {word:?} is also listed as an {list} term")]
    FilterCollision {
        emotion: EmotionCategory,
        word: String,
        list: &'static str,
    },
    #[error("category {0} has no words")]
    EmptyCategory(EmotionCategory),
}

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum PruneError {
    #[error("counts cover no complete calendar month")]
    NoCompleteMonth,
}

/// One head word in one emotion category, with optional spelling
/// variants. Posts containing a variant count toward the head word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    pub emotion: EmotionCategory,
    pub word: String,
    pub variants: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LexiconMeta {
    pub name: String,
    pub version: String,
}

/// An immutable, validated emotion-word dictionary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    entries: Vec<LexiconEntry>,
    exclusion_terms: Vec<String>,
    proxy_phrases: Vec<String>,
    meta: LexiconMeta,
}

impl Lexicon {
    /// Builds a lexicon, NFKC-normalizing every string and checking:
    ///
    /// - no entry word is empty after normalization;
    /// - every surface form (head word or variant) is globally unique,
    ///   so one token can never feed two counters;
    /// - exclusion terms and proxy phrases are disjoint from all
    ///   surface forms.
    ///
    /// Category completeness is checked separately by
    /// [`Lexicon::validate_complete`]: partial lexicons are legal as
    /// in-memory values (pruning can empty a category) but rejected
    /// when loading a dictionary file.
    pub fn new(
        entries: Vec<LexiconEntry>,
        exclusion_terms: Vec<String>,
        proxy_phrases: Vec<String>,
        meta: LexiconMeta,
    ) -> Result<Self, LexiconError> {
        let mut normalized: Vec<LexiconEntry> = Vec::with_capacity(entries.len());
        // surface form -> owning (emotion, head word)
        let mut surfaces: BTreeMap<String, (EmotionCategory, String)> = BTreeMap::new();
        for entry in entries {
            let word = nfkc_owned(&entry.word);
            if word.is_empty() {
                return Err(LexiconError::EmptyWord {
                    emotion: entry.emotion,
                });
            }
            if let Some((first, _)) = surfaces.get(&word) {
                return Err(LexiconError::DuplicateWord {
                    word,
                    first: *first,
                    second: entry.emotion,
                });
            }
            surfaces.insert(word.clone(), (entry.emotion, word.clone()));
            let mut variants = Vec::with_capacity(entry.variants.len());
            for variant in &entry.variants {
                let variant = nfkc_owned(variant);
                if variant.is_empty() {
                    return Err(LexiconError::EmptyWord {
                        emotion: entry.emotion,
                    });
                }
                if surfaces.contains_key(&variant) {
                    return Err(LexiconError::DuplicateVariant {
                        emotion: entry.emotion,
                        word,
                        surface: variant,
                    });
                }
                surfaces.insert(variant.clone(), (entry.emotion, word.clone()));
                variants.push(variant);
            }
            normalized.push(LexiconEntry {
                emotion: entry.emotion,
                word,
                variants,
            });
        }

        let normalize_filters = |terms: Vec<String>, list: &'static str| {
            terms
                .into_iter()
                .map(|t| {
                    let t = nfkc_owned(&t);
                    match surfaces.get(&t) {
                        Some((emotion, word)) => Err(LexiconError::FilterCollision {
                            emotion: *emotion,
                            word: word.clone(),
                            list,
                        }),
                        None => Ok(t),
                    }
                })
                .collect::<Result<Vec<_>, _>>()
        };
        let exclusion_terms = normalize_filters(exclusion_terms, "exclusion")?;
        let proxy_phrases = normalize_filters(proxy_phrases, "proxy")?;

        Ok(Lexicon {
            entries: normalized,
            exclusion_terms,
            proxy_phrases,
            meta,
        })
    }

    /// Checks that every one of the seven categories has at least one word.
    pub fn validate_complete(&self) -> Result<(), LexiconError> {
        for emotion in EmotionCategory::ALL {
            if self.words_for(emotion).next().is_none() {
                return Err(LexiconError::EmptyCategory(emotion));
            }
        }
        Ok(())
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn words_for(&self, emotion: EmotionCategory) -> impl Iterator<Item = &LexiconEntry> {
        self.entries.iter().filter(move |e| e.emotion == emotion)
    }

    pub fn exclusion_terms(&self) -> &[String] {
        &self.exclusion_terms
    }

    pub fn proxy_phrases(&self) -> &[String] {
        &self.proxy_phrases
    }

    pub fn meta(&self) -> &LexiconMeta {
        &self.meta
    }

    /// Compiles the multi-pattern matcher for this lexicon.
    pub fn matcher(&self) -> crate::ingest::Matcher {
        crate::ingest::Matcher::new(self)
    }
}

/// Accepted per-category word-count range for [`validate_sizes`].
///
/// The default band brackets the sizes dictionaries of this kind settle
/// at in practice (roughly 19–35 words per category).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeBand {
    pub min: usize,
    pub max: usize,
}

impl Default for SizeBand {
    fn default() -> Self {
        SizeBand { min: 15, max: 40 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmotionSize {
    pub emotion: EmotionCategory,
    pub count: usize,
    pub in_band: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeReport {
    pub band: SizeBand,
    pub per_emotion: Vec<EmotionSize>,
}

impl SizeReport {
    pub fn all_in_band(&self) -> bool {
        self.per_emotion.iter().all(|s| s.in_band)
    }
}

/// Reports the head-word count of every category and flags counts
/// outside the band (inclusive on both ends). Pure report, never fails.
pub fn validate_sizes(lexicon: &Lexicon, band: SizeBand) -> SizeReport {
    let per_emotion = EmotionCategory::ALL
        .into_iter()
        .map(|emotion| {
            let count = lexicon.words_for(emotion).count();
            EmotionSize {
                emotion,
                count,
                in_band: count >= band.min && count <= band.max,
            }
        })
        .collect();
    SizeReport { band, per_emotion }
}

/// Removes entries whose post count stays below `min_posts_per_month` in
/// every calendar month fully covered by `counts`. Returns the pruned
/// lexicon and the removed head words. Pruning twice removes nothing new.
///
/// Monthly counts are taken from `counts` as given (raw or filtered,
/// whichever the caller aggregated); the result makes no assumption
/// about which filters produced the table.
pub fn prune_low_frequency(
    lexicon: &Lexicon,
    counts: &DailyCounts,
    min_posts_per_month: u64,
) -> Result<(Lexicon, Vec<String>), PruneError> {
    let months = covered_months(counts).ok_or(PruneError::NoCompleteMonth)?;

    let mut kept = Vec::with_capacity(lexicon.entries.len());
    let mut removed = Vec::new();
    for entry in &lexicon.entries {
        let below_everywhere = months.iter().all(|&(first, last)| {
            let monthly: u64 = crate::date::Day::range_inclusive(first, last)
                .map(|day| counts.word_count(day, &entry.word))
                .sum();
            monthly < min_posts_per_month
        });
        if below_everywhere {
            removed.push(entry.word.clone());
        } else {
            kept.push(entry.clone());
        }
    }

    let pruned = Lexicon {
        entries: kept,
        exclusion_terms: lexicon.exclusion_terms.clone(),
        proxy_phrases: lexicon.proxy_phrases.clone(),
        meta: lexicon.meta.clone(),
    };
    Ok((pruned, removed))
}

/// Calendar months lying entirely within the span of `counts`.
fn covered_months(counts: &DailyCounts) -> Option<Vec<(crate::date::Day, crate::date::Day)>> {
    let first = counts.first_day()?;
    let last = counts.last_day()?;
    let mut months = Vec::new();
    let (mut year, mut month) = first.year_month();
    loop {
        let (mf, ml) = month_bounds(year, month);
        if mf > last {
            break;
        }
        if mf >= first && ml <= last {
            months.push((mf, ml));
        }
        month += 1;
        if month > 12 {
            month = 1;
            year += 1;
        }
    }
    if months.is_empty() {
        None
    } else {
        Some(months)
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use alloc::borrow::ToOwned;
    use alloc::vec;

    pub fn entry(emotion: EmotionCategory, word: &str) -> LexiconEntry {
        LexiconEntry {
            emotion,
            word: word.to_owned(),
            variants: vec![],
        }
    }

    pub fn entry_with_variants(
        emotion: EmotionCategory,
        word: &str,
        variants: &[&str],
    ) -> LexiconEntry {
        LexiconEntry {
            emotion,
            word: word.to_owned(),
            variants: variants.iter().map(|v| (*v).to_owned()).collect(),
        }
    }

    /// A small but complete lexicon: three words per category, one
    /// variant, one exclusion term, punctuation proxy phrases.
    pub fn sample_lexicon() -> Lexicon {
        let entries = vec![
            entry(EmotionCategory::Anger, "怒り"),
            entry_with_variants(EmotionCategory::Anger, "イライラ", &["いらいら"]),
            entry(EmotionCategory::Anger, "腹立つ"),
            entry(EmotionCategory::Confusion, "混乱"),
            entry(EmotionCategory::Confusion, "戸惑い"),
            entry(EmotionCategory::Confusion, "どうしよう"),
            entry(EmotionCategory::Depression, "憂鬱"),
            entry(EmotionCategory::Depression, "悲しい"),
            entry(EmotionCategory::Depression, "落ち込む"),
            entry(EmotionCategory::Fatigue, "疲れた"),
            entry(EmotionCategory::Fatigue, "だるい"),
            entry(EmotionCategory::Fatigue, "くたくた"),
            entry(EmotionCategory::Friendliness, "ありがとう"),
            entry(EmotionCategory::Friendliness, "優しい"),
            entry(EmotionCategory::Friendliness, "仲良し"),
            entry(EmotionCategory::Tension, "緊張"),
            entry(EmotionCategory::Tension, "不安"),
            entry(EmotionCategory::Tension, "どきどき"),
            entry(EmotionCategory::Vigor, "元気"),
            entry(EmotionCategory::Vigor, "やる気"),
            entry(EmotionCategory::Vigor, "わくわく"),
        ];
        Lexicon::new(
            entries,
            vec!["懸賞".to_owned(), "スパム".to_owned()],
            vec!["。".to_owned(), "、".to_owned()],
            LexiconMeta {
                name: "sample".to_owned(),
                version: "1".to_owned(),
            },
        )
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::date::Day;
    use crate::ingest::DailyCounts;
    use alloc::borrow::ToOwned;
    use alloc::vec;

    #[test]
    fn sample_lexicon_is_complete_with_21_entries() {
        let lex = sample_lexicon();
        assert_eq!(lex.entries().len(), 21);
        assert!(lex.validate_complete().is_ok());
    }

    #[test]
    fn rejects_duplicate_word_across_categories() {
        let err = Lexicon::new(
            vec![
                entry(EmotionCategory::Vigor, "わいわい"),
                entry(EmotionCategory::Friendliness, "わいわい"),
            ],
            vec![],
            vec![],
            LexiconMeta::default(),
        )
        .unwrap_err();
        assert_eq!(
            err,
            LexiconError::DuplicateWord {
                word: "わいわい".to_owned(),
                first: EmotionCategory::Vigor,
                second: EmotionCategory::Friendliness,
            }
        );
    }

    #[test]
    fn rejects_duplicate_after_normalization() {
        // half-width and full-width katakana collapse to the same word
        let err = Lexicon::new(
            vec![
                entry(EmotionCategory::Anger, "イライラ"),
                entry(EmotionCategory::Anger, "ｲﾗｲﾗ"),
            ],
            vec![],
            vec![],
            LexiconMeta::default(),
        )
        .unwrap_err();
        assert!(matches!(err, LexiconError::DuplicateWord { .. }));
    }

    #[test]
    fn rejects_word_listed_as_exclusion_term() {
        // an influencer-name homonym must be excluded, not double-listed
        let err = Lexicon::new(
            vec![entry(EmotionCategory::Friendliness, "わいわい")],
            vec!["わいわい".to_owned()],
            vec![],
            LexiconMeta::default(),
        )
        .unwrap_err();
        assert_eq!(
            err,
            LexiconError::FilterCollision {
                emotion: EmotionCategory::Friendliness,
                word: "わいわい".to_owned(),
                list: "exclusion",
            }
        );
    }

    #[test]
    fn rejects_variant_colliding_with_other_entry() {
        let err = Lexicon::new(
            vec![
                entry(EmotionCategory::Vigor, "元気"),
                entry_with_variants(EmotionCategory::Anger, "怒り", &["元気"]),
            ],
            vec![],
            vec![],
            LexiconMeta::default(),
        )
        .unwrap_err();
        assert!(matches!(err, LexiconError::DuplicateVariant { .. }));
    }

    #[test]
    fn rejects_empty_word() {
        let err = Lexicon::new(
            vec![entry(EmotionCategory::Anger, "")],
            vec![],
            vec![],
            LexiconMeta::default(),
        )
        .unwrap_err();
        assert_eq!(
            err,
            LexiconError::EmptyWord {
                emotion: EmotionCategory::Anger
            }
        );
    }

    #[test]
    fn incomplete_lexicon_names_the_empty_category() {
        let lex = Lexicon::new(
            vec![entry(EmotionCategory::Vigor, "元気")],
            vec![],
            vec![],
            LexiconMeta::default(),
        )
        .unwrap();
        assert_eq!(
            lex.validate_complete().unwrap_err(),
            LexiconError::EmptyCategory(EmotionCategory::Anger)
        );
    }

    fn lexicon_with_counts(counts_per_emotion: &[(EmotionCategory, usize)]) -> Lexicon {
        let mut entries = Vec::new();
        for (emotion, n) in counts_per_emotion {
            for i in 0..*n {
                entries.push(entry(*emotion, &alloc::format!("{emotion}w{i}")));
            }
        }
        Lexicon::new(entries, vec![], vec![], LexiconMeta::default()).unwrap()
    }

    #[test]
    fn observed_dictionary_sizes_are_all_in_band() {
        let lex = lexicon_with_counts(&[
            (EmotionCategory::Vigor, 21),
            (EmotionCategory::Confusion, 35),
            (EmotionCategory::Depression, 19),
            (EmotionCategory::Anger, 25),
            (EmotionCategory::Tension, 21),
            (EmotionCategory::Fatigue, 22),
            (EmotionCategory::Friendliness, 24),
        ]);
        let report = validate_sizes(&lex, SizeBand::default());
        assert!(report.all_in_band());
        let vigor = report
            .per_emotion
            .iter()
            .find(|s| s.emotion == EmotionCategory::Vigor)
            .unwrap();
        assert_eq!(vigor.count, 21);
    }

    #[test]
    fn size_band_is_inclusive_and_flags_small_categories() {
        let mut sizes = vec![(EmotionCategory::Anger, 3), (EmotionCategory::Confusion, 40)];
        sizes.extend(
            EmotionCategory::ALL
                .into_iter()
                .skip(2)
                .map(|e| (e, 20usize)),
        );
        let report = validate_sizes(&lexicon_with_counts(&sizes), SizeBand::default());
        let by_emotion = |e: EmotionCategory| {
            report
                .per_emotion
                .iter()
                .find(|s| s.emotion == e)
                .unwrap()
                .clone()
        };
        assert!(!by_emotion(EmotionCategory::Anger).in_band); // 3 < 15
        assert!(by_emotion(EmotionCategory::Confusion).in_band); // 40 == max
        assert!(!report.all_in_band());
    }

    fn counts_for_prune() -> DailyCounts {
        // complete Jan + Feb 2024: "悲しい" stays under 5 both months,
        // "怒り" crosses 5 in February only
        let mut counts = DailyCounts::new();
        let jan = Day::parse("2024-01-10").unwrap();
        let feb = Day::parse("2024-02-10").unwrap();
        counts.record_day(Day::parse("2024-01-01").unwrap(), 50, &[]);
        counts.record_day(Day::parse("2024-02-29").unwrap(), 50, &[]);
        counts.record_day(jan, 50, &[("悲しい", 4), ("怒り", 4)]);
        counts.record_day(feb, 50, &[("悲しい", 3), ("怒り", 12)]);
        counts
    }

    #[test]
    fn prune_removes_words_below_threshold_in_every_month() {
        let lex = sample_lexicon();
        let (pruned, removed) = prune_low_frequency(&lex, &counts_for_prune(), 5).unwrap();
        assert!(removed.contains(&"悲しい".to_owned()));
        assert!(!removed.contains(&"怒り".to_owned()));
        assert!(pruned.words_for(EmotionCategory::Anger).any(|e| e.word == "怒り"));
        assert!(!pruned
            .words_for(EmotionCategory::Depression)
            .any(|e| e.word == "悲しい"));
    }

    #[test]
    fn prune_is_idempotent_and_only_shrinks() {
        let lex = sample_lexicon();
        let counts = counts_for_prune();
        let (once, removed_once) = prune_low_frequency(&lex, &counts, 5).unwrap();
        assert_eq!(once.entries().len() + removed_once.len(), lex.entries().len());
        let (twice, removed_twice) = prune_low_frequency(&once, &counts, 5).unwrap();
        assert!(removed_twice.is_empty());
        assert_eq!(once, twice);
    }

    #[test]
    fn prune_with_zero_threshold_removes_nothing() {
        let lex = sample_lexicon();
        let (pruned, removed) = prune_low_frequency(&lex, &counts_for_prune(), 0).unwrap();
        assert!(removed.is_empty());
        assert_eq!(pruned, lex);
    }

    #[test]
    fn prune_requires_a_complete_month() {
        let mut counts = DailyCounts::new();
        counts.record_day(Day::parse("2024-01-15").unwrap(), 10, &[("怒り", 6)]);
        counts.record_day(Day::parse("2024-02-10").unwrap(), 10, &[("怒り", 6)]);
        assert_eq!(
            prune_low_frequency(&sample_lexicon(), &counts, 5).unwrap_err(),
            PruneError::NoCompleteMonth
        );
    }
}
