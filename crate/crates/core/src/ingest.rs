//! Post filtering, word matching, and daily count aggregation.
//!
//! Matching is plain substring containment on NFKC-normalized text: the
//! pipeline counts posts *containing* a dictionary word, once per post
//! regardless of how often the word occurs. A compiled [`Matcher`] runs
//! all surface forms in a single automaton pass; it is required to be
//! observationally identical to a naive per-word `contains` scan, and
//! the test suites hold it to that.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use aho_corasick::AhoCorasick;
use thiserror::Error;

use crate::date::Day;
use crate::lexicon::Lexicon;
use crate::text::nfkc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceClass {
    Individual,
    MassMedia,
    Unknown,
}

/// One post, as far as the pipeline cares.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PostRecord {
    pub id: String,
    /// Unix timestamp of the post (UTC). Bucketing into calendar days
    /// happens at aggregation time under the caller's day boundary.
    pub epoch_seconds: i64,
    pub text: String,
    pub is_reply: bool,
    pub is_retweet: bool,
    pub has_url: bool,
    pub source: SourceClass,
}

/// How the daily total `w_all(t)` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TotalMode {
    /// Count every surviving post. Available when the whole corpus is local.
    Direct,
    /// Count surviving posts containing any proxy phrase (e.g. punctuation
    /// marks), standing in for an unavailable true total.
    Proxy,
}

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum AggregateError {
    #[error("no posts survived filtering")]
    EmptyCorpus,
}

/// Per-day post counts: `total` posts and per-head-word post counts.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DayCounts {
    pub total: u64,
    pub words: BTreeMap<String, u64>,
}

/// Daily per-word post counts `w_k(t)` plus daily totals `w_all(t)`.
///
/// Days never observed are simply absent — a gap, not a zero. A day may
/// exist with `total == 0` (proxy mode when no surviving post contained
/// a proxy phrase); downstream index computation treats that day as a
/// gap too, since the ratio denominator is unusable.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DailyCounts {
    days: BTreeMap<Day, DayCounts>,
}

impl DailyCounts {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds counts for one day (pointwise accumulation).
    pub fn record_day(&mut self, day: Day, total: u64, words: &[(&str, u64)]) {
        let entry = self.days.entry(day).or_default();
        entry.total += total;
        for (word, count) in words {
            *entry.words.entry(String::from(*word)).or_insert(0) += count;
        }
    }

    fn add_post(&mut self, day: Day, counts_toward_total: bool, words: BTreeSet<&str>) {
        let entry = self.days.entry(day).or_default();
        if counts_toward_total {
            entry.total += 1;
        }
        for word in words {
            *entry.words.entry(String::from(word)).or_insert(0) += 1;
        }
    }

    pub fn word_count(&self, day: Day, word: &str) -> u64 {
        self.days
            .get(&day)
            .and_then(|d| d.words.get(word).copied())
            .unwrap_or(0)
    }

    pub fn total(&self, day: Day) -> Option<u64> {
        self.days.get(&day).map(|d| d.total)
    }

    pub fn days(&self) -> impl Iterator<Item = Day> + '_ {
        self.days.keys().copied()
    }

    pub fn day_counts(&self) -> impl Iterator<Item = (Day, &DayCounts)> {
        self.days.iter().map(|(d, c)| (*d, c))
    }

    pub fn first_day(&self) -> Option<Day> {
        self.days.keys().next().copied()
    }

    pub fn last_day(&self) -> Option<Day> {
        self.days.keys().next_back().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.days.is_empty()
    }

    /// Every word that appears anywhere in the table.
    pub fn vocabulary(&self) -> BTreeSet<&str> {
        self.days
            .values()
            .flat_map(|d| d.words.keys().map(String::as_str))
            .collect()
    }

    /// Pointwise addition; associative and commutative, so partial
    /// counts from parallel shards merge to the same result in any order.
    pub fn merge(&mut self, other: DailyCounts) {
        for (day, counts) in other.days {
            let entry = self.days.entry(day).or_default();
            entry.total += counts.total;
            for (word, count) in counts.words {
                *entry.words.entry(word).or_insert(0) += count;
            }
        }
    }
}

/// Compiled matcher for a lexicon: one automaton over every surface form
/// (head words and variants), plus automatons for exclusion terms and
/// proxy phrases. Patterns were NFKC-normalized by the lexicon; text is
/// normalized here before matching.
#[derive(Debug)]
pub struct Matcher {
    heads: Vec<String>,
    pattern_head: Vec<usize>,
    surfaces: Option<AhoCorasick>,
    exclusions: Option<AhoCorasick>,
    proxies: Option<AhoCorasick>,
}

fn automaton(patterns: &[String]) -> Option<AhoCorasick> {
    if patterns.is_empty() {
        None
    } else {
        // patterns are non-empty validated strings; construction cannot fail
        Some(AhoCorasick::new(patterns).expect("valid patterns"))
    }
}

impl Matcher {
    pub fn new(lexicon: &Lexicon) -> Self {
        let mut heads = Vec::new();
        let mut pattern_head = Vec::new();
        let mut patterns = Vec::new();
        for entry in lexicon.entries() {
            let head_idx = heads.len();
            heads.push(entry.word.clone());
            patterns.push(entry.word.clone());
            pattern_head.push(head_idx);
            for variant in &entry.variants {
                patterns.push(variant.clone());
                pattern_head.push(head_idx);
            }
        }
        Matcher {
            heads,
            pattern_head,
            surfaces: automaton(&patterns),
            exclusions: automaton(lexicon.exclusion_terms()),
            proxies: automaton(lexicon.proxy_phrases()),
        }
    }

    /// Head words whose surface form or any variant occurs as a
    /// substring of `text`. Each head word appears at most once no
    /// matter how many times or through how many variants it occurs.
    pub fn match_words(&self, text: &str) -> BTreeSet<&str> {
        self.match_normalized(&nfkc(text))
    }

    fn match_normalized(&self, text: &str) -> BTreeSet<&str> {
        let mut found = BTreeSet::new();
        if let Some(ac) = &self.surfaces {
            // overlapping search: a pattern nested inside another must
            // still be reported
            for m in ac.find_overlapping_iter(text) {
                found.insert(self.heads[self.pattern_head[m.pattern().as_usize()]].as_str());
                if found.len() == self.heads.len() {
                    break;
                }
            }
        }
        found
    }

    pub fn is_excluded(&self, text: &str) -> bool {
        self.excluded_normalized(&nfkc(text))
    }

    fn excluded_normalized(&self, text: &str) -> bool {
        self.exclusions.as_ref().is_some_and(|ac| ac.is_match(text))
    }

    pub fn has_proxy(&self, text: &str) -> bool {
        self.proxy_normalized(&nfkc(text))
    }

    fn proxy_normalized(&self, text: &str) -> bool {
        self.proxies.as_ref().is_some_and(|ac| ac.is_match(text))
    }
}

/// Returns `true` when the post should be kept: not mass media, no URL,
/// not a reply or retweet, and no exclusion term in the text.
pub fn filter_post(post: &PostRecord, matcher: &Matcher) -> bool {
    post.source != SourceClass::MassMedia
        && !post.has_url
        && !post.is_reply
        && !post.is_retweet
        && !matcher.is_excluded(&post.text)
}

/// Aggregates a post stream into [`DailyCounts`].
///
/// Posts failing [`filter_post`] are dropped before both word counting
/// and total counting; survivors are bucketed into calendar days by
/// `day_of` applied to their timestamp. Input order does not matter.
pub fn aggregate<I, F>(
    posts: I,
    matcher: &Matcher,
    mode: TotalMode,
    day_of: F,
) -> Result<DailyCounts, AggregateError>
where
    I: IntoIterator<Item = PostRecord>,
    F: Fn(i64) -> Day,
{
    let mut counts = DailyCounts::new();
    for post in posts {
        if post.source == SourceClass::MassMedia
            || post.has_url
            || post.is_reply
            || post.is_retweet
        {
            continue;
        }
        let text = nfkc(&post.text);
        if matcher.excluded_normalized(&text) {
            continue;
        }
        let day = day_of(post.epoch_seconds);
        let in_total = match mode {
            TotalMode::Direct => true,
            TotalMode::Proxy => matcher.proxy_normalized(&text),
        };
        counts.add_post(day, in_total, matcher.match_normalized(&text));
    }
    if counts.is_empty() {
        return Err(AggregateError::EmptyCorpus);
    }
    Ok(counts)
}
