//! Unicode normalization shared by the lexicon and matching paths.
//!
//! Everything that is ever compared as text — dictionary words, variants,
//! exclusion terms, proxy phrases, and post bodies — goes through NFKC
//! first. Japanese text mixes full-width and half-width forms of the same
//! characters, and without a single normalization point the same word
//! silently splits into separate counters.

use alloc::borrow::Cow;
use alloc::string::String;

use unicode_normalization::{is_nfkc_quick, IsNormalized, UnicodeNormalization};

/// NFKC-normalize, reusing the input when it is already normalized.
pub fn nfkc(s: &str) -> Cow<'_, str> {
    match is_nfkc_quick(s.chars()) {
        IsNormalized::Yes => Cow::Borrowed(s),
        _ => Cow::Owned(s.nfkc().collect::<String>()),
    }
}

/// NFKC-normalize into an owned string.
pub fn nfkc_owned(s: &str) -> String {
    nfkc(s).into_owned()
}
