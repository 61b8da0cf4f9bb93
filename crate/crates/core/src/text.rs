//! Tokenization and stop-word filtering.
//!
//! Terms are ASCII-lowercase alphanumeric runs: input is split on every
//! byte that is not `[a-zA-Z0-9]`, so punctuation, underscores, and any
//! non-ASCII character act as separators.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

/// Filename extensions that carry no semantics and are dropped from
/// filename-derived terms.
const IMAGE_EXTENSIONS: &[&str] = &["jpg", "jpeg", "png", "gif", "bmp", "ppm"];

const DEFAULT_ENGLISH: &str = include_str!("../data/stopwords_en.txt");

/// A set of words removed from every token stream.
#[derive(Debug, Clone, Default)]
pub struct StopWords(BTreeSet<String>);

impl StopWords {
    /// An empty set; nothing is filtered.
    pub fn none() -> Self {
        StopWords(BTreeSet::new())
    }

    /// The built-in English list (~120 function words).
    pub fn default_english() -> Self {
        Self::parse(DEFAULT_ENGLISH)
    }

    /// Parse the stop-word file format: one word per line, `#` starts a
    /// comment line, blank lines ignored. Words are lowercased.
    pub fn parse(text: &str) -> Self {
        let mut set = BTreeSet::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            set.insert(line.to_ascii_lowercase());
        }
        StopWords(set)
    }

    pub fn from_words<'a, I: IntoIterator<Item = &'a str>>(words: I) -> Self {
        StopWords(words.into_iter().map(|w| w.to_ascii_lowercase()).collect())
    }

    pub fn contains(&self, term: &str) -> bool {
        self.0.contains(term)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Split into lowercase alphanumeric tokens, keeping stop words.
/// Order and duplicates are preserved.
pub fn raw_tokens(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for ch in text.chars() {
        if ch.is_ascii_alphanumeric() {
            current.push(ch.to_ascii_lowercase());
        } else if !current.is_empty() {
            tokens.push(core::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

/// Tokenize and drop stop words. Empty tokens never occur; duplicates and
/// order are preserved because frequencies matter downstream.
pub fn tokenize(text: &str, stopwords: &StopWords) -> Vec<String> {
    let mut tokens = raw_tokens(text);
    tokens.retain(|t| !stopwords.contains(t));
    tokens
}

/// Terms derived from an image filename: tokenize, drop a trailing token
/// that is a known image extension, then filter stop words.
pub fn filename_terms(filename: &str, stopwords: &StopWords) -> Vec<String> {
    let mut tokens = raw_tokens(filename);
    if let Some(last) = tokens.last() {
        if IMAGE_EXTENSIONS.contains(&last.as_str()) {
            tokens.pop();
        }
    }
    tokens.retain(|t| !stopwords.contains(t));
    tokens
}
