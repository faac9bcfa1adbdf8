//! Code-point addressed text.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Half-open `[start, end)` range of Unicode code points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub const fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.start >= self.end
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start < other.end && other.start < self.end
    }

    /// Smallest span covering both.
    pub fn hull(&self, other: &Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{})", self.start, self.end)
    }
}

/// A UTF-8 string with an index of code-point boundaries, so that spans can
/// be sliced in constant time.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CharText {
    text: String,
    // byte offset of every code point, plus text.len() at the end
    boundaries: Vec<usize>,
}

impl CharText {
    pub fn new(text: impl Into<String>) -> Self {
        let text = text.into();
        let mut boundaries: Vec<usize> = text.char_indices().map(|(i, _)| i).collect();
        boundaries.push(text.len());
        CharText { text, boundaries }
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    /// Length in code points.
    pub fn char_len(&self) -> usize {
        self.boundaries.len() - 1
    }

    pub fn slice(&self, span: Span) -> Option<&str> {
        if span.start > span.end || span.end > self.char_len() {
            return None;
        }
        Some(&self.text[self.boundaries[span.start]..self.boundaries[span.end]])
    }
}

/// Number of code points in `s`.
pub fn char_len(s: &str) -> usize {
    s.chars().count()
}

/// Ordering key for identifiers of the form `<letters><digits>`, so that
/// `T2` sorts before `T10`. Other identifiers fall back to plain string order
/// after all numbered ones of the same prefix.
pub fn id_key(id: &str) -> (String, u8, u64, String) {
    let split = id.find(|c: char| c.is_ascii_digit()).unwrap_or(id.len());
    let (prefix, rest) = id.split_at(split);
    match rest.parse::<u64>() {
        Ok(n) if !rest.is_empty() => (prefix.to_string(), 0, n, String::new()),
        _ => (prefix.to_string(), 1, 0, rest.to_string()),
    }
}
