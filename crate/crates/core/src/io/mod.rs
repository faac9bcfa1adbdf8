//! On-disk formats.
//!
//! | file            | content                                                         |
//! |-----------------|-----------------------------------------------------------------|
//! | `<doc>.txt`       | UTF-8 document text                                           |
//! | `<doc>.tok`       | `start\tend\tsurface[\tPOS]` per token, blank line between sentences |
//! | `<doc>.chk`       | `first\tlast\tLABEL` per chunk (token indices), blank line ends a sentence |
//! | `<doc>.ptb`       | one bracketed tree per line, leaves `(POS word)`              |
//! | `<doc>.ann`       | standoff `T`/`A`/`G`/`R` lines                                |
//! | `<doc>.meta.json` | optional document type, sections and sentence spans          |
//!
//! Lines starting with `#` are comments in every line-oriented format.
//! Offsets are code points. Serializers emit a one-line header comment and
//! canonical order, so `serialize(parse(serialize(x))) == serialize(x)`.

mod bundle;
mod chunk;
mod ptb;
mod standoff;
mod tok;

use std::fmt;

pub use bundle::{
    load_annotation_set, load_corpus, load_document_annotations, Bundle, BundleError, DocumentMeta, SectionMeta,
};
pub use chunk::{parse_chunk_file, serialize_chunks};
pub use ptb::{check_tree_alignment, parse_tree_file, parse_tree_line, serialize_trees};
pub use standoff::{parse_standoff, serialize_standoff};
pub use tok::{parse_token_file, serialize_tokens};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    InvalidUtf8,
    /// Wrong number of columns or fields.
    MalformedLine(String),
    InvalidNumber(String),
    UnknownPosLabel(String),
    UnknownSyntacticLabel(String),
    UnknownEntityType(String),
    UnknownAssertion(String),
    UnknownRelationType(String),
    NonMonotonicSpan {
        start: usize,
        end: usize,
    },
    Unbalanced,
    MalformedTree(String),
    DuplicateId(String),
    DuplicateAssertion(String),
    DanglingReference(String),
    MalformedOffsets(String),
    LeafMismatch {
        leaves: usize,
        tokens: usize,
    },
    TreeCount {
        trees: usize,
        sentences: usize,
    },
}

impl ParseErrorKind {
    /// Stable kebab-case code.
    pub fn code(&self) -> &'static str {
        match self {
            ParseErrorKind::InvalidUtf8 => "invalid-utf8",
            ParseErrorKind::MalformedLine(_) => "malformed-line",
            ParseErrorKind::InvalidNumber(_) => "invalid-number",
            ParseErrorKind::UnknownPosLabel(_) => "unknown-pos-label",
            ParseErrorKind::UnknownSyntacticLabel(_) => "unknown-syntactic-label",
            ParseErrorKind::UnknownEntityType(_) => "unknown-entity-type",
            ParseErrorKind::UnknownAssertion(_) => "unknown-assertion",
            ParseErrorKind::UnknownRelationType(_) => "unknown-relation-type",
            ParseErrorKind::NonMonotonicSpan { .. } => "non-monotonic-span",
            ParseErrorKind::Unbalanced => "unbalanced",
            ParseErrorKind::MalformedTree(_) => "malformed-tree",
            ParseErrorKind::DuplicateId(_) => "duplicate-id",
            ParseErrorKind::DuplicateAssertion(_) => "duplicate-assertion",
            ParseErrorKind::DanglingReference(_) => "dangling-reference",
            ParseErrorKind::MalformedOffsets(_) => "malformed-offsets",
            ParseErrorKind::LeafMismatch { .. } => "leaf-mismatch",
            ParseErrorKind::TreeCount { .. } => "tree-count",
        }
    }

    fn detail(&self) -> Option<String> {
        match self {
            ParseErrorKind::InvalidUtf8 | ParseErrorKind::Unbalanced => None,
            ParseErrorKind::MalformedLine(s)
            | ParseErrorKind::InvalidNumber(s)
            | ParseErrorKind::UnknownPosLabel(s)
            | ParseErrorKind::UnknownSyntacticLabel(s)
            | ParseErrorKind::UnknownEntityType(s)
            | ParseErrorKind::UnknownAssertion(s)
            | ParseErrorKind::UnknownRelationType(s)
            | ParseErrorKind::MalformedTree(s)
            | ParseErrorKind::DuplicateId(s)
            | ParseErrorKind::DuplicateAssertion(s)
            | ParseErrorKind::DanglingReference(s)
            | ParseErrorKind::MalformedOffsets(s) => Some(s.clone()),
            ParseErrorKind::NonMonotonicSpan { start, end } => Some(format!("[{},{})", start, end)),
            ParseErrorKind::LeafMismatch { leaves, tokens } => Some(format!("{} leaves vs {} tokens", leaves, tokens)),
            ParseErrorKind::TreeCount { trees, sentences } => {
                Some(format!("{} trees vs {} sentences", trees, sentences))
            }
        }
    }
}

/// A format error located at a 1-based line.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub(crate) fn new(line: usize, kind: ParseErrorKind) -> Self {
        ParseError { line, kind }
    }

    pub fn code(&self) -> &'static str {
        self.kind.code()
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind.code())?;
        if let Some(d) = self.kind.detail() {
            write!(f, " {}", d)?;
        }
        write!(f, " at line {}", self.line)
    }
}

/// Decode UTF-8, reporting the line of the first invalid byte.
pub(crate) fn decode(bytes: &[u8]) -> Result<&str, ParseError> {
    std::str::from_utf8(bytes).map_err(|e| {
        let line = bytes[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count() + 1;
        ParseError::new(line, ParseErrorKind::InvalidUtf8)
    })
}

pub(crate) fn is_comment(line: &str) -> bool {
    line.starts_with('#')
}

pub(crate) fn parse_usize(field: &str, line: usize) -> Result<usize, ParseError> {
    if field.is_empty() || !field.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseError::new(line, ParseErrorKind::InvalidNumber(field.to_string())));
    }
    field.parse().map_err(|_| ParseError::new(line, ParseErrorKind::InvalidNumber(field.to_string())))
}
