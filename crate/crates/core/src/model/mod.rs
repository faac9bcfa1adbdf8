//! Documents and annotation layers.
//!
//! All offsets are Unicode code points into the document text. Token spans
//! and entity spans use document offsets; chunks use token indices within
//! their sentence.

mod semantic;
mod tagset;
mod validate;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use semantic::{
    assertion_valid, relation_signature, AssertionType, Endpoint, Entity, EntityGroup, EntityType, Relation,
    RelationPair, RelationType, SemanticLayer,
};
pub use tagset::{PosTag, SynTag, UnknownLabel};
pub use validate::{validate, validate_with, Diagnostic, Layer, Rule, Severity, UnknownDocument, ValidateOptions};

use crate::parseval::ParseTree;
use crate::text::{CharText, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DocType {
    DischargeSummary,
    ProgressNote,
}

impl DocType {
    pub fn as_str(self) -> &'static str {
        match self {
            DocType::DischargeSummary => "discharge_summary",
            DocType::ProgressNote => "progress_note",
        }
    }
}

impl std::str::FromStr for DocType {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "discharge_summary" => Ok(DocType::DischargeSummary),
            "progress_note" => Ok(DocType::ProgressNote),
            _ => Err(UnknownLabel { kind: "document type", label: s.to_string() }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    pub name: String,
    pub span: Span,
}

/// A clinical document: text plus the upstream section and sentence
/// segmentation. Sentence boundaries are never recomputed here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub doc_type: Option<DocType>,
    pub text: CharText,
    pub sections: Vec<Section>,
    pub sentences: Vec<Span>,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        Document {
            id: id.into(),
            doc_type: None,
            text: CharText::new(text),
            sections: Vec::new(),
            sentences: Vec::new(),
        }
    }

    pub fn section_text(&self, section: &Section) -> Option<&str> {
        self.text.slice(section.span)
    }

    /// Sentences lying inside `section`.
    pub fn section_sentences<'a>(&'a self, section: &'a Section) -> impl Iterator<Item = &'a Span> {
        self.sentences.iter().filter(move |s| section.span.contains(s))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub span: Span,
    pub surface: String,
    pub pos: Option<PosTag>,
}

/// Segmentation (and optionally POS tags), one token list per sentence.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TokenLayer {
    pub sentences: Vec<Vec<Token>>,
}

impl TokenLayer {
    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Vec::len).sum()
    }

    pub fn tokens(&self) -> impl Iterator<Item = &Token> {
        self.sentences.iter().flatten()
    }

    /// Character range covered by each sentence, first token start to last
    /// token end.
    pub fn sentence_spans(&self) -> Vec<Span> {
        self.sentences.iter().filter_map(|s| Some(Span::new(s.first()?.span.start, s.last()?.span.end))).collect()
    }
}

/// A shallow-parse chunk over token indices `[first, last)` of its sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Chunk {
    pub first: usize,
    pub last: usize,
    pub label: SynTag,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ChunkLayer {
    pub sentences: Vec<Vec<Chunk>>,
}

impl ChunkLayer {
    pub fn chunk_count(&self) -> usize {
        self.sentences.iter().map(Vec::len).sum()
    }
}

/// One constituency tree per sentence.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TreeLayer {
    pub trees: Vec<ParseTree>,
}

/// Every layer one annotator group produced for one document.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DocumentAnnotations {
    pub doc_id: String,
    pub tokens: Option<TokenLayer>,
    pub chunks: Option<ChunkLayer>,
    pub trees: Option<TreeLayer>,
    pub semantic: Option<SemanticLayer>,
}

impl DocumentAnnotations {
    pub fn new(doc_id: impl Into<String>) -> Self {
        DocumentAnnotations { doc_id: doc_id.into(), ..Default::default() }
    }
}

/// One annotator group's annotations over a document collection.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AnnotationSet {
    pub group_id: String,
    pub docs: BTreeMap<String, DocumentAnnotations>,
}

impl AnnotationSet {
    pub fn new(group_id: impl Into<String>) -> Self {
        AnnotationSet { group_id: group_id.into(), docs: BTreeMap::new() }
    }

    pub fn insert(&mut self, ann: DocumentAnnotations) {
        self.docs.insert(ann.doc_id.clone(), ann);
    }

    pub fn get(&self, doc_id: &str) -> Option<&DocumentAnnotations> {
        self.docs.get(doc_id)
    }
}
