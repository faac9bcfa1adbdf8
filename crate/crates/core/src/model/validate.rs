//! Structural validation of an annotation set against its document.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use super::{
    assertion_valid, AnnotationSet, ChunkLayer, Document, DocumentAnnotations, Endpoint, Entity, SemanticLayer,
    TokenLayer, TreeLayer,
};
use crate::text::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Layer {
    Document,
    Token,
    Chunk,
    Tree,
    Entity,
    Group,
    Relation,
}

impl Layer {
    pub fn as_str(self) -> &'static str {
        match self {
            Layer::Document => "document",
            Layer::Token => "token",
            Layer::Chunk => "chunk",
            Layer::Tree => "tree",
            Layer::Entity => "entity",
            Layer::Group => "group",
            Layer::Relation => "relation",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Rule {
    SectionOrder,
    UnknownSection,
    SentenceOrder,
    SentenceOutsideSection,
    EmptySpan,
    SpanOutOfRange,
    SurfaceMismatch,
    TokenOrder,
    TokenGap,
    SentenceMismatch,
    MissingAssertion,
    UnexpectedAssertion,
    InvalidAssertion,
    DuplicateId,
    DuplicateAnnotation,
    DanglingReference,
    EmptyGroup,
    HeterogeneousGroup,
    CrossSentence,
    SignatureMismatch,
    ChunkOutOfRange,
    ChunkOverlap,
    ChunkSentenceCount,
    TreeCount,
    EmptyNode,
    LeafMismatch,
}

impl Rule {
    pub fn as_str(self) -> &'static str {
        match self {
            Rule::SectionOrder => "section-order",
            Rule::UnknownSection => "unknown-section",
            Rule::SentenceOrder => "sentence-order",
            Rule::SentenceOutsideSection => "sentence-outside-section",
            Rule::EmptySpan => "empty-span",
            Rule::SpanOutOfRange => "span-out-of-range",
            Rule::SurfaceMismatch => "surface-mismatch",
            Rule::TokenOrder => "token-order",
            Rule::TokenGap => "token-gap",
            Rule::SentenceMismatch => "sentence-mismatch",
            Rule::MissingAssertion => "missing-assertion",
            Rule::UnexpectedAssertion => "unexpected-assertion",
            Rule::InvalidAssertion => "invalid-assertion",
            Rule::DuplicateId => "duplicate-id",
            Rule::DuplicateAnnotation => "duplicate-annotation",
            Rule::DanglingReference => "dangling-reference",
            Rule::EmptyGroup => "empty-group",
            Rule::HeterogeneousGroup => "heterogeneous-group",
            Rule::CrossSentence => "cross-sentence",
            Rule::SignatureMismatch => "signature-mismatch",
            Rule::ChunkOutOfRange => "chunk-out-of-range",
            Rule::ChunkOverlap => "chunk-overlap",
            Rule::ChunkSentenceCount => "chunk-sentence-count",
            Rule::TreeCount => "tree-count",
            Rule::EmptyNode => "empty-node",
            Rule::LeafMismatch => "leaf-mismatch",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub layer: Layer,
    pub location: String,
    pub rule: Rule,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}\t{}\t{}\t{}\t{}", sev, self.layer.as_str(), self.location, self.rule, self.message)
    }
}

/// The annotation set has no entry for the requested document.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("annotation set `{group}` has no document `{doc}`")]
pub struct UnknownDocument {
    pub group: String,
    pub doc: String,
}

#[derive(Debug, Clone, Default)]
pub struct ValidateOptions {
    /// Allowed section names. Empty means any name.
    pub section_names: Vec<String>,
}

pub fn validate(set: &AnnotationSet, doc: &Document) -> Result<Vec<Diagnostic>, UnknownDocument> {
    validate_with(set, doc, &ValidateOptions::default())
}

pub fn validate_with(
    set: &AnnotationSet,
    doc: &Document,
    opts: &ValidateOptions,
) -> Result<Vec<Diagnostic>, UnknownDocument> {
    let ann = set.get(&doc.id).ok_or_else(|| UnknownDocument { group: set.group_id.clone(), doc: doc.id.clone() })?;
    let mut v = Validator { doc, out: Vec::new() };
    v.document(opts);
    v.annotations(ann);
    v.out.sort();
    Ok(v.out)
}

struct Validator<'a> {
    doc: &'a Document,
    out: Vec<Diagnostic>,
}

impl Validator<'_> {
    fn push(&mut self, layer: Layer, location: impl Into<String>, rule: Rule, message: String) {
        let severity = match rule {
            Rule::DuplicateAnnotation => Severity::Warning,
            _ => Severity::Error,
        };
        self.out.push(Diagnostic { severity, layer, location: location.into(), rule, message });
    }

    fn check_span(&mut self, layer: Layer, loc: &str, span: Span, surface: &str) {
        if span.is_empty() {
            self.push(layer, loc, Rule::EmptySpan, format!("span {} is empty", span));
            return;
        }
        match self.doc.text.slice(span) {
            None => self.push(
                layer,
                loc,
                Rule::SpanOutOfRange,
                format!("span {} exceeds text length {}", span, self.doc.text.char_len()),
            ),
            Some(slice) if slice != surface => self.push(
                layer,
                loc,
                Rule::SurfaceMismatch,
                format!("surface `{}` but text at {} is `{}`", surface, span, slice),
            ),
            Some(_) => {}
        }
    }

    fn document(&mut self, opts: &ValidateOptions) {
        let len = self.doc.text.char_len();
        let mut prev_end = 0;
        for (i, s) in self.doc.sections.iter().enumerate() {
            let loc = format!("section {}", i);
            if s.span.is_empty() || s.span.end > len || s.span.start < prev_end {
                self.push(
                    Layer::Document,
                    &loc,
                    Rule::SectionOrder,
                    format!("section `{}` at {} is empty, out of range or overlaps its predecessor", s.name, s.span),
                );
            }
            prev_end = prev_end.max(s.span.end);
            if !opts.section_names.is_empty() && !opts.section_names.contains(&s.name) {
                self.push(
                    Layer::Document,
                    &loc,
                    Rule::UnknownSection,
                    format!("section name `{}` is not in the configured vocabulary", s.name),
                );
            }
        }
        let mut prev_end = 0;
        for (i, s) in self.doc.sentences.iter().enumerate() {
            let loc = format!("sentence {}", i);
            if s.is_empty() || s.end > len || s.start < prev_end {
                self.push(
                    Layer::Document,
                    &loc,
                    Rule::SentenceOrder,
                    format!("sentence {} is empty, out of range or overlaps its predecessor", s),
                );
            }
            prev_end = prev_end.max(s.end);
            if !self.doc.sections.is_empty() && !self.doc.sections.iter().any(|sec| sec.span.contains(s)) {
                self.push(
                    Layer::Document,
                    &loc,
                    Rule::SentenceOutsideSection,
                    format!("sentence {} is not inside a single section", s),
                );
            }
        }
    }

    fn annotations(&mut self, ann: &DocumentAnnotations) {
        if let Some(tokens) = &ann.tokens {
            self.tokens(tokens);
        }
        if let Some(chunks) = &ann.chunks {
            self.chunks(chunks, ann.tokens.as_ref());
        }
        if let Some(trees) = &ann.trees {
            self.trees(trees, ann.tokens.as_ref());
        }
        let sentences = if !self.doc.sentences.is_empty() {
            self.doc.sentences.clone()
        } else {
            ann.tokens.as_ref().map(TokenLayer::sentence_spans).unwrap_or_default()
        };
        if let Some(sem) = &ann.semantic {
            self.semantic(sem, &sentences);
        }
    }

    fn tokens(&mut self, layer: &TokenLayer) {
        let doc_sentences: HashSet<Span> = self.doc.sentences.iter().copied().collect();
        let mut prev_end = 0;
        for (si, sentence) in layer.sentences.iter().enumerate() {
            for (ti, tok) in sentence.iter().enumerate() {
                let loc = format!("sentence {} token {}", si, ti);
                if tok.span.start < prev_end {
                    self.push(
                        Layer::Token,
                        &loc,
                        Rule::TokenOrder,
                        format!("token {} starts before the previous token ends at {}", tok.span, prev_end),
                    );
                } else if ti > 0 && tok.span.start > prev_end {
                    let gap = self.doc.text.slice(Span::new(prev_end, tok.span.start));
                    if !gap.is_some_and(|g| g.chars().all(char::is_whitespace)) {
                        self.push(
                            Layer::Token,
                            &loc,
                            Rule::TokenGap,
                            format!("characters [{},{}) are not covered by any token", prev_end, tok.span.start),
                        );
                    }
                }
                self.check_span(Layer::Token, &loc, tok.span, &tok.surface);
                prev_end = prev_end.max(tok.span.end);
            }
            if let (Some(first), Some(last)) = (sentence.first(), sentence.last()) {
                let range = Span::new(first.span.start, last.span.end);
                if !self.doc.sentences.is_empty() && !doc_sentences.contains(&range) {
                    self.push(
                        Layer::Token,
                        format!("sentence {}", si),
                        Rule::SentenceMismatch,
                        format!("tokens cover {} which is not a document sentence", range),
                    );
                }
            }
        }
    }

    fn chunks(&mut self, layer: &ChunkLayer, tokens: Option<&TokenLayer>) {
        if let Some(tokens) = tokens {
            if layer.sentences.len() != tokens.sentences.len() {
                self.push(
                    Layer::Chunk,
                    "layer",
                    Rule::ChunkSentenceCount,
                    format!("{} chunk sentences but {} token sentences", layer.sentences.len(), tokens.sentences.len()),
                );
            }
        }
        for (si, sentence) in layer.sentences.iter().enumerate() {
            let n_tokens = tokens.and_then(|t| t.sentences.get(si)).map(Vec::len);
            let mut sorted: Vec<_> = sentence.iter().enumerate().collect();
            sorted.sort_by_key(|(_, c)| (c.first, c.last));
            let mut prev_last = 0;
            for (ci, c) in sorted {
                let loc = format!("sentence {} chunk {}", si, ci);
                if c.first >= c.last {
                    self.push(Layer::Chunk, &loc, Rule::EmptySpan, format!("chunk [{},{}) is empty", c.first, c.last));
                    continue;
                }
                if let Some(n) = n_tokens {
                    if c.last > n {
                        self.push(
                            Layer::Chunk,
                            &loc,
                            Rule::ChunkOutOfRange,
                            format!("chunk [{},{}) exceeds {} tokens", c.first, c.last, n),
                        );
                    }
                }
                if c.first < prev_last {
                    self.push(
                        Layer::Chunk,
                        &loc,
                        Rule::ChunkOverlap,
                        format!("chunk [{},{}) overlaps a preceding chunk", c.first, c.last),
                    );
                }
                prev_last = prev_last.max(c.last);
            }
        }
    }

    fn trees(&mut self, layer: &TreeLayer, tokens: Option<&TokenLayer>) {
        for (i, tree) in layer.trees.iter().enumerate() {
            if tree.has_empty_phrase() {
                self.push(Layer::Tree, format!("tree {}", i), Rule::EmptyNode, "phrase node without children".into());
            }
        }
        let Some(tokens) = tokens else { return };
        if layer.trees.len() != tokens.sentences.len() {
            self.push(
                Layer::Tree,
                "layer",
                Rule::TreeCount,
                format!("{} trees but {} token sentences", layer.trees.len(), tokens.sentences.len()),
            );
        }
        for (i, (tree, sentence)) in layer.trees.iter().zip(&tokens.sentences).enumerate() {
            let leaves = tree.leaves();
            let aligned =
                leaves.len() == sentence.len() && leaves.iter().zip(sentence).all(|((_, w), t)| *w == t.surface);
            if !aligned {
                self.push(
                    Layer::Tree,
                    format!("tree {}", i),
                    Rule::LeafMismatch,
                    format!("{} leaves do not align with {} tokens", leaves.len(), sentence.len()),
                );
            }
        }
    }

    fn semantic(&mut self, sem: &SemanticLayer, sentences: &[Span]) {
        let sentence_of = |span: Span| sentences.iter().position(|s| s.contains(&span));

        let mut ids = HashSet::new();
        let mut seen = HashSet::new();
        for e in &sem.entities {
            if !ids.insert(e.id.as_str()) {
                self.push(Layer::Entity, &e.id, Rule::DuplicateId, format!("id {} is used twice", e.id));
            }
            self.check_span(Layer::Entity, &e.id, e.span, &e.surface);
            match e.assertion {
                None if !e.etype.assertions().is_empty() => self.push(
                    Layer::Entity,
                    &e.id,
                    Rule::MissingAssertion,
                    format!("{} entity has no assertion", e.etype),
                ),
                Some(a) if e.etype.assertions().is_empty() => self.push(
                    Layer::Entity,
                    &e.id,
                    Rule::UnexpectedAssertion,
                    format!("{} entities carry no assertion, found {}", e.etype, a),
                ),
                Some(a) if !assertion_valid(e.etype, a) => self.push(
                    Layer::Entity,
                    &e.id,
                    Rule::InvalidAssertion,
                    format!("assertion {} is not valid for {}", a, e.etype),
                ),
                _ => {}
            }
            if !seen.insert((e.span, e.etype, e.assertion)) {
                self.push(
                    Layer::Entity,
                    &e.id,
                    Rule::DuplicateAnnotation,
                    "same span, type and assertion as an earlier entity".to_string(),
                );
            }
            if sentences.iter().filter(|s| s.overlaps(&e.span)).count() > 1 {
                self.push(
                    Layer::Entity,
                    &e.id,
                    Rule::CrossSentence,
                    format!("span {} crosses a sentence boundary", e.span),
                );
            }
        }

        let entities: HashMap<&str, &Entity> = sem.entities.iter().map(|e| (e.id.as_str(), e)).collect();
        let mut group_ids = HashSet::new();
        for g in &sem.groups {
            if !group_ids.insert(g.id.as_str()) {
                self.push(Layer::Group, &g.id, Rule::DuplicateId, format!("id {} is used twice", g.id));
            }
            if g.members.is_empty() {
                self.push(Layer::Group, &g.id, Rule::EmptyGroup, "group has no members".into());
            }
            let mut member_sentences = BTreeSet::new();
            for m in &g.members {
                match entities.get(m.as_str()) {
                    None => {
                        self.push(Layer::Group, &g.id, Rule::DanglingReference, format!("member {} does not exist", m))
                    }
                    Some(e) => {
                        if e.etype != g.etype {
                            self.push(
                                Layer::Group,
                                &g.id,
                                Rule::HeterogeneousGroup,
                                format!("member {} is a {} in a {} group", m, e.etype, g.etype),
                            );
                        }
                        if let Some(s) = sentence_of(e.span) {
                            member_sentences.insert(s);
                        }
                    }
                }
            }
            if member_sentences.len() > 1 {
                self.push(
                    Layer::Group,
                    &g.id,
                    Rule::CrossSentence,
                    format!("members span sentences {:?}", member_sentences),
                );
            }
        }

        let groups: HashMap<&str, _> = sem.groups.iter().map(|g| (g.id.as_str(), g)).collect();
        let mut rel_ids = HashSet::new();
        let mut rel_seen = HashSet::new();
        for r in &sem.relations {
            if !rel_ids.insert(r.id.as_str()) {
                self.push(Layer::Relation, &r.id, Rule::DuplicateId, format!("id {} is used twice", r.id));
            }
            let (t1, t2) = r.rtype.signature();
            let mut rel_sentences = BTreeSet::new();
            let mut keys = Vec::new();
            for (ep, want, role) in [(&r.arg1, t1, "arg1"), (&r.arg2, t2, "arg2")] {
                let members: Vec<&str> = match ep {
                    Endpoint::Entity(id) => vec![id.as_str()],
                    Endpoint::Group(id) => match groups.get(id.as_str()) {
                        Some(g) => g.members.iter().map(String::as_str).collect(),
                        None => {
                            self.push(
                                Layer::Relation,
                                &r.id,
                                Rule::DanglingReference,
                                format!("{} {} does not exist", role, id),
                            );
                            continue;
                        }
                    },
                };
                let mut key = BTreeSet::new();
                for m in members {
                    let Some(e) = entities.get(m) else {
                        self.push(
                            Layer::Relation,
                            &r.id,
                            Rule::DanglingReference,
                            format!("{} entity {} does not exist", role, m),
                        );
                        continue;
                    };
                    if e.etype != want {
                        self.push(
                            Layer::Relation,
                            &r.id,
                            Rule::SignatureMismatch,
                            format!("{} {} needs {} but {} is a {}", r.rtype, role, want, m, e.etype),
                        );
                    }
                    if let Some(s) = sentence_of(e.span) {
                        rel_sentences.insert(s);
                    }
                    key.insert((e.span, e.etype));
                }
                keys.push(key);
            }
            if rel_sentences.len() > 1 {
                self.push(
                    Layer::Relation,
                    &r.id,
                    Rule::CrossSentence,
                    format!("endpoints span sentences {:?}", rel_sentences),
                );
            }
            if !rel_seen.insert((r.rtype, keys)) {
                self.push(
                    Layer::Relation,
                    &r.id,
                    Rule::DuplicateAnnotation,
                    "same type and endpoints as an earlier relation".into(),
                );
            }
        }
    }
}
