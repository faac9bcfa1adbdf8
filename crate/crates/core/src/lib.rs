//! Toolkit for multilayer annotations of Chinese clinical text.
//!
//! The crate covers the syntactic layers (word segmentation, POS tags,
//! chunks, constituency trees) and the semantic layers (entities with
//! assertions, entity groups, relations) of a clinical corpus, together with
//! the machinery used to build such a corpus:
//!
//! - [`model`]: domain types, the closed type systems and structural validation
//! - [`io`]: the on-disk formats (`.tok`, `.chk`, `.ptb`, `.ann`, `.meta.json`)
//! - [`agreement`]: precision / recall / F inter-annotator agreement per layer
//! - [`parseval`]: labeled bracketing comparison of constituency trees
//! - [`groups`]: entity-group resolution and one-to-one relation expansion
//! - [`segment`]: the word-attribute segmentation decision table
//! - [`stats`]: corpus distributions and bundled reference tables
//! - [`workflow`]: iterative annotation rounds, convergence, folds, diffs

pub mod agreement;
pub mod groups;
pub mod io;
pub mod model;
pub mod parseval;
pub mod segment;
pub mod stats;
pub mod text;
pub mod workflow;

pub use agreement::{AgreementConfig, AgreementReport, Counts, MatchPolicy};
pub use model::{
    AnnotationSet, AssertionType, DocType, Document, DocumentAnnotations, Entity, EntityGroup, EntityType, PosTag,
    Relation, RelationType, SemanticLayer, SynTag,
};
pub use parseval::{Bracket, EvalParams, ParseTree};
pub use text::Span;
