use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{check_tree_alignment, parse_chunk_file, parse_standoff, parse_token_file, parse_tree_file, ParseError};
use crate::model::{AnnotationSet, DocType, Document, DocumentAnnotations, Section};
use crate::text::Span;

const LAYER_EXTS: [&str; 4] = ["tok", "chk", "ptb", "ann"];
const META_EXT: &str = ".meta.json";

#[derive(Debug, thiserror::Error)]
pub enum BundleError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Parse { path: PathBuf, source: ParseError },
    #[error("{}: {message}", path.display())]
    Meta { path: PathBuf, message: String },
    #[error("{}: document has layer files but no .txt", path.display())]
    MissingText { path: PathBuf },
}

impl BundleError {
    pub fn path(&self) -> &Path {
        match self {
            BundleError::Io { path, .. }
            | BundleError::Parse { path, .. }
            | BundleError::Meta { path, .. }
            | BundleError::MissingText { path } => path,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionMeta {
    pub name: String,
    pub start: usize,
    pub end: usize,
}

/// Contents of `<doc>.meta.json`. Every field is optional.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DocumentMeta {
    #[serde(default)]
    pub doc_type: Option<DocType>,
    #[serde(default)]
    pub sections: Vec<SectionMeta>,
    #[serde(default)]
    pub sentences: Vec<(usize, usize)>,
}

/// A document with one group's annotations, discovered by shared basename.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bundle {
    pub document: Document,
    pub annotations: DocumentAnnotations,
}

fn read(path: &Path) -> Result<Vec<u8>, BundleError> {
    fs::read(path).map_err(|source| BundleError::Io { path: path.to_path_buf(), source })
}

/// Basenames of every document in `dir` that has at least one known file.
fn discover(dir: &Path, with_text: bool) -> Result<BTreeMap<String, bool>, BundleError> {
    let entries = fs::read_dir(dir).map_err(|source| BundleError::Io { path: dir.to_path_buf(), source })?;
    let mut docs: BTreeMap<String, bool> = BTreeMap::new();
    for entry in entries {
        let entry = entry.map_err(|source| BundleError::Io { path: dir.to_path_buf(), source })?;
        if !entry.path().is_file() {
            continue;
        }
        let name = entry.file_name().to_string_lossy().into_owned();
        if let Some(base) = name.strip_suffix(META_EXT) {
            docs.entry(base.to_string()).or_default();
            continue;
        }
        let Some((base, ext)) = name.rsplit_once('.') else { continue };
        if base.is_empty() {
            continue;
        }
        if ext == "txt" && with_text {
            docs.insert(base.to_string(), true);
        } else if LAYER_EXTS.contains(&ext) {
            docs.entry(base.to_string()).or_default();
        }
    }
    Ok(docs)
}

/// Read whichever layer files exist for `doc_id` in `dir`. Trees are checked
/// against tokens when both are present.
pub fn load_document_annotations(dir: &Path, doc_id: &str) -> Result<DocumentAnnotations, BundleError> {
    let path = |ext: &str| dir.join(format!("{}.{}", doc_id, ext));
    let parse_err = |p: PathBuf| move |source| BundleError::Parse { path: p, source };
    let mut ann = DocumentAnnotations::new(doc_id);
    let p = path("tok");
    if p.is_file() {
        ann.tokens = Some(parse_token_file(&read(&p)?).map_err(parse_err(p))?);
    }
    let p = path("chk");
    if p.is_file() {
        ann.chunks = Some(parse_chunk_file(&read(&p)?).map_err(parse_err(p))?);
    }
    let p = path("ptb");
    if p.is_file() {
        let trees = parse_tree_file(&read(&p)?).map_err(parse_err(p.clone()))?;
        if let Some(tokens) = &ann.tokens {
            check_tree_alignment(&trees, tokens).map_err(parse_err(p))?;
        }
        ann.trees = Some(trees);
    }
    let p = path("ann");
    if p.is_file() {
        ann.semantic = Some(parse_standoff(&read(&p)?).map_err(parse_err(p))?);
    }
    Ok(ann)
}

fn load_meta(path: &Path) -> Result<DocumentMeta, BundleError> {
    let bytes = read(path)?;
    serde_json::from_slice(&bytes).map_err(|e| BundleError::Meta { path: path.to_path_buf(), message: e.to_string() })
}

/// Load the document text and optional metadata for `doc_id`.
pub fn load_document(dir: &Path, doc_id: &str) -> Result<Document, BundleError> {
    let txt = dir.join(format!("{}.txt", doc_id));
    if !txt.is_file() {
        return Err(BundleError::MissingText { path: txt });
    }
    let bytes = read(&txt)?;
    let text = super::decode(&bytes).map_err(|source| BundleError::Parse { path: txt.clone(), source })?.to_string();
    let mut doc = Document::new(doc_id, text);
    let meta_path = dir.join(format!("{}{}", doc_id, META_EXT));
    if meta_path.is_file() {
        let meta = load_meta(&meta_path)?;
        for (s, e) in meta.sentences.iter().copied().chain(meta.sections.iter().map(|s| (s.start, s.end))) {
            if s >= e {
                return Err(BundleError::Meta { path: meta_path, message: format!("empty range [{},{})", s, e) });
            }
        }
        doc.doc_type = meta.doc_type;
        doc.sections =
            meta.sections.into_iter().map(|s| Section { name: s.name, span: Span::new(s.start, s.end) }).collect();
        doc.sentences = meta.sentences.into_iter().map(|(s, e)| Span::new(s, e)).collect();
    }
    Ok(doc)
}

/// Every document in `dir` that has a `.txt` file, with its layers.
pub fn load_corpus(dir: &Path) -> Result<Vec<Bundle>, BundleError> {
    let mut out = Vec::new();
    for (doc_id, has_text) in discover(dir, true)? {
        if !has_text {
            return Err(BundleError::MissingText { path: dir.join(format!("{}.txt", doc_id)) });
        }
        let document = load_document(dir, &doc_id)?;
        let annotations = load_document_annotations(dir, &doc_id)?;
        out.push(Bundle { document, annotations });
    }
    Ok(out)
}

/// One group's layers for every document in `dir`. Text files are not
/// required.
pub fn load_annotation_set(dir: &Path, group_id: &str) -> Result<AnnotationSet, BundleError> {
    let mut set = AnnotationSet::new(group_id);
    for doc_id in discover(dir, false)?.into_keys() {
        set.insert(load_document_annotations(dir, &doc_id)?);
    }
    Ok(set)
}
