use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::groups::{resolve, GroupError};
use crate::model::{DocumentAnnotations, Entity, Token};
use crate::parseval::{brackets, EvalParams, ParsevalError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum DiffLayer {
    Seg,
    Pos,
    Chunk,
    Tree,
    Entity,
    Relation,
}

impl FromStr for DiffLayer {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "seg" => Ok(DiffLayer::Seg),
            "pos" => Ok(DiffLayer::Pos),
            "chunk" => Ok(DiffLayer::Chunk),
            "tree" => Ok(DiffLayer::Tree),
            "entity" => Ok(DiffLayer::Entity),
            "relation" => Ok(DiffLayer::Relation),
            _ => Err(format!("unknown layer `{}`", s)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiffKind {
    AttributeMismatch,
    AOnly,
    BOnly,
}

impl DiffKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DiffKind::AOnly => "A-only",
            DiffKind::BOnly => "B-only",
            DiffKind::AttributeMismatch => "attribute-mismatch",
        }
    }

    pub fn swapped(self) -> Self {
        match self {
            DiffKind::AOnly => DiffKind::BOnly,
            DiffKind::BOnly => DiffKind::AOnly,
            DiffKind::AttributeMismatch => DiffKind::AttributeMismatch,
        }
    }
}

/// One disagreement between two groups' annotations of a document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Disagreement {
    pub kind: DiffKind,
    /// Offsets, `[start,end)` or `s<sentence> [first,last)` for token-index
    /// layers.
    pub location: String,
    pub surface: String,
    /// Attribute values on each side, absent for a missing annotation.
    pub a: Option<String>,
    pub b: Option<String>,
    /// Names of the differing attributes on a mismatch.
    pub fields: Vec<String>,
    #[serde(skip)]
    order: Vec<usize>,
}

impl Disagreement {
    pub fn swapped(&self) -> Self {
        Disagreement { kind: self.kind.swapped(), a: self.b.clone(), b: self.a.clone(), ..self.clone() }
    }
}

impl fmt::Display for Disagreement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\t{}\t{}\t{}\t{}\t{}",
            self.kind.as_str(),
            self.location,
            self.surface,
            self.a.as_deref().unwrap_or("-"),
            self.b.as_deref().unwrap_or("-"),
            if self.fields.is_empty() { "-".to_string() } else { self.fields.join(",") }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DiffError {
    #[error("document mismatch: {a} vs {b}")]
    DocumentMismatch { a: String, b: String },
    #[error("{0}")]
    Relation(#[from] GroupError),
    #[error("{0}")]
    Tree(#[from] ParsevalError),
}

/// An annotation reduced to where it is, what it covers, and its attributes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Item {
    order: Vec<usize>,
    location: String,
    surface: String,
    attrs: Vec<(&'static str, String)>,
}

impl Item {
    fn render(&self) -> String {
        self.attrs.iter().map(|(_, v)| v.as_str()).collect::<Vec<_>>().join(" ")
    }
}

fn span_loc(start: usize, end: usize) -> String {
    format!("[{},{})", start, end)
}

fn token_items(ann: &DocumentAnnotations, with_pos: bool) -> Vec<Item> {
    ann.tokens
        .iter()
        .flat_map(|t| t.tokens())
        .map(|t: &Token| Item {
            order: vec![t.span.start, t.span.end],
            location: span_loc(t.span.start, t.span.end),
            surface: t.surface.clone(),
            attrs: if with_pos {
                vec![("pos", t.pos.map_or("-".into(), |p| p.as_str().to_string()))]
            } else {
                Vec::new()
            },
        })
        .collect()
}

fn sentence_surface(ann: &DocumentAnnotations, sentence: usize, first: usize, last: usize) -> String {
    ann.tokens
        .as_ref()
        .and_then(|t| t.sentences.get(sentence))
        .map(|s| s.iter().skip(first).take(last.saturating_sub(first)).map(|t| t.surface.as_str()).collect())
        .unwrap_or_default()
}

fn index_item(sentence: usize, first: usize, last: usize, surface: String, label: &str) -> Item {
    Item {
        order: vec![sentence, first, last],
        location: format!("s{} [{},{})", sentence + 1, first, last),
        surface,
        attrs: vec![("label", label.to_string())],
    }
}

type Member<'a> = (usize, usize, &'static str, &'a str);

fn side<'a>(members: &[&'a Entity]) -> Vec<Member<'a>> {
    let mut m: Vec<Member<'a>> =
        members.iter().map(|e| (e.span.start, e.span.end, e.etype.as_str(), e.surface.as_str())).collect();
    m.sort();
    m
}

fn entity_attrs(e: &Entity) -> Vec<(&'static str, String)> {
    vec![
        ("type", e.etype.as_str().to_string()),
        ("assertion", e.assertion.map_or("-".into(), |a| a.as_str().to_string())),
    ]
}

fn items(ann: &DocumentAnnotations, layer: DiffLayer) -> Result<Vec<Item>, DiffError> {
    let mut out = Vec::new();
    match layer {
        DiffLayer::Seg => out = token_items(ann, false),
        DiffLayer::Pos => out = token_items(ann, true),
        DiffLayer::Chunk => {
            for (s, chunks) in ann.chunks.iter().flat_map(|c| c.sentences.iter().enumerate()) {
                for c in chunks {
                    let surface = sentence_surface(ann, s, c.first, c.last);
                    out.push(index_item(s, c.first, c.last, surface, c.label.as_str()));
                }
            }
        }
        DiffLayer::Tree => {
            let params = EvalParams { ignore_punct: false, ..EvalParams::default() };
            for (s, tree) in ann.trees.iter().flat_map(|t| t.trees.iter().enumerate()) {
                let leaves = tree.leaves();
                for b in brackets(tree, &params)? {
                    let surface = leaves[b.first..b.last].iter().map(|(_, w)| *w).collect();
                    out.push(index_item(s, b.first, b.last, surface, b.label.as_str()));
                }
            }
        }
        DiffLayer::Entity => {
            for e in ann.semantic.iter().flat_map(|s| &s.entities) {
                out.push(Item {
                    order: vec![e.span.start, e.span.end],
                    location: span_loc(e.span.start, e.span.end),
                    surface: e.surface.clone(),
                    attrs: entity_attrs(e),
                });
            }
        }
        DiffLayer::Relation => {
            let Some(sem) = &ann.semantic else { return Ok(out) };
            for r in &sem.relations {
                let res = resolve(r, sem)?;
                let (a1, a2) = (side(&res.arg1), side(&res.arg2));
                let loc = |m: &[Member]| {
                    m.iter().map(|(s, e, t, _)| format!("{}{}", t, span_loc(*s, *e))).collect::<Vec<_>>().join("+")
                };
                let surf = |m: &[Member]| m.iter().map(|x| x.3).collect::<Vec<_>>().join("+");
                let mut order: Vec<usize> = a1.iter().flat_map(|x| [x.0, x.1]).collect();
                order.push(usize::MAX);
                order.extend(a2.iter().flat_map(|x| [x.0, x.1]));
                out.push(Item {
                    order,
                    location: format!("{} -> {}", loc(&a1), loc(&a2)),
                    surface: format!("{} -> {}", surf(&a1), surf(&a2)),
                    attrs: vec![("type", r.rtype.as_str().to_string())],
                });
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Itemized differences between two groups' annotations of one document.
///
/// Identical annotations cancel out (with multiplicity). Leftovers at the
/// same location are paired into attribute mismatches; the rest are A-only
/// or B-only. Records are ordered by location.
pub fn diff_report(
    a: &DocumentAnnotations,
    b: &DocumentAnnotations,
    layer: DiffLayer,
) -> Result<Vec<Disagreement>, DiffError> {
    if a.doc_id != b.doc_id {
        return Err(DiffError::DocumentMismatch { a: a.doc_id.clone(), b: b.doc_id.clone() });
    }
    type Slot = (Vec<usize>, String);
    let mut sides: BTreeMap<Slot, (Vec<Item>, Vec<Item>)> = BTreeMap::new();
    for it in items(a, layer)? {
        sides.entry((it.order.clone(), it.location.clone())).or_default().0.push(it);
    }
    for it in items(b, layer)? {
        sides.entry((it.order.clone(), it.location.clone())).or_default().1.push(it);
    }
    let mut out = Vec::new();
    for (_, (mut left, mut right)) in sides {
        // cancel exact matches
        let mut i = 0;
        while i < left.len() {
            match right.iter().position(|r| r == &left[i]) {
                Some(j) => {
                    left.remove(i);
                    right.remove(j);
                }
                None => i += 1,
            }
        }
        let paired = left.len().min(right.len());
        for (x, y) in left.iter().zip(&right) {
            let fields =
                x.attrs.iter().zip(&y.attrs).filter(|(p, q)| p.1 != q.1).map(|(p, _)| p.0.to_string()).collect();
            out.push(Disagreement {
                kind: DiffKind::AttributeMismatch,
                location: x.location.clone(),
                surface: x.surface.clone(),
                a: Some(x.render()),
                b: Some(y.render()),
                fields,
                order: x.order.clone(),
            });
        }
        for (it, kind) in left
            .iter()
            .skip(paired)
            .map(|it| (it, DiffKind::AOnly))
            .chain(right.iter().skip(paired).map(|it| (it, DiffKind::BOnly)))
        {
            let rendered = Some(it.render());
            out.push(Disagreement {
                kind,
                location: it.location.clone(),
                surface: it.surface.clone(),
                a: if kind == DiffKind::AOnly { rendered.clone() } else { None },
                b: if kind == DiffKind::BOnly { rendered } else { None },
                fields: Vec::new(),
                order: it.order.clone(),
            });
        }
    }
    Ok(out)
}

/// TSV report with a header line.
pub fn render_diff(records: &[Disagreement]) -> String {
    let mut out = String::from("kind\tlocation\tsurface\ta\tb\tfields\n");
    for r in records {
        out.push_str(&r.to_string());
        out.push('\n');
    }
    out
}
