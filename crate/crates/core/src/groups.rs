//! Entity-group resolution and one-to-one expansion of group relations.

use std::collections::BTreeMap;

use crate::model::{Endpoint, Entity, EntityType, Relation, RelationType, SemanticLayer};
use crate::text::{id_key, Span};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroupError {
    #[error("dangling-reference {id} in {relation}")]
    Dangling { relation: String, id: String },
    #[error("group {group} is empty")]
    EmptyGroup { group: String },
    #[error("group {group} mixes {expected} with {found} ({member})")]
    Heterogeneous { group: String, member: String, expected: EntityType, found: EntityType },
    #[error("{relation}: {rtype} expects {expected} for {role}, found {found}")]
    SignatureMismatch {
        relation: String,
        rtype: RelationType,
        role: &'static str,
        expected: EntityType,
        found: EntityType,
    },
}

/// A relation whose endpoints have been replaced by their member entities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedRelation<'a> {
    pub rtype: RelationType,
    pub arg1: Vec<&'a Entity>,
    pub arg2: Vec<&'a Entity>,
}

/// A member-level relation between two single entities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OneToOne<'a> {
    pub rtype: RelationType,
    pub arg1: &'a Entity,
    pub arg2: &'a Entity,
}

impl OneToOne<'_> {
    /// Identity used for deduplication: type plus endpoint span and type.
    pub fn key(&self) -> (RelationType, (Span, EntityType), (Span, EntityType)) {
        (self.rtype, (self.arg1.span, self.arg1.etype), (self.arg2.span, self.arg2.etype))
    }
}

fn endpoint_members<'a>(
    ep: &Endpoint,
    rel: &Relation,
    layer: &'a SemanticLayer,
) -> Result<Vec<&'a Entity>, GroupError> {
    let dangling = |id: &str| GroupError::Dangling { relation: rel.id.clone(), id: id.to_string() };
    match ep {
        Endpoint::Entity(id) => Ok(vec![layer.entity(id).ok_or_else(|| dangling(id))?]),
        Endpoint::Group(gid) => {
            let group = layer.group(gid).ok_or_else(|| dangling(gid))?;
            if group.members.is_empty() {
                return Err(GroupError::EmptyGroup { group: gid.clone() });
            }
            let mut out = Vec::with_capacity(group.members.len());
            for m in &group.members {
                let e = layer.entity(m).ok_or_else(|| dangling(m))?;
                if e.etype != group.etype {
                    return Err(GroupError::Heterogeneous {
                        group: gid.clone(),
                        member: m.clone(),
                        expected: group.etype,
                        found: e.etype,
                    });
                }
                if !out.iter().any(|x: &&Entity| x.id == e.id) {
                    out.push(e);
                }
            }
            Ok(out)
        }
    }
}

/// Replace each endpoint by its member set (a singleton for entity endpoints).
pub fn resolve<'a>(rel: &Relation, layer: &'a SemanticLayer) -> Result<ResolvedRelation<'a>, GroupError> {
    let arg1 = endpoint_members(&rel.arg1, rel, layer)?;
    let arg2 = endpoint_members(&rel.arg2, rel, layer)?;
    let (t1, t2) = rel.rtype.signature();
    for (members, expected, role) in [(&arg1, t1, "arg1"), (&arg2, t2, "arg2")] {
        if let Some(e) = members.iter().find(|e| e.etype != expected) {
            return Err(GroupError::SignatureMismatch {
                relation: rel.id.clone(),
                rtype: rel.rtype,
                role,
                expected,
                found: e.etype,
            });
        }
    }
    Ok(ResolvedRelation { rtype: rel.rtype, arg1, arg2 })
}

/// Cartesian product of the two member sets, `|arg1| * |arg2|` relations.
pub fn expand<'a>(res: &ResolvedRelation<'a>) -> Vec<OneToOne<'a>> {
    res.arg1
        .iter()
        .flat_map(|&a| res.arg2.iter().map(move |&b| OneToOne { rtype: res.rtype, arg1: a, arg2: b }))
        .collect()
}

/// Expand every relation of the layer and collapse duplicates by
/// `(type, arg1 span+type, arg2 span+type)`. When two entities share a span
/// and type, the one with the smaller id represents them. Output is sorted
/// by that key.
pub fn expand_all(layer: &SemanticLayer) -> Result<Vec<OneToOne<'_>>, GroupError> {
    let mut unique: BTreeMap<_, OneToOne<'_>> = BTreeMap::new();
    for rel in &layer.relations {
        for r in expand(&resolve(rel, layer)?) {
            unique
                .entry(r.key())
                .and_modify(|cur| {
                    let rank = |x: &OneToOne| (id_key(&x.arg1.id), id_key(&x.arg2.id));
                    if rank(&r) < rank(cur) {
                        *cur = r;
                    }
                })
                .or_insert(r);
        }
    }
    Ok(unique.into_values().collect())
}

/// The one-to-one set rendered as `.ann` relation lines `R<n>\t<type> Arg1:T.. Arg2:T..`.
pub fn render_one_to_one(rels: &[OneToOne<'_>]) -> String {
    let mut out = String::from("# one-to-one relations\n");
    for (i, r) in rels.iter().enumerate() {
        out.push_str(&format!("R{}\t{} Arg1:{} Arg2:{}\n", i + 1, r.rtype, r.arg1.id, r.arg2.id));
    }
    out
}
