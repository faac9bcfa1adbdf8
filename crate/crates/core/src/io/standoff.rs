use std::collections::{HashMap, HashSet};

use super::{decode, is_comment, ParseError, ParseErrorKind};
use crate::model::{AssertionType, Endpoint, Entity, EntityGroup, EntityType, Relation, RelationType, SemanticLayer};
use crate::text::Span;

const HEADER: &str = "# standoff: T entity, A assertion, G group, R relation";

fn valid_id(id: &str, prefix: char) -> bool {
    id.starts_with(prefix) && id.len() > 1 && !id.contains(char::is_whitespace) && !id.contains(':')
}

/// Parse a `.ann` file into entity, group and relation layers. References are
/// resolved after the whole file is read, so lines may appear in any order.
/// Assertion/type compatibility and relation signatures are left to
/// [`crate::model::validate`].
pub fn parse_standoff(bytes: &[u8]) -> Result<SemanticLayer, ParseError> {
    let text = decode(bytes)?;
    let mut layer = SemanticLayer::default();
    let mut assertions: Vec<(usize, String, AssertionType)> = Vec::new();
    let mut group_lines = Vec::new();
    let mut relation_lines = Vec::new();
    let mut ids = HashSet::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() || is_comment(line) {
            continue;
        }
        let err = |k: ParseErrorKind| ParseError::new(line_no, k);
        let malformed = |m: &str| err(ParseErrorKind::MalformedLine(m.to_string()));
        let fields: Vec<&str> = line.split('\t').collect();
        let id = fields[0];
        let kind = id.chars().next().unwrap_or(' ');
        if !valid_id(id, kind) || !matches!(kind, 'T' | 'A' | 'G' | 'R') {
            return Err(malformed(&format!("bad identifier `{}`", id)));
        }
        if !ids.insert(id.to_string()) {
            return Err(err(ParseErrorKind::DuplicateId(id.to_string())));
        }
        match kind {
            'T' => {
                if fields.len() != 3 {
                    return Err(malformed("entity line needs id, `type start end` and surface"));
                }
                let parts: Vec<&str> = fields[1].split_whitespace().collect();
                let [etype, start, end] = parts[..] else {
                    return Err(err(ParseErrorKind::MalformedOffsets(fields[1].to_string())));
                };
                let etype = etype
                    .parse::<EntityType>()
                    .map_err(|_| err(ParseErrorKind::UnknownEntityType(etype.to_string())))?;
                let offset = |s: &str| -> Result<usize, ParseError> {
                    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
                        return Err(err(ParseErrorKind::MalformedOffsets(fields[1].to_string())));
                    }
                    s.parse().map_err(|_| err(ParseErrorKind::MalformedOffsets(fields[1].to_string())))
                };
                let (start, end) = (offset(start)?, offset(end)?);
                if start >= end {
                    return Err(err(ParseErrorKind::MalformedOffsets(fields[1].to_string())));
                }
                layer.entities.push(Entity {
                    id: id.to_string(),
                    span: Span::new(start, end),
                    etype,
                    assertion: None,
                    surface: fields[2].to_string(),
                });
            }
            'A' => {
                let [_, body] = fields[..] else {
                    return Err(malformed("assertion line needs id and `assertion T<n>`"));
                };
                let parts: Vec<&str> = body.split_whitespace().collect();
                let [label, target] = parts[..] else {
                    return Err(malformed("assertion line needs `assertion T<n>`"));
                };
                let a = label
                    .parse::<AssertionType>()
                    .map_err(|_| err(ParseErrorKind::UnknownAssertion(label.to_string())))?;
                assertions.push((line_no, target.to_string(), a));
            }
            'G' => {
                let [_, body] = fields[..] else {
                    return Err(malformed("group line needs id and `type T<i> T<j> ...`"));
                };
                let mut parts = body.split_whitespace();
                let etype = parts.next().unwrap_or("");
                let etype = etype
                    .parse::<EntityType>()
                    .map_err(|_| err(ParseErrorKind::UnknownEntityType(etype.to_string())))?;
                let members: Vec<String> = parts.map(str::to_string).collect();
                if members.is_empty() {
                    return Err(malformed("group without members"));
                }
                group_lines.push(line_no);
                layer.groups.push(EntityGroup { id: id.to_string(), etype, members });
            }
            _ => {
                let [_, body] = fields[..] else {
                    return Err(malformed("relation line needs id and `type Arg1:X Arg2:Y`"));
                };
                let parts: Vec<&str> = body.split_whitespace().collect();
                let [rtype, a1, a2] = parts[..] else {
                    return Err(malformed("relation line needs `type Arg1:X Arg2:Y`"));
                };
                let rtype = rtype
                    .parse::<RelationType>()
                    .map_err(|_| err(ParseErrorKind::UnknownRelationType(rtype.to_string())))?;
                let endpoint = |field: &str, role: &str| -> Result<Endpoint, ParseError> {
                    let target = field
                        .strip_prefix(role)
                        .and_then(|s| s.strip_prefix(':'))
                        .ok_or_else(|| malformed(&format!("expected {}:<id>, found `{}`", role, field)))?;
                    if valid_id(target, 'T') {
                        Ok(Endpoint::Entity(target.to_string()))
                    } else if valid_id(target, 'G') {
                        Ok(Endpoint::Group(target.to_string()))
                    } else {
                        Err(malformed(&format!("endpoint `{}` is neither T nor G", target)))
                    }
                };
                let arg1 = endpoint(a1, "Arg1")?;
                let arg2 = endpoint(a2, "Arg2")?;
                relation_lines.push(line_no);
                layer.relations.push(Relation { id: id.to_string(), rtype, arg1, arg2 });
            }
        }
    }

    let entity_index: HashMap<String, usize> =
        layer.entities.iter().enumerate().map(|(i, e)| (e.id.clone(), i)).collect();
    for (line_no, target, a) in assertions {
        let Some(&i) = entity_index.get(&target) else {
            return Err(ParseError::new(line_no, ParseErrorKind::DanglingReference(target)));
        };
        if layer.entities[i].assertion.is_some() {
            return Err(ParseError::new(line_no, ParseErrorKind::DuplicateAssertion(target)));
        }
        layer.entities[i].assertion = Some(a);
    }
    for (g, line_no) in layer.groups.iter().zip(&group_lines) {
        if let Some(m) = g.members.iter().find(|m| !entity_index.contains_key(*m)) {
            return Err(ParseError::new(*line_no, ParseErrorKind::DanglingReference(m.clone())));
        }
    }
    let group_ids: HashSet<&str> = layer.groups.iter().map(|g| g.id.as_str()).collect();
    for (r, line_no) in layer.relations.iter().zip(&relation_lines) {
        for ep in [&r.arg1, &r.arg2] {
            let known = match ep {
                Endpoint::Entity(id) => entity_index.contains_key(id),
                Endpoint::Group(id) => group_ids.contains(id.as_str()),
            };
            if !known {
                return Err(ParseError::new(*line_no, ParseErrorKind::DanglingReference(ep.id().to_string())));
            }
        }
    }
    layer.canonicalize();
    Ok(layer)
}

/// Canonical `.ann` text. Assertion ids are renumbered `A1..` in entity order.
pub fn serialize_standoff(layer: &SemanticLayer) -> String {
    let mut layer = layer.clone();
    layer.canonicalize();
    let mut out = String::from(HEADER);
    out.push('\n');
    for e in &layer.entities {
        out.push_str(&format!("{}\t{} {} {}\t{}\n", e.id, e.etype, e.span.start, e.span.end, e.surface));
    }
    for (i, (e, a)) in layer.entities.iter().filter_map(|e| e.assertion.map(|a| (e, a))).enumerate() {
        out.push_str(&format!("A{}\t{} {}\n", i + 1, a, e.id));
    }
    for g in &layer.groups {
        out.push_str(&format!("{}\t{} {}\n", g.id, g.etype, g.members.join(" ")));
    }
    for r in &layer.relations {
        out.push_str(&format!("{}\t{} Arg1:{} Arg2:{}\n", r.id, r.rtype, r.arg1.id(), r.arg2.id()));
    }
    out
}
