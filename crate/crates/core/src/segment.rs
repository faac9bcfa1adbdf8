//! Word-attribute segmentation advice for lexicon terms.
//!
//! A term is advised through an ordered decision table. The default order is
//! R1 (nominal or not combinable: keep whole), R2 (reducible: expand and
//! decide again on the expansion), R3 (replaceable: split), R4 (keep whole).
//! The order is configurable and every decision names the rule that fired.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::text::char_len;

/// Maximum number of chained expansions before advice gives up.
pub const MAX_EXPANSION_DEPTH: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermEntry {
    pub surface: String,
    pub is_nominal: bool,
    pub combinable: bool,
    pub reducible: bool,
    pub replaceable: bool,
    pub expansion: Option<String>,
    /// Code-point index strictly inside `surface`.
    pub split_point: Option<usize>,
}

impl TermEntry {
    pub fn new(surface: impl Into<String>) -> Self {
        TermEntry {
            surface: surface.into(),
            is_nominal: false,
            combinable: false,
            reducible: false,
            replaceable: false,
            expansion: None,
            split_point: None,
        }
    }

    pub fn check(&self) -> Result<(), SegError> {
        let bad = |m: &str| Err(SegError::InvalidEntry { surface: self.surface.clone(), reason: m.to_string() });
        if self.surface.is_empty() {
            return bad("empty surface");
        }
        if self.reducible && self.expansion.as_deref().is_none_or(str::is_empty) {
            return bad("reducible term needs an expansion");
        }
        if self.replaceable && !self.combinable {
            return bad("replaceable term must be combinable");
        }
        if let Some(at) = self.split_point {
            if at == 0 || at >= char_len(&self.surface) {
                return bad("split point must fall strictly inside the surface");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Rule {
    R1,
    R2,
    R3,
    R4,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::R1 => "R1",
            Rule::R2 => "R2",
            Rule::R3 => "R3",
            Rule::R4 => "R4",
        })
    }
}

impl FromStr for Rule {
    type Err = SegError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "R1" => Ok(Rule::R1),
            "R2" => Ok(Rule::R2),
            "R3" => Ok(Rule::R3),
            "R4" => Ok(Rule::R4),
            _ => Err(SegError::UnknownRule(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum Action {
    KeepWhole,
    Split {
        at: usize,
    },
    /// The expansion, and the advice for it when it is itself in the lexicon.
    ExpandThenDecide {
        expansion: String,
        then: Option<Box<SegDecision>>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegDecision {
    #[serde(flatten)]
    pub action: Action,
    pub rule: Rule,
}

impl fmt::Display for SegDecision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.action {
            Action::KeepWhole => write!(f, "keep_whole via {}", self.rule),
            Action::Split { at } => write!(f, "split({}) via {}", at, self.rule),
            Action::ExpandThenDecide { expansion, then } => {
                write!(f, "expand_then_decide({}) via {}", expansion, self.rule)?;
                if let Some(next) = then {
                    write!(f, "; {}", next)?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SegError {
    #[error("invalid-entry {surface}: {reason}")]
    InvalidEntry { surface: String, reason: String },
    #[error("missing-split-point {0}")]
    MissingSplitPoint(String),
    #[error("expansion-depth {0}: more than {MAX_EXPANSION_DEPTH} chained expansions")]
    ExpansionDepth(String),
    #[error("unknown-rule {0}")]
    UnknownRule(String),
    #[error("decision table must list R1..R4 exactly once")]
    BadTable,
    #[error("{message} at line {line}")]
    Lexicon { line: usize, message: String },
    #[error("duplicate-term {surface} at line {line}")]
    DuplicateTerm { line: usize, surface: String },
}

/// Rule order for [`advise_with`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionTable {
    order: Vec<Rule>,
}

impl Default for DecisionTable {
    fn default() -> Self {
        DecisionTable { order: vec![Rule::R1, Rule::R2, Rule::R3, Rule::R4] }
    }
}

impl DecisionTable {
    pub fn new(order: Vec<Rule>) -> Result<Self, SegError> {
        let distinct: HashSet<_> = order.iter().collect();
        if order.len() != 4 || distinct.len() != 4 {
            return Err(SegError::BadTable);
        }
        Ok(DecisionTable { order })
    }

    pub fn order(&self) -> &[Rule] {
        &self.order
    }
}

/// Terms indexed by surface, used to follow expansions.
pub type Lexicon = BTreeMap<String, TermEntry>;

pub fn advise(entry: &TermEntry) -> Result<SegDecision, SegError> {
    advise_with(entry, &DecisionTable::default(), &Lexicon::new())
}

/// Advise `entry`. When R2 fires and the expansion is itself a lexicon term,
/// advice continues on that term, up to [`MAX_EXPANSION_DEPTH`] expansions.
pub fn advise_with(entry: &TermEntry, table: &DecisionTable, lexicon: &Lexicon) -> Result<SegDecision, SegError> {
    advise_depth(entry, table, lexicon, 0)
}

fn advise_depth(
    entry: &TermEntry,
    table: &DecisionTable,
    lexicon: &Lexicon,
    depth: usize,
) -> Result<SegDecision, SegError> {
    entry.check()?;
    for &rule in &table.order {
        let action = match rule {
            Rule::R1 if entry.is_nominal || !entry.combinable => Action::KeepWhole,
            Rule::R2 if entry.reducible => {
                if depth >= MAX_EXPANSION_DEPTH {
                    return Err(SegError::ExpansionDepth(entry.surface.clone()));
                }
                let expansion = entry.expansion.clone().unwrap_or_default();
                let then = match lexicon.get(&expansion) {
                    Some(next) => Some(Box::new(advise_depth(next, table, lexicon, depth + 1)?)),
                    None => None,
                };
                Action::ExpandThenDecide { expansion, then }
            }
            Rule::R3 if entry.combinable && !entry.is_nominal && entry.replaceable => {
                let at = entry.split_point.ok_or_else(|| SegError::MissingSplitPoint(entry.surface.clone()))?;
                Action::Split { at }
            }
            Rule::R4 if entry.combinable && !entry.is_nominal && !entry.replaceable => Action::KeepWhole,
            _ => continue,
        };
        return Ok(SegDecision { action, rule });
    }
    // R1, R3 and R4 together cover every entry, whatever the order.
    unreachable!("decision table without a matching rule")
}

fn parse_bool(s: &str, line: usize, column: &str) -> Result<bool, SegError> {
    match s {
        "true" | "1" => Ok(true),
        "false" | "0" => Ok(false),
        _ => Err(SegError::Lexicon { line, message: format!("malformed-boolean {} in {}", s, column) }),
    }
}

fn optional(s: &str) -> Option<&str> {
    (s != "-" && !s.is_empty()).then_some(s)
}

/// Read a lexicon TSV:
/// `surface is_nominal combinable reducible replaceable expansion split_point`
/// with `-` for absent values. A first row starting with `surface` is a
/// header; `#` lines are comments.
pub fn load_lexicon(bytes: &[u8]) -> Result<Vec<TermEntry>, SegError> {
    let text = std::str::from_utf8(bytes).map_err(|e| SegError::Lexicon {
        line: bytes[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count() + 1,
        message: "invalid-utf8".into(),
    })?;
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        if raw.trim().is_empty() || raw.starts_with('#') || (out.is_empty() && raw.starts_with("surface\t")) {
            continue;
        }
        let cols: Vec<&str> = raw.split('\t').collect();
        if cols.len() != 7 {
            return Err(SegError::Lexicon {
                line,
                message: format!("malformed-line expected 7 columns, found {}", cols.len()),
            });
        }
        let split_point = match optional(cols[6]) {
            Some(s) => Some(
                s.parse::<usize>().map_err(|_| SegError::Lexicon { line, message: format!("invalid-number {}", s) })?,
            ),
            None => None,
        };
        let entry = TermEntry {
            surface: cols[0].to_string(),
            is_nominal: parse_bool(cols[1], line, "is_nominal")?,
            combinable: parse_bool(cols[2], line, "combinable")?,
            reducible: parse_bool(cols[3], line, "reducible")?,
            replaceable: parse_bool(cols[4], line, "replaceable")?,
            expansion: optional(cols[5]).map(str::to_string),
            split_point,
        };
        entry.check().map_err(|e| SegError::Lexicon { line, message: e.to_string() })?;
        if !seen.insert(entry.surface.clone()) {
            return Err(SegError::DuplicateTerm { line, surface: entry.surface });
        }
        out.push(entry);
    }
    Ok(out)
}

pub fn index_lexicon(entries: Vec<TermEntry>) -> Lexicon {
    entries.into_iter().map(|e| (e.surface.clone(), e)).collect()
}
