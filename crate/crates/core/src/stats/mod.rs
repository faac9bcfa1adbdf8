//! Corpus distributions and cross tables.
//!
//! Percentages are rounded half away from zero to two decimals using integer
//! arithmetic, so `pct` is exactly the two-decimal value a reader would
//! print.

pub mod reference;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::groups::{expand_all, GroupError};
use crate::io::Bundle;
use crate::model::{DocType, EntityType, RelationPair, RelationType, SynTag};
use reference::{RefCrossRow, RefPct};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StatsError {
    #[error("layer-absent {0}")]
    LayerAbsent(&'static str),
    #[error("no sentences")]
    NoSentences,
    #[error("label-mismatch {0} is not in the reference table")]
    LabelMismatch(String),
    #[error("{0}")]
    Relation(#[from] GroupError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatLayer {
    Pos,
    Syntactic,
    EntityType,
    RelationType,
}

impl StatLayer {
    fn name(self) -> &'static str {
        match self {
            StatLayer::Pos => "pos",
            StatLayer::Syntactic => "syntactic",
            StatLayer::EntityType => "entity_type",
            StatLayer::RelationType => "relation_type",
        }
    }
}

impl FromStr for StatLayer {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pos" => Ok(StatLayer::Pos),
            "syn" | "syntactic" => Ok(StatLayer::Syntactic),
            "entity" | "entity_type" => Ok(StatLayer::EntityType),
            "relation" | "relation_type" => Ok(StatLayer::RelationType),
            _ => Err(format!("unknown layer `{}`", s)),
        }
    }
}

/// `round(100 * count / total, 2)` in hundredths, half away from zero.
pub fn pct_hundredths(count: u64, total: u64) -> u64 {
    if total == 0 {
        return 0;
    }
    (20_000 * count + total) / (2 * total)
}

pub fn pct(count: u64, total: u64) -> f64 {
    pct_hundredths(count, total) as f64 / 100.0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionRow {
    pub label: String,
    pub count: u64,
    pub pct: f64,
}

impl fmt::Display for DistributionRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}\t{:.2}", self.label, self.count, self.pct)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossRow {
    pub group: String,
    /// `total` on a group total row.
    pub label: String,
    pub count: u64,
    pub pct_within: f64,
    pub pct_all: f64,
}

impl CrossRow {
    pub fn is_total(&self) -> bool {
        self.label == "total"
    }
}

impl fmt::Display for CrossRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}\t{}\t{:.2}\t{:.2}", self.group, self.label, self.count, self.pct_within, self.pct_all)
    }
}

/// Rows for the given tallies, sorted by count descending then label.
/// Zero counts are kept.
pub fn rows_from_counts<I, S>(counts: I) -> Vec<DistributionRow>
where
    I: IntoIterator<Item = (S, u64)>,
    S: Into<String>,
{
    let counts: Vec<(String, u64)> = counts.into_iter().map(|(l, c)| (l.into(), c)).collect();
    let total = counts.iter().map(|(_, c)| c).sum();
    let mut rows: Vec<DistributionRow> =
        counts.into_iter().map(|(label, count)| DistributionRow { pct: pct(count, total), label, count }).collect();
    rows.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.label.cmp(&b.label)));
    rows
}

/// Cross table over ordered groups of tallies. Each group gets its rows
/// (count descending, then label) and a `total` row; `pct_all` uses the sum
/// over every group.
pub fn cross_table(groups: &[(String, Vec<(String, u64)>)]) -> Vec<CrossRow> {
    let all: u64 = groups.iter().flat_map(|(_, rows)| rows.iter().map(|(_, c)| c)).sum();
    let mut out = Vec::new();
    for (group, rows) in groups {
        let within: u64 = rows.iter().map(|(_, c)| c).sum();
        for row in rows_from_counts(rows.iter().cloned()) {
            out.push(CrossRow {
                group: group.clone(),
                pct_within: row.pct,
                pct_all: pct(row.count, all),
                label: row.label,
                count: row.count,
            });
        }
        out.push(CrossRow {
            group: group.clone(),
            label: "total".into(),
            count: within,
            pct_within: pct(within, within),
            pct_all: pct(within, all),
        });
    }
    out
}

fn selected(corpus: &[Bundle], filter: Option<DocType>) -> impl Iterator<Item = &Bundle> {
    corpus.iter().filter(move |b| filter.is_none_or(|t| b.document.doc_type == Some(t)))
}

fn add(tally: &mut BTreeMap<String, u64>, label: &str) {
    *tally.entry(label.to_string()).or_default() += 1;
}

/// Observed labels of one layer with their share of the layer total.
///
/// POS tags come from the token layer when every token is tagged, otherwise
/// from tree preterminals. Syntactic labels count every phrase node.
/// Relation types are counted on the one-to-one expansion.
pub fn distribution(
    corpus: &[Bundle],
    layer: StatLayer,
    filter: Option<DocType>,
) -> Result<Vec<DistributionRow>, StatsError> {
    let mut tally = BTreeMap::new();
    let mut present = false;
    for b in selected(corpus, filter) {
        let ann = &b.annotations;
        match layer {
            StatLayer::Pos => {
                let tagged = ann.tokens.as_ref().filter(|t| t.token_count() > 0 && t.tokens().all(|t| t.pos.is_some()));
                if let Some(tokens) = tagged {
                    present = true;
                    tokens.tokens().filter_map(|t| t.pos).for_each(|p| add(&mut tally, p.as_str()));
                } else if let Some(trees) = &ann.trees {
                    present = true;
                    for t in &trees.trees {
                        t.leaves().iter().for_each(|(p, _)| add(&mut tally, p.as_str()));
                    }
                }
            }
            StatLayer::Syntactic => {
                if let Some(trees) = &ann.trees {
                    present = true;
                    for t in &trees.trees {
                        t.phrase_labels().iter().for_each(|l| add(&mut tally, l.as_str()));
                    }
                }
            }
            StatLayer::EntityType => {
                if let Some(sem) = &ann.semantic {
                    present = true;
                    sem.entities.iter().for_each(|e| add(&mut tally, e.etype.as_str()));
                }
            }
            StatLayer::RelationType => {
                if let Some(sem) = &ann.semantic {
                    present = true;
                    for r in expand_all(sem)? {
                        add(&mut tally, r.rtype.as_str());
                    }
                }
            }
        }
    }
    if !present {
        return Err(StatsError::LayerAbsent(layer.name()));
    }
    Ok(rows_from_counts(tally))
}

const TYPE_ORDER: [EntityType; 4] = [EntityType::Disease, EntityType::Symptom, EntityType::Treatment, EntityType::Test];

/// Entities by type and assertion. Every valid assertion of a type gets a row,
/// zero or not; entities without an assertion are counted as `unspecified`
/// when the type expects one. Types appear in the order disease, symptom,
/// treatment, test, each followed by its total row.
pub fn assertion_cross_table(corpus: &[Bundle]) -> Vec<CrossRow> {
    let mut tally: BTreeMap<EntityType, BTreeMap<String, u64>> = BTreeMap::new();
    let mut any = false;
    for b in corpus {
        for e in b.annotations.semantic.iter().flat_map(|s| &s.entities) {
            any = true;
            let per_type = tally.entry(e.etype).or_default();
            match e.assertion {
                Some(a) => add(per_type, a.as_str()),
                None if !e.etype.assertions().is_empty() => add(per_type, "unspecified"),
                None => add(per_type, "total"),
            }
        }
    }
    if !any {
        return Vec::new();
    }
    let groups: Vec<(String, Vec<(String, u64)>)> = TYPE_ORDER
        .iter()
        .map(|t| {
            let mut counts = tally.remove(t).unwrap_or_default();
            for a in t.assertions() {
                counts.entry(a.as_str().to_string()).or_default();
            }
            // entities of a type without assertions only contribute to the total
            let bare = counts.remove("total").unwrap_or(0);
            let mut rows: Vec<(String, u64)> = counts.into_iter().collect();
            if bare > 0 {
                rows.push((String::new(), bare));
            }
            (t.as_str().to_string(), rows)
        })
        .collect();
    cross_table(&groups).into_iter().filter(|r| !r.label.is_empty()).collect()
}

/// One-to-one relations by type within each entity pair, pairs in the order
/// R(Tr,D), R(Tr,S), R(Te,D), R(Te,S), R(D,S). Only observed types and pairs
/// appear.
pub fn relation_table(corpus: &[Bundle]) -> Result<Vec<CrossRow>, StatsError> {
    let mut tally: BTreeMap<RelationType, u64> = BTreeMap::new();
    for b in corpus {
        if let Some(sem) = &b.annotations.semantic {
            for r in expand_all(sem)? {
                *tally.entry(r.rtype).or_default() += 1;
            }
        }
    }
    let groups: Vec<(String, Vec<(String, u64)>)> = RelationPair::ALL
        .iter()
        .map(|p| {
            let rows = tally
                .iter()
                .filter(|(t, _)| t.pair() == *p)
                .map(|(t, c)| (t.as_str().to_string(), *c))
                .collect::<Vec<_>>();
            (p.label().to_string(), rows)
        })
        .filter(|(_, rows)| !rows.is_empty())
        .collect();
    Ok(cross_table(&groups))
}

/// Tokens per sentence. Sentences come from the token layer, or from the
/// trees of documents without tokens.
pub fn avg_sentence_length(corpus: &[Bundle], filter: Option<DocType>) -> Result<f64, StatsError> {
    let (mut tokens, mut sentences) = (0usize, 0usize);
    let mut present = false;
    for b in selected(corpus, filter) {
        let ann = &b.annotations;
        if let Some(t) = &ann.tokens {
            present = true;
            tokens += t.token_count();
            sentences += t.sentences.iter().filter(|s| !s.is_empty()).count();
        } else if let Some(trees) = &ann.trees {
            present = true;
            tokens += trees.trees.iter().map(|t| t.leaf_count()).sum::<usize>();
            sentences += trees.trees.len();
        }
    }
    if !present {
        return Err(StatsError::LayerAbsent("tokens"));
    }
    if sentences == 0 {
        return Err(StatsError::NoSentences);
    }
    Ok(tokens as f64 / sentences as f64)
}

/// A row whose percentage is further from the reference than allowed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Deviation {
    pub label: String,
    pub expected: String,
    pub actual: f64,
    pub delta: f64,
}

/// Labels are compared through the tag-set aliases, so a reference `VS`
/// matches a computed `VSB`.
fn canonical_label(label: &str) -> String {
    match label.parse::<SynTag>() {
        Ok(t) => t.as_str().to_string(),
        Err(_) => label.to_string(),
    }
}

fn deviates(expected: RefPct, actual: f64, tol_pct: f64) -> Option<f64> {
    let delta = (actual - expected.nominal()).abs();
    (delta > tol_pct + 1e-9).then_some(delta)
}

/// Rows whose percentage differs from the reference by more than `tol_pct`.
/// Reference labels absent from the report count as 0; report labels absent
/// from the reference are an error.
pub fn compare_reference(
    report: &[DistributionRow],
    reference: &[(&str, RefPct)],
    tol_pct: f64,
) -> Result<Vec<Deviation>, StatsError> {
    let expected: BTreeMap<String, RefPct> = reference.iter().map(|(l, p)| (canonical_label(l), *p)).collect();
    let mut actual: BTreeMap<String, f64> = BTreeMap::new();
    for row in report {
        let label = canonical_label(&row.label);
        if !expected.contains_key(&label) {
            return Err(StatsError::LabelMismatch(row.label.clone()));
        }
        actual.insert(label, row.pct);
    }
    let mut out = Vec::new();
    for (label, p) in reference {
        let got = actual.get(&canonical_label(label)).copied().unwrap_or(0.0);
        if let Some(delta) = deviates(*p, got, tol_pct) {
            out.push(Deviation { label: label.to_string(), expected: p.to_string(), actual: got, delta });
        }
    }
    Ok(out)
}

/// Cross-table counterpart of [`compare_reference`]; both percentage columns
/// are checked. Labels are `group/label`.
pub fn compare_cross_reference(
    report: &[CrossRow],
    reference: &[RefCrossRow],
    tol_pct: f64,
) -> Result<Vec<Deviation>, StatsError> {
    let key = |g: &str, l: &str| format!("{}/{}", g, l);
    let expected: BTreeMap<String, &RefCrossRow> = reference.iter().map(|r| (key(r.group, r.label), r)).collect();
    let mut actual: BTreeMap<String, &CrossRow> = BTreeMap::new();
    for row in report {
        let k = key(&row.group, &row.label);
        if !expected.contains_key(&k) {
            return Err(StatsError::LabelMismatch(k));
        }
        actual.insert(k, row);
    }
    let mut out = Vec::new();
    for (k, r) in &expected {
        let (within, all) = actual.get(k).map_or((0.0, 0.0), |a| (a.pct_within, a.pct_all));
        for (name, p, got) in [("within", r.pct_within, within), ("all", r.pct_all, all)] {
            if let Some(delta) = deviates(p, got, tol_pct) {
                out.push(Deviation { label: format!("{} ({})", k, name), expected: p.to_string(), actual: got, delta });
            }
        }
    }
    Ok(out)
}
