//! Inter-annotator agreement as precision / recall / F.
//!
//! Group A plays the reference role: precision divides the agreed count by
//! B's annotation count, recall by A's. Every layer reduces to a [`Counts`]
//! triple; corpus figures are micro-averaged by summing triples before the
//! ratios are taken.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

use crate::groups::{self, GroupError};
use crate::model::{
    assertion_valid, AssertionType, ChunkLayer, EntityType, PosTag, RelationType, SemanticLayer, SynTag, TokenLayer,
};
use crate::text::Span;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AgreementError {
    #[error("agreed count {agreed} exceeds annotation counts ({count_a}, {count_b})")]
    AgreedExceedsCount { agreed: u64, count_a: u64, count_b: u64 },
    #[error("beta must be positive and finite, got {0}")]
    InvalidBeta(f64),
    #[error("token layers do not cover the same text")]
    TextMismatch,
    #[error("token {index} has no POS tag")]
    MissingPos { index: usize },
    #[error("invalid entity {id}: {reason}")]
    InvalidEntity { id: String, reason: String },
    #[error("invalid relation: {0}")]
    InvalidRelation(#[from] GroupError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgreementConfig {
    pub beta: f64,
}

impl Default for AgreementConfig {
    fn default() -> Self {
        AgreementConfig { beta: 1.0 }
    }
}

/// `(agreed, count_a, count_b)`; addition is the corpus aggregation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash, Serialize, Deserialize)]
pub struct Counts {
    pub agreed: u64,
    pub count_a: u64,
    pub count_b: u64,
}

impl Counts {
    pub const fn new(agreed: u64, count_a: u64, count_b: u64) -> Self {
        Counts { agreed, count_a, count_b }
    }

    /// The same comparison seen from the other side.
    pub fn swapped(self) -> Self {
        Counts::new(self.agreed, self.count_b, self.count_a)
    }

    pub fn report(self, cfg: &AgreementConfig) -> Result<AgreementReport, AgreementError> {
        prf(self.agreed, self.count_a, self.count_b, cfg)
    }
}

impl Add for Counts {
    type Output = Counts;

    fn add(self, o: Counts) -> Counts {
        Counts::new(self.agreed + o.agreed, self.count_a + o.count_a, self.count_b + o.count_b)
    }
}

impl AddAssign for Counts {
    fn add_assign(&mut self, o: Counts) {
        *self = *self + o;
    }
}

impl Sum for Counts {
    fn sum<I: Iterator<Item = Counts>>(iter: I) -> Counts {
        iter.fold(Counts::default(), Add::add)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub agreed: u64,
    pub count_a: u64,
    pub count_b: u64,
    pub precision: f64,
    pub recall: f64,
    pub f: f64,
    /// Both sides were empty; the scores are 1 by convention.
    pub vacuous: bool,
}

impl AgreementReport {
    pub fn counts(&self) -> Counts {
        Counts::new(self.agreed, self.count_a, self.count_b)
    }

    /// JSON object with metrics fixed at three decimals. Key order is stable.
    pub fn to_json(&self) -> String {
        format!(
            "{{\"agreed\":{},\"count_a\":{},\"count_b\":{},\"precision\":{:.3},\"recall\":{:.3},\"f\":{:.3},\"vacuous\":{}}}",
            self.agreed, self.count_a, self.count_b, self.precision, self.recall, self.f, self.vacuous
        )
    }
}

impl fmt::Display for AgreementReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "P={:.3} R={:.3} F={:.3} (agreed {}, A {}, B {})",
            self.precision, self.recall, self.f, self.agreed, self.count_a, self.count_b
        )
    }
}

/// Precision, recall and F-beta from raw counts.
///
/// Both sides empty gives 1/1/1 with `vacuous` set. One empty side makes its
/// ratio 0 and F 0.
pub fn prf(agreed: u64, count_a: u64, count_b: u64, cfg: &AgreementConfig) -> Result<AgreementReport, AgreementError> {
    if !(cfg.beta > 0.0 && cfg.beta.is_finite()) {
        return Err(AgreementError::InvalidBeta(cfg.beta));
    }
    if agreed > count_a.min(count_b) {
        return Err(AgreementError::AgreedExceedsCount { agreed, count_a, count_b });
    }
    if count_a == 0 && count_b == 0 {
        return Ok(AgreementReport { agreed, count_a, count_b, precision: 1.0, recall: 1.0, f: 1.0, vacuous: true });
    }
    let ratio = |n: u64, d: u64| if d == 0 { 0.0 } else { n as f64 / d as f64 };
    let precision = ratio(agreed, count_b);
    let recall = ratio(agreed, count_a);
    let f = f_beta(precision, recall, cfg.beta);
    Ok(AgreementReport { agreed, count_a, count_b, precision, recall, f, vacuous: false })
}

/// `(1 + b²)·P·R / (b²·P + R)`, 0 when both are 0.
///
/// `P·R` is formed first so that swapping P and R gives a bit-identical
/// result at beta = 1.
pub fn f_beta(precision: f64, recall: f64, beta: f64) -> f64 {
    if precision == 0.0 && recall == 0.0 {
        return 0.0;
    }
    let b2 = beta * beta;
    (1.0 + b2) * (precision * recall) / (b2 * precision + recall)
}

/// Macro average of per-document reports, as an extra next to the
/// micro-averaged headline. Returns `(precision, recall, f)`.
pub fn macro_average(reports: &[AgreementReport]) -> Option<(f64, f64, f64)> {
    if reports.is_empty() {
        return None;
    }
    let n = reports.len() as f64;
    let (p, r, f) = reports.iter().fold((0.0, 0.0, 0.0), |(p, r, f), x| (p + x.precision, r + x.recall, f + x.f));
    Some((p / n, r / n, f / n))
}

/// Size of the multiset intersection of `a` and `b`, with both sizes.
pub fn multiset_counts<K: Ord>(a: impl IntoIterator<Item = K>, b: impl IntoIterator<Item = K>) -> Counts {
    let mut tally: BTreeMap<K, (u64, u64)> = BTreeMap::new();
    let mut count_a = 0;
    let mut count_b = 0;
    for k in a {
        tally.entry(k).or_default().0 += 1;
        count_a += 1;
    }
    for k in b {
        tally.entry(k).or_default().1 += 1;
        count_b += 1;
    }
    let agreed = tally.values().map(|(x, y)| (*x).min(*y)).sum();
    Counts::new(agreed, count_a, count_b)
}

fn covered_text(layer: &TokenLayer) -> String {
    layer.tokens().map(|t| t.surface.as_str()).collect()
}

fn check_same_text(a: &TokenLayer, b: &TokenLayer) -> Result<(), AgreementError> {
    if a.token_count() == 0 || b.token_count() == 0 {
        return Ok(());
    }
    let ends = |l: &TokenLayer| {
        let mut it = l.tokens();
        let first = it.next().map(|t| t.span.start);
        (first, l.tokens().last().map(|t| t.span.end))
    };
    if ends(a) != ends(b) || covered_text(a) != covered_text(b) {
        return Err(AgreementError::TextMismatch);
    }
    Ok(())
}

/// Word segmentation: tokens agree when their spans are identical.
pub fn token_counts(a: &TokenLayer, b: &TokenLayer) -> Result<Counts, AgreementError> {
    check_same_text(a, b)?;
    Ok(multiset_counts(a.tokens().map(|t| t.span), b.tokens().map(|t| t.span)))
}

fn pos_keys(layer: &TokenLayer) -> Result<Vec<(Span, PosTag)>, AgreementError> {
    layer
        .tokens()
        .enumerate()
        .map(|(index, t)| t.pos.map(|p| (t.span, p)).ok_or(AgreementError::MissingPos { index }))
        .collect()
}

/// POS tagging: tokens agree when span and tag are identical.
pub fn pos_counts(a: &TokenLayer, b: &TokenLayer) -> Result<Counts, AgreementError> {
    check_same_text(a, b)?;
    Ok(multiset_counts(pos_keys(a)?, pos_keys(b)?))
}

fn chunk_keys(layer: &ChunkLayer) -> impl Iterator<Item = (usize, usize, usize, SynTag)> + '_ {
    layer.sentences.iter().enumerate().flat_map(|(s, cs)| cs.iter().map(move |c| (s, c.first, c.last, c.label)))
}

/// Shallow parsing: chunks agree when sentence, token span and label match.
pub fn chunk_counts(a: &ChunkLayer, b: &ChunkLayer) -> Result<Counts, AgreementError> {
    Ok(multiset_counts(chunk_keys(a), chunk_keys(b)))
}

/// How much of an entity has to match.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchPolicy {
    Span,
    SpanType,
    SpanTypeAssertion,
}

impl std::str::FromStr for MatchPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "span" => Ok(MatchPolicy::Span),
            "span_type" => Ok(MatchPolicy::SpanType),
            "span_type_assertion" => Ok(MatchPolicy::SpanTypeAssertion),
            _ => Err(format!("unknown match policy `{}`", s)),
        }
    }
}

type EntityKey = (Span, Option<EntityType>, Option<Option<AssertionType>>);

fn entity_keys(layer: &SemanticLayer, policy: MatchPolicy) -> Result<Vec<EntityKey>, AgreementError> {
    layer
        .entities
        .iter()
        .map(|e| {
            let invalid = |reason: String| AgreementError::InvalidEntity { id: e.id.clone(), reason };
            if e.span.is_empty() {
                return Err(invalid(format!("empty span {}", e.span)));
            }
            match e.assertion {
                None if !e.etype.assertions().is_empty() => {
                    return Err(invalid(format!("{} without assertion", e.etype)))
                }
                Some(a) if !assertion_valid(e.etype, a) => {
                    return Err(invalid(format!("assertion {} not valid for {}", a, e.etype)))
                }
                _ => {}
            }
            Ok(match policy {
                MatchPolicy::Span => (e.span, None, None),
                MatchPolicy::SpanType => (e.span, Some(e.etype), None),
                MatchPolicy::SpanTypeAssertion => (e.span, Some(e.etype), Some(e.assertion)),
            })
        })
        .collect()
}

/// Entities agree 1:1 on exact span, plus type and assertion as the policy
/// demands. Duplicates count with multiplicity.
pub fn entity_counts(a: &SemanticLayer, b: &SemanticLayer, policy: MatchPolicy) -> Result<Counts, AgreementError> {
    Ok(multiset_counts(entity_keys(a, policy)?, entity_keys(b, policy)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationMode {
    /// Relations keep their group endpoints; a group matches by member set.
    GroupPreserved,
    /// Groups are expanded into member-level relations first.
    OneToOne,
}

impl std::str::FromStr for RelationMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "group" | "group_preserved" => Ok(RelationMode::GroupPreserved),
            "one2one" | "one_to_one" => Ok(RelationMode::OneToOne),
            _ => Err(format!("unknown relation mode `{}`", s)),
        }
    }
}

type EndpointKey = BTreeSet<(Span, EntityType)>;

fn group_preserved_keys(
    layer: &SemanticLayer,
) -> Result<Vec<(RelationType, EndpointKey, EndpointKey)>, AgreementError> {
    layer
        .relations
        .iter()
        .map(|r| {
            let res = groups::resolve(r, layer)?;
            let key = |es: &[&crate::model::Entity]| es.iter().map(|e| (e.span, e.etype)).collect();
            Ok((r.rtype, key(&res.arg1), key(&res.arg2)))
        })
        .collect()
}

/// `(type, arg1 span+type, arg2 span+type)`.
type PairKey = (RelationType, (Span, EntityType), (Span, EntityType));

fn one_to_one_keys(layer: &SemanticLayer) -> Result<Vec<PairKey>, AgreementError> {
    Ok(groups::expand_all(layer)?
        .into_iter()
        .map(|r| (r.rtype, (r.arg1.span, r.arg1.etype), (r.arg2.span, r.arg2.etype)))
        .collect())
}

/// Relations agree on type and endpoints; assertions never take part.
pub fn relation_counts(a: &SemanticLayer, b: &SemanticLayer, mode: RelationMode) -> Result<Counts, AgreementError> {
    Ok(match mode {
        RelationMode::GroupPreserved => multiset_counts(group_preserved_keys(a)?, group_preserved_keys(b)?),
        RelationMode::OneToOne => multiset_counts(one_to_one_keys(a)?, one_to_one_keys(b)?),
    })
}

pub fn iaa_tokens(a: &TokenLayer, b: &TokenLayer) -> Result<AgreementReport, AgreementError> {
    token_counts(a, b)?.report(&AgreementConfig::default())
}

pub fn iaa_pos(a: &TokenLayer, b: &TokenLayer) -> Result<AgreementReport, AgreementError> {
    pos_counts(a, b)?.report(&AgreementConfig::default())
}

pub fn iaa_chunks(a: &ChunkLayer, b: &ChunkLayer) -> Result<AgreementReport, AgreementError> {
    chunk_counts(a, b)?.report(&AgreementConfig::default())
}

pub fn iaa_entities(
    a: &SemanticLayer,
    b: &SemanticLayer,
    policy: MatchPolicy,
) -> Result<AgreementReport, AgreementError> {
    entity_counts(a, b, policy)?.report(&AgreementConfig::default())
}

pub fn iaa_relations(
    a: &SemanticLayer,
    b: &SemanticLayer,
    mode: RelationMode,
) -> Result<AgreementReport, AgreementError> {
    relation_counts(a, b, mode)?.report(&AgreementConfig::default())
}
