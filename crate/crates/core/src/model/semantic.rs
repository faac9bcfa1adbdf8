//! Entities, assertions, entity groups and relations.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::tagset::UnknownLabel;
use crate::text::{id_key, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntityType {
    Disease,
    Symptom,
    Test,
    Treatment,
}

impl EntityType {
    pub const ALL: [EntityType; 4] =
        [EntityType::Disease, EntityType::Symptom, EntityType::Test, EntityType::Treatment];

    pub fn as_str(self) -> &'static str {
        match self {
            EntityType::Disease => "disease",
            EntityType::Symptom => "symptom",
            EntityType::Test => "test",
            EntityType::Treatment => "treatment",
        }
    }

    /// Abbreviation used in relation-pair names such as `R(Tr, D)`.
    pub fn abbrev(self) -> &'static str {
        match self {
            EntityType::Disease => "D",
            EntityType::Symptom => "S",
            EntityType::Test => "Te",
            EntityType::Treatment => "Tr",
        }
    }

    /// Assertion labels this entity type accepts, in table order.
    pub fn assertions(self) -> &'static [AssertionType] {
        use AssertionType::*;
        match self {
            EntityType::Disease | EntityType::Symptom => {
                &[Present, Absent, Possible, Conditional, NotAssociated, Occasional]
            }
            EntityType::Treatment => &[Present, Absent, Historical],
            EntityType::Test => &[],
        }
    }
}

impl fmt::Display for EntityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EntityType {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EntityType::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| UnknownLabel { kind: "entity type", label: s.to_string() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssertionType {
    Present,
    Absent,
    Possible,
    Conditional,
    NotAssociated,
    Occasional,
    Historical,
}

impl AssertionType {
    pub const ALL: [AssertionType; 7] = [
        AssertionType::Present,
        AssertionType::Absent,
        AssertionType::Possible,
        AssertionType::Conditional,
        AssertionType::NotAssociated,
        AssertionType::Occasional,
        AssertionType::Historical,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AssertionType::Present => "present",
            AssertionType::Absent => "absent",
            AssertionType::Possible => "possible",
            AssertionType::Conditional => "conditional",
            AssertionType::NotAssociated => "not_associated",
            AssertionType::Occasional => "occasional",
            AssertionType::Historical => "historical",
        }
    }
}

impl fmt::Display for AssertionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AssertionType {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AssertionType::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| UnknownLabel { kind: "assertion", label: s.to_string() })
    }
}

/// Whether an entity of type `etype` may carry assertion `a`.
pub fn assertion_valid(etype: EntityType, a: AssertionType) -> bool {
    etype.assertions().contains(&a)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelationType {
    TrID,
    TrWD,
    TrCD,
    TrAD,
    TrIS,
    TrWS,
    TrCS,
    TrAS,
    TrNAS,
    TeRD,
    TeCD,
    TeRS,
    TeAS,
    DCS,
    SID,
}

impl RelationType {
    pub const ALL: [RelationType; 15] = [
        RelationType::TrID,
        RelationType::TrWD,
        RelationType::TrCD,
        RelationType::TrAD,
        RelationType::TrIS,
        RelationType::TrWS,
        RelationType::TrCS,
        RelationType::TrAS,
        RelationType::TrNAS,
        RelationType::TeRD,
        RelationType::TeCD,
        RelationType::TeRS,
        RelationType::TeAS,
        RelationType::DCS,
        RelationType::SID,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RelationType::TrID => "TrID",
            RelationType::TrWD => "TrWD",
            RelationType::TrCD => "TrCD",
            RelationType::TrAD => "TrAD",
            RelationType::TrIS => "TrIS",
            RelationType::TrWS => "TrWS",
            RelationType::TrCS => "TrCS",
            RelationType::TrAS => "TrAS",
            RelationType::TrNAS => "TrNAS",
            RelationType::TeRD => "TeRD",
            RelationType::TeCD => "TeCD",
            RelationType::TeRS => "TeRS",
            RelationType::TeAS => "TeAS",
            RelationType::DCS => "DCS",
            RelationType::SID => "SID",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            RelationType::TrID => "Treatment improves disease",
            RelationType::TrWD => "Treatment worsen disease",
            RelationType::TrCD => "Treatment causes disease",
            RelationType::TrAD => "Treatment is administered for disease",
            RelationType::TrIS => "Treatment improves symptom",
            RelationType::TrWS => "Treatment worsen symptom",
            RelationType::TrCS => "Treatment causes symptom",
            RelationType::TrAS => "Treatment is administered for symptom",
            RelationType::TrNAS => "Treatment is not administered because of symptom",
            RelationType::TeRD => "Test reveals disease",
            RelationType::TeCD => "Test conducted to investigate disease",
            RelationType::TeRS => "Test reveals symptom",
            RelationType::TeAS => "Test is administered because of symptom",
            RelationType::DCS => "Disease causes symptom",
            RelationType::SID => "Symptom indicates disease",
        }
    }

    /// Ordered `(arg1, arg2)` entity types.
    pub fn signature(self) -> (EntityType, EntityType) {
        use EntityType::*;
        use RelationType::*;
        match self {
            TrID | TrWD | TrCD | TrAD => (Treatment, Disease),
            TrIS | TrWS | TrCS | TrAS | TrNAS => (Treatment, Symptom),
            TeRD | TeCD => (Test, Disease),
            TeRS | TeAS => (Test, Symptom),
            DCS => (Disease, Symptom),
            SID => (Symptom, Disease),
        }
    }

    /// The unordered entity-pair category, e.g. `R(D, S)` for both DCS and SID.
    pub fn pair(self) -> RelationPair {
        use RelationType::*;
        match self {
            TrID | TrWD | TrCD | TrAD => RelationPair::TreatmentDisease,
            TrIS | TrWS | TrCS | TrAS | TrNAS => RelationPair::TreatmentSymptom,
            TeRD | TeCD => RelationPair::TestDisease,
            TeRS | TeAS => RelationPair::TestSymptom,
            DCS | SID => RelationPair::DiseaseSymptom,
        }
    }
}

/// Shorthand for [`RelationType::signature`].
pub fn relation_signature(rtype: RelationType) -> (EntityType, EntityType) {
    rtype.signature()
}

impl fmt::Display for RelationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelationType {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RelationType::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| UnknownLabel { kind: "relation type", label: s.to_string() })
    }
}

impl Serialize for RelationType {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for RelationType {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelationPair {
    TreatmentDisease,
    TreatmentSymptom,
    TestDisease,
    TestSymptom,
    DiseaseSymptom,
}

impl RelationPair {
    pub const ALL: [RelationPair; 5] = [
        RelationPair::TreatmentDisease,
        RelationPair::TreatmentSymptom,
        RelationPair::TestDisease,
        RelationPair::TestSymptom,
        RelationPair::DiseaseSymptom,
    ];

    pub fn label(self) -> &'static str {
        match self {
            RelationPair::TreatmentDisease => "R(Tr,D)",
            RelationPair::TreatmentSymptom => "R(Tr,S)",
            RelationPair::TestDisease => "R(Te,D)",
            RelationPair::TestSymptom => "R(Te,S)",
            RelationPair::DiseaseSymptom => "R(D,S)",
        }
    }
}

/// A typed mention anchored by document code-point offsets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entity {
    pub id: String,
    pub span: Span,
    pub etype: EntityType,
    pub assertion: Option<AssertionType>,
    pub surface: String,
}

/// Same-type entities that jointly take part in one relation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityGroup {
    pub id: String,
    pub etype: EntityType,
    pub members: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Endpoint {
    Entity(String),
    Group(String),
}

impl Endpoint {
    pub fn id(&self) -> &str {
        match self {
            Endpoint::Entity(id) | Endpoint::Group(id) => id,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub id: String,
    pub rtype: RelationType,
    pub arg1: Endpoint,
    pub arg2: Endpoint,
}

/// Entity, group and relation layers of one document.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SemanticLayer {
    pub entities: Vec<Entity>,
    pub groups: Vec<EntityGroup>,
    pub relations: Vec<Relation>,
}

impl SemanticLayer {
    pub fn is_empty(&self) -> bool {
        self.entities.is_empty() && self.groups.is_empty() && self.relations.is_empty()
    }

    pub fn entity(&self, id: &str) -> Option<&Entity> {
        self.entities.iter().find(|e| e.id == id)
    }

    pub fn group(&self, id: &str) -> Option<&EntityGroup> {
        self.groups.iter().find(|g| g.id == id)
    }

    /// Sort every list into canonical order: entities by (start, end, id);
    /// group members by entity order; groups by their first member, then id;
    /// relations by the hulls of their endpoints, then type and id.
    pub fn canonicalize(&mut self) {
        self.entities.sort_by_key(|a| (a.span, id_key(&a.id)));
        let rank: HashMap<&str, usize> = self.entities.iter().enumerate().map(|(i, e)| (e.id.as_str(), i)).collect();
        let member_rank = |id: &String| (rank.get(id.as_str()).copied().unwrap_or(usize::MAX), id_key(id));
        for g in &mut self.groups {
            g.members.sort_by_key(member_rank);
            g.members.dedup();
        }
        self.groups.sort_by_key(|g| (g.members.first().map(member_rank), id_key(&g.id)));

        let spans: HashMap<&str, Span> = self.entities.iter().map(|e| (e.id.as_str(), e.span)).collect();
        let hull =
            |ids: &[String]| ids.iter().filter_map(|id| spans.get(id.as_str())).copied().reduce(|a, b| a.hull(&b));
        let groups: HashMap<&str, Option<Span>> =
            self.groups.iter().map(|g| (g.id.as_str(), hull(&g.members))).collect();
        let endpoint_span = |ep: &Endpoint| match ep {
            Endpoint::Entity(id) => spans.get(id.as_str()).copied(),
            Endpoint::Group(id) => groups.get(id.as_str()).copied().flatten(),
        };
        let mut keyed: Vec<_> = std::mem::take(&mut self.relations)
            .into_iter()
            .map(|r| ((endpoint_span(&r.arg1), endpoint_span(&r.arg2), r.rtype, id_key(&r.id)), r))
            .collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        self.relations = keyed.into_iter().map(|(_, r)| r).collect();
    }
}
