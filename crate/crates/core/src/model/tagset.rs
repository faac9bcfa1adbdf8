//! Closed label inventories.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Error returned when a label is not a member of its inventory.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown {kind} label `{label}`")]
pub struct UnknownLabel {
    pub kind: &'static str,
    pub label: String,
}

macro_rules! label_set {
    (
        $(#[$meta:meta])*
        $name:ident, $kind:literal {
            $($variant:ident => $text:literal, $desc:literal;)+
        }
    ) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum $name {
            $($variant,)+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant,)+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $text,)+
                }
            }

            pub fn description(self) -> &'static str {
                match self {
                    $($name::$variant => $desc,)+
                }
            }

            fn lookup(s: &str) -> Option<Self> {
                match s {
                    $($text => Some($name::$variant),)+
                    _ => None,
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(self.as_str())
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

label_set! {
    /// Part-of-speech tags (33 labels, CTB-derived).
    PosTag, "pos" {
        NN => "NN", "common nouns";
        PU => "PU", "punctuation";
        VV => "VV", "other verbs";
        CD => "CD", "cardinal numbers";
        VA => "VA", "predicative adjective";
        JJ => "JJ", "noun-modifier other than nouns";
        AD => "AD", "adverbs";
        M => "M", "measure word (including classifiers)";
        VE => "VE", "you3 as the main verb";
        P => "P", "prepositions (excluding ba3 and bei4)";
        LC => "LC", "localizer";
        NT => "NT", "temporal nouns";
        CC => "CC", "coordinating conj";
        DT => "DT", "determiner";
        OD => "OD", "ordinal numbers";
        ETC => "ETC", "tags for deng3 and deng3deng3 in coordination phrases";
        NR => "NR", "proper nouns";
        VC => "VC", "copula shi4";
        PN => "PN", "pronouns";
        DEG => "DEG", "associative de5";
        MSP => "MSP", "some particles";
        CS => "CS", "subordinating conj";
        DEC => "DEC", "de5 for relative-clause etc.";
        SB => "SB", "bei4 in short bei-construction";
        BA => "BA", "ba3 in ba-const";
        FW => "FW", "foreign words";
        LB => "LB", "bei4 in long bei-construction";
        AS => "AS", "aspect marker";
        SP => "SP", "sentence-final particle";
        DER => "DER", "de5 in V-de const. and V-de-R";
        DEV => "DEV", "de5 as the head of DVP";
        IJ => "IJ", "interjection";
        ON => "ON", "onomatopoeia";
    }
}

label_set! {
    /// Syntactic (phrase and verb-compound) labels, 23 in total.
    SynTag, "syntactic" {
        NP => "NP", "noun phrase";
        VP => "VP", "verb phrase";
        IP => "IP", "simple clause";
        QP => "QP", "quantifier phrase";
        ADJP => "ADJP", "adjective phrase";
        ADVP => "ADVP", "adverbial phrase";
        CLP => "CLP", "classifier phrase";
        LST => "LST", "list marker";
        PP => "PP", "preposition phrase";
        LCP => "LCP", "phrase formed by \"phrase + LC\"";
        FRAG => "FRAG", "fragment";
        DP => "DP", "determiner phrase";
        VCD => "VCD", "coordinated verb compound";
        VSB => "VSB", "verb compounds formed by a modifier + a head";
        PRN => "PRN", "parenthetical";
        VRD => "VRD", "verb resultative compound";
        UCP => "UCP", "unidentical coordination phrase";
        DNP => "DNP", "phrase formed by \"phrase + DEG\"";
        CP => "CP", "clause headed by C (complementizer)";
        VPT => "VPT", "potential form V-de-R or V-bu-R";
        VNV => "VNV", "verb compounds formed by A-not-A or A-one-A";
        VCP => "VCP", "verb compounds formed by VV + VC";
        DVP => "DVP", "phrase formed by \"phrase + DEV\"";
    }
}

impl FromStr for PosTag {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PosTag::lookup(s).ok_or_else(|| UnknownLabel { kind: "pos", label: s.to_string() })
    }
}

impl FromStr for SynTag {
    type Err = UnknownLabel;

    /// `VS` is accepted as an alias of `VSB`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "VS" {
            return Ok(SynTag::VSB);
        }
        SynTag::lookup(s).ok_or_else(|| UnknownLabel { kind: "syntactic", label: s.to_string() })
    }
}
