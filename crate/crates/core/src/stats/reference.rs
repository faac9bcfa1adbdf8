//! Published distribution tables of the reference clinical corpus,
//! transcribed verbatim (counts and two-decimal percentages). The phrase-label table lists the
//! verb-compound label as `VS`; it is kept as printed and compared through
//! the `VSB` alias.

/// A published percentage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RefPct {
    Value(f64),
    /// Printed as `<x`.
    Below(f64),
}

impl RefPct {
    /// The two-decimal value this entry stands for. `<0.01` stands for 0.00.
    pub fn nominal(self) -> f64 {
        match self {
            RefPct::Value(v) => v,
            RefPct::Below(v) => (v - 0.01).max(0.0),
        }
    }
}

impl std::fmt::Display for RefPct {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RefPct::Value(v) => write!(f, "{:.2}", v),
            RefPct::Below(v) => write!(f, "<{:.2}", v),
        }
    }
}

use RefPct::{Below as Lt, Value as V};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefRow {
    pub label: &'static str,
    pub count: u64,
    pub pct: RefPct,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefCrossRow {
    pub group: &'static str,
    /// `total` for a per-group total row.
    pub label: &'static str,
    pub count: u64,
    pub pct_within: RefPct,
    pub pct_all: RefPct,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefSplitRow {
    pub label: &'static str,
    pub discharge_summary: RefPct,
    pub progress_note: RefPct,
}

const fn r(label: &'static str, count: u64, pct: RefPct) -> RefRow {
    RefRow { label, count, pct }
}

const fn c(group: &'static str, label: &'static str, count: u64, within: f64, all: f64) -> RefCrossRow {
    RefCrossRow { group, label, count, pct_within: V(within), pct_all: V(all) }
}

const fn s(label: &'static str, discharge_summary: RefPct, progress_note: RefPct) -> RefSplitRow {
    RefSplitRow { label, discharge_summary, progress_note }
}

/// POS tags, 47,424 tokens.
pub const POS_TOKENS: u64 = 47_424;
pub const TREE_COUNT: u64 = 2_553;

pub const POS_TAGS: [RefRow; 33] = [
    r("NN", 14_782, V(31.17)),
    r("PU", 10_763, V(22.70)),
    r("VV", 5896, V(12.43)),
    r("CD", 3484, V(7.35)),
    r("VA", 2762, V(5.82)),
    r("JJ", 2086, V(4.40)),
    r("AD", 1759, V(3.71)),
    r("M", 1736, V(3.66)),
    r("VE", 1160, V(2.45)),
    r("P", 628, V(1.32)),
    r("LC", 595, V(1.25)),
    r("NT", 584, V(1.23)),
    r("CC", 463, V(0.98)),
    r("DT", 251, V(0.53)),
    r("OD", 232, V(0.49)),
    r("ETC", 74, V(0.16)),
    r("NR", 53, V(0.11)),
    r("VC", 44, V(0.09)),
    r("PN", 26, V(0.05)),
    r("DEG", 16, V(0.03)),
    r("MSP", 8, V(0.02)),
    r("CS", 7, V(0.01)),
    r("DEC", 6, V(0.01)),
    r("SB", 5, V(0.01)),
    r("BA", 1, Lt(0.01)),
    r("FW", 1, Lt(0.01)),
    r("LB", 1, Lt(0.01)),
    r("AS", 1, Lt(0.01)),
    r("SP", 0, V(0.0)),
    r("DER", 0, V(0.0)),
    r("DEV", 0, V(0.0)),
    r("IJ", 0, V(0.0)),
    r("ON", 0, V(0.0)),
];

/// Syntactic labels over all phrase nodes.
pub const PHRASE_LABELS: [RefRow; 23] = [
    r("NP", 17_254, V(32.43)),
    r("VP", 14_573, V(27.39)),
    r("IP", 9634, V(18.11)),
    r("QP", 2701, V(5.08)),
    r("ADJP", 2114, V(3.97)),
    r("ADVP", 1754, V(3.30)),
    r("CLP", 1736, V(3.26)),
    r("LST", 1104, V(2.07)),
    r("PP", 662, V(1.24)),
    r("LCP", 598, V(1.12)),
    r("FRAG", 341, V(0.64)),
    r("DP", 251, V(0.47)),
    r("VCD", 164, V(0.31)),
    r("VS", 121, V(0.23)),
    r("PRN", 106, V(0.20)),
    r("VRD", 37, V(0.07)),
    r("UCP", 28, V(0.05)),
    r("DNP", 23, V(0.04)),
    r("CP", 6, V(0.01)),
    r("VPT", 1, Lt(0.01)),
    r("VNV", 1, Lt(0.01)),
    r("VCP", 1, Lt(0.01)),
    r("DVP", 0, V(0.0)),
];

/// Entities by type and assertion, 39,511 entities.
pub const ENTITY_TOTAL: u64 = 39_511;

pub const ENTITY_ASSERTIONS: [RefCrossRow; 19] = [
    c("disease", "possible", 3255, 39.09, 8.24),
    c("disease", "present", 2686, 32.25, 6.80),
    c("disease", "absent", 2352, 28.24, 5.95),
    c("disease", "not_associated", 35, 0.42, 0.09),
    c("disease", "conditional", 0, 0.0, 0.0),
    c("disease", "occasional", 0, 0.0, 0.0),
    c("disease", "total", 8328, 100.0, 21.08),
    c("symptom", "absent", 12_070, 63.69, 30.55),
    c("symptom", "present", 6425, 33.90, 16.26),
    c("symptom", "conditional", 257, 1.36, 0.65),
    c("symptom", "occasional", 153, 0.81, 0.39),
    c("symptom", "possible", 41, 0.22, 0.10),
    c("symptom", "not_associated", 5, 0.03, 0.01),
    c("symptom", "total", 18_951, 100.0, 47.96),
    c("treatment", "present", 3703, 70.63, 9.37),
    c("treatment", "historical", 1413, 26.95, 3.58),
    c("treatment", "absent", 127, 2.42, 0.32),
    c("treatment", "total", 5243, 100.0, 13.27),
    c("test", "total", 6989, 100.0, 17.69),
];

/// One-to-one relations by type within entity pair. The pair subtotals sum
/// to 7,691, which is the denominator that reproduces the printed
/// percent-of-all column.
pub const RELATION_TOTAL: u64 = 7_691;

pub const RELATION_TYPES: [RefCrossRow; 20] = [
    c("R(Tr,D)", "TrAD", 393, 58.66, 5.11),
    c("R(Tr,D)", "TrID", 201, 30.00, 2.61),
    c("R(Tr,D)", "TrWD", 70, 10.45, 0.91),
    c("R(Tr,D)", "TrCD", 6, 0.90, 0.08),
    c("R(Tr,D)", "total", 670, 100.0, 8.71),
    c("R(Tr,S)", "TrAS", 613, 30.35, 7.97),
    c("R(Tr,S)", "TrIS", 566, 28.02, 7.36),
    c("R(Tr,S)", "TrWS", 540, 26.73, 7.02),
    c("R(Tr,S)", "TrCS", 298, 14.75, 3.87),
    c("R(Tr,S)", "TrNAS", 3, 0.15, 0.04),
    c("R(Tr,S)", "total", 2020, 100.0, 26.26),
    c("R(Te,D)", "TeRD", 581, 99.49, 7.55),
    c("R(Te,D)", "TeCD", 3, 0.51, 0.04),
    c("R(Te,D)", "total", 584, 100.0, 7.59),
    c("R(Te,S)", "TeRS", 1239, 53.31, 16.11),
    c("R(Te,S)", "TeAS", 1085, 46.69, 14.11),
    c("R(Te,S)", "total", 2324, 100.0, 30.22),
    c("R(D,S)", "SID", 1663, 79.46, 21.62),
    c("R(D,S)", "DCS", 430, 20.54, 5.59),
    c("R(D,S)", "total", 2093, 100.0, 27.21),
];

/// POS percentages by document type.
pub const POS_TAGS_BY_DOC_TYPE: [RefSplitRow; 33] = [
    s("NN", V(32.90), V(30.23)),
    s("PU", V(21.29), V(23.46)),
    s("VV", V(12.85), V(12.20)),
    s("CD", V(6.86), V(7.61)),
    s("VA", V(6.62), V(5.39)),
    s("JJ", V(4.41), V(4.39)),
    s("AD", V(3.40), V(3.88)),
    s("M", V(3.71), V(3.63)),
    s("VE", V(2.09), V(2.64)),
    s("P", V(0.86), V(1.58)),
    s("LC", V(0.93), V(1.43)),
    s("NT", V(1.84), V(0.90)),
    s("CC", V(0.74), V(1.11)),
    s("DT", V(0.54), V(0.52)),
    s("OD", V(0.81), V(0.31)),
    s("ETC", V(0.09), V(0.19)),
    s("NR", V(0.0), V(0.17)),
    s("VC", V(0.02), V(0.13)),
    s("PN", V(0.02), V(0.07)),
    s("DEG", V(0.0), V(0.05)),
    s("MSP", Lt(0.01), V(0.02)),
    s("CS", V(0.02), Lt(0.01)),
    s("DEC", V(0.0), V(0.02)),
    s("SB", V(0.0), V(0.02)),
    s("BA", V(0.0), Lt(0.01)),
    s("FW", V(0.0), Lt(0.01)),
    s("LB", V(0.0), Lt(0.01)),
    s("AS", V(0.0), Lt(0.01)),
    s("SP", V(0.0), V(0.0)),
    s("DER", V(0.0), V(0.0)),
    s("DEV", V(0.0), V(0.0)),
    s("IJ", V(0.0), V(0.0)),
    s("ON", V(0.0), V(0.0)),
];

/// Syntactic label percentages by document type.
pub const PHRASE_LABELS_BY_DOC_TYPE: [RefSplitRow; 23] = [
    s("NP", V(33.27), V(31.95)),
    s("VP", V(27.38), V(27.39)),
    s("IP", V(18.08), V(18.12)),
    s("QP", V(5.17), V(5.02)),
    s("ADJP", V(3.90), V(4.01)),
    s("ADVP", V(2.95), V(3.49)),
    s("CLP", V(3.23), V(3.28)),
    s("LST", V(1.60), V(2.34)),
    s("PP", V(0.83), V(1.48)),
    s("LCP", V(0.78), V(1.32)),
    s("FRAG", V(1.45), V(0.18)),
    s("DP", V(0.47), V(0.47)),
    s("VCD", V(0.50), V(0.20)),
    s("VSB", V(0.22), V(0.23)),
    s("PRN", V(0.07), V(0.27)),
    s("VRD", V(0.05), V(0.08)),
    s("UCP", V(0.03), V(0.06)),
    s("DNP", V(0.01), V(0.06)),
    s("CP", V(0.01), V(0.01)),
    s("VPT", V(0.0), Lt(0.01)),
    s("VNV", V(0.0), Lt(0.01)),
    s("VCP", V(0.0), Lt(0.01)),
    s("DVP", V(0.0), V(0.0)),
];

/// Average tokens per sentence: whole corpus, discharge summaries, progress
/// notes.
pub const AVG_SENTENCE_LENGTH: f64 = 18.58;
pub const AVG_SENTENCE_LENGTH_DISCHARGE: f64 = 14.13;
pub const AVG_SENTENCE_LENGTH_PROGRESS: f64 = 22.42;

/// The POS or phrase-label table as a single-column reference.
pub fn single_column(rows: &[RefRow]) -> Vec<(&'static str, RefPct)> {
    rows.iter().map(|r| (r.label, r.pct)).collect()
}

/// One document-type column of a by-document-type table.
pub fn split_column(rows: &[RefSplitRow], discharge: bool) -> Vec<(&'static str, RefPct)> {
    rows.iter().map(|r| (r.label, if discharge { r.discharge_summary } else { r.progress_note })).collect()
}
