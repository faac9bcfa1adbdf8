//! Labeled bracketing comparison of constituency trees.
//!
//! Each non-preterminal node becomes a bracket `label[first, last)` over leaf
//! indices. Two trees agree on the size of the multiset intersection of their
//! brackets. Defaults follow the usual evalb setup: labeled matching,
//! punctuation leaves (`PU`) removed before indexing, root bracket kept.

mod tree;

use std::fmt;

use serde::{Deserialize, Serialize};

pub(crate) use tree::unescape_word;
pub use tree::ParseTree;

use crate::agreement::{multiset_counts, AgreementConfig, AgreementError, AgreementReport, Counts};
use crate::model::{PosTag, SynTag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalParams {
    pub labeled: bool,
    pub include_root: bool,
    pub ignore_punct: bool,
}

impl Default for EvalParams {
    fn default() -> Self {
        EvalParams { labeled: true, include_root: true, ignore_punct: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Bracket {
    pub label: SynTag,
    pub first: usize,
    pub last: usize,
}

impl fmt::Display for Bracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{},{}]", self.label, self.first, self.last)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParsevalError {
    #[error("malformed tree: phrase node without children")]
    Malformed,
    #[error("length-mismatch: gold has {gold} scored leaves, candidate {cand}")]
    LengthMismatch { gold: usize, cand: usize },
    #[error("tree count mismatch: {gold} gold trees, {cand} candidate trees")]
    TreeCountMismatch { gold: usize, cand: usize },
}

/// Number of leaves left after the punctuation filter.
pub fn scored_leaf_count(tree: &ParseTree, params: &EvalParams) -> usize {
    tree.leaves().iter().filter(|(tag, _)| !(params.ignore_punct && *tag == PosTag::PU)).count()
}

/// Bracket multiset of `tree`, in post-order. Brackets that cover no scored
/// leaf are dropped.
pub fn brackets(tree: &ParseTree, params: &EvalParams) -> Result<Vec<Bracket>, ParsevalError> {
    if tree.has_empty_phrase() {
        return Err(ParsevalError::Malformed);
    }
    let mut out = Vec::new();
    let mut next = 0;
    collect(tree, params, &mut next, &mut out, true);
    Ok(out)
}

fn collect(tree: &ParseTree, params: &EvalParams, next: &mut usize, out: &mut Vec<Bracket>, root: bool) {
    match tree {
        ParseTree::Word { tag, .. } => {
            if !(params.ignore_punct && *tag == PosTag::PU) {
                *next += 1;
            }
        }
        ParseTree::Phrase { label, children } => {
            let first = *next;
            for c in children {
                collect(c, params, next, out, false);
            }
            if *next > first && (params.include_root || !root) {
                out.push(Bracket { label: *label, first, last: *next });
            }
        }
    }
}

fn keys(bs: &[Bracket], labeled: bool) -> impl Iterator<Item = (Option<SynTag>, usize, usize)> + '_ {
    bs.iter().map(move |b| (labeled.then_some(b.label), b.first, b.last))
}

/// Agreement counts of one sentence, gold as group A.
pub fn tree_counts(gold: &ParseTree, cand: &ParseTree, params: &EvalParams) -> Result<Counts, ParsevalError> {
    let (ng, nc) = (scored_leaf_count(gold, params), scored_leaf_count(cand, params));
    if ng != nc {
        return Err(ParsevalError::LengthMismatch { gold: ng, cand: nc });
    }
    let g = brackets(gold, params)?;
    let c = brackets(cand, params)?;
    Ok(multiset_counts(keys(&g, params.labeled), keys(&c, params.labeled)))
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScoreError {
    #[error(transparent)]
    Parseval(#[from] ParsevalError),
    #[error(transparent)]
    Agreement(#[from] AgreementError),
}

pub fn score_trees(gold: &ParseTree, cand: &ParseTree, params: &EvalParams) -> Result<AgreementReport, ScoreError> {
    Ok(tree_counts(gold, cand, params)?.report(&AgreementConfig::default())?)
}

/// Sentence excluded from a corpus score.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Excluded {
    pub index: usize,
    pub error: ParsevalError,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CorpusScore {
    /// Micro-averaged counts over the scored sentences.
    pub counts: Counts,
    pub per_sentence: Vec<Option<Counts>>,
    pub excluded: Vec<Excluded>,
}

/// Score aligned tree lists sentence by sentence. Sentences whose leaf
/// counts differ are excluded and listed, never silently dropped.
pub fn score_tree_lists(
    gold: &[ParseTree],
    cand: &[ParseTree],
    params: &EvalParams,
) -> Result<CorpusScore, ParsevalError> {
    if gold.len() != cand.len() {
        return Err(ParsevalError::TreeCountMismatch { gold: gold.len(), cand: cand.len() });
    }
    let mut score = CorpusScore::default();
    for (index, (g, c)) in gold.iter().zip(cand).enumerate() {
        match tree_counts(g, c, params) {
            Ok(counts) => {
                score.counts += counts;
                score.per_sentence.push(Some(counts));
            }
            Err(error @ ParsevalError::LengthMismatch { .. }) => {
                score.per_sentence.push(None);
                score.excluded.push(Excluded { index, error });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(score)
}
