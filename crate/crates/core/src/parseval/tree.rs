use std::fmt;

use crate::model::{PosTag, SynTag};

/// A constituency tree. Preterminals carry the POS tag and the word; every
/// other node carries a syntactic label and at least one child.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseTree {
    Phrase { label: SynTag, children: Vec<ParseTree> },
    Word { tag: PosTag, word: String },
}

impl ParseTree {
    pub fn phrase(label: SynTag, children: Vec<ParseTree>) -> Self {
        ParseTree::Phrase { label, children }
    }

    pub fn word(tag: PosTag, word: impl Into<String>) -> Self {
        ParseTree::Word { tag, word: word.into() }
    }

    pub fn is_preterminal(&self) -> bool {
        matches!(self, ParseTree::Word { .. })
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            ParseTree::Word { .. } => 1,
            ParseTree::Phrase { children, .. } => children.iter().map(ParseTree::leaf_count).sum(),
        }
    }

    /// Preterminals left to right.
    pub fn leaves(&self) -> Vec<(PosTag, &str)> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<(PosTag, &'a str)>) {
        match self {
            ParseTree::Word { tag, word } => out.push((*tag, word)),
            ParseTree::Phrase { children, .. } => children.iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    /// Number of non-preterminal nodes.
    pub fn phrase_count(&self) -> usize {
        match self {
            ParseTree::Word { .. } => 0,
            ParseTree::Phrase { children, .. } => 1 + children.iter().map(ParseTree::phrase_count).sum::<usize>(),
        }
    }

    /// Labels of all non-preterminal nodes in pre-order.
    pub fn phrase_labels(&self) -> Vec<SynTag> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(node) = stack.pop() {
            if let ParseTree::Phrase { label, children } = node {
                out.push(*label);
                stack.extend(children.iter().rev());
            }
        }
        out
    }

    /// True when some phrase node has no children.
    pub fn has_empty_phrase(&self) -> bool {
        match self {
            ParseTree::Word { .. } => false,
            ParseTree::Phrase { children, .. } => {
                children.is_empty() || children.iter().any(ParseTree::has_empty_phrase)
            }
        }
    }
}

pub(crate) fn escape_word(word: &str) -> String {
    word.replace('(', "-LRB-").replace(')', "-RRB-")
}

pub(crate) fn unescape_word(word: &str) -> String {
    word.replace("-LRB-", "(").replace("-RRB-", ")")
}

impl fmt::Display for ParseTree {
    /// Single-line bracketed form, e.g. `(IP (NP (NN a)) (VP (VV b)))`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseTree::Word { tag, word } => write!(f, "({} {})", tag, escape_word(word)),
            ParseTree::Phrase { label, children } => {
                write!(f, "({}", label)?;
                for c in children {
                    write!(f, " {}", c)?;
                }
                f.write_str(")")
            }
        }
    }
}
