use super::{decode, is_comment, ParseError, ParseErrorKind};
use crate::model::{PosTag, SynTag, TokenLayer, TreeLayer};
use crate::parseval::{unescape_word, ParseTree};

const HEADER: &str = "# trees: one bracketed tree per line";
const MAX_DEPTH: usize = 512;

/// Parse a `.ptb` file: one tree per non-blank, non-comment line.
pub fn parse_tree_file(bytes: &[u8]) -> Result<TreeLayer, ParseError> {
    let text = decode(bytes)?;
    let mut layer = TreeLayer::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || is_comment(line) {
            continue;
        }
        layer.trees.push(parse_line(line, i + 1)?);
    }
    Ok(layer)
}

/// Parse a single bracketed tree.
pub fn parse_tree_line(line: &str) -> Result<ParseTree, ParseError> {
    parse_line(line.trim(), 1)
}

enum Tok<'a> {
    Open,
    Close,
    Atom(&'a str),
}

fn tokenize(line: &str) -> Vec<Tok<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        if c == '(' || c == ')' || c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Tok::Atom(&line[s..i]));
            }
            match c {
                '(' => out.push(Tok::Open),
                ')' => out.push(Tok::Close),
                _ => {}
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Tok::Atom(&line[s..]));
    }
    out
}

struct Frame {
    label: Option<String>,
    children: Vec<ParseTree>,
    words: Vec<String>,
}

fn close(frame: Frame, line: usize) -> Result<ParseTree, ParseError> {
    let malformed = |m: &str| ParseError::new(line, ParseErrorKind::MalformedTree(m.to_string()));
    let Some(label) = frame.label else {
        // unlabeled wrapper `( (IP ...) )`
        return match (frame.children.len(), frame.words.len()) {
            (1, 0) => Ok(frame.children.into_iter().next().unwrap_or_else(|| unreachable!())),
            _ => Err(malformed("unlabeled bracket must wrap exactly one tree")),
        };
    };
    match (frame.children.is_empty(), frame.words.len()) {
        (true, 1) => {
            let tag = label
                .parse::<PosTag>()
                .map_err(|_| ParseError::new(line, ParseErrorKind::UnknownPosLabel(label.clone())))?;
            let word = frame.words.into_iter().next().unwrap_or_default();
            Ok(ParseTree::Word { tag, word: unescape_word(&word) })
        }
        (false, 0) => {
            let label = label
                .parse::<SynTag>()
                .map_err(|_| ParseError::new(line, ParseErrorKind::UnknownSyntacticLabel(label.clone())))?;
            Ok(ParseTree::Phrase { label, children: frame.children })
        }
        (true, 0) => Err(malformed(&format!("({}) has no children", label))),
        (true, _) => Err(malformed(&format!("({} ...) has several words", label))),
        (false, _) => Err(malformed(&format!("({} ...) mixes words and phrases", label))),
    }
}

fn parse_line(line: &str, line_no: usize) -> Result<ParseTree, ParseError> {
    let err = |k: ParseErrorKind| ParseError::new(line_no, k);
    let toks = tokenize(line);
    let mut stack: Vec<Frame> = Vec::new();
    let mut result: Option<ParseTree> = None;
    let mut i = 0;
    while i < toks.len() {
        if result.is_some() {
            return Err(match toks[i] {
                Tok::Close => err(ParseErrorKind::Unbalanced),
                _ => err(ParseErrorKind::MalformedTree("more than one tree on the line".into())),
            });
        }
        match toks[i] {
            Tok::Open => {
                if stack.len() >= MAX_DEPTH {
                    return Err(err(ParseErrorKind::MalformedTree("nesting too deep".into())));
                }
                let label = match toks.get(i + 1) {
                    Some(Tok::Atom(a)) => {
                        i += 1;
                        Some(a.to_string())
                    }
                    _ => None,
                };
                stack.push(Frame { label, children: Vec::new(), words: Vec::new() });
            }
            Tok::Close => {
                let frame = stack.pop().ok_or_else(|| err(ParseErrorKind::Unbalanced))?;
                let tree = close(frame, line_no)?;
                match stack.last_mut() {
                    Some(parent) => parent.children.push(tree),
                    None => result = Some(tree),
                }
            }
            Tok::Atom(a) => match stack.last_mut() {
                Some(frame) => frame.words.push(a.to_string()),
                None => return Err(err(ParseErrorKind::MalformedTree(format!("text `{}` outside brackets", a)))),
            },
        }
        i += 1;
    }
    match result {
        Some(tree) if stack.is_empty() => Ok(tree),
        _ if !stack.is_empty() => Err(err(ParseErrorKind::Unbalanced)),
        _ => Err(err(ParseErrorKind::MalformedTree("empty".into()))),
    }
}

/// Check that tree `i` has exactly the tokens of sentence `i`. The error line
/// is the 1-based tree ordinal.
pub fn check_tree_alignment(trees: &TreeLayer, tokens: &TokenLayer) -> Result<(), ParseError> {
    if trees.trees.len() != tokens.sentences.len() {
        return Err(ParseError::new(
            trees.trees.len().min(tokens.sentences.len()) + 1,
            ParseErrorKind::TreeCount { trees: trees.trees.len(), sentences: tokens.sentences.len() },
        ));
    }
    for (i, (tree, sentence)) in trees.trees.iter().zip(&tokens.sentences).enumerate() {
        let leaves = tree.leaves();
        let aligned = leaves.len() == sentence.len() && leaves.iter().zip(sentence).all(|((_, w), t)| *w == t.surface);
        if !aligned {
            return Err(ParseError::new(
                i + 1,
                ParseErrorKind::LeafMismatch { leaves: leaves.len(), tokens: sentence.len() },
            ));
        }
    }
    Ok(())
}

pub fn serialize_trees(layer: &TreeLayer) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for t in &layer.trees {
        out.push_str(&t.to_string());
        out.push('\n');
    }
    out
}
