use super::{decode, is_comment, parse_usize, ParseError, ParseErrorKind};
use crate::model::{PosTag, Token, TokenLayer};
use crate::text::Span;

const HEADER: &str = "# tokens: start\tend\tsurface[\tpos]";

/// Parse a `.tok` file. Blank lines separate sentences; runs of blank lines
/// count once.
pub fn parse_token_file(bytes: &[u8]) -> Result<TokenLayer, ParseError> {
    let text = decode(bytes)?;
    let mut layer = TokenLayer::default();
    let mut current: Vec<Token> = Vec::new();
    let mut prev_end = 0;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if is_comment(line) {
            continue;
        }
        if line.trim().is_empty() {
            if !current.is_empty() {
                layer.sentences.push(std::mem::take(&mut current));
            }
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 && cols.len() != 4 {
            return Err(ParseError::new(
                line_no,
                ParseErrorKind::MalformedLine(format!("expected 3 or 4 columns, found {}", cols.len())),
            ));
        }
        let start = parse_usize(cols[0], line_no)?;
        let end = parse_usize(cols[1], line_no)?;
        if start >= end || start < prev_end {
            return Err(ParseError::new(line_no, ParseErrorKind::NonMonotonicSpan { start, end }));
        }
        prev_end = end;
        if cols[2].is_empty() {
            return Err(ParseError::new(line_no, ParseErrorKind::MalformedLine("empty surface".into())));
        }
        let pos = match cols.get(3) {
            Some(label) => Some(
                label
                    .parse::<PosTag>()
                    .map_err(|_| ParseError::new(line_no, ParseErrorKind::UnknownPosLabel(label.to_string())))?,
            ),
            None => None,
        };
        current.push(Token { span: Span::new(start, end), surface: cols[2].to_string(), pos });
    }
    if !current.is_empty() {
        layer.sentences.push(current);
    }
    Ok(layer)
}

pub fn serialize_tokens(layer: &TokenLayer) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for (i, sentence) in layer.sentences.iter().filter(|s| !s.is_empty()).enumerate() {
        if i > 0 {
            out.push('\n');
        }
        for t in sentence {
            out.push_str(&format!("{}\t{}\t{}", t.span.start, t.span.end, t.surface));
            if let Some(p) = t.pos {
                out.push('\t');
                out.push_str(p.as_str());
            }
            out.push('\n');
        }
    }
    out
}
