use super::{decode, is_comment, parse_usize, ParseError, ParseErrorKind};
use crate::model::{Chunk, ChunkLayer, SynTag};

const HEADER: &str = "# chunks: first\tlast_exclusive\tlabel";

/// Parse a `.chk` file. Every blank line terminates a sentence, so a
/// sentence without chunks is a lone blank line. A final sentence may omit
/// its terminating blank line.
pub fn parse_chunk_file(bytes: &[u8]) -> Result<ChunkLayer, ParseError> {
    let text = decode(bytes)?;
    let mut layer = ChunkLayer::default();
    let mut current = Vec::new();
    let mut open = false;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if is_comment(line) {
            continue;
        }
        if line.trim().is_empty() {
            current.sort();
            layer.sentences.push(std::mem::take(&mut current));
            open = false;
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(ParseError::new(
                line_no,
                ParseErrorKind::MalformedLine(format!("expected 3 columns, found {}", cols.len())),
            ));
        }
        let first = parse_usize(cols[0], line_no)?;
        let last = parse_usize(cols[1], line_no)?;
        if first >= last {
            return Err(ParseError::new(line_no, ParseErrorKind::NonMonotonicSpan { start: first, end: last }));
        }
        let label = cols[2]
            .parse::<SynTag>()
            .map_err(|_| ParseError::new(line_no, ParseErrorKind::UnknownSyntacticLabel(cols[2].to_string())))?;
        current.push(Chunk { first, last, label });
        open = true;
    }
    if open {
        current.sort();
        layer.sentences.push(current);
    }
    Ok(layer)
}

pub fn serialize_chunks(layer: &ChunkLayer) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for sentence in &layer.sentences {
        let mut sorted = sentence.clone();
        sorted.sort();
        for c in sorted {
            out.push_str(&format!("{}\t{}\t{}\n", c.first, c.last, c.label));
        }
        out.push('\n');
    }
    out
}
