//! Browser bindings for the demo page in `www/`.
//!
//! Every export takes annotation text as typed into the page and returns a
//! JSON string: the report on success, `{"error": "..."}` otherwise. Keeping
//! errors in-band means the functions behave the same natively and in wasm.

use clincorp::agreement::{entity_counts, relation_counts, AgreementConfig, Counts, RelationMode};
use clincorp::io::{parse_standoff, parse_tree_file};
use clincorp::parseval::score_tree_lists;
use clincorp::{EvalParams, MatchPolicy, SemanticLayer};
use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

fn report(c: Counts) -> Result<Value, String> {
    let r = c.report(&AgreementConfig::default()).map_err(|e| e.to_string())?;
    // round through the fixed three-decimal rendering
    serde_json::from_str(&r.to_json()).map_err(|e| e.to_string())
}

fn finish(result: Result<Value, String>) -> String {
    result.unwrap_or_else(|e| json!({ "error": e })).to_string()
}

fn standoff(side: &str, text: &str) -> Result<SemanticLayer, String> {
    parse_standoff(text.as_bytes()).map_err(|e| format!("{}: {}", side, e))
}

pub fn score_trees_report(gold: &str, candidate: &str, labeled: bool) -> Result<Value, String> {
    let g = parse_tree_file(gold.as_bytes()).map_err(|e| format!("gold: {}", e))?;
    let c = parse_tree_file(candidate.as_bytes()).map_err(|e| format!("candidate: {}", e))?;
    let params = EvalParams { labeled, ..EvalParams::default() };
    let score = score_tree_lists(&g.trees, &c.trees, &params).map_err(|e| e.to_string())?;
    let per_sentence = score
        .per_sentence
        .iter()
        .map(|s| match s {
            Some(c) => report(*c),
            None => Ok(Value::Null),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let excluded: Vec<Value> =
        score.excluded.iter().map(|x| json!({ "sentence": x.index + 1, "reason": x.error.to_string() })).collect();
    Ok(json!({ "corpus": report(score.counts)?, "sentences": per_sentence, "excluded": excluded }))
}

pub fn entity_iaa_report(a: &str, b: &str, policy: &str) -> Result<Value, String> {
    let policy: MatchPolicy = policy.parse()?;
    let counts = entity_counts(&standoff("A", a)?, &standoff("B", b)?, policy).map_err(|e| e.to_string())?;
    report(counts)
}

pub fn relation_iaa_report(a: &str, b: &str) -> Result<Value, String> {
    let (a, b) = (standoff("A", a)?, standoff("B", b)?);
    let mode = |m| relation_counts(&a, &b, m).map_err(|e| e.to_string()).and_then(report);
    Ok(json!({
        "group_preserved": mode(RelationMode::GroupPreserved)?,
        "one_to_one": mode(RelationMode::OneToOne)?,
    }))
}

/// Labeled (or unlabeled) bracket agreement of two bracketed tree files.
#[wasm_bindgen]
pub fn score_trees(gold: &str, candidate: &str, labeled: bool) -> String {
    finish(score_trees_report(gold, candidate, labeled))
}

/// Entity agreement of two `.ann` texts under `span`, `span_type` or
/// `span_type_assertion`.
#[wasm_bindgen]
pub fn entity_iaa(a: &str, b: &str, policy: &str) -> String {
    finish(entity_iaa_report(a, b, policy))
}

/// Relation agreement of two `.ann` texts in both matching modes.
#[wasm_bindgen]
pub fn relation_iaa(a: &str, b: &str) -> String {
    finish(relation_iaa_report(a, b))
}
