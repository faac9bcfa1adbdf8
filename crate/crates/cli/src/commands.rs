use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use clincorp::agreement::{
    chunk_counts, entity_counts, pos_counts, relation_counts, token_counts, AgreementConfig, Counts, RelationMode,
};
use clincorp::groups::{expand_all, render_one_to_one};
use clincorp::io::{load_annotation_set, load_corpus, parse_standoff, Bundle};
use clincorp::model::{validate_with, AnnotationSet, DocumentAnnotations, Severity, ValidateOptions};
use clincorp::parseval::score_tree_lists;
use clincorp::segment::{advise_with, index_lexicon, load_lexicon, DecisionTable, Rule};
use clincorp::stats::{
    assertion_cross_table, avg_sentence_length, distribution, relation_table, CrossRow, DistributionRow,
};
use clincorp::workflow::{diff_report, kfold as make_folds, DiffLayer, Disagreement};
use clincorp::{DocType, EvalParams, MatchPolicy};
use serde::Serialize;

use crate::config::{pick, Config};
use crate::{CliError, CmdResult, CompareArgs, Format, LayerArg, Output, Report};

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tsv" => Ok(Format::Tsv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format {}", s)),
        }
    }
}

fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn validate(cfg: &Config, dir: &Path) -> CmdResult {
    let corpus = load_corpus(dir)?;
    let opts = ValidateOptions { section_names: cfg.section_names.clone() };
    let mut out = String::new();
    let (mut errors, mut warnings) = (0, 0);
    for b in &corpus {
        let mut set = AnnotationSet::new("input");
        set.insert(b.annotations.clone());
        for d in validate_with(&set, &b.document, &opts)? {
            match d.severity {
                Severity::Error => errors += 1,
                Severity::Warning => warnings += 1,
            }
            out.push_str(&format!("{}\t{}\n", b.document.id, d));
        }
    }
    eprintln!("{} documents, {} errors, {} warnings", corpus.len(), errors, warnings);
    Ok(Output { stdout: out, findings: errors + warnings > 0 })
}

/// Both directories as annotation sets over the same documents.
fn paired(a: &Path, b: &Path) -> Result<(AnnotationSet, AnnotationSet), CliError> {
    let sa = load_annotation_set(a, "a")?;
    let sb = load_annotation_set(b, "b")?;
    let ka: BTreeSet<&String> = sa.docs.keys().collect();
    let kb: BTreeSet<&String> = sb.docs.keys().collect();
    if let Some(id) = ka.symmetric_difference(&kb).next() {
        let (has, lacks) = if ka.contains(id) { (a, b) } else { (b, a) };
        return Err(CliError(format!("document {} is in {} but not in {}", id, has.display(), lacks.display())));
    }
    Ok((sa, sb))
}

fn doc_counts(
    layer: LayerArg,
    a: &DocumentAnnotations,
    b: &DocumentAnnotations,
    policy: MatchPolicy,
    mode: RelationMode,
    params: &EvalParams,
) -> Result<(Counts, bool), CliError> {
    let tokens = |d: &DocumentAnnotations| d.tokens.clone().unwrap_or_default();
    let sem = |d: &DocumentAnnotations| d.semantic.clone().unwrap_or_default();
    let wrap = |e: clincorp::agreement::AgreementError| CliError(format!("{}: {}", a.doc_id, e));
    let counts = match layer {
        LayerArg::Seg => token_counts(&tokens(a), &tokens(b)).map_err(wrap)?,
        LayerArg::Pos => pos_counts(&tokens(a), &tokens(b)).map_err(wrap)?,
        LayerArg::Chunk => {
            chunk_counts(&a.chunks.clone().unwrap_or_default(), &b.chunks.clone().unwrap_or_default()).map_err(wrap)?
        }
        LayerArg::Entity => entity_counts(&sem(a), &sem(b), policy).map_err(wrap)?,
        LayerArg::Relation => relation_counts(&sem(a), &sem(b), mode).map_err(wrap)?,
        LayerArg::Tree => {
            let trees = |d: &DocumentAnnotations| d.trees.as_ref().map(|t| t.trees.clone()).unwrap_or_default();
            let score =
                score_tree_lists(&trees(a), &trees(b), params).map_err(|e| CliError(format!("{}: {}", a.doc_id, e)))?;
            for x in &score.excluded {
                eprintln!("warning: {} sentence {} excluded: {}", a.doc_id, x.index + 1, x.error);
            }
            return Ok((score.counts, !score.excluded.is_empty()));
        }
    };
    Ok((counts, false))
}

/// Micro-averaged agreement over every paired document; `a` plays gold when
/// scoring.
pub fn compare(cfg: &Config, args: &CompareArgs, a: &Path, b: &Path) -> CmdResult {
    let policy = pick(args.policy, cfg.policy.as_deref(), MatchPolicy::SpanTypeAssertion)?;
    let mode = pick(args.mode, cfg.mode.as_deref(), RelationMode::GroupPreserved)?;
    let beta = args.beta.or(cfg.beta).unwrap_or(1.0);
    let params = cfg.parseval.unwrap_or_default();
    let (sa, sb) = paired(a, b)?;
    let mut total = Counts::default();
    let mut excluded = false;
    for (id, da) in &sa.docs {
        let db = &sb.docs[id];
        let (counts, dropped) = doc_counts(args.layer, da, db, policy, mode, &params)?;
        total += counts;
        excluded |= dropped;
    }
    let report = total.report(&AgreementConfig { beta })?;
    Ok(Output { stdout: format!("{}\n", report.to_json()), findings: excluded })
}

fn diff_layer(layer: LayerArg) -> DiffLayer {
    match layer {
        LayerArg::Seg => DiffLayer::Seg,
        LayerArg::Pos => DiffLayer::Pos,
        LayerArg::Chunk => DiffLayer::Chunk,
        LayerArg::Tree => DiffLayer::Tree,
        LayerArg::Entity => DiffLayer::Entity,
        LayerArg::Relation => DiffLayer::Relation,
    }
}

#[derive(Serialize)]
struct DocRecord<'a> {
    doc: &'a str,
    #[serde(flatten)]
    record: &'a Disagreement,
}

pub fn diff(cfg: &Config, layer: LayerArg, format: Option<Format>, a: &Path, b: &Path) -> CmdResult {
    let format = pick(format, cfg.format.as_deref(), Format::Tsv)?;
    let (sa, sb) = paired(a, b)?;
    let mut all = Vec::new();
    for (id, da) in &sa.docs {
        all.push((id.as_str(), diff_report(da, &sb.docs[id], diff_layer(layer))?));
    }
    let findings = all.iter().any(|(_, r)| !r.is_empty());
    let stdout = match format {
        Format::Tsv => {
            let mut s = String::from("doc\tkind\tlocation\tsurface\ta\tb\tfields\n");
            for (doc, records) in &all {
                records.iter().for_each(|r| s.push_str(&format!("{}\t{}\n", doc, r)));
            }
            s
        }
        Format::Json => {
            let flat: Vec<DocRecord> =
                all.iter().flat_map(|(doc, rs)| rs.iter().map(move |record| DocRecord { doc, record })).collect();
            json(&flat)?
        }
    };
    Ok(Output { stdout, findings })
}

pub fn expand(path: &Path) -> CmdResult {
    let bytes = fs::read(path).map_err(|e| CliError(format!("{}: {}", path.display(), e)))?;
    let layer = parse_standoff(&bytes).map_err(|e| CliError(format!("{}: {}", path.display(), e)))?;
    let rels = expand_all(&layer).map_err(|e| CliError(format!("{}: {}", path.display(), e)))?;
    Ok(Output::clean(render_one_to_one(&rels)))
}

/// Cross-table row with the group folded into the label, e.g. `disease/present`.
#[derive(Serialize)]
struct CrossOut {
    label: String,
    count: u64,
    pct_within: f64,
    pct_all: f64,
}

impl From<&CrossRow> for CrossOut {
    fn from(r: &CrossRow) -> Self {
        CrossOut {
            label: format!("{}/{}", r.group, r.label),
            count: r.count,
            pct_within: r.pct_within,
            pct_all: r.pct_all,
        }
    }
}

fn distribution_out(rows: &[DistributionRow], format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => json(&rows),
        Format::Tsv => Ok(rows.iter().fold(String::from("label\tcount\tpct\n"), |s, r| s + &format!("{}\n", r))),
    }
}

fn cross_out(rows: &[CrossRow], format: Format) -> Result<String, CliError> {
    let rows: Vec<CrossOut> = rows.iter().map(CrossOut::from).collect();
    match format {
        Format::Json => json(&rows),
        Format::Tsv => Ok(rows.iter().fold(String::from("label\tcount\tpct_within\tpct_all\n"), |s, r| {
            s + &format!("{}\t{}\t{:.2}\t{:.2}\n", r.label, r.count, r.pct_within, r.pct_all)
        })),
    }
}

pub fn stats(cfg: &Config, report: Report, doc_type: Option<DocType>, format: Option<Format>, dir: &Path) -> CmdResult {
    let format = pick(format, cfg.format.as_deref(), Format::Tsv)?;
    let doc_type = match doc_type {
        Some(t) => Some(t),
        None => cfg.doc_type.as_deref().map(DocType::from_str).transpose()?,
    };
    let corpus = load_corpus(dir)?;
    let selected: Vec<Bundle> =
        corpus.iter().filter(|b| doc_type.is_none() || b.document.doc_type == doc_type).cloned().collect();
    let stdout = match report {
        Report::Pos | Report::Syn => {
            let layer = report.layer().expect("pos and syn map to a layer");
            distribution_out(&distribution(&corpus, layer, doc_type)?, format)?
        }
        Report::Entity => cross_out(&assertion_cross_table(&selected), format)?,
        Report::Relation => cross_out(&relation_table(&selected)?, format)?,
        Report::Length => {
            let avg = avg_sentence_length(&corpus, doc_type)?;
            match format {
                Format::Tsv => format!("label\tvalue\nmean_sentence_length\t{:.2}\n", avg),
                Format::Json => format!("{{\"mean_sentence_length\":{:.2}}}\n", avg),
            }
        }
    };
    Ok(Output::clean(stdout))
}

const ID_EXTS: [&str; 6] = [".meta.json", ".txt", ".tok", ".chk", ".ptb", ".ann"];

/// Document ids from a corpus directory (shared basenames) or a file with
/// one id per line.
pub fn list_ids(source: &Path) -> Result<Vec<String>, CliError> {
    let err = |e: std::io::Error| CliError(format!("{}: {}", source.display(), e));
    let mut ids = BTreeSet::new();
    if source.is_dir() {
        for entry in fs::read_dir(source).map_err(err)? {
            let name = entry.map_err(err)?.file_name().to_string_lossy().into_owned();
            if let Some(base) = ID_EXTS.iter().find_map(|ext| name.strip_suffix(ext)).filter(|b| !b.is_empty()) {
                ids.insert(base.to_string());
            }
        }
    } else {
        let text = fs::read_to_string(source).map_err(err)?;
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            if !ids.insert(line.to_string()) {
                return Err(CliError(format!("{}: duplicate id {}", source.display(), line)));
            }
        }
    }
    Ok(ids.into_iter().collect())
}

pub fn kfold(cfg: &Config, k: Option<usize>, seed: Option<u64>, source: &Path) -> CmdResult {
    let k = k.or(cfg.k).unwrap_or(10);
    let seed = seed.or(cfg.seed).unwrap_or(0);
    let manifest = make_folds(&list_ids(source)?, k, seed)?;
    Ok(Output::clean(manifest.to_json()))
}

pub fn seg_advise(
    cfg: &Config,
    lexicon: &Path,
    order: Option<String>,
    format: Option<Format>,
    term: &str,
) -> CmdResult {
    let format = pick(format, cfg.format.as_deref(), Format::Tsv)?;
    let order: Option<Vec<String>> =
        order.map(|o| o.split(',').map(|r| r.trim().to_string()).collect()).or_else(|| cfg.rule_order.clone());
    let table = match order {
        Some(o) => DecisionTable::new(o.iter().map(|r| r.parse::<Rule>()).collect::<Result<_, _>>()?)?,
        None => DecisionTable::default(),
    };
    let bytes = fs::read(lexicon).map_err(|e| CliError(format!("{}: {}", lexicon.display(), e)))?;
    let lex = index_lexicon(load_lexicon(&bytes).map_err(|e| CliError(format!("{}: {}", lexicon.display(), e)))?);
    let entry = lex.get(term).ok_or_else(|| CliError(format!("{} is not in {}", term, lexicon.display())))?;
    let decision = advise_with(entry, &table, &lex)?;
    let stdout = match format {
        Format::Tsv => format!("{}\t{}\n", term, decision),
        Format::Json => json(&serde_json::json!({ "term": term, "decision": decision }))?,
    };
    Ok(Output::clean(stdout))
}
