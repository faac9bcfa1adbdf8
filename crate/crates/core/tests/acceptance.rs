//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use clincorp::agreement::{
    iaa_chunks, iaa_entities, iaa_pos, iaa_relations, iaa_tokens, prf, AgreementReport, RelationMode,
};
use clincorp::groups::{expand, resolve};
use clincorp::io::{
    load_corpus, parse_chunk_file, parse_standoff, parse_token_file, parse_tree_file, serialize_chunks,
    serialize_standoff, serialize_tokens, serialize_trees, Bundle, ParseError,
};
use clincorp::model::{
    assertion_valid, validate, AnnotationSet, AssertionType, Chunk, ChunkLayer, Document, DocumentAnnotations,
    Endpoint, Entity, EntityGroup, EntityType, PosTag, Relation, RelationType, Rule, SemanticLayer, SynTag, Token,
    TokenLayer, TreeLayer,
};
use clincorp::parseval::{score_trees, EvalParams, ParseTree};
use clincorp::stats::reference::{self, ENTITY_ASSERTIONS, PHRASE_LABELS, POS_TAGS, RELATION_TYPES};
use clincorp::stats::{
    assertion_cross_table, avg_sentence_length, compare_cross_reference, compare_reference, distribution,
    relation_table, StatLayer,
};
use clincorp::workflow::{check_convergence, kfold, ConvergencePolicy, SplitMix64};
use clincorp::{AgreementConfig, MatchPolicy, Span};

type Check = Result<String, String>;

struct Rng(SplitMix64);

impl Rng {
    fn new(seed: u64) -> Self {
        Rng(SplitMix64::new(seed))
    }

    fn below(&mut self, n: usize) -> usize {
        (self.0.next_u64() % n as u64) as usize
    }

    fn range(&mut self, lo: usize, hi: usize) -> usize {
        lo + self.below(hi - lo + 1)
    }

    fn chance(&mut self, p: f64) -> bool {
        ((self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64) < p
    }

    fn pick<T: Copy>(&mut self, xs: &[T]) -> T {
        xs[self.below(xs.len())]
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_time(start: Instant, limit: Duration) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {:.2?}, limit {:?}", took, limit))
}

// ---------------------------------------------------------------- oracles

/// Greedy one-by-one matching of equal items, quadratic and independent of
/// the library's tally.
fn greedy_agreed<T, F: Fn(&T, &T) -> bool>(a: &[T], b: &[T], eq: F) -> u64 {
    let mut used = vec![false; b.len()];
    let mut n = 0;
    for x in a {
        if let Some(j) = (0..b.len()).find(|&j| !used[j] && eq(x, &b[j])) {
            used[j] = true;
            n += 1;
        }
    }
    n
}

thread_local! {
    static PARTIAL: std::cell::Cell<usize> = const { std::cell::Cell::new(0) };
}

fn oracle_report(r: &AgreementReport, agreed: u64, ca: u64, cb: u64) -> Result<(), String> {
    if agreed > 0 && (agreed < ca || agreed < cb) {
        PARTIAL.with(|c| c.set(c.get() + 1));
    }
    let (p, rc, f) = if ca + cb == 0 {
        (1.0, 1.0, 1.0)
    } else {
        let p = if cb == 0 { 0.0 } else { agreed as f64 / cb as f64 };
        let rc = if ca == 0 { 0.0 } else { agreed as f64 / ca as f64 };
        (p, rc, 2.0 * agreed as f64 / (ca + cb) as f64)
    };
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-12;
    ensure(
        (r.agreed, r.count_a, r.count_b) == (agreed, ca, cb)
            && close(r.precision, p)
            && close(r.recall, rc)
            && close(r.f, f),
        || format!("report {:?} vs oracle ({}, {}, {}) P={} R={} F={}", r, agreed, ca, cb, p, rc, f),
    )
}

fn swap_exact(ab: &AgreementReport, ba: &AgreementReport) -> Result<(), String> {
    ensure(
        ab.precision.to_bits() == ba.recall.to_bits()
            && ab.recall.to_bits() == ba.precision.to_bits()
            && ab.f.to_bits() == ba.f.to_bits(),
        || format!("asymmetric: {:?} vs {:?}", ab, ba),
    )
}

/// Brackets by explicit leaf ranges, punctuation removed afterwards.
fn oracle_brackets(tree: &ParseTree) -> Vec<(SynTag, usize, usize)> {
    fn walk(t: &ParseTree, pos: &mut usize, raw: &mut Vec<(SynTag, usize, usize)>) {
        match t {
            ParseTree::Word { .. } => *pos += 1,
            ParseTree::Phrase { label, children } => {
                let lo = *pos;
                children.iter().for_each(|c| walk(c, pos, raw));
                raw.push((*label, lo, *pos));
            }
        }
    }
    let leaves = tree.leaves();
    let scored_before: Vec<usize> =
        (0..=leaves.len()).map(|i| leaves[..i].iter().filter(|(t, _)| *t != PosTag::PU).count()).collect();
    let mut raw = Vec::new();
    walk(tree, &mut 0, &mut raw);
    raw.into_iter().map(|(l, lo, hi)| (l, scored_before[lo], scored_before[hi])).filter(|(_, a, b)| b > a).collect()
}

// ------------------------------------------------------------- generators

const CHARS: [char; 10] = ['胸', '闷', '心', '悸', '发', '热', '咳', 'a', 'b', '1'];
const POS_SMALL: [PosTag; 4] = [PosTag::NN, PosTag::VV, PosTag::PU, PosTag::CD];
const SYN_SMALL: [SynTag; 4] = [SynTag::NP, SynTag::VP, SynTag::IP, SynTag::QP];

fn gen_text(rng: &mut Rng, len: usize) -> String {
    (0..len).map(|_| rng.pick(&CHARS)).collect()
}

/// Random segmentation of `text`, split into random sentences.
fn gen_tokens(rng: &mut Rng, text: &str, with_pos: bool) -> TokenLayer {
    let chars: Vec<char> = text.chars().collect();
    let mut sentences = vec![Vec::new()];
    let mut start = 0;
    while start < chars.len() {
        let end = (start + rng.range(1, 3)).min(chars.len());
        let tok = Token {
            span: Span::new(start, end),
            surface: chars[start..end].iter().collect(),
            pos: with_pos.then(|| rng.pick(&POS_SMALL)),
        };
        sentences.last_mut().unwrap().push(tok);
        if rng.chance(0.2) && end < chars.len() {
            sentences.push(Vec::new());
        }
        start = end;
    }
    TokenLayer { sentences: sentences.into_iter().filter(|s| !s.is_empty()).collect() }
}

fn gen_chunks(rng: &mut Rng, sentences: usize) -> ChunkLayer {
    ChunkLayer {
        sentences: (0..sentences)
            .map(|_| {
                (0..rng.below(5))
                    .map(|_| {
                        let first = rng.below(6);
                        Chunk { first, last: first + rng.range(1, 3), label: rng.pick(&SYN_SMALL[..3]) }
                    })
                    .collect()
            })
            .collect(),
    }
}

fn gen_tree(rng: &mut Rng, leaves: &[(PosTag, String)]) -> ParseTree {
    let label = rng.pick(&SYN_SMALL);
    let word = |l: &(PosTag, String)| ParseTree::word(l.0, l.1.clone());
    if leaves.len() == 1 {
        let w = word(&leaves[0]);
        return if rng.chance(0.3) {
            ParseTree::phrase(label, vec![ParseTree::phrase(rng.pick(&SYN_SMALL), vec![w])])
        } else {
            ParseTree::phrase(label, vec![w])
        };
    }
    let parts = rng.range(2, leaves.len().min(3));
    let mut cuts: BTreeSet<usize> = BTreeSet::new();
    while cuts.len() < parts - 1 {
        cuts.insert(rng.range(1, leaves.len() - 1));
    }
    let mut bounds = vec![0];
    bounds.extend(cuts);
    bounds.push(leaves.len());
    let children = bounds
        .windows(2)
        .map(|w| {
            let part = &leaves[w[0]..w[1]];
            if part.len() == 1 && rng.chance(0.5) {
                word(&part[0])
            } else {
                gen_tree(rng, part)
            }
        })
        .collect();
    ParseTree::phrase(label, children)
}

fn gen_leaves(rng: &mut Rng, n: usize) -> Vec<(PosTag, String)> {
    (0..n).map(|i| (rng.pick(&POS_SMALL), format!("w{}", i))).collect()
}

fn gen_assertion(rng: &mut Rng, etype: EntityType) -> Option<AssertionType> {
    let valid = etype.assertions();
    (!valid.is_empty()).then(|| rng.pick(valid))
}

fn gen_entities(rng: &mut Rng) -> SemanticLayer {
    let entities = (0..rng.below(8))
        .map(|i| {
            let start = rng.below(8);
            let etype = rng.pick(&EntityType::ALL);
            Entity {
                id: format!("T{}", i + 1),
                span: Span::new(start, start + rng.range(1, 2)),
                etype,
                assertion: gen_assertion(rng, etype),
                surface: String::new(),
            }
        })
        .collect();
    SemanticLayer { entities, ..Default::default() }
}

/// A side drawing entities from a shared universe of (span, type) slots.
fn gen_relations(rng: &mut Rng, universe: &[EntityType]) -> SemanticLayer {
    let mut layer = SemanticLayer::default();
    for (i, etype) in universe.iter().enumerate() {
        if rng.chance(0.7) {
            layer.entities.push(Entity {
                id: format!("T{}", i + 1),
                span: Span::new(i, i + 1),
                etype: *etype,
                assertion: gen_assertion(rng, *etype),
                surface: String::new(),
            });
        }
    }
    for etype in EntityType::ALL {
        let members: Vec<String> = layer.entities.iter().filter(|e| e.etype == etype).map(|e| e.id.clone()).collect();
        if members.len() >= 2 && rng.chance(0.6) {
            let mut chosen: Vec<String> = members.iter().filter(|_| rng.chance(0.6)).cloned().collect();
            if chosen.is_empty() {
                chosen.push(members[0].clone());
            }
            layer.groups.push(EntityGroup { id: format!("G{}", layer.groups.len() + 1), etype, members: chosen });
        }
    }
    let endpoint = |rng: &mut Rng, layer: &SemanticLayer, etype: EntityType| -> Option<Endpoint> {
        let groups: Vec<&EntityGroup> = layer.groups.iter().filter(|g| g.etype == etype).collect();
        if !groups.is_empty() && rng.chance(0.4) {
            return Some(Endpoint::Group(groups[rng.below(groups.len())].id.clone()));
        }
        let ents: Vec<&Entity> = layer.entities.iter().filter(|e| e.etype == etype).collect();
        (!ents.is_empty()).then(|| Endpoint::Entity(ents[rng.below(ents.len())].id.clone()))
    };
    for _ in 0..rng.below(6) {
        let rtype = rng.pick(&RelationType::ALL);
        let (t1, t2) = rtype.signature();
        if let (Some(arg1), Some(arg2)) = (endpoint(rng, &layer, t1), endpoint(rng, &layer, t2)) {
            let id = format!("R{}", layer.relations.len() + 1);
            layer.relations.push(Relation { id, rtype, arg1, arg2 });
        }
    }
    layer
}

type Member = (usize, usize, EntityType);

fn members(layer: &SemanticLayer, ep: &Endpoint) -> Vec<Member> {
    let ids: Vec<&String> = match ep {
        Endpoint::Entity(id) => vec![id],
        Endpoint::Group(id) => layer.groups.iter().find(|g| &g.id == id).unwrap().members.iter().collect(),
    };
    let mut out: Vec<Member> = ids
        .iter()
        .map(|id| {
            let e = layer.entities.iter().find(|e| &e.id == *id).unwrap();
            (e.span.start, e.span.end, e.etype)
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

fn oracle_group_keys(layer: &SemanticLayer) -> Vec<(RelationType, Vec<Member>, Vec<Member>)> {
    layer.relations.iter().map(|r| (r.rtype, members(layer, &r.arg1), members(layer, &r.arg2))).collect()
}

fn oracle_pair_keys(layer: &SemanticLayer) -> Vec<(RelationType, Member, Member)> {
    let mut out: Vec<(RelationType, Member, Member)> = Vec::new();
    for (t, m1, m2) in oracle_group_keys(layer) {
        for x in &m1 {
            for y in &m2 {
                if !out.contains(&(t, *x, *y)) {
                    out.push((t, *x, *y));
                }
            }
        }
    }
    out
}

// ------------------------------------------------------------- criteria

const CASES: usize = 1000;

fn criterion_1() -> Check {
    let start = Instant::now();
    let mut rng = Rng::new(1);
    let mut layers = [0usize; 9];
    for _ in 0..CASES {
        // word segmentation and POS over a shared text
        let len = rng.range(1, 24);
        let text = gen_text(&mut rng, len);
        let mut a = gen_tokens(&mut rng, &text, true);
        let mut b = gen_tokens(&mut rng, &text, true);
        if rng.chance(0.05) {
            a.sentences.clear();
        }
        if rng.chance(0.05) {
            b.sentences.clear();
        }
        let spans = |l: &TokenLayer| l.tokens().map(|t| (t.span.start, t.span.end)).collect::<Vec<_>>();
        let tagged = |l: &TokenLayer| l.tokens().map(|t| (t.span.start, t.span.end, t.pos)).collect::<Vec<_>>();
        let (sa, sb) = (spans(&a), spans(&b));
        let r = iaa_tokens(&a, &b).map_err(|e| e.to_string())?;
        oracle_report(&r, greedy_agreed(&sa, &sb, |x, y| x == y), sa.len() as u64, sb.len() as u64)?;
        let (pa, pb) = (tagged(&a), tagged(&b));
        let r = iaa_pos(&a, &b).map_err(|e| e.to_string())?;
        oracle_report(&r, greedy_agreed(&pa, &pb, |x, y| x == y), pa.len() as u64, pb.len() as u64)?;
        layers[0] += 1;
        layers[1] += 1;

        let (na, nb) = (rng.below(4), rng.below(4));
        let (ca, cb) = (gen_chunks(&mut rng, na), gen_chunks(&mut rng, nb));
        let flat = |l: &ChunkLayer| {
            l.sentences
                .iter()
                .enumerate()
                .flat_map(|(s, cs)| cs.iter().map(move |c| (s, c.first, c.last, c.label)))
                .collect::<Vec<_>>()
        };
        let (fa, fb) = (flat(&ca), flat(&cb));
        let r = iaa_chunks(&ca, &cb).map_err(|e| e.to_string())?;
        oracle_report(&r, greedy_agreed(&fa, &fb, |x, y| x == y), fa.len() as u64, fb.len() as u64)?;
        layers[2] += 1;

        let len = rng.range(1, 8);
        let leaves = gen_leaves(&mut rng, len);
        let (ga, gb) = (gen_tree(&mut rng, &leaves), gen_tree(&mut rng, &leaves));
        let (ba, bb) = (oracle_brackets(&ga), oracle_brackets(&gb));
        let r = score_trees(&ga, &gb, &EvalParams::default()).map_err(|e| e.to_string())?;
        oracle_report(&r, greedy_agreed(&ba, &bb, |x, y| x == y), ba.len() as u64, bb.len() as u64)?;
        layers[3] += 1;

        let (ea, eb) = (gen_entities(&mut rng), gen_entities(&mut rng));
        for (i, policy) in
            [MatchPolicy::Span, MatchPolicy::SpanType, MatchPolicy::SpanTypeAssertion].into_iter().enumerate()
        {
            let eq = |x: &Entity, y: &Entity| {
                x.span == y.span
                    && (policy == MatchPolicy::Span || x.etype == y.etype)
                    && (policy != MatchPolicy::SpanTypeAssertion || x.assertion == y.assertion)
            };
            let r = iaa_entities(&ea, &eb, policy).map_err(|e| e.to_string())?;
            let agreed = greedy_agreed(&ea.entities, &eb.entities, eq);
            oracle_report(&r, agreed, ea.entities.len() as u64, eb.entities.len() as u64)?;
            layers[4 + i] += 1;
        }

        let universe: Vec<EntityType> = (0..rng.range(2, 7)).map(|_| rng.pick(&EntityType::ALL)).collect();
        let (ra, rb) = (gen_relations(&mut rng, &universe), gen_relations(&mut rng, &universe));
        let (ka, kb) = (oracle_group_keys(&ra), oracle_group_keys(&rb));
        let r = iaa_relations(&ra, &rb, RelationMode::GroupPreserved).map_err(|e| e.to_string())?;
        oracle_report(&r, greedy_agreed(&ka, &kb, |x, y| x == y), ka.len() as u64, kb.len() as u64)?;
        let (oa, ob) = (oracle_pair_keys(&ra), oracle_pair_keys(&rb));
        let r = iaa_relations(&ra, &rb, RelationMode::OneToOne).map_err(|e| e.to_string())?;
        oracle_report(&r, greedy_agreed(&oa, &ob, |x, y| x == y), oa.len() as u64, ob.len() as u64)?;
        layers[7] += 1;
        layers[8] += 1;
    }
    within_time(start, Duration::from_secs(30))?;
    let partial = PARTIAL.with(|c| c.get());
    ensure(partial >= CASES, || format!("only {} comparisons with partial agreement", partial))?;
    Ok(format!(
        "{} pairs each for seg, pos, chunk, tree, 3 entity policies, 2 relation modes ({} partial) in {:.2?}",
        layers.iter().min().unwrap(),
        partial,
        start.elapsed()
    ))
}

fn criterion_2() -> Check {
    let r = prf(3, 4, 5, &AgreementConfig::default()).map_err(|e| e.to_string())?;
    ensure(
        (r.precision - 0.6).abs() <= 1e-12
            && (r.recall - 0.75).abs() <= 1e-12
            && (r.f - 2.0 / 3.0).abs() <= 1e-12
            && r.to_json().contains("\"precision\":0.600,\"recall\":0.750,\"f\":0.667"),
        || format!("(3,4,5) gave {:?}", r),
    )?;
    let mut rng = Rng::new(2);
    let mut n = 0;
    for _ in 0..CASES {
        let len = rng.range(1, 24);
        let text = gen_text(&mut rng, len);
        let (a, b) = (gen_tokens(&mut rng, &text, true), gen_tokens(&mut rng, &text, true));
        let e = |e: clincorp::agreement::AgreementError| e.to_string();
        swap_exact(&iaa_tokens(&a, &b).map_err(e)?, &iaa_tokens(&b, &a).map_err(e)?)?;
        swap_exact(&iaa_pos(&a, &b).map_err(e)?, &iaa_pos(&b, &a).map_err(e)?)?;
        let (ca, cb) = (gen_chunks(&mut rng, 3), gen_chunks(&mut rng, 3));
        swap_exact(&iaa_chunks(&ca, &cb).map_err(e)?, &iaa_chunks(&cb, &ca).map_err(e)?)?;
        let len = rng.range(1, 8);
        let leaves = gen_leaves(&mut rng, len);
        let (ga, gb) = (gen_tree(&mut rng, &leaves), gen_tree(&mut rng, &leaves));
        let p = EvalParams::default();
        let s = |r: Result<AgreementReport, clincorp::parseval::ScoreError>| r.map_err(|e| e.to_string());
        swap_exact(&s(score_trees(&ga, &gb, &p))?, &s(score_trees(&gb, &ga, &p))?)?;
        let (ea, eb) = (gen_entities(&mut rng), gen_entities(&mut rng));
        for policy in [MatchPolicy::Span, MatchPolicy::SpanType, MatchPolicy::SpanTypeAssertion] {
            swap_exact(&iaa_entities(&ea, &eb, policy).map_err(e)?, &iaa_entities(&eb, &ea, policy).map_err(e)?)?;
        }
        let universe: Vec<EntityType> = (0..5).map(|_| rng.pick(&EntityType::ALL)).collect();
        let (ra, rb) = (gen_relations(&mut rng, &universe), gen_relations(&mut rng, &universe));
        for mode in [RelationMode::GroupPreserved, RelationMode::OneToOne] {
            swap_exact(&iaa_relations(&ra, &rb, mode).map_err(e)?, &iaa_relations(&rb, &ra, mode).map_err(e)?)?;
        }
        n += 1;
    }
    Ok(format!("(3,4,5) -> 0.600/0.750/0.667; {} generated pairs swap exactly on every layer", n))
}

fn criterion_3() -> Check {
    let start = Instant::now();
    let p = EvalParams::default();
    let tree = |s: &str| clincorp::io::parse_tree_line(s).map_err(|e| e.to_string());
    let gold = tree("(IP (NP (NN a) (NN b)) (VP (VV c)))")?;
    let cand = tree("(IP (NP (NN a)) (VP (NN b) (VV c)))")?;
    let same = score_trees(&gold, &gold, &p).map_err(|e| e.to_string())?;
    ensure(same.f == 1.0 && same.precision == 1.0 && same.recall == 1.0, || format!("identity {:?}", same))?;
    let r = score_trees(&gold, &cand, &p).map_err(|e| e.to_string())?;
    ensure(r.agreed == 1 && r.precision == 1.0 / 3.0 && r.recall == 1.0 / 3.0 && r.f == 1.0 / 3.0, || {
        format!("hand example {:?}", r)
    })?;
    let mut rng = Rng::new(3);
    for _ in 0..CASES {
        let len = rng.range(1, 10);
        let leaves = gen_leaves(&mut rng, len);
        let (ga, gb) = (gen_tree(&mut rng, &leaves), gen_tree(&mut rng, &leaves));
        let (ba, bb) = (oracle_brackets(&ga), oracle_brackets(&gb));
        let r = score_trees(&ga, &gb, &p).map_err(|e| e.to_string())?;
        oracle_report(&r, greedy_agreed(&ba, &bb, |x, y| x == y), ba.len() as u64, bb.len() as u64)?;
        if !ba.is_empty() {
            let s = score_trees(&ga, &ga, &p).map_err(|e| e.to_string())?;
            ensure(s.f == 1.0, || format!("self score {} for {}", s.f, ga))?;
        }
    }
    within_time(start, Duration::from_secs(30))?;
    Ok(format!("identity 1.0, hand example 1/3, {} random tree pairs match enumeration", CASES))
}

fn standoff_layer(src: &str) -> Result<SemanticLayer, String> {
    parse_standoff(src.as_bytes()).map_err(|e| e.to_string())
}

fn criterion_4() -> Check {
    let entities = "T1\tsymptom 0 2\tS1\nT2\tsymptom 2 4\tS2\nT3\tdisease 5 8\tD1\n\
                    A1\tpresent T1\nA2\tpresent T2\nA3\tpresent T3\n";
    let a = standoff_layer(&format!("{}G1\tsymptom T1 T2\nR1\tSID Arg1:G1 Arg2:T3\n", entities))?;
    let b = standoff_layer(&format!("{}R1\tSID Arg1:T1 Arg2:T3\n", entities))?;
    let group = iaa_relations(&a, &b, RelationMode::GroupPreserved).map_err(|e| e.to_string())?;
    let one = iaa_relations(&a, &b, RelationMode::OneToOne).map_err(|e| e.to_string())?;
    ensure(group.f == 0.0 && group.agreed == 0, || format!("group-preserved {:?}", group))?;
    ensure(
        (one.f - 2.0 / 3.0).abs() <= 1e-9
            && format!("{:.3}", one.f) == "0.667"
            && (one.agreed, one.count_a, one.count_b) == (1, 2, 1),
        || format!("one-to-one {:?}", one),
    )?;
    let mut rng = Rng::new(4);
    for _ in 0..CASES {
        let (n1, n2) = (rng.range(1, 5), rng.range(1, 5));
        let mut layer = SemanticLayer::default();
        for i in 0..n1 + n2 {
            let etype = if i < n1 { EntityType::Treatment } else { EntityType::Disease };
            layer.entities.push(Entity {
                id: format!("T{}", i + 1),
                span: Span::new(2 * i, 2 * i + 1),
                etype,
                assertion: Some(AssertionType::Present),
                surface: String::new(),
            });
        }
        let ids = |r: std::ops::Range<usize>| r.map(|i| format!("T{}", i + 1)).collect::<Vec<_>>();
        layer.groups.push(EntityGroup { id: "G1".into(), etype: EntityType::Treatment, members: ids(0..n1) });
        layer.groups.push(EntityGroup { id: "G2".into(), etype: EntityType::Disease, members: ids(n1..n1 + n2) });
        let rel = Relation {
            id: "R1".into(),
            rtype: rng.pick(&[RelationType::TrAD, RelationType::TrID, RelationType::TrWD, RelationType::TrCD]),
            arg1: Endpoint::Group("G1".into()),
            arg2: Endpoint::Group("G2".into()),
        };
        let res = resolve(&rel, &layer).map_err(|e| e.to_string())?;
        let got = expand(&res).len();
        ensure(got == n1 * n2, || format!("|{}|x|{}| expanded to {}", n1, n2, got))?;
    }
    Ok(format!(
        "group-preserved F={:.3}, one-to-one F={:.3}; {} group relations expand to |arg1|*|arg2|",
        group.f, one.f, CASES
    ))
}

fn bundle(document: Document, annotations: DocumentAnnotations) -> Bundle {
    Bundle { document, annotations }
}

fn counts_corpus_pos(rows: &[reference::RefRow]) -> Result<Bundle, String> {
    let mut tokens = Vec::new();
    for r in rows {
        let tag: PosTag = r.label.parse().map_err(|e| format!("{:?}", e))?;
        tokens.extend((0..r.count).map(|_| tag));
    }
    let sentences = tokens
        .chunks(20)
        .enumerate()
        .map(|(s, tags)| {
            tags.iter()
                .enumerate()
                .map(|(i, t)| {
                    let at = s * 20 + i;
                    Token { span: Span::new(at, at + 1), surface: "x".into(), pos: Some(*t) }
                })
                .collect()
        })
        .collect();
    let n = tokens.len();
    let ann = DocumentAnnotations { tokens: Some(TokenLayer { sentences }), ..DocumentAnnotations::new("a") };
    Ok(bundle(Document::new("a", "x".repeat(n)), ann))
}

fn counts_corpus_syn(rows: &[reference::RefRow]) -> Result<Bundle, String> {
    let mut trees = Vec::new();
    for r in rows {
        let tag: SynTag = r.label.parse().map_err(|e| format!("{:?}", e))?;
        trees.extend((0..r.count).map(|_| ParseTree::phrase(tag, vec![ParseTree::word(PosTag::NN, "x")])));
    }
    let ann = DocumentAnnotations { trees: Some(TreeLayer { trees }), ..DocumentAnnotations::new("b") };
    Ok(bundle(Document::new("b", ""), ann))
}

fn entity(id: usize, at: usize, etype: EntityType, assertion: Option<AssertionType>) -> Entity {
    Entity { id: format!("T{}", id), span: Span::new(at, at + 1), etype, assertion, surface: "x".into() }
}

fn counts_corpus_entities() -> Result<Bundle, String> {
    let mut layer = SemanticLayer::default();
    for r in ENTITY_ASSERTIONS.iter().filter(|r| r.label != "total" || r.group == "test") {
        let etype: EntityType = r.group.parse().map_err(|e| format!("{:?}", e))?;
        let assertion: Option<AssertionType> = match r.label {
            "total" => None,
            l => Some(l.parse().map_err(|e| format!("{:?}", e))?),
        };
        for _ in 0..r.count {
            let n = layer.entities.len();
            layer.entities.push(entity(n + 1, n, etype, assertion));
        }
    }
    let ann = DocumentAnnotations { semantic: Some(layer), ..DocumentAnnotations::new("c") };
    Ok(bundle(Document::new("c", ""), ann))
}

fn counts_corpus_relations() -> Result<Bundle, String> {
    let mut layer = SemanticLayer::default();
    for r in RELATION_TYPES.iter().filter(|r| r.label != "total") {
        let rtype: RelationType = r.label.parse().map_err(|e| format!("{:?}", e))?;
        let (t1, t2) = rtype.signature();
        for _ in 0..r.count {
            let n = layer.entities.len();
            layer.entities.push(entity(n + 1, n, t1, t1.assertions().first().copied()));
            layer.entities.push(entity(n + 2, n + 1, t2, t2.assertions().first().copied()));
            layer.relations.push(Relation {
                id: format!("R{}", layer.relations.len() + 1),
                rtype,
                arg1: Endpoint::Entity(format!("T{}", n + 1)),
                arg2: Endpoint::Entity(format!("T{}", n + 2)),
            });
        }
    }
    let ann = DocumentAnnotations { semantic: Some(layer), ..DocumentAnnotations::new("d") };
    Ok(bundle(Document::new("d", ""), ann))
}

fn criterion_5() -> Check {
    let start = Instant::now();
    let sum_a: u64 = POS_TAGS.iter().map(|r| r.count).sum();
    ensure(sum_a == 47_424, || format!("POS table sums to {}", sum_a))?;
    let pos = distribution(&[counts_corpus_pos(&POS_TAGS)?], StatLayer::Pos, None).map_err(|e| e.to_string())?;
    let nn = pos.iter().find(|r| r.label == "NN").ok_or("no NN row")?;
    ensure(nn.count == 14_782 && format!("{:.2}", nn.pct) == "31.17", || format!("NN row {}", nn))?;
    let dev = compare_reference(&pos, &reference::single_column(&POS_TAGS), 0.01).map_err(|e| e.to_string())?;
    ensure(dev.is_empty(), || format!("POS deviations {:?}", dev))?;

    let syn =
        distribution(&[counts_corpus_syn(&PHRASE_LABELS)?], StatLayer::Syntactic, None).map_err(|e| e.to_string())?;
    let dev = compare_reference(&syn, &reference::single_column(&PHRASE_LABELS), 0.01).map_err(|e| e.to_string())?;
    ensure(dev.is_empty(), || format!("phrase label deviations {:?}", dev))?;

    let cross = assertion_cross_table(&[counts_corpus_entities()?]);
    let totals: u64 = cross.iter().filter(|r| r.is_total()).map(|r| r.count).sum();
    ensure(totals == 39_511, || format!("entity totals sum to {}", totals))?;
    let disease = cross.iter().find(|r| r.group == "disease" && r.is_total()).ok_or("no disease total")?;
    ensure(format!("{:.2}", disease.pct_all) == "21.08", || format!("disease total {}", disease))?;
    let dev = compare_cross_reference(&cross, &ENTITY_ASSERTIONS, 0.01).map_err(|e| e.to_string())?;
    ensure(dev.is_empty(), || format!("entity deviations {:?}", dev))?;

    let rel = relation_table(&[counts_corpus_relations()?]).map_err(|e| e.to_string())?;
    let trs = rel.iter().find(|r| r.group == "R(Tr,S)" && r.is_total()).ok_or("no R(Tr,S) subtotal")?;
    ensure(trs.count == 2020, || format!("R(Tr,S) subtotal {}", trs.count))?;
    let tras = rel.iter().find(|r| r.label == "TrAS").ok_or("no TrAS row")?;
    ensure(format!("{:.2}", tras.pct_within) == "30.35", || format!("TrAS {}", tras))?;
    let dev = compare_cross_reference(&rel, &RELATION_TYPES, 0.01).map_err(|e| e.to_string())?;
    ensure(dev.is_empty(), || format!("relation deviations {:?}", dev))?;
    within_time(start, Duration::from_secs(5))?;
    Ok(format!(
        "POS: 47424 tokens, NN 31.17, 33 rows; phrases: 23 rows; entities: 39511, diseases 21.08; relations: R(Tr,S) 2020, TrAS 30.35 ({:.2?})",
        start.elapsed()
    ))
}

fn criterion_6() -> Check {
    let (tokens, sentences) = (47_424usize, 2_553usize);
    let mut layer = TokenLayer::default();
    let mut at = 0;
    for s in 0..sentences {
        let len = tokens / sentences + usize::from(s < tokens % sentences);
        layer.sentences.push(
            (0..len)
                .map(|_| {
                    at += 1;
                    Token { span: Span::new(at - 1, at), surface: "x".into(), pos: None }
                })
                .collect(),
        );
    }
    ensure(layer.token_count() == tokens, || "generator miscounted tokens".into())?;
    let ann = DocumentAnnotations { tokens: Some(layer), ..DocumentAnnotations::new("s") };
    let avg = avg_sentence_length(&[bundle(Document::new("s", ""), ann)], None).map_err(|e| e.to_string())?;
    ensure((avg - 18.58).abs() <= 0.005, || format!("average {}", avg))?;
    Ok(format!("{} tokens / {} sentences = {:.2}", tokens, sentences, avg))
}

fn criterion_7() -> Check {
    let policy = ConvergencePolicy::default().with_tau("word_segmentation", 0.96).with_tau("full_parsing", 0.85);
    let seg = check_convergence(&[0.965, 0.979, 0.983], &policy, "word_segmentation");
    let parse = check_convergence(&[0.805, 0.840, 0.865], &policy, "full_parsing");
    ensure(seg && !parse, || format!("segmentation {}, parsing {}", seg, parse))?;
    Ok("[0.965,0.979,0.983] converges at 0.96; [0.805,0.840,0.865] does not at 0.85".into())
}

fn criterion_8() -> Check {
    let ids: Vec<String> = (0..992).map(|i| format!("doc{:03}", i)).collect();
    let mut seed_rng = Rng::new(8);
    for _ in 0..100 {
        let seed = seed_rng.0.next_u64();
        let m = kfold(&ids, 10, seed).map_err(|e| e.to_string())?;
        let again = kfold(&ids, 10, seed).map_err(|e| e.to_string())?;
        ensure(m.to_json() == again.to_json(), || format!("seed {} not deterministic", seed))?;
        let big = m.folds.iter().filter(|f| f.len() == 100).count();
        let small = m.folds.iter().filter(|f| f.len() == 99).count();
        ensure(m.folds.len() == 10 && big == 2 && small == 8, || {
            format!("seed {} sizes {}x100 {}x99", seed, big, small)
        })?;
        let union: BTreeSet<&String> = m.folds.iter().flatten().collect();
        let total: usize = m.folds.iter().map(Vec::len).sum();
        ensure(total == 992 && union.len() == 992 && union.iter().all(|id| ids.contains(id)), || {
            format!("seed {} is not a partition", seed)
        })?;
    }
    Ok("992 ids, k=10: two folds of 100, eight of 99; partition and determinism over 100 seeds".into())
}

// ----------------------------------------------------------- I/O bundles

const WORDS: [&str; 8] = ["胸闷", "心悸", "发热", "(", ")", "a b", "3", "咳"];

struct GenBundle {
    text: String,
    tokens: TokenLayer,
    chunks: ChunkLayer,
    trees: TreeLayer,
    semantic: SemanticLayer,
}

fn gen_bundle(rng: &mut Rng) -> GenBundle {
    let mut text = String::new();
    let mut sentences: Vec<Vec<Token>> = Vec::new();
    let mut at = 0;
    for _ in 0..rng.range(1, 4) {
        let mut sentence = Vec::new();
        for _ in 0..rng.range(1, 6) {
            let w = rng.pick(&WORDS).replace(' ', "");
            let n = w.chars().count();
            sentence.push(Token {
                span: Span::new(at, at + n),
                surface: w.clone(),
                pos: rng.chance(0.9).then(|| rng.pick(PosTag::ALL)),
            });
            text.push_str(&w);
            at += n;
        }
        sentences.push(sentence);
    }
    let tokens = TokenLayer { sentences };
    let mut chunks = gen_chunks(rng, tokens.sentences.len());
    chunks.sentences.iter_mut().for_each(|s| s.sort());
    let trees = TreeLayer {
        trees: tokens
            .sentences
            .iter()
            .map(|s| {
                let leaves: Vec<(PosTag, String)> =
                    s.iter().map(|t| (t.pos.unwrap_or(PosTag::NN), t.surface.clone())).collect();
                gen_tree(rng, &leaves)
            })
            .collect(),
    };
    let chars: Vec<char> = text.chars().collect();
    let universe: Vec<EntityType> = (0..rng.range(0, 6)).map(|_| rng.pick(&EntityType::ALL)).collect();
    let mut semantic = gen_relations(rng, &universe);
    for e in &mut semantic.entities {
        let start = rng.below(chars.len());
        let end = (start + rng.range(1, 3)).min(chars.len());
        e.span = Span::new(start, end);
        e.surface = if rng.chance(0.1) { "a b".into() } else { chars[start..end].iter().collect() };
    }
    semantic.canonicalize();
    GenBundle { text, tokens, chunks, trees, semantic }
}

fn roundtrip<T: PartialEq + std::fmt::Debug>(
    what: &str,
    x: &T,
    ser: impl Fn(&T) -> String,
    parse: impl Fn(&[u8]) -> Result<T, ParseError>,
) -> Result<String, String> {
    let s1 = ser(x);
    let y = parse(s1.as_bytes()).map_err(|e| format!("{}: {} in\n{}", what, e, s1))?;
    ensure(&y == x, || format!("{}: structure changed\n{:?}\n{:?}", what, x, y))?;
    let s2 = ser(&y);
    ensure(s1 == s2, || format!("{}: bytes changed\n{}\n{}", what, s1, s2))?;
    Ok(s1)
}

type Parser = fn(&[u8]) -> Result<(), ParseError>;

fn parsers() -> [(&'static str, Parser); 4] {
    [
        ("tok", |b| parse_token_file(b).map(drop)),
        ("chk", |b| parse_chunk_file(b).map(drop)),
        ("ptb", |b| parse_tree_file(b).map(drop)),
        ("ann", |b| parse_standoff(b).map(drop)),
    ]
}

/// Data lines (1-based) of a serialized file, skipping the header comment and
/// blank lines.
fn data_lines(s: &str) -> Vec<usize> {
    s.lines().enumerate().filter(|(_, l)| !l.is_empty() && !l.starts_with('#')).map(|(i, _)| i + 1).collect()
}

fn replace_line(s: &str, line: usize, f: impl Fn(&str) -> String) -> String {
    s.lines().enumerate().map(|(i, l)| if i + 1 == line { f(l) } else { l.to_string() } + "\n").collect()
}

/// Deliberately malformed variants of a serialized file with the line the
/// error must point at.
fn malformations(kind: &str, s: &str, rng: &mut Rng) -> Vec<(Vec<u8>, usize)> {
    let lines = data_lines(s);
    let mut out = Vec::new();
    if lines.is_empty() {
        return out;
    }
    let line = lines[rng.below(lines.len())];
    let mut bytes = replace_line(s, line, |l| l.to_string()).into_bytes();
    let offset: usize = s.lines().take(line - 1).map(|l| l.len() + 1).sum();
    bytes.insert(offset, 0xFF);
    out.push((bytes, line));
    match kind {
        "tok" => {
            out.push((replace_line(s, line, |l| format!("x{}", l)).into_bytes(), line));
            out.push((replace_line(s, line, |l| l.split('\t').next().unwrap().to_string()).into_bytes(), line));
            out.push((
                replace_line(s, line, |l| format!("{}\tXX", l.split('\t').take(3).collect::<Vec<_>>().join("\t")))
                    .into_bytes(),
                line,
            ));
        }
        "chk" => {
            out.push((replace_line(s, line, |l| l.replace(l.rsplit('\t').next().unwrap(), "ZP")).into_bytes(), line));
            out.push((
                replace_line(s, line, |l| format!("9\t9\t{}", l.rsplit('\t').next().unwrap())).into_bytes(),
                line,
            ));
        }
        "ptb" => {
            out.push((replace_line(s, line, |l| l[..l.len() - 1].to_string()).into_bytes(), line));
            out.push((replace_line(s, line, |l| format!("{})", l)).into_bytes(), line));
            out.push((
                replace_line(s, line, |l| l.replacen("(NN ", "(XX ", 1).replacen("(VV ", "(XX ", 1)).into_bytes(),
                line,
            ));
        }
        _ => {
            out.push((replace_line(s, line, |l| format!("{}\tx", l)).into_bytes(), line));
            let mut dup = s.to_string();
            let first = s.lines().nth(lines[0] - 1).unwrap();
            dup.push_str(first);
            dup.push('\n');
            out.push((dup.into_bytes(), s.lines().count() + 1));
            let mut dangling = s.to_string();
            dangling.push_str("R999\tSID Arg1:G999 Arg2:T999\n");
            out.push((dangling.into_bytes(), s.lines().count() + 1));
        }
    }
    // the XX substitution can miss a line without NN/VV leaves
    out.retain(|(b, _)| b != s.as_bytes());
    out
}

fn criterion_9() -> Check {
    let mut rng = Rng::new(9);
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut generated = Vec::new();
    let mut serialized = Vec::new();
    for i in 0..500 {
        let g = gen_bundle(&mut rng);
        let tok = roundtrip("tok", &g.tokens, serialize_tokens, parse_token_file)?;
        let chk = roundtrip("chk", &g.chunks, serialize_chunks, parse_chunk_file)?;
        let ptb = roundtrip("ptb", &g.trees, serialize_trees, parse_tree_file)?;
        let ann = roundtrip("ann", &g.semantic, serialize_standoff, parse_standoff)?;
        let id = format!("doc{:03}", i);
        let d = dir.path();
        for (ext, body) in [("txt", &g.text), ("tok", &tok), ("chk", &chk), ("ptb", &ptb), ("ann", &ann)] {
            fs::write(d.join(format!("{}.{}", id, ext)), body).map_err(|e| e.to_string())?;
        }
        serialized.push([("tok", tok), ("chk", chk), ("ptb", ptb), ("ann", ann)]);
        generated.push((id, g));
    }
    let corpus = load_corpus(dir.path()).map_err(|e| e.to_string())?;
    ensure(corpus.len() == 500, || format!("loaded {} bundles", corpus.len()))?;
    for (b, (id, g)) in corpus.iter().zip(&generated) {
        let ann = &b.annotations;
        ensure(
            &b.document.id == id
                && b.document.text.as_str() == g.text
                && ann.tokens.as_ref() == Some(&g.tokens)
                && ann.chunks.as_ref() == Some(&g.chunks)
                && ann.trees.as_ref() == Some(&g.trees)
                && ann.semantic.as_ref() == Some(&g.semantic),
            || format!("bundle {} changed on load", id),
        )?;
    }

    let mut located = 0;
    for files in &serialized {
        for (kind, s) in files {
            let parse = parsers().iter().find(|(k, _)| k == kind).unwrap().1;
            for (bytes, line) in malformations(kind, s, &mut rng) {
                let got = catch_unwind(|| parse(&bytes)).map_err(|_| format!("{} parser panicked", kind))?;
                match got {
                    Err(e) if e.line == line => located += 1,
                    other => {
                        return Err(format!(
                            "{}: expected error at line {}, got {:?} for\n{}",
                            kind,
                            line,
                            other,
                            String::from_utf8_lossy(&bytes)
                        ))
                    }
                }
            }
        }
    }

    let mut random = 0;
    for files in serialized.iter().take(200) {
        for (kind, s) in files {
            let parse = parsers().iter().find(|(k, _)| k == kind).unwrap().1;
            for _ in 0..5 {
                let mut bytes = s.as_bytes().to_vec();
                for _ in 0..rng.range(1, 4) {
                    let at = rng.below(bytes.len() + 1);
                    match rng.below(3) {
                        0 if at < bytes.len() => {
                            bytes.remove(at);
                        }
                        1 if at < bytes.len() => bytes[at] = rng.pick(b"\t\n()#:-0x\xff\xe8 "),
                        _ => bytes.insert(at, rng.pick(b"\t\n()#:-0x\xff\xe8 ")),
                    }
                }
                let lines = bytes.iter().filter(|&&b| b == b'\n').count() + 1;
                let got = catch_unwind(AssertUnwindSafe(|| parse(&bytes)))
                    .map_err(|_| format!("{} parser panicked on {:?}", kind, String::from_utf8_lossy(&bytes)))?;
                if let Err(e) = got {
                    ensure(e.line >= 1 && e.line <= lines, || format!("{} error {} outside the file", kind, e))?;
                }
                random += 1;
            }
        }
    }
    Ok(format!(
        "500 bundles round-trip structurally and byte-identically; {} malformed inputs located, {} random mutations without a crash",
        located, random
    ))
}

fn criterion_10() -> Check {
    let valid = EntityType::ALL
        .iter()
        .flat_map(|e| AssertionType::ALL.iter().map(move |a| (*e, *a)))
        .filter(|(e, a)| assertion_valid(*e, *a))
        .count();
    ensure(valid == 15, || format!("{} of 28 combinations valid", valid))?;
    let mut accepted = 0;
    let mut rejected = 0;
    for rtype in RelationType::ALL {
        let (t1, t2) = rtype.signature();
        let doc = Document::new("v", "甲乙丙丁");
        let layer = |swap: bool| SemanticLayer {
            entities: vec![
                Entity {
                    id: "T1".into(),
                    span: Span::new(0, 1),
                    etype: t1,
                    assertion: t1.assertions().first().copied(),
                    surface: "甲".into(),
                },
                Entity {
                    id: "T2".into(),
                    span: Span::new(2, 3),
                    etype: t2,
                    assertion: t2.assertions().first().copied(),
                    surface: "丙".into(),
                },
            ],
            groups: Vec::new(),
            relations: vec![Relation {
                id: "R1".into(),
                rtype,
                arg1: Endpoint::Entity(if swap { "T2" } else { "T1" }.into()),
                arg2: Endpoint::Entity(if swap { "T1" } else { "T2" }.into()),
            }],
        };
        for swap in [false, true] {
            let mut set = AnnotationSet::new("g1");
            set.insert(DocumentAnnotations { semantic: Some(layer(swap)), ..DocumentAnnotations::new("v") });
            let diags = validate(&set, &doc).map_err(|e| e.to_string())?;
            let mismatch = diags.iter().any(|d| d.rule == Rule::SignatureMismatch);
            if swap {
                ensure(mismatch, || format!("{} accepted swapped endpoints", rtype))?;
                rejected += 1;
            } else {
                ensure(diags.is_empty(), || format!("{} rejected matching endpoints: {:?}", rtype, diags))?;
                accepted += 1;
            }
        }
    }
    Ok(format!("15 of 28 assertion combinations valid; {} signatures accept, {} reject swapped", accepted, rejected))
}

fn main() {
    type Criterion = (&'static str, fn() -> Check);
    let criteria: [Criterion; 10] = [
        ("agreement equals brute-force oracle on every layer", criterion_1),
        ("swap symmetry and (3,4,5)", criterion_2),
        ("PARSEVAL identity, hand example, enumeration oracle", criterion_3),
        ("relation dual mode and expansion counts", criterion_4),
        ("reference corpus statistics", criterion_5),
        ("average sentence length", criterion_6),
        ("convergence fixtures", criterion_7),
        ("k-fold manifests", criterion_8),
        ("I/O round-trip and malformed input", criterion_9),
        ("validation matrix and relation signatures", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS  {:>2}  {}: {}", i + 1, name, detail),
            Err(why) => {
                failed += 1;
                println!("FAIL  {:>2}  {}: {}", i + 1, name, why);
            }
        }
    }
    println!("acceptance: {} passed, {} failed", criteria.len() - failed, failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
