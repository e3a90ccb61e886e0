//! Independent reference implementations shared by the module tests and the
//! acceptance run. Each check returns a description of the first mismatch.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use hwv2w::corpus::{CorpusSnapshot, CveRecord, CvssVector, CweId};
use hwv2w::entity::{build_index, rank_similar, NlpEntry};
use hwv2w::ontology::{PredicateTerm, QueryPattern, Term, TripleStore};
use hwv2w::severity::{
    base_score, exploitability_score, impact_score, one_hot, train_tree, Node, Rating, TreeConfig, N_COLUMNS,
};
use hwv2w::text::{extract_ngrams, score_collocations, string_clean, Stopwords};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !($cond as bool) {
            return Err(format!($($fmt)+));
        }
    };
}

// ---- CVSS ----

pub const CVSS_ORACLE: &str = include_str!("../../fixtures/cvss31_oracle.csv");

/// Compares every row of the frozen calculator table; returns the row count.
pub fn cvss_sweep() -> Result<usize, String> {
    let mut rdr = csv::Reader::from_reader(CVSS_ORACLE.as_bytes());
    let mut n = 0;
    for row in rdr.records() {
        let row = row.map_err(|e| e.to_string())?;
        let v: CvssVector = row[0].parse().map_err(|e| format!("{}: {e}", &row[0]))?;
        let s = base_score(&v);
        let f = |i: usize| row[i].parse::<f64>().unwrap();
        ensure!(s.base == f(1), "{} base {} want {}", &row[0], s.base, f(1));
        ensure!((impact_score(&v) - f(2)).abs() < 1e-9, "{} raw impact", &row[0]);
        ensure!((exploitability_score(&v) - f(3)).abs() < 1e-9, "{} raw exploitability", &row[0]);
        ensure!(s.impact == f(4), "{} impact {} want {}", &row[0], s.impact, f(4));
        ensure!(s.exploitability == f(5), "{} exploitability {} want {}", &row[0], s.exploitability, f(5));
        ensure!(s.rating.to_string() == row[6], "{} rating {}", &row[0], s.rating);
        n += 1;
    }
    Ok(n)
}

// ---- decision tree ----

// Greedy reference: repeatedly scan every leaf and every column, computing
// weighted GINI in floating point, and apply the single best split. Ties
// resolve to the earliest leaf, then the lowest column.
struct RefLeaf {
    idx: Vec<usize>,
    depth: usize,
    order: usize,
}

fn ref_gini(idx: &[usize], y: &[Rating]) -> f64 {
    let mut h = [0f64; 5];
    for &i in idx {
        h[y[i].index()] += 1.0;
    }
    let n = idx.len() as f64;
    1.0 - h.iter().map(|c| (c / n) * (c / n)).sum::<f64>()
}

fn ref_label(idx: &[usize], y: &[Rating]) -> Rating {
    let mut best = Rating::None;
    let mut best_n = 0;
    for r in Rating::ALL {
        let n = idx.iter().filter(|&&i| y[i] == r).count();
        if n > best_n {
            best = r;
            best_n = n;
        }
    }
    best
}

/// Final partition as (leaf rows, label).
pub fn reference_tree(x: &[u32], y: &[Rating], cfg: TreeConfig) -> Vec<(Vec<usize>, Rating)> {
    let mut leaves = vec![RefLeaf { idx: (0..x.len()).collect(), depth: 0, order: 0 }];
    let mut next_order = 1;
    while leaves.len() < cfg.max_leaf_nodes {
        let mut best: Option<(f64, usize, usize, usize)> = None; // gain, order, leaf pos, column
        for (pos, leaf) in leaves.iter().enumerate() {
            let g = ref_gini(&leaf.idx, y);
            if g == 0.0 || leaf.depth >= cfg.max_depth || leaf.idx.len() < cfg.min_samples_split {
                continue;
            }
            let n = leaf.idx.len() as f64;
            let mut leaf_best: Option<(f64, usize)> = None;
            for col in 0..N_COLUMNS {
                let (r, l): (Vec<usize>, Vec<usize>) = leaf.idx.iter().partition(|&&i| x[i] >> col & 1 == 1);
                if r.is_empty() || l.is_empty() {
                    continue;
                }
                let child = (l.len() as f64 * ref_gini(&l, y) + r.len() as f64 * ref_gini(&r, y)) / n;
                let gain = n * (g - child);
                if gain <= 1e-12 {
                    continue;
                }
                if leaf_best.is_none_or(|(bg, _)| gain > bg + 1e-9) {
                    leaf_best = Some((gain, col));
                }
            }
            if let Some((gain, col)) = leaf_best {
                let better =
                    best.is_none_or(|(bg, bo, _, _)| gain > bg + 1e-9 || ((gain - bg).abs() <= 1e-9 && leaf.order < bo));
                if better {
                    best = Some((gain, leaf.order, pos, col));
                }
            }
        }
        let Some((_, _, pos, col)) = best else { break };
        let leaf = leaves.remove(pos);
        let (r, l): (Vec<usize>, Vec<usize>) = leaf.idx.iter().partition(|&&i| x[i] >> col & 1 == 1);
        leaves.push(RefLeaf { idx: l, depth: leaf.depth + 1, order: next_order });
        leaves.push(RefLeaf { idx: r, depth: leaf.depth + 1, order: next_order + 1 });
        next_order += 2;
    }
    leaves
        .into_iter()
        .map(|l| {
            let lab = ref_label(&l.idx, y);
            (l.idx, lab)
        })
        .collect()
}

pub fn random_dataset(seed: u64, n: usize) -> (Vec<CvssVector>, Vec<Rating>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all: Vec<CvssVector> = CvssVector::all().collect();
    let vs: Vec<CvssVector> = (0..n).map(|_| all[rng.random_range(0..all.len())]).collect();
    let ys = vs.iter().map(|v| base_score(v).rating).collect();
    (vs, ys)
}

pub fn tree_matches_reference(vs: &[CvssVector], ys: &[Rating], cfg: TreeConfig) -> Check {
    let m = one_hot(vs);
    let tree = train_tree(&m, ys, cfg).map_err(|e| e.to_string())?;
    let reference = reference_tree(&m.rows, ys, cfg);
    ensure!(tree.leaf_count() == reference.len(), "{} leaves, reference {}", tree.leaf_count(), reference.len());
    for (idx, label) in &reference {
        for &i in idx {
            ensure!(tree.predict_row(m.rows[i]) == *label, "row {i} predicted differently from reference");
        }
    }
    Ok(())
}

/// Random data and labels under random limits: limits hold, GINI stays in
/// range, pure nodes are 0 and every split strictly lowers weighted GINI.
pub fn tree_limits(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
    let n = rng.random_range(2..120);
    let (vs, _) = random_dataset(seed, n);
    let ys: Vec<Rating> = (0..n).map(|_| Rating::ALL[rng.random_range(0..5)]).collect();
    let cfg = TreeConfig {
        max_depth: rng.random_range(0..8),
        max_leaf_nodes: rng.random_range(1..40),
        min_samples_split: rng.random_range(2..6),
    };
    let tree = train_tree(&one_hot(&vs), &ys, cfg).map_err(|e| e.to_string())?;
    ensure!(tree.depth() <= cfg.max_depth, "seed {seed}: depth {} > {}", tree.depth(), cfg.max_depth);
    ensure!(tree.leaf_count() <= cfg.max_leaf_nodes.max(1), "seed {seed}: {} leaves", tree.leaf_count());
    for node in &tree.nodes {
        let classes = node.histogram().iter().filter(|&&c| c > 0).count();
        ensure!(node.gini() >= 0.0 && node.gini() <= 0.8 + 1e-12, "seed {seed}: gini {}", node.gini());
        ensure!(classes != 1 || node.gini() == 0.0, "seed {seed}: pure node with gini {}", node.gini());
        if let Node::Internal { left, right, .. } = node {
            let (l, r) = (&tree.nodes[*left], &tree.nodes[*right]);
            let weighted = (l.samples() as f64 * l.gini() + r.samples() as f64 * r.gini()) / node.samples() as f64;
            ensure!(weighted < node.gini(), "seed {seed}: split does not reduce GINI");
        }
    }
    Ok(())
}

// ---- ontology ----

pub fn entry(v: &str, t: &str, i: &str, c: u32) -> NlpEntry {
    NlpEntry { vulnerability: v.parse().unwrap(), exploit_target: t.into(), attack_impact: i.into(), cwe: CweId::new(c) }
}

pub fn random_store(rng: &mut ChaCha8Rng, entries: usize) -> TripleStore {
    let mut s = TripleStore::new();
    for _ in 0..entries {
        let e = entry(
            &format!("CVE-2020-{:04}", rng.random_range(1000..1000 + 3 * entries as u32 + 1)),
            &format!("T{}", rng.random_range(0..entries / 3 + 1)),
            &format!("I{}", rng.random_range(0..entries / 4 + 1)),
            rng.random_range(1..40),
        );
        s.assert_entry(&e).unwrap();
    }
    s
}

fn unify(r: &mut HashMap<String, String>, t: &Term, v: &str) -> bool {
    match t {
        Term::Const(c) => c == v,
        Term::Var(x) => match r.get(x) {
            Some(y) => y == v,
            None => {
                r.insert(x.clone(), v.to_string());
                true
            }
        },
    }
}

/// Nested-loop join over every pattern × every triple.
pub fn brute_force(store: &TripleStore, q: &QueryPattern) -> BTreeSet<Vec<String>> {
    let facts: Vec<(String, String, String)> = store
        .triples()
        .map(|t| (t.subject.clone(), t.predicate.name().to_string(), t.object.clone()))
        .collect();
    let mut rows: Vec<HashMap<String, String>> = vec![HashMap::new()];
    for p in &q.patterns {
        let mut next = Vec::new();
        for row in &rows {
            for (s, pr, o) in &facts {
                let mut r = row.clone();
                let pred_ok = match &p.predicate {
                    PredicateTerm::Property(x) => x.name() == pr,
                    PredicateTerm::Var(x) => unify(&mut r, &Term::Var(x.clone()), pr),
                    _ => false,
                };
                if pred_ok && unify(&mut r, &p.subject, s) && unify(&mut r, &p.object, o) {
                    next.push(r);
                }
            }
        }
        rows = next;
    }
    rows.into_iter().map(|r| q.select.iter().map(|v| r[v].clone()).collect()).collect()
}

pub const ORACLE_QUERIES: &[&str] = &[
    "SELECT ?v ?t ?i WHERE { ?v Exploits ?t . ?t hasAttackImpact ?i }",
    "SELECT ?v WHERE { ?v TargetsCWE CWE-7 }",
    "SELECT ?t ?c WHERE { ?t hasVulnerability ?v . ?v TargetsCWE ?c }",
    "SELECT ?a ?b WHERE { ?a Exploits ?t . ?b Exploits ?t }",
    "SELECT ?p ?o WHERE { T1 ?p ?o }",
    "SELECT ?s ?p WHERE { ?s ?p I0 }",
    "SELECT ?v ?i WHERE { ?v Exploits ?t . ?t hasAttackImpact ?i . ?v TargetsCWE CWE-3 }",
    "SELECT ?x WHERE { ?x Exploits T0 . T0 hasVulnerability ?x }",
];

// ---- TF-IDF / cosine ----

pub fn corpus(descs: &[String]) -> CorpusSnapshot {
    let cves = descs
        .iter()
        .enumerate()
        .map(|(i, d)| CveRecord {
            cve_id: format!("CVE-2021-{:04}", 1000 + i).parse().unwrap(),
            description: d.clone(),
            published_year: 2021,
            cwe_ids: vec![CweId::new(1191)],
            cvss_vector: None,
            cpe_names: vec![],
        })
        .collect();
    CorpusSnapshot::new(cves, vec![]).0
}

/// Raw-count tf × ln(N/df), straight from the definition.
pub fn brute_tfidf(docs: &[Vec<String>]) -> Vec<BTreeMap<String, f64>> {
    let n = docs.len() as f64;
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for d in docs {
        for t in d.iter().map(String::as_str).collect::<BTreeSet<_>>() {
            *df.entry(t).or_default() += 1;
        }
    }
    docs.iter()
        .map(|d| {
            let mut w = BTreeMap::new();
            for t in d {
                let idf = (n / df[t.as_str()] as f64).ln();
                if idf > 0.0 {
                    *w.entry(t.clone()).or_insert(0.0) += idf;
                }
            }
            w
        })
        .collect()
}

pub fn brute_cosine(a: &BTreeMap<String, f64>, b: &BTreeMap<String, f64>) -> f64 {
    let dot: f64 = a.iter().map(|(t, x)| x * b.get(t).copied().unwrap_or(0.0)).sum();
    let na = a.values().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.values().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// Words that pass through cleaning unchanged.
pub const STABLE_WORDS: &[&str] = &[
    "jtag", "fuse", "dram", "rom", "glitch", "probe", "laser", "clock", "sram", "flash", "trace", "debug", "chip",
    "kernel",
];

/// Random corpus of ≤ 20 documents: index similarities equal brute-force
/// cosine over brute-force weights, and the ranking follows them.
pub fn cosine_equivalence(seed: u64) -> Check {
    let sw = Stopwords::bundled();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_docs = rng.random_range(2..=20);
    let doc = |rng: &mut ChaCha8Rng| -> String {
        let len = rng.random_range(1..12);
        (0..len).map(|_| STABLE_WORDS[rng.random_range(0..STABLE_WORDS.len())]).collect::<Vec<_>>().join(" ")
    };
    let descs: Vec<String> = (0..n_docs).map(|_| doc(&mut rng)).collect();
    let snap = corpus(&descs);
    let index = build_index(&snap, &sw).map_err(|e| e.to_string())?;
    let tokens: Vec<Vec<String>> = descs.iter().map(|d| string_clean(d, &sw).tokens).collect();
    let weights = brute_tfidf(&tokens);
    for (i, w) in weights.iter().enumerate() {
        let got = index.documents()[i].weights();
        ensure!(got.len() == w.len(), "seed {seed} doc {i}: {} weights, want {}", got.len(), w.len());
        for (t, x) in w {
            let g = got.get(t).copied().unwrap_or(f64::NAN);
            ensure!((g - x).abs() < 1e-9, "seed {seed} doc {i} term {t}: {g} want {x}");
        }
    }
    let query = doc(&mut rng);
    let q_tokens = string_clean(&query, &sw).tokens;
    let idf: BTreeMap<String, f64> = index.idf().clone();
    let mut qv: BTreeMap<String, f64> = BTreeMap::new();
    for t in &q_tokens {
        if let Some(&x) = idf.get(t) {
            if x > 0.0 {
                *qv.entry(t.clone()).or_insert(0.0) += x;
            }
        }
    }
    let mut want: Vec<(String, f64)> = snap
        .cves
        .iter()
        .zip(&weights)
        .map(|(c, w)| (c.cve_id.as_str().to_string(), brute_cosine(&qv, w)))
        .collect();
    want.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let got = rank_similar(&query, &index, n_docs, &sw).map_err(|e| e.to_string())?;
    ensure!(got.len() == want.len(), "seed {seed}: {} matches", got.len());
    for (g, (id, s)) in got.iter().zip(&want) {
        ensure!((g.similarity - s).abs() < 1e-9, "seed {seed}: {} {} want {s}", g.cve_id.as_str(), g.similarity);
        // equal scores may order either way only if they are within tolerance
        if g.cve_id.as_str() != id {
            let other = want.iter().find(|(w, _)| w == g.cve_id.as_str()).unwrap().1;
            ensure!((other - s).abs() < 1e-9, "seed {seed}: rank order differs at {id}");
        }
    }
    Ok(())
}

// ---- collocations on the 12-token fixture ----

pub const TOKENS_12: &str = "a b c a b d b e a b f a";

// Entropy-form G² and PMI, computed outside this crate and frozen.
pub const BIGRAM_ORACLE: &[(&str, f64, f64)] = &[
    ("a b", 8.392276445728, 1.459431618637),
    ("c a", 2.882909131914, 1.874469117916),
    ("e a", 2.882909131914, 1.874469117916),
    ("f a", 2.882909131914, 1.874469117916),
    ("b c", 2.203312984733, 1.459431618637),
    ("b d", 2.203312984733, 1.459431618637),
    ("b e", 2.203312984733, 1.459431618637),
    ("b f", 2.203312984733, 1.459431618637),
    ("d b", 2.203312984733, 1.459431618637),
];

/// Hand-counted windows plus the frozen bigram scores.
pub fn collocation_fixture() -> Check {
    let toks: Vec<&str> = TOKENS_12.split(' ').collect();
    let set = extract_ngrams(&toks);
    ensure!(set.total_tokens == 12, "{} tokens", set.total_tokens);
    let windows = (set.window_count(2), set.window_count(3), set.window_count(4));
    ensure!(windows == (11, 10, 9), "window counts {windows:?}");
    ensure!(set.bigrams.len() == 9 && set.trigrams.len() == 10, "distinct n-gram counts");
    let ab: Vec<String> = vec!["a".into(), "b".into()];
    ensure!(set.frequency(&ab) == 3, "freq(a b) = {}", set.frequency(&ab));
    let ranked = score_collocations(&set);
    let bigrams: Vec<_> = ranked.iter().filter(|c| c.ngram.len() == 2).collect();
    ensure!(bigrams.len() == BIGRAM_ORACLE.len(), "{} bigrams", bigrams.len());
    for (got, (ng, llr, pmi)) in bigrams.iter().zip(BIGRAM_ORACLE) {
        ensure!(got.ngram.join(" ") == *ng, "order: got {:?} want {ng}", got.ngram);
        ensure!((got.score - llr).abs() < 1e-9, "{ng}: llr {} want {llr}", got.score);
        ensure!((got.pmi - pmi).abs() < 1e-9, "{ng}: pmi {} want {pmi}", got.pmi);
    }
    ensure!(ranked[0].ngram == ["a", "b"], "top collocation {:?}", ranked[0].ngram);
    Ok(())
}

// ---- TF-IDF on three documents ----

// Twelve tokens over three documents. "fuse" is in every document, so its
// weight is 0; "jtag" is in two, idf ln(3/2); the rest are unique, idf ln 3.
pub const TFIDF_DOCS: [&str; 3] = ["jtag fuse dram jtag", "fuse probe fuse glitch", "jtag fuse rom jtag"];

// Hand table: weight = raw count × idf.
const JTAG_X2: f64 = 0.8109302162163288; // 2 ln 1.5
const LN3: f64 = 1.0986122886681098;
// query "jtag dram" = (ln 1.5, ln 3):
// d1: (2 ln²1.5 + ln²3) / sqrt((ln²1.5 + ln²3)(4 ln²1.5 + ln²3))
// d3: 2 ln²1.5 / same denominator; d2 shares nothing
const COS_D1: f64 = 0.9604156510905658;
const COS_D3: f64 = 0.20562450224548767;

pub fn tfidf_fixture() -> Check {
    let sw = Stopwords::bundled();
    let descs: Vec<String> = TFIDF_DOCS.iter().map(|s| s.to_string()).collect();
    let idx = build_index(&corpus(&descs), &sw).map_err(|e| e.to_string())?;
    let near = |a: f64, b: f64| (a - b).abs() < 1e-9;
    ensure!(near(idx.idf()["fuse"], 0.0) && near(idx.idf()["jtag"], 1.5f64.ln()), "idf table");
    let w = |d: usize, t: &str| idx.documents()[d].weights().get(t).copied().unwrap_or(0.0);
    let table = [
        (0, "jtag", JTAG_X2),
        (0, "dram", LN3),
        (0, "fuse", 0.0),
        (1, "probe", LN3),
        (1, "glitch", LN3),
        (1, "fuse", 0.0),
        (2, "jtag", JTAG_X2),
        (2, "rom", LN3),
    ];
    for (d, t, want) in table {
        ensure!(near(w(d, t), want), "doc {d} {t}: {} want {want}", w(d, t));
    }
    ensure!(idx.documents().iter().all(|d| d.weights().len() == 2), "weights per document");
    let m = rank_similar("jtag dram", &idx, 3, &sw).map_err(|e| e.to_string())?;
    let ids: Vec<&str> = m.iter().map(|x| x.cve_id.as_str()).collect();
    ensure!(ids == ["CVE-2021-1000", "CVE-2021-1002", "CVE-2021-1001"], "ranking {ids:?}");
    ensure!(near(m[0].similarity, COS_D1), "cos d1 {}", m[0].similarity);
    ensure!(near(m[1].similarity, COS_D3), "cos d3 {}", m[1].similarity);
    ensure!(m[2].similarity == 0.0, "cos d2 {}", m[2].similarity);
    Ok(())
}
