//! Acceptance checks. Prints one `[PASS]`, `[FAIL]` or `[SKIPPED]` line per
//! criterion and exits nonzero if any criterion fails.
//!
//! Checks against the released corpus and knowledge base run when
//! `$SIL_DATA_DIR` holds `corpus.jsonl`, `split.json` and `kb.jsonl`.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sil_core::corpus::{cohens_kappa, corpus_stats, load_corpus, load_split, Corpus, SplitName, SplitPart};
use sil_core::detection::{evaluate_md, MdPrediction, Predictions};
use sil_core::features::{cosine, levenshtein, within_distance, DenseVector, Tokenizer};
use sil_core::kb::{load_kb, KnowledgeBase, VerbalizationSpec};
use sil_core::metrics::{average_precision_at_k, mean_average_precision, ndcg_at_k, recall_at_k, ApVariant, Judged, MetricConfig, Qrels};
use sil_core::pairs::{generate_mp, PairGenConfig};
use sil_core::pipeline::{aggregate_document, run_smp, EdEngine, Fusion, MdSource, SmpConfig};
use sil_core::retrieval::{build_bm25, Bm25Index, Bm25Params, DenseIndex, Ranking};
use sil_core::synth::{synth_dataset, SynthConfig};

enum Outcome {
    Pass(String),
    Fail(String),
    Skipped(String),
}

type Check = fn() -> Outcome;
type Named<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

// ---------------------------------------------------------------- metric oracle

fn rel(items: &[String], relevant: &BTreeSet<String>, i: usize) -> f64 {
    f64::from(u8::from(i < items.len() && relevant.contains(&items[i])))
}

fn oracle_precision(items: &[String], relevant: &BTreeSet<String>, i: usize) -> f64 {
    (0..i).map(|j| rel(items, relevant, j)).sum::<f64>() / i as f64
}

fn oracle_recall(items: &[String], relevant: &BTreeSet<String>, k: usize) -> f64 {
    let top: BTreeSet<&String> = items.iter().take(k).collect();
    relevant.iter().filter(|r| top.contains(r)).count() as f64 / relevant.len() as f64
}

fn oracle_ap(items: &[String], relevant: &BTreeSet<String>, k: usize, variant: ApVariant) -> f64 {
    match variant {
        ApVariant::StandardTruncated => {
            let s: f64 = (1..=k).filter(|&i| rel(items, relevant, i - 1) == 1.0).map(|i| oracle_precision(items, relevant, i)).sum();
            s / relevant.len().min(k) as f64
        }
        ApVariant::Literal => (1..=k).map(|i| oracle_precision(items, relevant, i)).sum::<f64>() / k as f64,
    }
}

fn oracle_ndcg(items: &[String], relevant: &BTreeSet<String>, k: usize) -> f64 {
    let dcg: f64 = (1..=k).map(|i| rel(items, relevant, i - 1) / ((i + 1) as f64).log2()).sum();
    let idcg: f64 = (1..=relevant.len().min(k)).map(|i| 1.0 / ((i + 1) as f64).log2()).sum();
    dcg / idcg
}

fn random_instance(rng: &mut ChaCha8Rng, query: &str) -> (Ranking, BTreeSet<String>, usize) {
    let universe = rng.gen_range(1..=20);
    let ids: Vec<String> = (0..universe).map(|i| format!("i{i:02}")).collect();
    let len = rng.gen_range(0..=universe);
    let mut pool = ids.clone();
    let ranked: Vec<(String, f64)> = (0..len).map(|r| (pool.swap_remove(rng.gen_range(0..pool.len())), (len - r) as f64)).collect();
    let n_rel = rng.gen_range(1..=universe.min(5));
    let mut relevant = BTreeSet::new();
    while relevant.len() < n_rel {
        relevant.insert(ids[rng.gen_range(0..universe)].clone());
    }
    (Ranking::new(query, ranked).unwrap(), relevant, rng.gen_range(1..=25))
}

fn metric_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20240);
    let mut worst: f64 = 0.0;
    let mut rankings = Vec::new();
    let mut entries = Vec::new();
    let mut expected_map = [0.0; 2];
    let variants = [ApVariant::StandardTruncated, ApVariant::Literal];
    for n in 0..1000 {
        let query = format!("d#{n}");
        let (ranking, relevant, k) = random_instance(&mut rng, &query);
        let items: Vec<String> = ranking.item_ids().map(String::from).collect();
        worst = worst.max((recall_at_k(&ranking, &relevant, k).unwrap() - oracle_recall(&items, &relevant, k)).abs());
        worst = worst.max((ndcg_at_k(&ranking, &relevant, k).unwrap() - oracle_ndcg(&items, &relevant, k)).abs());
        for v in variants {
            let cfg = MetricConfig::new(k).unwrap().with_variant(v);
            worst = worst.max((average_precision_at_k(&ranking, &relevant, &cfg).unwrap() - oracle_ap(&items, &relevant, k, v)).abs());
        }
        for (slot, v) in variants.iter().enumerate() {
            expected_map[slot] += oracle_ap(&items, &relevant, 10, *v) / 1000.0;
        }
        rankings.push(ranking);
        entries.push((query, relevant));
    }
    let qrels = Qrels::from_entries(entries).unwrap();
    for (slot, v) in variants.iter().enumerate() {
        let cfg = MetricConfig::new(10).unwrap().with_variant(*v);
        worst = worst.max((mean_average_precision(&rankings, &qrels, &cfg).unwrap() - expected_map[slot]).abs());
    }
    let elapsed = start.elapsed();
    let detail = format!("1000 instances, max |diff| {worst:.2e}, {:.2} s", elapsed.as_secs_f64());
    if worst < 1e-9 && elapsed < Duration::from_secs(5) {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

// ---------------------------------------------------------------- hand fixtures

fn set(xs: &[&str]) -> BTreeSet<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn hand_fixtures() -> Outcome {
    let docs = BTreeMap::from([("a".to_string(), "alpha beta".to_string()), ("b".to_string(), "gamma delta".to_string())]);
    let index = build_bm25(&docs, Tokenizer::default(), Bm25Params::default()).unwrap();
    let bm25 = index.query("q", "alpha", None, 10).unwrap().ranked()[0].1;

    let r = Ranking::new("q", vec![("x".into(), 2.0), ("a".into(), 1.0)]).unwrap();
    let ndcg = ndcg_at_k(&r, &set(&["a"]), 10).unwrap();

    let r = Ranking::new("q", vec![("a".into(), 3.0), ("x".into(), 2.0), ("b".into(), 1.0)]).unwrap();
    let cfg = MetricConfig::new(3).unwrap();
    let std = average_precision_at_k(&r, &set(&["a", "b"]), &cfg).unwrap();
    let lit = average_precision_at_k(&r, &set(&["a", "b"]), &cfg.with_variant(ApVariant::Literal)).unwrap();

    let checks = [("bm25", bm25, std::f64::consts::LN_2), ("ndcg", ndcg, 0.63093), ("ap_standard", std, 5.0 / 6.0), ("ap_literal", lit, 13.0 / 18.0)];
    let detail = checks.iter().map(|(n, got, want)| format!("{n}={got:.5} (want {want:.5})")).collect::<Vec<_>>().join(", ");
    if checks.iter().all(|(_, got, want)| close(*got, *want, 1e-4)) {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

// ---------------------------------------------------------------- properties

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(Config { cases, failure_persistence: None, ..Config::default() }, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn word() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["alpha", "beta", "gamma", "delta", "eps", "zeta", "eta", "theta"]).prop_map(String::from)
}

fn text() -> impl Strategy<Value = String> {
    prop::collection::vec(word(), 1..8).prop_map(|w| w.join(" "))
}

fn ensure(cond: bool, what: &str) -> Result<(), TestCaseError> {
    if cond {
        Ok(())
    } else {
        Err(TestCaseError::fail(what.to_string()))
    }
}

fn small_synth(seed: u64) -> SynthConfig {
    SynthConfig {
        seed,
        surveys: 4,
        groups_per_survey: 3,
        items_per_group: 4,
        docs: 5,
        sentences_per_doc: 8,
        positive_rate: 0.3,
        ..SynthConfig::default()
    }
}

fn bm25_of(kb: &KnowledgeBase) -> Bm25Index {
    build_bm25(&kb.verbalize_all(&VerbalizationSpec::default()), Tokenizer::default(), Bm25Params::default()).unwrap()
}

struct Suite {
    name: &'static str,
    cases: u32,
    run: fn(&mut TestRunner) -> Result<(), String>,
}

fn err<T: std::fmt::Debug>(e: proptest::test_runner::TestError<T>) -> String {
    e.to_string()
}

fn prop_metric_monotone(r: &mut TestRunner) -> Result<(), String> {
    let strategy = (prop::collection::vec(any::<bool>(), 0..20), 0usize..5);
    r.run(&strategy, |(hits, extra)| {
        let relevant = hits.iter().filter(|h| **h).count() + extra;
        if relevant == 0 {
            return Ok(());
        }
        let j = Judged::new(hits, relevant).unwrap();
        for k in 1..22 {
            ensure(j.recall(k + 1) >= j.recall(k), "recall decreased with k")?;
            ensure(j.dcg(k + 1) >= j.dcg(k), "dcg decreased with k")?;
        }
        Ok(())
    })
    .map_err(err)
}

fn prop_prefix_and_filter(r: &mut TestRunner) -> Result<(), String> {
    let strategy = (prop::collection::vec(text(), 1..10), prop::collection::vec(word(), 1..4), prop::collection::vec(any::<bool>(), 10), 1usize..12);
    r.run(&strategy, |(texts, query, mask, k)| {
        let items: BTreeMap<String, String> = texts.iter().enumerate().map(|(i, t)| (format!("d{i}"), t.clone())).collect();
        let index = build_bm25(&items, Tokenizer::default(), Bm25Params::default()).unwrap();
        let q = query.join(" ");
        let a = index.query("q", &q, None, k).unwrap();
        let b = index.query("q", &q, None, k + 1).unwrap();
        ensure(a.ranked() == &b.ranked()[..a.len()], "top-k is not a prefix of top-(k+1)")?;

        let all: BTreeSet<String> = items.keys().cloned().collect();
        let subset: BTreeSet<String> = all.iter().zip(&mask).filter(|(_, m)| **m).map(|(id, _)| id.clone()).collect();
        let full = index.query("q", &q, Some(&all), all.len()).unwrap();
        let part = index.query("q", &q, Some(&subset), all.len()).unwrap();
        let expected: Vec<(String, f64)> = full.ranked().iter().filter(|(id, _)| subset.contains(id)).cloned().collect();
        ensure(part.ranked() == expected.as_slice(), "filtered ranking differs from filtered full ranking")?;
        let contained = part.item_ids().all(|id| subset.contains(id));
        ensure(contained, "ranking escaped the candidate set")
    })
    .map_err(err)
}

fn prop_cosine(r: &mut TestRunner) -> Result<(), String> {
    let strategy =
        (1usize..12).prop_flat_map(|d| (prop::collection::vec(-10.0f64..10.0, d), prop::collection::vec(-10.0f64..10.0, d), 0.01f64..100.0));
    r.run(&strategy, |(a, b, s)| {
        let va = DenseVector::new(a.clone()).unwrap();
        let vb = DenseVector::new(b).unwrap();
        let ab = cosine(&va, &vb).unwrap();
        ensure(close(ab, cosine(&vb, &va).unwrap(), 1e-12), "cosine not symmetric")?;
        let scaled = DenseVector::new(a.iter().map(|x| x * s).collect()).unwrap();
        ensure(close(ab, cosine(&scaled, &vb).unwrap(), 1e-9), "cosine not scale invariant")
    })
    .map_err(err)
}

fn prop_levenshtein(r: &mut TestRunner) -> Result<(), String> {
    let strategy = ("[abc]{0,8}", "[abc]{0,8}", "[abc]{0,8}", 0usize..10);
    r.run(&strategy, |(a, b, c, bound)| {
        let ab = levenshtein(&a, &b);
        ensure(levenshtein(&a, &a) == 0, "d(a,a) != 0")?;
        ensure((ab == 0) == (a == b), "d(a,b) = 0 iff a = b violated")?;
        ensure(ab == levenshtein(&b, &a), "not symmetric")?;
        ensure(ab <= levenshtein(&a, &c) + levenshtein(&c, &b), "triangle inequality violated")?;
        let (ca, cb): (Vec<char>, Vec<char>) = (a.chars().collect(), b.chars().collect());
        ensure(within_distance(&ca, &cb, bound) == (ab < bound), "bounded check disagrees")
    })
    .map_err(err)
}

fn prop_smp_dominance(r: &mut TestRunner) -> Result<(), String> {
    let strategy = (any::<u64>(), prop::collection::vec(any::<bool>(), 40), 1usize..15, any::<bool>());
    r.run(&strategy, |(seed, flags, k, filter)| {
        let (corpus, kb) = synth_dataset(&small_synth(seed));
        let index = bm25_of(&kb);
        let engine = EdEngine::Bm25(&index);
        let mut cfg = SmpConfig::new(k).unwrap();
        cfg.filter_citations = filter;
        let oracle = run_smp(&corpus, &kb, &engine, &cfg, None).unwrap();
        let md: Predictions = corpus
            .sentences()
            .zip(flags.iter().cycle())
            .map(|((d, s), f)| (d.key(s.idx), MdPrediction { label: *f, score: f64::from(u8::from(*f)) }))
            .collect();
        cfg.md_source = MdSource::File;
        let smp = run_smp(&corpus, &kb, &engine, &cfg, Some(&md)).unwrap();
        ensure(smp.ed.overall("recall").unwrap().value <= oracle.ed.overall("recall").unwrap().value + 1e-12, "SMP recall above oracle")
    })
    .map_err(err)
}

fn prop_aggregation(r: &mut TestRunner) -> Result<(), String> {
    let (corpus, _) = synth_dataset(&small_synth(1));
    let doc = corpus.documents()[0].clone();
    let n = doc.sentences.len();
    let strategy = (prop::collection::vec(prop::collection::vec((0usize..12, 0u8..5), 0..8), n), 1usize..15);
    r.run(&strategy, |(scores, cutoff)| {
        let rankings: Vec<Ranking> = scores
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let m: BTreeMap<String, f64> = s.iter().map(|(item, sc)| (format!("x{item}"), f64::from(*sc))).collect();
                Ranking::from_scores(format!("{}#{i}", doc.doc_id), m.into_iter().collect(), 100)
            })
            .collect();
        let refs: Vec<&Ranking> = rankings.iter().collect();
        let a = aggregate_document(&refs, &doc, cutoff, Fusion::Max).unwrap();
        let b = aggregate_document(&refs, &doc, cutoff + 1, Fusion::Max).unwrap();
        ensure(a.ranked[..] == b.ranked[..a.ranked.len()], "cutoff c is not a prefix of c+1")?;
        let mut best: BTreeMap<&str, f64> = BTreeMap::new();
        for r in &rankings {
            for (item, s) in r.ranked() {
                let e = best.entry(item.as_str()).or_insert(f64::MIN);
                *e = e.max(*s);
            }
        }
        let mut expected: Vec<(String, f64)> = best.into_iter().map(|(i, s)| (i.to_string(), s)).collect();
        expected.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
        expected.truncate(cutoff);
        ensure(a.ranked == expected, "aggregation differs from brute force")
    })
    .map_err(err)
}

fn prop_pair_filter(r: &mut TestRunner) -> Result<(), String> {
    let big = SynthConfig { surveys: 10, groups_per_survey: 10, items_per_group: 10, ..SynthConfig::default() };
    let (corpus, kb) = synth_dataset(&big);
    let sentences: Vec<String> = corpus.sentences().map(|(_, s)| s.text.clone()).collect();
    let strategy = (any::<u64>(), 0usize..14, 0usize..100);
    r.run(&strategy, |(seed, min, offset)| {
        let dedup: Vec<String> = sentences.iter().skip(offset).take(25).cloned().collect();
        let cfg = PairGenConfig { seed, mp_size: 100, sp_size: 0, dedup_corpus: dedup.clone(), min_levenshtein: min, split_ratio: (200, 15) };
        for p in generate_mp(&kb, &cfg) {
            ensure(p.left != p.right, "identical sides")?;
            for side in [&p.left, &p.right] {
                ensure(side.split_whitespace().count() >= 3, "side shorter than three words")?;
                let folded: Vec<char> = side.to_lowercase().chars().collect();
                let close = dedup.iter().any(|d| within_distance(&folded, &d.to_lowercase().chars().collect::<Vec<_>>(), min));
                ensure(!close, "side too close to an evaluation sentence")?;
            }
        }
        Ok(())
    })
    .map_err(err)
}

const SUITES: [Suite; 7] = [
    Suite { name: "metric monotonicity in k", cases: 2500, run: prop_metric_monotone },
    Suite { name: "ranking prefix + candidate filter", cases: 1500, run: prop_prefix_and_filter },
    Suite { name: "cosine symmetry/scale", cases: 2500, run: prop_cosine },
    Suite { name: "levenshtein axioms", cases: 2500, run: prop_levenshtein },
    Suite { name: "smp dominance", cases: 300, run: prop_smp_dominance },
    Suite { name: "aggregation cutoff", cases: 1000, run: prop_aggregation },
    Suite { name: "pair filter compliance", cases: 100, run: prop_pair_filter },
];

fn log_timing(name: &str, elapsed: Duration) {
    if std::env::var_os("SIL_ACCEPTANCE_TIMING").is_some() {
        eprintln!("  {name}: {:.2} s", elapsed.as_secs_f64());
    }
}

fn properties() -> Outcome {
    let start = Instant::now();
    let mut total = 0;
    let mut failures = Vec::new();
    for suite in SUITES.iter() {
        let mut r = runner(suite.cases);
        let t = Instant::now();
        let result = (suite.run)(&mut r);
        log_timing(suite.name, t.elapsed());
        match result {
            Ok(()) => total += suite.cases,
            Err(e) => failures.push(format!("{}: {e}", suite.name)),
        }
    }
    let elapsed = start.elapsed();
    let detail = format!("{total} cases in {:.1} s", elapsed.as_secs_f64());
    if !failures.is_empty() {
        Outcome::Fail(format!("{detail}; {}", failures.join("; ")))
    } else if total < 10_000 || elapsed >= Duration::from_secs(60) {
        Outcome::Fail(detail)
    } else {
        Outcome::Pass(detail)
    }
}

// ---------------------------------------------------------------- degenerate conventions

fn degenerate() -> Outcome {
    let (corpus, kb) = synth_dataset(&small_synth(3));
    let none = Predictions::from_fn(&corpus, |_, _| false);
    let md = evaluate_md(&none, &corpus).unwrap().pooled;
    let zero = DenseVector::new(vec![0.0; 4]).unwrap();
    let other = DenseVector::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
    let index = bm25_of(&kb);
    let any_item = kb.item_ids().next().unwrap().clone();
    let text = kb.verbalize_all(&VerbalizationSpec::default())[&any_item].clone();
    let empty_bm25 = index.query("q", &text, Some(&BTreeSet::new()), 10).unwrap();
    let mut dense = DenseIndex::new(4);
    dense.insert("a", &other).unwrap();
    let empty_dense = dense.query("q", &other, Some(&BTreeSet::new()), 10).unwrap();
    let labels = [true, false, true, true];
    let checks = [
        ("all-negative MD precision = 0", md.precision() == 0.0),
        ("all-negative MD recall = 0", md.recall() == 0.0),
        ("zero-vector cosine = 0", cosine(&zero, &other).unwrap() == 0.0 && cosine(&zero, &zero).unwrap() == 0.0),
        ("empty candidates give empty ranking", empty_bm25.is_empty() && empty_dense.is_empty()),
        ("kappa of identical sequences = 1", cohens_kappa(&labels, &labels).unwrap() == 1.0 && cohens_kappa(&[true; 3], &[true; 3]).unwrap() == 1.0),
    ];
    let failed: Vec<&str> = checks.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
    if failed.is_empty() {
        Outcome::Pass(format!("{} conventions", checks.len()))
    } else {
        Outcome::Fail(failed.join("; "))
    }
}

// ---------------------------------------------------------------- released data

struct Released {
    corpus: Corpus,
    kb: KnowledgeBase,
    split: sil_core::corpus::SplitSpec,
}

fn data_dir() -> Option<PathBuf> {
    std::env::var_os("SIL_DATA_DIR").map(PathBuf::from)
}

fn released() -> Result<Released, String> {
    let Some(dir) = data_dir() else {
        return Err("SIL_DATA_DIR not set".into());
    };
    let paths: Vec<PathBuf> = ["corpus.jsonl", "split.json", "kb.jsonl"].iter().map(|n| dir.join(n)).collect();
    if let Some(missing) = paths.iter().find(|p| !p.exists()) {
        return Err(format!("{} not found", missing.display()));
    }
    let corpus = load_corpus(&paths[0]).map_err(|e| e.to_string())?;
    let split = load_split(&paths[1], SplitName::Diff).map_err(|e| e.to_string())?;
    let kb = load_kb(&paths[2]).map_err(|e| e.to_string())?;
    Ok(Released { corpus, kb, split })
}

/// Runs `check` on the released data, or skips with the reason it is unavailable.
fn with_data(data: &Result<Released, String>, check: impl FnOnce(&Released) -> Outcome) -> Outcome {
    match data {
        Ok(d) => check(d),
        Err(reason) => Outcome::Skipped(format!("released data unavailable ({reason})")),
    }
}

fn corpus_counts(d: &Released) -> Outcome {
    let stats = match corpus_stats(&d.corpus, &d.split) {
        Ok(s) => s,
        Err(e) => return Outcome::Fail(e.to_string()),
    };
    let t = &stats.rows[4];
    let got = (t.positive + t.negative, t.positive, t.unique_items, t.surveys, t.papers);
    let want = (20_454, 783, 1_283, 97, 100);
    let detail = format!("sentences/positive/items/surveys/papers = {got:?}, expected {want:?}");
    if got == want {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn test_recall(d: &Released, part: SplitPart, filter: bool) -> Result<f64, String> {
    let subset = d.corpus.subset(d.split.part(part)).map_err(|e| e.to_string())?;
    let index = bm25_of(&d.kb);
    let mut cfg = SmpConfig::new(10).map_err(|e| e.to_string())?;
    cfg.filter_citations = filter;
    let out = run_smp(&subset, &d.kb, &EdEngine::Bm25(&index), &cfg, None).map_err(|e| e.to_string())?;
    Ok(100.0 * out.ed.overall("recall").ok_or("no recall row")?.value)
}

fn filtered_recall(d: &Released) -> Outcome {
    let (en, de) = match (test_recall(d, SplitPart::TestEn, true), test_recall(d, SplitPart::TestDe, true)) {
        (Ok(en), Ok(de)) => (en, de),
        (Err(e), _) | (_, Err(e)) => return Outcome::Fail(e),
    };
    let detail = format!("R@10 en {en:.1} (75.1 +/- 5.0), de {de:.1} (34.5 +/- 5.0)");
    if close(en, 75.1, 5.0) && close(de, 34.5, 5.0) {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn filter_ablation(d: &Released) -> Outcome {
    let mut parts = Vec::new();
    for part in [SplitPart::TestEn, SplitPart::TestDe] {
        match (test_recall(d, part, true), test_recall(d, part, false)) {
            (Ok(on), Ok(off)) => parts.push((part, on, off)),
            (Err(e), _) | (_, Err(e)) => return Outcome::Fail(e),
        }
    }
    let detail = parts.iter().map(|(p, on, off)| format!("{p}: {on:.1} -> {off:.1}")).collect::<Vec<_>>().join(", ");
    if parts.iter().all(|(_, on, off)| off < on) {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn item_counts(d: &Released) -> Outcome {
    let stats = match corpus_stats(&d.corpus, &d.split) {
        Ok(s) => s,
        Err(e) => return Outcome::Fail(e.to_string()),
    };
    let c = &stats.item_counts;
    let got = (c.single[1] + c.single[2], c.multi[1] + c.multi[2]);
    let detail = format!("test single/multi = {}/{}, expected 223/121", got.0, got.1);
    if got == (223, 121) {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

// ---------------------------------------------------------------- determinism

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let data = match data_dir().filter(|d| d.join("corpus.jsonl").exists() && d.join("kb.jsonl").exists()) {
        Some(d) => d,
        None => common::write_fixture(dir.path(), 17),
    };
    let outputs = [dir.path().join("first"), dir.path().join("second")];
    for out in &outputs {
        let status = common::sil()
            .args(["--data-dir", common::p(&data), "smp", "run", "--md", "oracle", "--ed", "bm25", "--k", "10", "--out-dir", common::p(out)])
            .output()
            .unwrap();
        if !status.status.success() {
            return Outcome::Fail(common::stderr(&status));
        }
    }
    let files = ["run.tsv", "report.json", "diagnostics.json", "qrels.tsv"];
    let differing: Vec<&str> = files.iter().copied().filter(|f| fs::read(outputs[0].join(f)).ok() != fs::read(outputs[1].join(f)).ok()).collect();
    let source = if data.starts_with(dir.path()) { "synthetic fixture" } else { "released data" };
    if differing.is_empty() {
        Outcome::Pass(format!("{} files identical across two runs ({source})", files.len()))
    } else {
        Outcome::Fail(format!("differing: {}", differing.join(", ")))
    }
}

fn main() -> ExitCode {
    let data = released();
    let checks: Vec<Named> = vec![
        ("metric oracle suite", Box::new(metric_oracle as Check)),
        ("hand-computed fixtures", Box::new(hand_fixtures as Check)),
        ("property suites", Box::new(properties as Check)),
        ("degenerate conventions", Box::new(degenerate as Check)),
        ("released data: corpus counts", Box::new(|| with_data(&data, corpus_counts))),
        ("released data: BM25 R@10 with citation filter", Box::new(|| with_data(&data, filtered_recall))),
        ("released data: citation filter ablation", Box::new(|| with_data(&data, filter_ablation))),
        ("released data: single/multi-item sentences", Box::new(|| with_data(&data, item_counts))),
        ("end-to-end determinism", Box::new(determinism as Check)),
    ];
    let (mut passed, mut failed, mut skipped) = (0, 0, 0);
    for (name, check) in &checks {
        match check() {
            Outcome::Pass(d) => {
                passed += 1;
                println!("[PASS] {name}: {d}");
            }
            Outcome::Fail(d) => {
                failed += 1;
                println!("[FAIL] {name}: {d}");
            }
            Outcome::Skipped(d) => {
                skipped += 1;
                println!("[SKIPPED] {name}: {d}");
            }
        }
    }
    println!("acceptance: {passed} passed, {failed} failed, {skipped} skipped");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
