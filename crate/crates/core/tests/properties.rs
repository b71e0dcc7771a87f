//! Property tests for the invariants of features, retrieval, metrics,
//! pipeline and pair generation.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use proptest::prelude::*;
use sil_core::corpus::{parse_corpus, write_corpus};
use sil_core::detection::{Confusion, KnnClassifier, KnnMetric, KnnWeighting, MdPrediction, Predictions};
use sil_core::features::{cosine, fit_tfidf, hash_embed, levenshtein, within_distance, DenseVector, Tokenizer};
use sil_core::kb::VerbalizationSpec;
use sil_core::metrics::{mean_of, Judged, Metric, MetricConfig};
use sil_core::pairs::{generate_mp, split_pairs, PairGenConfig, PairRecord, PairSource};
use sil_core::pipeline::{aggregate_document, run_smp, EdEngine, Fusion, MdSource, SmpConfig};
use sil_core::retrieval::{build_bm25, Bm25Params, Ranking};
use sil_core::synth::{synth_dataset, SynthConfig};

fn dense(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, dim)
}

fn word() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["alpha", "beta", "gamma", "delta", "eps", "zeta", "eta", "theta"]).prop_map(String::from)
}

fn text() -> impl Strategy<Value = String> {
    prop::collection::vec(word(), 1..8).prop_map(|w| w.join(" "))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn cosine_symmetry_and_scale((a, b) in (1usize..12).prop_flat_map(|d| (dense(d), dense(d))), s in 0.01f64..100.0) {
        let va = DenseVector::new(a.clone()).unwrap();
        let vb = DenseVector::new(b).unwrap();
        let ab = cosine(&va, &vb).unwrap();
        prop_assert!((ab - cosine(&vb, &va).unwrap()).abs() < 1e-12);
        let scaled = DenseVector::new(a.iter().map(|x| x * s).collect()).unwrap();
        prop_assert!((ab - cosine(&scaled, &vb).unwrap()).abs() < 1e-9);
        prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&ab));
    }

    #[test]
    fn levenshtein_axioms(a in "[abc]{0,8}", b in "[abc]{0,8}", c in "[abc]{0,8}", bound in 0usize..10) {
        let ab = levenshtein(&a, &b);
        prop_assert_eq!(levenshtein(&a, &a), 0);
        prop_assert_eq!(ab == 0, a == b);
        prop_assert_eq!(ab, levenshtein(&b, &a));
        prop_assert!(ab <= levenshtein(&a, &c) + levenshtein(&c, &b));
        let ca: Vec<char> = a.chars().collect();
        let cb: Vec<char> = b.chars().collect();
        prop_assert_eq!(within_distance(&ca, &cb, bound), ab < bound);
    }

    #[test]
    fn tfidf_brute_force(docs in prop::collection::vec(prop::collection::vec(word(), 0..6), 1..8), probe in prop::collection::vec(word(), 0..6)) {
        let model = fit_tfidf(&docs).unwrap();
        let n = docs.len() as f64;
        let mut tf: HashMap<&str, f64> = HashMap::new();
        for t in &probe {
            *tf.entry(t).or_default() += 1.0;
        }
        let mut weights: Vec<(&str, f64)> = Vec::new();
        for (t, c) in tf {
            let df = docs.iter().filter(|d| d.iter().any(|w| w == t)).count() as f64;
            if df > 0.0 {
                weights.push((t, c * (((1.0 + n) / (1.0 + df)).ln() + 1.0)));
            }
        }
        let norm = weights.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
        let v = model.transform(&probe);
        prop_assert_eq!(v.nnz(), weights.len());
        for (t, w) in weights {
            let col = model.column(t).unwrap();
            prop_assert!((v.get(col) - w / norm).abs() < 1e-12);
        }
    }

    #[test]
    fn hashed_embedding_ignores_word_order(words in prop::collection::vec(word(), 1..10), seed in any::<u64>()) {
        let mut shuffled = words.clone();
        let len = shuffled.len();
        shuffled.rotate_left((seed as usize) % len);
        for tok in [Tokenizer::default(), Tokenizer::char_ngram(3, true).unwrap()] {
            let a = hash_embed(&words.join(" "), 32, &tok).unwrap();
            let b = hash_embed(&shuffled.join(" "), 32, &tok).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn bm25_properties(
        texts in prop::collection::vec(text(), 1..10),
        query in prop::collection::vec(word(), 1..4),
        mask in prop::collection::vec(any::<bool>(), 10),
        k in 1usize..12,
    ) {
        let items: BTreeMap<String, String> = texts.iter().enumerate().map(|(i, t)| (format!("d{i}"), t.clone())).collect();
        let index = build_bm25(&items, Tokenizer::default(), Bm25Params::default()).unwrap();
        let all: BTreeSet<String> = items.keys().cloned().collect();
        let subset: BTreeSet<String> = all.iter().zip(&mask).filter(|(_, m)| **m).map(|(id, _)| id.clone()).collect();
        let q = query.join(" ");

        // filtering never changes the scores of kept candidates
        let full = index.query("q", &q, Some(&all), all.len()).unwrap();
        let part = index.query("q", &q, Some(&subset), k).unwrap();
        let full_scores: BTreeMap<&str, f64> = full.ranked().iter().map(|(i, s)| (i.as_str(), *s)).collect();
        for (id, s) in part.ranked() {
            prop_assert_eq!(full_scores.get(id.as_str()), Some(s));
        }

        // prefix containment across k
        let at_k = index.query("q", &q, None, k).unwrap();
        let at_k1 = index.query("q", &q, None, k + 1).unwrap();
        prop_assert_eq!(at_k.ranked(), &at_k1.ranked()[..at_k.len()]);

        // query term order does not matter
        let mut rev = query.clone();
        rev.reverse();
        let reversed = index.query("q", &rev.join(" "), None, k).unwrap();
        prop_assert_eq!(reversed.len(), at_k.len());
        for ((_, x), (_, y)) in reversed.ranked().iter().zip(at_k.ranked()) {
            prop_assert!((x - y).abs() < 1e-9);
        }

        // direct formula
        let docs: Vec<Vec<String>> = texts.iter().map(|t| Tokenizer::default().tokenize(t)).collect();
        let avgdl = docs.iter().map(Vec::len).sum::<usize>() as f64 / docs.len() as f64;
        let n = docs.len() as f64;
        for (id, score) in full.ranked() {
            let d = &docs[id[1..].parse::<usize>().unwrap()];
            let mut expected = 0.0;
            for t in Tokenizer::default().tokenize(&q) {
                let tf = d.iter().filter(|w| **w == t).count() as f64;
                let df = docs.iter().filter(|x| x.contains(&t)).count() as f64;
                let idf = (1.0 + (n - df + 0.5) / (df + 0.5)).ln();
                expected += idf * tf * 2.2 / (tf + 1.2 * (0.25 + 0.75 * d.len() as f64 / avgdl));
            }
            prop_assert!((score - expected).abs() < 1e-9);
            prop_assert!(*score > 0.0);
        }
    }

    #[test]
    fn metrics_monotone_in_k(hits in prop::collection::vec(any::<bool>(), 0..20), extra in 0usize..5) {
        let relevant = hits.iter().filter(|h| **h).count() + extra;
        prop_assume!(relevant > 0);
        let j = Judged::new(hits, relevant).unwrap();
        let saturated = j.ndcg(relevant.max(j.hits().len()));
        for k in 1..22 {
            prop_assert!(j.recall(k + 1) >= j.recall(k));
            prop_assert!(j.dcg(k + 1) >= j.dcg(k));
            if k >= relevant.max(j.hits().len()) {
                prop_assert!((j.ndcg(k) - saturated).abs() < 1e-12);
            }
            for v in [j.recall(k), j.ndcg(k), j.precision(k)] {
                prop_assert!((0.0..=1.0 + 1e-12).contains(&v));
            }
        }
    }

    #[test]
    fn aggregation_cutoff_prefix(
        scores in prop::collection::vec(prop::collection::vec((0usize..12, 0u8..5), 0..8), 1..4),
        cutoff in 1usize..15,
    ) {
        let texts: Vec<&str> = scores.iter().map(|_| "s").collect();
        let doc = sil_core::corpus::Document {
            doc_id: "d".into(),
            language: sil_core::corpus::Language::En,
            survey_ids: BTreeSet::new(),
            sentences: texts.iter().enumerate().map(|(idx, t)| sil_core::corpus::Sentence {
                idx,
                text: t.to_string(),
                label: false,
                mentions: vec![],
                relations: vec![],
                concepts: vec![],
            }).collect(),
        };
        let rankings: Vec<Ranking> = scores
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let mut m: BTreeMap<String, f64> = BTreeMap::new();
                for (item, sc) in s {
                    m.insert(format!("x{item}"), f64::from(*sc));
                }
                Ranking::from_scores(format!("d#{i}"), m.into_iter().collect(), 100)
            })
            .collect();
        let refs: Vec<&Ranking> = rankings.iter().collect();
        let a = aggregate_document(&refs, &doc, cutoff, Fusion::Max).unwrap();
        let b = aggregate_document(&refs, &doc, cutoff + 1, Fusion::Max).unwrap();
        prop_assert_eq!(&a.ranked[..], &b.ranked[..a.ranked.len()]);

        // brute force: best score per item, sorted, truncated
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
        prop_assert_eq!(a.ranked, expected);
    }
}

fn small(seed: u64) -> SynthConfig {
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

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn smp_never_beats_oracle(seed in any::<u64>(), flags in prop::collection::vec(any::<bool>(), 40), k in 1usize..15, filter in any::<bool>()) {
        let (corpus, kb) = synth_dataset(&small(seed));
        let index = build_bm25(&kb.verbalize_all(&VerbalizationSpec::default()), Tokenizer::default(), Bm25Params::default()).unwrap();
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
        for m in ["recall", "ndcg", "map"] {
            prop_assert!(smp.ed.overall(m).unwrap().value <= oracle.ed.overall(m).unwrap().value + 1e-12);
        }
    }

    #[test]
    fn pairs_respect_filters(seed in any::<u64>(), min in 0usize..12) {
        let (corpus, kb) = synth_dataset(&small(seed));
        let dedup: Vec<String> = corpus.sentences().map(|(_, s)| s.text.clone()).take(20).collect();
        let cfg = PairGenConfig { seed, mp_size: 30, sp_size: 0, dedup_corpus: dedup.clone(), min_levenshtein: min, split_ratio: (4, 1) };
        let pairs = generate_mp(&kb, &cfg);
        prop_assert_eq!(&pairs, &generate_mp(&kb, &cfg));
        for p in &pairs {
            prop_assert!(kb.contains(&p.item_id));
            prop_assert!(p.left != p.right);
            for side in [&p.left, &p.right] {
                prop_assert!(side.split_whitespace().count() >= 3);
                for d in &dedup {
                    prop_assert!(levenshtein(&side.to_lowercase(), &d.to_lowercase()) >= min);
                }
            }
        }
    }

    #[test]
    fn corpus_round_trip(seed in any::<u64>()) {
        let (corpus, _) = synth_dataset(&small(seed));
        let mut buf = Vec::new();
        write_corpus(&corpus, &mut buf).unwrap();
        prop_assert_eq!(parse_corpus(buf.as_slice(), "mem").unwrap(), corpus);
    }

    #[test]
    fn language_slices_recompose(seed in any::<u64>(), k in 1usize..10) {
        let (corpus, kb) = synth_dataset(&small(seed));
        let index = build_bm25(&kb.verbalize_all(&VerbalizationSpec::default()), Tokenizer::default(), Bm25Params::default()).unwrap();
        let out = run_smp(&corpus, &kb, &EdEngine::Bm25(&index), &SmpConfig::new(k).unwrap(), None).unwrap();
        let overall = out.ed.overall("recall").unwrap();
        let rows: Vec<_> = out.diagnostics.entries.iter().filter(|e| e.metric == "recall" && e.slice.is_some()).collect();
        let n: usize = rows.iter().map(|e| e.n_queries).sum();
        prop_assert_eq!(n, overall.n_queries);
        if n > 0 {
            let pooled = rows.iter().map(|e| e.value * e.n_queries as f64).sum::<f64>() / n as f64;
            prop_assert!((pooled - overall.value).abs() < 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn split_is_a_partition(n in 0usize..60, a in 1u64..300, b in 1u64..30, seed in any::<u64>()) {
        let pairs: Vec<PairRecord> = (0..n)
            .map(|i| PairRecord { left: format!("l{i}"), right: format!("r{i}"), item_id: "x".into(), source: PairSource::Mp })
            .collect();
        let (train, val) = split_pairs(&pairs, (a, b), seed).unwrap();
        prop_assert_eq!(train.len(), n * a as usize / (a + b) as usize);
        let mut joined: Vec<String> = train.iter().chain(&val).map(|p| p.left.clone()).collect();
        joined.sort();
        let mut expected: Vec<String> = pairs.iter().map(|p| p.left.clone()).collect();
        expected.sort();
        prop_assert_eq!(joined, expected);
        prop_assert_eq!(split_pairs(&pairs, (a, b), seed).unwrap(), (train, val));
    }

    #[test]
    fn f1_is_harmonic_mean(tp in 0usize..50, fp in 0usize..50, fn_ in 0usize..50, tn in 0usize..50, extra in 1usize..20) {
        let c = Confusion { tp, fp, fn_, tn };
        let (p, r) = (c.precision(), c.recall());
        let expected = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
        prop_assert!((c.f1() - expected).abs() < 1e-12);
        prop_assert!(c.f1() <= p.max(r) + 1e-12 && c.f1() >= p.min(r) - 1e-12);
        // more false positives never raise precision
        let worse = Confusion { fp: fp + extra, ..c };
        prop_assert!(worse.precision() <= p);
        prop_assert_eq!(worse.recall(), r);
    }

    #[test]
    fn knn_with_all_neighbors_gives_prior(
        refs in prop::collection::vec((dense(3), any::<bool>()), 1..20),
        q in dense(3),
    ) {
        let n = refs.len();
        let prior = refs.iter().filter(|(_, y)| *y).count() as f64 / n as f64;
        let refs: Vec<(DenseVector, bool)> = refs.into_iter().map(|(v, y)| (DenseVector::new(v).unwrap(), y)).collect();
        for metric in [KnnMetric::Cosine, KnnMetric::Euclidean, KnnMetric::Manhattan] {
            let clf = KnnClassifier::new(refs.clone(), n, metric, KnnWeighting::Uniform).unwrap();
            let (label, score) = clf.predict(&DenseVector::new(q.clone()).unwrap()).unwrap();
            prop_assert!((score - prior).abs() < 1e-12);
            prop_assert_eq!(label, prior >= 0.5);
        }
    }
}

#[test]
fn mean_of_empty_is_zero() {
    let cfg = MetricConfig::new(3).unwrap();
    assert_eq!(mean_of(&[], Metric::Recall, &cfg), 0.0);
}
