mod support;

use dairector_core::corpus::{TropeCorpus, TropeRecord};
use dairector_core::embedding::{trope_doc_id, StaticEmbedder};
use dairector_core::eval::{
    baseline_stats, distance_stats, evaluate_topn, load_pairs, relink, trope_link_distance, EvalError, LabelledPair,
    MissReason,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::*;

fn rec(name: &str, links: &[&str], plot: bool) -> TropeRecord {
    TropeRecord {
        name: name.into(),
        description: format!("About {name}."),
        links: links.iter().map(|s| s.to_string()).collect(),
        plot,
    }
}

/// T0 - T1 - T2 - T3, plus an isolated T4.
fn chain() -> TropeCorpus {
    TropeCorpus::from_records(vec![
        rec("T0", &["T1"], true),
        rec("T1", &["T2"], true),
        rec("T2", &["T3"], true),
        rec("T3", &[], true),
        rec("T4", &[], true),
    ])
    .unwrap()
    .0
}

fn pair(p: &str, g: &str) -> (String, String) {
    (p.to_string(), g.to_string())
}

#[test]
fn fixture_chain_distance() {
    let c = tropes();
    let d = trope_link_distance(&c, "Get Into Jail Free", "Clear Their Name").unwrap();
    assert_eq!(d, Some(3));
    assert_eq!(trope_link_distance(&c, "Clear Their Name", "Get Into Jail Free").unwrap(), Some(3));
    assert_eq!(trope_link_distance(&c, "Frame-Up", "Frame-Up").unwrap(), Some(0));
    assert!(matches!(trope_link_distance(&c, "Frame-Up", "Nope"), Err(EvalError::UnknownTrope(_))));
}

#[test]
fn stats_small_cases() {
    let c = chain();
    let s = distance_stats(&c, &[pair("T0", "T2"), pair("T1", "T3"), pair("T0", "T3"), pair("T2", "T2")], true).unwrap();
    assert_eq!(s.excluded_exact, 1);
    assert_eq!(s.count, 3);
    assert_eq!(s.median, 2.0);
    assert!((s.mean - 7.0 / 3.0).abs() < 1e-12);
    // Population variance of {2, 2, 3} is 2/9.
    assert!((s.stddev - (2.0f64 / 9.0).sqrt()).abs() < 1e-12, "{}", s.stddev);

    let one = TropeCorpus::from_records(vec![
        rec("a", &["b"], true),
        rec("b", &["c"], true),
        rec("c", &["d"], true),
        rec("d", &["e"], true),
        rec("e", &[], true),
    ])
    .unwrap()
    .0;
    let s = distance_stats(&one, &[pair("a", "e")], true).unwrap();
    assert_eq!((s.median, s.mean, s.stddev), (4.0, 4.0, 0.0));

    assert!(matches!(
        distance_stats(&c, &[pair("T1", "T1"), pair("T3", "T3")], true),
        Err(EvalError::AllPairsExcluded)
    ));
    assert!(matches!(distance_stats(&c, &[pair("T0", "T4")], true), Err(EvalError::NoReachablePairs)));
    let s = distance_stats(&c, &[pair("T0", "T4"), pair("T0", "T1")], true).unwrap();
    assert_eq!((s.unreachable, s.count), (1, 1));
}

#[test]
fn baseline_is_seeded() {
    let c = tropes();
    let a = baseline_stats(&c, 500, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
    let b = baseline_stats(&c, 500, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.pairs, 500);
    assert_eq!(a.excluded_exact, 0);
}

fn random_vec(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f32> {
    (0..dim).map(|_| rng.random_range(-1.0f32..1.0)).collect()
}

/// `count` plot tropes with random vectors, and one pair per gold draw.
fn synthetic(count: usize, pairs: usize, oracle: bool, seed: u64) -> (StaticEmbedder, TropeCorpus, Vec<LabelledPair>) {
    const DIM: usize = 32;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names: Vec<String> = (0..count).map(|i| format!("Trope {i}")).collect();
    let corpus = TropeCorpus::from_records(names.iter().map(|n| rec(n, &[], true)).collect()).unwrap().0;
    let mut e = StaticEmbedder::new(DIM);
    let mut vecs = Vec::new();
    for n in &names {
        let v = random_vec(&mut rng, DIM);
        e.insert(trope_doc_id(n), v.clone());
        vecs.push(v);
    }
    let mut out = Vec::new();
    for i in 0..pairs {
        let g = rng.random_range(0..count);
        let text = format!("scene {i}");
        let v = if oracle { vecs[g].clone() } else { random_vec(&mut rng, DIM) };
        e.insert_text(text.clone(), v);
        out.push(LabelledPair {
            fragment_id: i.to_string(),
            fragment_text: text,
            gold_trope: names[g].clone(),
        });
    }
    (e, corpus, out)
}

#[test]
fn oracle_embedding_has_no_error() {
    let (e, c, pairs) = synthetic(100, 100, true, 1);
    let r = evaluate_topn(&e, &c, &pairs, 5).unwrap();
    assert_eq!(r.top1_error, 0.0);
    assert_eq!(r.topn_error, 0.0);
    assert!(r.records.iter().all(|x| x.hit_rank == Some(1)));
}

#[test]
fn random_embedding_is_near_chance() {
    let (e, c, pairs) = synthetic(100, 200, false, 2);
    let r = evaluate_topn(&e, &c, &pairs, 5).unwrap();
    let sigma = (0.95f64 * 0.05 / 200.0).sqrt();
    assert!((r.topn_error - 0.95).abs() < 3.0 * sigma, "{}", r.topn_error);
}

#[test]
fn miss_reasons() {
    let c = TropeCorpus::from_records(vec![
        rec("Reincarnation", &[], true),
        rec("Other One", &[], true),
        rec("Setting Trope", &[], false),
    ])
    .unwrap()
    .0;
    let mut e = StaticEmbedder::new(2);
    for n in ["Reincarnation", "Other One", "Setting Trope"] {
        e.insert(trope_doc_id(n), vec![1.0, 0.5]);
    }
    e.insert_text("a reincarnation", vec![1.0, 0.0]);
    e.insert_text("a place", vec![1.0, 0.0]);
    let pairs = vec![
        LabelledPair {
            fragment_id: "1".into(),
            fragment_text: "a reincarnation".into(),
            gold_trope: "Reincarnation".into(),
        },
        LabelledPair {
            fragment_id: "2".into(),
            fragment_text: "a place".into(),
            gold_trope: "Setting Trope".into(),
        },
        LabelledPair {
            fragment_id: "3".into(),
            fragment_text: "a place".into(),
            gold_trope: "Missing".into(),
        },
    ];
    let r = evaluate_topn(&e, &c, &pairs, 5).unwrap();
    assert_eq!(r.records[0].miss_reason, Some(MissReason::Filtered));
    assert_eq!(r.records[1].miss_reason, Some(MissReason::NotPlotTrope));
    assert_eq!(r.rejected.len(), 1);
    assert_eq!(r.evaluated, 2);
    assert_eq!(r.topn_error, 1.0);
}

#[test]
fn fixture_eval_is_monotone_in_n() {
    let m = fixture_model();
    let c = tropes();
    let pairs = load_pairs(&data("pairs.jsonl")).unwrap();
    let r1 = evaluate_topn(m, &c, &pairs, 1).unwrap();
    let r5 = evaluate_topn(m, &c, &pairs, 5).unwrap();
    assert!(r1.topn_error >= r5.topn_error);
    assert_eq!(r1.top1_error, r5.top1_error);
    assert_eq!(r5.evaluated + r5.rejected.len(), pairs.len());

    let mut sub = r5.clone();
    relink(&mut sub, &c.plot_subcorpus()).unwrap();
    for (a, b) in sub.records.iter().zip(&r5.records) {
        assert_eq!(a.hit_rank, b.hit_rank);
    }
}

fn arb_links() -> impl Strategy<Value = Vec<Vec<usize>>> {
    (2usize..14).prop_flat_map(|n| prop::collection::vec(prop::collection::vec(0..n, 0..3), n))
}

/// All-pairs shortest paths by relaxation over the undirected link graph.
fn floyd_warshall(links: &[Vec<usize>]) -> Vec<Vec<Option<usize>>> {
    let n = links.len();
    let mut d = vec![vec![None; n]; n];
    for i in 0..n {
        d[i][i] = Some(0);
        for &j in &links[i] {
            if i != j {
                d[i][j] = Some(1);
                d[j][i] = Some(1);
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

proptest! {
    #[test]
    fn link_distance_matches_floyd_warshall(links in arb_links()) {
        let names: Vec<String> = (0..links.len()).map(|i| format!("t{i}")).collect();
        let records = links.iter().enumerate().map(|(i, ls)| TropeRecord {
            name: names[i].clone(),
            description: "d".into(),
            links: ls.iter().map(|j| names[*j].clone()).collect(),
            plot: true,
        }).collect();
        let c = TropeCorpus::from_records(records).unwrap().0;
        let fw = floyd_warshall(&links);
        for i in 0..names.len() {
            for j in 0..names.len() {
                let d = trope_link_distance(&c, &names[i], &names[j]).unwrap();
                prop_assert_eq!(d, fw[i][j]);
                prop_assert_eq!(d, trope_link_distance(&c, &names[j], &names[i]).unwrap());
                for (k, jk) in fw[j].iter().enumerate() {
                    if let (Some(a), Some(b)) = (d, jk) {
                        prop_assert!(fw[i][k].unwrap() <= a + b);
                    }
                }
            }
        }
    }
}
