mod support;

use std::collections::BTreeSet;

use dairector_core::corpus::{
    parse_plotto, validate_graph, CorpusError, PlotGraph, Substitution, SubstitutionWarning, SymbolAlphabet,
    TropeCorpus,
};
use dairector_core::embedding::tokenize;
use proptest::prelude::*;
use serde::Deserialize;
use support::*;

fn subs(pairs: &[(&str, &str)]) -> Vec<Substitution> {
    pairs.iter().map(|(a, b)| Substitution::new(*a, *b)).collect()
}

#[test]
fn three_node_structure() {
    let g = three_node();
    assert_eq!(g.len(), 3);
    assert_eq!(g.edges().len(), 3);
    let next: Vec<&str> = g.successors("746").map(|e| e.to.as_str()).collect();
    assert_eq!(next, ["1441a", "1373"]);
    for e in g.successors("746") {
        assert_eq!(e.substitutions, subs(&[("A", "B")]));
    }
    let back: Vec<_> = g.successors("1441a").collect();
    assert_eq!(back.len(), 1);
    assert_eq!(back[0].to, "746");
    assert_eq!(back[0].substitutions, subs(&[("B", "A")]));
    assert_eq!(g.fragment("1441a").unwrap().text, "A seeks to discover the secret of Life");
    assert_eq!(g.fragment("746").unwrap().symbols, BTreeSet::from(["B".to_string()]));
}

#[test]
fn three_node_validation() {
    let r = validate_graph(&three_node());
    assert_eq!(r.terminal, ["1373"]);
    assert!(r.warnings.is_empty());
    assert_eq!(r.fragments, 3);
}

#[test]
fn single_node_is_terminal() {
    let g = parse_plotto("FRAG x: A waits\n", SymbolAlphabet::default()).unwrap();
    let r = validate_graph(&g);
    assert_eq!(r.terminal, ["x"]);
    assert_eq!(r.roots, ["x"]);
    assert_eq!(r.unreachable, 0);
}

#[test]
fn empty_source_has_no_fragments() {
    let err = parse_plotto("# nothing here\n\n", SymbolAlphabet::default()).unwrap_err();
    assert!(matches!(err, CorpusError::NoFragments));
    assert_eq!(err.to_string(), "no fragments");
}

#[derive(Deserialize)]
struct Manifest {
    fragments: usize,
    edges: usize,
    edges_with_substitutions: usize,
    terminal: Vec<String>,
    roots: Vec<String>,
    unreachable: usize,
}

#[test]
fn excerpt_matches_manifest() {
    let m: Manifest =
        serde_json::from_str(&std::fs::read_to_string(data("plotto_excerpt.manifest.json")).unwrap()).unwrap();
    let g = excerpt();
    assert_eq!(g.len(), m.fragments);
    assert_eq!(g.edges().len(), m.edges);
    assert_eq!(g.edges().iter().filter(|e| !e.substitutions.is_empty()).count(), m.edges_with_substitutions);
    let r = validate_graph(&g);
    assert_eq!(r.terminal, m.terminal);
    assert_eq!(r.roots, m.roots);
    assert_eq!(r.unreachable, m.unreachable);
    assert!(g.fragments().count() >= 50);
}

/// Reads the fixture's raw lines without the parser and lists every
/// substitution whose old symbol is not a whole word of the target text.
fn scan_warnings(source: &str) -> Vec<SubstitutionWarning> {
    let mut texts = std::collections::HashMap::new();
    let mut edges = Vec::new();
    let mut current = String::new();
    for line in source.lines() {
        if let Some(rest) = line.strip_prefix("FRAG ") {
            let (id, text) = rest.split_once(':').unwrap();
            current = id.trim().to_string();
            texts.insert(current.clone(), text.trim().to_string());
        } else if let Some(rest) = line.strip_prefix("-> ") {
            let mut parts = rest.splitn(2, ' ');
            let to = parts.next().unwrap().to_string();
            for clause in parts.next().unwrap_or("").split(',') {
                let words: Vec<&str> = clause.split_whitespace().collect();
                if let ["ch", old, "to", _new] = words[..] {
                    edges.push((current.clone(), to.clone(), old.to_string()));
                }
            }
        }
    }
    let mut out = Vec::new();
    for (from, to, old) in edges {
        let present = texts[&to].split(|c: char| !c.is_alphanumeric()).any(|w| w == old);
        if !present {
            out.push(SubstitutionWarning { from, to, symbol: old });
        }
    }
    out
}

#[test]
fn excerpt_warnings_match_independent_scan() {
    let source = std::fs::read_to_string(data("plotto_excerpt.plotto")).unwrap();
    let mut expected = scan_warnings(&source);
    let mut actual = validate_graph(&excerpt()).warnings;
    expected.sort();
    actual.sort();
    assert_eq!(actual, expected);
    assert!(!expected.is_empty());
}

#[test]
fn excerpt_json_round_trip() {
    let g = excerpt();
    let back = PlotGraph::from_json(&g.to_json(), SymbolAlphabet::default()).unwrap();
    assert_eq!(back, g);
}

#[test]
fn tokenizes_fixture_paragraph_like_by_hand() {
    let text = excerpt().fragment("746").unwrap().text.clone();
    let by_hand = [
        "b", "who", "was", "thought", "by", "the", "people", "of", "her", "community", "to", "have", "supernatural",
        "powers", "is", "discovered", "to", "have", "been", "insane", "a", "condition", "caused", "by", "a", "great",
        "sorrow",
    ];
    assert_eq!(tokenize(&text), by_hand);
}

#[test]
fn trope_fixture_links() {
    let (c, report) = dairector_core::corpus::load_trope_corpus(&data("tropes.json")).unwrap();
    assert_eq!(report.dropped_count(), 2);
    let n: Vec<&str> = c.neighbours("Get Into Jail Free").collect();
    assert_eq!(n, ["Can't Get in Trouble for Nuthin'"]);
    assert!(c.neighbours("Can't Get in Trouble for Nuthin'").any(|x| x == "Get Into Jail Free"));
    assert_eq!(c.plot_trope_subset().len(), 37);
    assert!(!c.plot_trope_subset().contains(&"Mystery Literature"));
}

fn record(name: &str, links: &[&str], plot: bool) -> dairector_core::corpus::TropeRecord {
    dairector_core::corpus::TropeRecord {
        name: name.to_string(),
        description: format!("About {name}."),
        links: links.iter().map(|s| s.to_string()).collect(),
        plot,
    }
}

#[test]
fn trope_corpus_edge_cases() {
    let (c, r) = TropeCorpus::from_records(vec![record("Solo", &[], true), record("Other", &["Ghost"], false)]).unwrap();
    assert_eq!(c.neighbours("Solo").count(), 0);
    assert_eq!(r.dropped_count(), 1);
    assert_eq!(c.plot_trope_subset(), ["Solo"]);

    let err = TropeCorpus::from_records(vec![record("X", &[], true), record("X", &[], false)]).unwrap_err();
    assert!(matches!(err, CorpusError::DuplicateTrope(_)));

    let ten: Vec<_> = (0..10).map(|i| record(&format!("T{i}"), &[], i % 3 == 0)).collect();
    let (c, _) = TropeCorpus::from_records(ten).unwrap();
    assert_eq!(c.plot_trope_subset(), ["T0", "T3", "T6", "T9"]);
    let (none, _) = TropeCorpus::from_records(vec![record("A", &[], false), record("B", &[], false)]).unwrap();
    assert!(none.plot_trope_subset().is_empty());
}

#[test]
fn malformed_trope_json_reports_record() {
    let err = TropeCorpus::from_json(r#"{"tropes": [{"name": "Ok", "description": "fine"}, {"name": ""}]}"#).unwrap_err();
    assert!(matches!(err, CorpusError::MalformedTrope { .. }), "{err}");
}

#[test]
fn unknown_edge_target_is_an_error() {
    let err = parse_plotto("FRAG 1: A\n-> 9\n", SymbolAlphabet::default()).unwrap_err();
    assert!(matches!(err, CorpusError::UnknownFragment { .. }), "{err}");
}

/// (from, to, symbol substitutions by index)
type RawEdge = (usize, usize, Vec<(usize, usize)>);

// Random corpora: ids 0..n with edges drawn among them.
fn arb_corpus() -> impl Strategy<Value = (Vec<String>, Vec<RawEdge>)> {
    const WORDS: [&str; 8] = ["A", "B", "AUX", "meets", "loves", "fears", "the", "CN"];
    (1usize..12).prop_flat_map(|n| {
        let texts = prop::collection::vec(prop::collection::vec(0..WORDS.len(), 1..8), n)
            .prop_map(|ts| ts.into_iter().map(|t| t.iter().map(|&i| WORDS[i]).collect::<Vec<_>>().join(" ")).collect());
        let edges = prop::collection::vec((0..n, 0..n, prop::collection::btree_map(0usize..4, 0usize..4, 0..3)), 0..20)
            .prop_map(|es| es.into_iter().map(|(a, b, m)| (a, b, m.into_iter().collect())).collect());
        (texts, edges)
    })
}

const SYMS: [&str; 4] = ["A", "B", "AUX", "CN"];

fn to_dsl(texts: &[String], edges: &[RawEdge]) -> String {
    let mut s = String::new();
    for (i, t) in texts.iter().enumerate() {
        s.push_str(&format!("FRAG f{i}: {t}\n"));
        for (_, to, m) in edges.iter().filter(|(from, _, _)| *from == i) {
            let label: Vec<String> = m.iter().map(|(a, b)| format!("ch {} to {}", SYMS[*a], SYMS[*b])).collect();
            s.push_str(&format!("-> f{to} {}\n", label.join(", ")));
        }
    }
    s
}

fn arb_tropes() -> impl Strategy<Value = Vec<dairector_core::corpus::TropeRecord>> {
    (1usize..15).prop_flat_map(|n| {
        prop::collection::vec((prop::collection::btree_set(0..n + 2, 0..5), any::<bool>()), n).prop_map(move |v| {
            v.into_iter()
                .enumerate()
                .map(|(i, (links, plot))| dairector_core::corpus::TropeRecord {
                    name: format!("t{i}"),
                    description: "d".into(),
                    links: links.into_iter().map(|l| format!("t{l}")).collect(),
                    plot,
                })
                .collect()
        })
    })
}

proptest! {
    #[test]
    fn parse_is_deterministic_and_round_trips((texts, edges) in arb_corpus()) {
        let src = to_dsl(&texts, &edges);
        let a = parse_plotto(&src, SymbolAlphabet::default()).unwrap();
        let b = parse_plotto(&src, SymbolAlphabet::default()).unwrap();
        prop_assert_eq!(&a, &b);
        let back = PlotGraph::from_json(&a.to_json(), SymbolAlphabet::default()).unwrap();
        prop_assert_eq!(&back, &a);
        prop_assert_eq!(a.edges().len(), edges.len());
    }

    #[test]
    fn edges_resolve_and_adjacency_matches((texts, edges) in arb_corpus()) {
        let g = parse_plotto(&to_dsl(&texts, &edges), SymbolAlphabet::default()).unwrap();
        for e in g.edges() {
            prop_assert!(g.fragment(&e.from).is_some());
            prop_assert!(g.fragment(&e.to).is_some());
        }
        for f in g.fragments() {
            let from_adj: Vec<_> = g.successors(&f.id).cloned().collect();
            let from_edges: Vec<_> = g.edges().iter().filter(|e| e.from == f.id).cloned().collect();
            prop_assert_eq!(from_adj, from_edges);
            for s in &f.symbols {
                prop_assert!(f.text.split(' ').any(|w| w == s));
            }
        }
    }

    #[test]
    fn link_graph_is_symmetric(records in arb_tropes()) {
        let declared: Vec<(String, Vec<String>)> = records.iter().map(|r| (r.name.clone(), r.links.clone())).collect();
        let (c, _) = TropeCorpus::from_records(records).unwrap();
        for (u, vs) in c.link_graph() {
            for v in vs {
                prop_assert!(c.link_graph()[v].contains(u));
            }
        }
        for (u, links) in &declared {
            for v in links.iter().filter(|v| c.contains(v) && *v != u) {
                prop_assert!(c.neighbours(u).any(|x| x == v));
            }
        }
    }
}
