mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::qn;
use msaforge::analyze::{
    coupling_metrics, dependency_graph, detect_cycles, elementary_cycles, export_dot, export_json,
    DependencyKind, Edge, InteractionGraph, Witness,
};
use msaforge::model::{canonical_deserialize, canonical_serialize, QualifiedName};
use msaforge::testkit::{demo_entries, demo_loader, generate_model, initializer_model, GenConfig};
use msaforge::{compile, Model};
use proptest::prelude::*;

fn demo() -> Model {
    compile(&demo_entries(), &demo_loader()).unwrap().model
}

fn node(i: usize) -> QualifiedName {
    qn(&format!("s.N{i}"))
}

fn edge(a: usize, b: usize, kind: DependencyKind) -> Edge {
    let witness = match kind {
        DependencyKind::Cdid => Witness::Requirement {
            contract: node(a).child("C"),
            interface: node(b).child("I"),
        },
        DependencyKind::Pdid => Witness::Initializer {
            parameter: node(a).child("I").child("op").child("p"),
            operation: node(b).child("I").child("op"),
        },
    };
    Edge {
        consumer: node(a),
        provider: node(b),
        kind,
        witness,
    }
}

#[test]
fn demo_graph() {
    let g = dependency_graph(&demo());
    assert_eq!(g.nodes.len(), 3);
    let summary: Vec<(String, String, DependencyKind)> = g
        .edges
        .iter()
        .map(|e| (e.consumer.to_string(), e.provider.to_string(), e.kind))
        .collect();
    assert_eq!(
        summary,
        [
            (
                "shop.CheckoutService".into(),
                "shop.PaymentService".into(),
                DependencyKind::Cdid
            ),
            (
                "shop.CheckoutService".into(),
                "shop.PricingService".into(),
                DependencyKind::Pdid
            ),
        ]
    );
    assert_eq!(
        g.edges[1].witness,
        Witness::Initializer {
            parameter: qn("shop.CheckoutService.Orders.placeOrder.price"),
            operation: qn("shop.PricingService.Pricing.quote"),
        }
    );
    assert!(detect_cycles(&g).cycles.is_empty());
}

#[test]
fn demo_dot_matches_fixture() {
    let expected = include_str!("fixtures/demo.dot");
    assert_eq!(export_dot(&dependency_graph(&demo())), expected);
}

#[test]
fn two_service_cycle() {
    let g = InteractionGraph::new(
        [],
        [
            edge(0, 1, DependencyKind::Cdid),
            edge(1, 0, DependencyKind::Pdid),
        ],
    );
    let c = detect_cycles(&g);
    assert_eq!(c.cycles, vec![vec![node(0), node(1)]]);
    assert!(!c.truncated);
}

#[test]
fn parallel_edges_of_both_kinds_are_kept() {
    let g = InteractionGraph::new(
        [],
        [
            edge(0, 1, DependencyKind::Cdid),
            edge(0, 1, DependencyKind::Pdid),
        ],
    );
    assert_eq!(g.edges.len(), 2);
    let m = coupling_metrics(&g);
    assert_eq!(m.nodes[&node(0)].fan_out, 1);
    assert_eq!(m.nodes[&node(1)].fan_in, 1);
    assert_eq!(m.total_edges(), 2);
    assert_eq!(detect_cycles(&g).cycles.len(), 0);
}

#[test]
fn cycle_enumeration_is_capped() {
    // Complete digraph on 9 nodes has far more than 10,000 elementary cycles.
    let n = 9;
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| j != i).collect())
        .collect();
    let set = elementary_cycles(&adj, 10_000);
    assert!(set.truncated);
    assert_eq!(set.cycles.len(), 10_000);
    let set = elementary_cycles(&adj[..0], 10_000);
    assert!(!set.truncated && set.cycles.is_empty());
}

fn brute_force_cycles(n: usize, adj: &[BTreeSet<usize>]) -> BTreeSet<Vec<usize>> {
    fn walk(adj: &[BTreeSet<usize>], path: &mut Vec<usize>, out: &mut BTreeSet<Vec<usize>>) {
        let last = *path.last().unwrap();
        for &next in &adj[last] {
            if next == path[0] {
                out.insert(path.clone());
            } else if next > path[0] && !path.contains(&next) {
                path.push(next);
                walk(adj, path, out);
                path.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    for s in 0..n {
        walk(adj, &mut vec![s], &mut out);
    }
    out
}

fn random_graph(n: usize, raw: &[(usize, usize, bool)]) -> InteractionGraph {
    InteractionGraph::new(
        (0..n).map(node),
        raw.iter().map(|&(a, b, pdid)| {
            edge(
                a % n,
                b % n,
                if pdid {
                    DependencyKind::Pdid
                } else {
                    DependencyKind::Cdid
                },
            )
        }),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn cycles_match_brute_force(n in 1usize..=7, raw in proptest::collection::vec((0usize..7, 0usize..7, any::<bool>()), 0..20)) {
        let g = random_graph(n, &raw);
        let adj: Vec<BTreeSet<usize>> = g.adjacency().into_iter().map(|s| s.into_iter().collect()).collect();
        let expected: BTreeSet<Vec<QualifiedName>> = brute_force_cycles(n, &adj)
            .into_iter()
            .map(|c| c.into_iter().map(|i| g.nodes[i].clone()).collect())
            .collect();
        let got = detect_cycles(&g);
        prop_assert!(!got.truncated);
        prop_assert_eq!(got.cycles.len(), expected.len());
        prop_assert_eq!(got.cycles.into_iter().collect::<BTreeSet<_>>(), expected);
    }

    #[test]
    fn metrics_match_a_recount(n in 1usize..=7, raw in proptest::collection::vec((0usize..7, 0usize..7, any::<bool>()), 0..20)) {
        let g = random_graph(n, &raw);
        let m = coupling_metrics(&g);
        for (i, name) in g.nodes.iter().enumerate() {
            let out: BTreeSet<&QualifiedName> = g.edges.iter().filter(|e| &e.consumer == name).map(|e| &e.provider).collect();
            let inn: BTreeSet<&QualifiedName> = g.edges.iter().filter(|e| &e.provider == name).map(|e| &e.consumer).collect();
            prop_assert_eq!(m.nodes[name].fan_out, out.len(), "node {}", i);
            prop_assert_eq!(m.nodes[name].fan_in, inn.len());
        }
        let mut by_kind = BTreeMap::new();
        for e in &g.edges {
            *by_kind.entry(e.kind).or_insert(0) += 1;
        }
        for k in [DependencyKind::Cdid, DependencyKind::Pdid] {
            prop_assert_eq!(m.edges_by_kind[&k], by_kind.get(&k).copied().unwrap_or(0));
        }
    }
}

#[test]
fn initializer_cycles_show_up_as_service_cycles() {
    let g = initializer_model(3, &[(0, 1), (1, 2), (2, 0)]);
    let model = compile(&g.entries, &g.loader()).unwrap().model;
    let graph = dependency_graph(&model);
    assert!(graph.edges.iter().all(|e| e.kind == DependencyKind::Pdid));
    let cycles = detect_cycles(&graph);
    assert_eq!(cycles.cycles.len(), 1);
    assert_eq!(cycles.cycles[0].len(), 3);
}

#[test]
fn edge_count_law() {
    for seed in 0..100 {
        let g = generate_model(seed, &GenConfig::default());
        let model = compile(&g.entries, &g.loader()).unwrap().model;
        let m = coupling_metrics(&dependency_graph(&model));
        assert_eq!(
            m.edges_by_kind[&DependencyKind::Cdid],
            g.requires_count,
            "seed {seed}"
        );
        assert_eq!(
            m.edges_by_kind[&DependencyKind::Pdid],
            g.initializer_count,
            "seed {seed}"
        );
    }
}

#[test]
fn analysis_is_invariant_under_serialization() {
    for seed in 0..50 {
        let g = generate_model(seed, &GenConfig::default());
        let model = compile(&g.entries, &g.loader()).unwrap().model;
        let back = canonical_deserialize(&canonical_serialize(&model)).unwrap();
        let (a, b) = (dependency_graph(&model), dependency_graph(&back));
        assert_eq!(a, b);
        assert_eq!(detect_cycles(&a), detect_cycles(&b));
        assert_eq!(export_dot(&a), export_dot(&b));
        assert_eq!(export_json(&a), export_json(&b));
    }
}

#[test]
fn json_export_shape() {
    let text = export_json(&dependency_graph(&demo()));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["nodes"].as_array().unwrap().len(), 3);
    let e = &v["edges"][1];
    assert_eq!(e["kind"], "PDID");
    assert_eq!(e["consumer"], "shop.CheckoutService");
    assert_eq!(
        e["witness"]["operation"],
        "shop.PricingService.Pricing.quote"
    );
}

#[test]
fn empty_model_graph() {
    let g = dependency_graph(&Model::empty());
    assert!(g.nodes.is_empty() && g.edges.is_empty());
    assert_eq!(export_dot(&g), "digraph msa {\n}\n");
    assert_eq!(coupling_metrics(&g).total_edges(), 0);
}
