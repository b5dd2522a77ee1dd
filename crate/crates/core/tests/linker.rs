mod common;

use common::qn;
use msaforge::diagnostic::Code;
use msaforge::model::{DataType, Element};
use msaforge::syntax::{parse_source, Viewpoint};
use msaforge::testkit::{demo_entries, demo_loader, generate_model, GenConfig};
use msaforge::{link, resolve_imports, Diagnostic, MemoryLoader, Model};
use proptest::prelude::*;

fn link_files(files: &[(&str, &str)]) -> Result<Model, Vec<Diagnostic>> {
    let loader: MemoryLoader = files.iter().map(|(p, s)| (*p, s.to_string())).collect();
    let entries: Vec<&str> = files.iter().map(|(p, _)| *p).collect();
    let graph = resolve_imports(&entries, &loader)?;
    link(&graph.ordered_units())
}

fn codes(diags: &[Diagnostic]) -> Vec<&'static str> {
    diags.iter().map(|d| d.code.as_str()).collect()
}

const DATA: &str =
    "namespace shop\nstructure Order { id: int }\nstructure Price { amount: float }\n";

#[test]
fn imported_files_come_before_importers() {
    let loader = MemoryLoader::new()
        .with("d.msad", DATA)
        .with("a.msas", "namespace svc import \"d.msad\" as d")
        .with("o.msao", "namespace ops import \"a.msas\" as a");
    let graph = resolve_imports(&["o.msao"], &loader).unwrap();
    assert_eq!(graph.order, ["d.msad", "a.msas", "o.msao"]);
    assert_eq!(graph.nodes, ["a.msas", "d.msad", "o.msao"]);
}

/// Smallest permutation (element-wise) in which every import precedes its
/// importer.
fn oracle_order(nodes: &[String], edges: &[(String, String)]) -> Vec<String> {
    fn permutations(items: &[String]) -> Vec<Vec<String>> {
        if items.is_empty() {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for i in 0..items.len() {
            let mut rest = items.to_vec();
            let head = rest.remove(i);
            for mut p in permutations(&rest) {
                p.insert(0, head.clone());
                out.push(p);
            }
        }
        out
    }
    permutations(nodes)
        .into_iter()
        .filter(|p| {
            edges.iter().all(|(importer, imported)| {
                p.iter().position(|n| n == imported) < p.iter().position(|n| n == importer)
            })
        })
        .min()
        .expect("acyclic")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn import_order_matches_brute_force(n in 1usize..6, bits in any::<u32>()) {
        // Data files that only import lower-numbered files form a DAG.
        let mut loader = MemoryLoader::new();
        let mut bit = 0;
        let names: Vec<String> = (0..n).map(|i| format!("f{}.msad", (i * 7) % n)).collect();
        for i in 0..n {
            let mut src = format!("namespace n{i}\n");
            for (j, name) in names.iter().enumerate().take(i) {
                if bits >> (bit % 32) & 1 == 1 {
                    src.push_str(&format!("import \"{}\" as i{j}\n", name));
                }
                bit += 1;
            }
            loader.insert(&names[i], src);
        }
        let graph = resolve_imports(&names, &loader).unwrap();
        prop_assert_eq!(&graph.order, &oracle_order(&graph.nodes, &graph.edges));
    }
}

#[test]
fn import_cycle_is_reported_once() {
    let loader = MemoryLoader::new()
        .with("a.msad", "namespace a import \"b.msad\" as b")
        .with("b.msad", "namespace b import \"a.msad\" as a");
    let diags = resolve_imports(&["a.msad"], &loader).unwrap_err();
    assert_eq!(codes(&diags), ["P010"]);
    assert!(diags[0].message.contains("a.msad") && diags[0].message.contains("b.msad"));
}

#[test]
fn layering_violations() {
    let loader = MemoryLoader::new()
        .with("d.msad", "namespace d import \"s.msas\" as s")
        .with("s.msas", "namespace s");
    assert_eq!(
        codes(&resolve_imports(&["d.msad"], &loader).unwrap_err()),
        ["P012"]
    );
    let loader = MemoryLoader::new()
        .with("o.msao", "namespace o import \"d.msad\" as d")
        .with("d.msad", "namespace d");
    assert_eq!(
        codes(&resolve_imports(&["o.msao"], &loader).unwrap_err()),
        ["P012"]
    );
}

#[test]
fn missing_import() {
    let loader = MemoryLoader::new().with("s.msas", "namespace s import \"nope.msad\" as n");
    let diags = resolve_imports(&["s.msas"], &loader).unwrap_err();
    assert_eq!(codes(&diags), ["P011"]);
    assert_eq!(diags[0].span.start_line, 1);
}

#[test]
fn relative_import_paths() {
    let loader = MemoryLoader::new()
        .with("lib/d.msad", DATA)
        .with("svc/s.msas", "namespace s import \"../lib/d.msad\" as d");
    let graph = resolve_imports(&["svc/s.msas"], &loader).unwrap();
    assert_eq!(graph.order, ["lib/d.msad", "svc/s.msas"]);
}

const SVC: &str = r#"namespace shop
import "d.msad" as d
functional microservice PaymentService {
  interface Payment { operation pay(in sync order: d.Order) }
  contract Api { provides Payment }
}
"#;

#[test]
fn unresolved_reference_suggests_close_names() {
    let ops = "namespace ops\nimport \"s.msas\" as s\nartifact A { contracts shop.PaymentService.Payments }\n";
    let diags = link_files(&[("d.msad", DATA), ("s.msas", SVC), ("o.msao", ops)]).unwrap_err();
    assert_eq!(codes(&diags), ["P020"]);
    assert!(
        diags[0].message.contains("shop.PaymentService.Payments"),
        "{}",
        diags[0].message
    );
    assert!(diags[0].message.contains("Payment"), "{}", diags[0].message);
    assert_eq!(diags[0].span.file, "o.msao");
    assert_eq!(diags[0].span.start_line, 3);
}

#[test]
fn wrong_kind_reference() {
    // A contract slot naming an interface.
    let ops = "namespace ops\nimport \"s.msas\" as s\nartifact A { contracts shop.PaymentService.Payment }\n";
    let diags = link_files(&[("d.msad", DATA), ("s.msas", SVC), ("o.msao", ops)]).unwrap_err();
    assert_eq!(codes(&diags), ["P022"]);
}

#[test]
fn duplicate_definitions_carry_both_locations() {
    let data = "namespace shop\nstructure Order { id: int }\nstructure Order { id: int }\n";
    let diags = link_files(&[("d.msad", data)]).unwrap_err();
    assert_eq!(codes(&diags), ["P021"]);
    assert_eq!(diags[0].span.start_line, 3);
    assert_eq!(diags[0].related[0].start_line, 2);

    let svc = "namespace s functional microservice M { interface I { operation o(in sync a: int, out sync a: int) } }";
    assert_eq!(
        codes(&link_files(&[("s.msas", svc)]).unwrap_err()),
        ["P021"]
    );
}

#[test]
fn same_name_in_two_files_is_a_duplicate() {
    let diags = link_files(&[("a.msad", DATA), ("b.msad", DATA)]).unwrap_err();
    assert_eq!(codes(&diags), ["P021", "P021"]);
}

#[test]
fn resolution_order() {
    let svc = r#"namespace shop
import "d.msad" as d
functional microservice PaymentService {
  interface Payment {
    operation pay(in sync a: Order, in sync b: shop.Order, in sync c: d.Price, in sync e: int)
  }
  contract Api { provides Payment }
}
"#;
    let model = link_files(&[("d.msad", DATA), ("s.msas", svc)]).unwrap();
    let (_, _, op) = model
        .operation(&qn("shop.PaymentService.Payment.pay"))
        .unwrap();
    let targets: Vec<String> = op
        .parameters
        .iter()
        .map(|p| match &p.data_type {
            DataType::Object(r) | DataType::List(r) => r.name.to_string(),
            DataType::Primitive(p) => p.keyword().to_string(),
        })
        .collect();
    assert_eq!(targets, ["shop.Order", "shop.Order", "shop.Price", "int"]);
    let (_, c) = model.contract(&qn("shop.PaymentService.Api")).unwrap();
    assert_eq!(
        c.provides[0].name.to_string(),
        "shop.PaymentService.Payment"
    );
}

#[test]
fn enclosing_scope_wins_only_for_acceptable_kinds() {
    // `Payment` is both an interface of the service and a structure.
    let data = "namespace shop\nstructure Payment { id: int }\n";
    let svc = r#"namespace shop
import "d.msad" as d
functional microservice PaymentService {
  interface Payment { operation pay(in sync p: Payment) }
  contract Api { provides Payment }
}
"#;
    let model = link_files(&[("d.msad", data), ("s.msas", svc)]).unwrap();
    let (_, _, op) = model
        .operation(&qn("shop.PaymentService.Payment.pay"))
        .unwrap();
    assert!(
        matches!(&op.parameters[0].data_type, DataType::Object(r) if r.name.to_string() == "shop.Payment")
    );
}

#[test]
fn only_direct_imports_are_visible() {
    let mid = "namespace mid\nimport \"d.msad\" as d\n";
    let svc = "namespace s\nimport \"m.msas\" as m\nfunctional microservice M { interface I { operation o(in sync a: shop.Order) } }\n";
    let diags = link_files(&[("d.msad", DATA), ("m.msas", mid), ("s.msas", svc)]).unwrap_err();
    assert_eq!(codes(&diags), ["P020"]);
}

#[test]
fn link_reports_parse_errors_of_units() {
    let unit = parse_source("namespace shop structure { }", "d.msad", Viewpoint::Data);
    let diags = link(&[&unit]).unwrap_err();
    assert!(diags.iter().any(|d| d.code == Code::UnexpectedToken));
}

fn assert_no_dangling(model: &Model) {
    model.for_each_reference(|slot, r| {
        let target = model
            .resolve(&r.name)
            .unwrap_or_else(|| panic!("dangling {slot:?} reference {}", r.name));
        let ok = target.kind() == slot.expected()
            || matches!(target, Element::Technology(_))
            || matches!(
                (slot.expected(), target.kind()),
                (
                    msaforge::model::ElementKind::DataObject,
                    msaforge::model::ElementKind::ListType
                )
            );
        assert!(ok, "{} bound to a {:?}", r.name, target.kind());
    });
}

#[test]
fn every_reference_resolves_in_corpus_and_generated_models() {
    for dir in common::projects() {
        assert_no_dangling(&common::compile_project(&dir).model);
    }
    for seed in 0..40 {
        let g = generate_model(seed, &GenConfig::default());
        let graph = resolve_imports(&g.entries, &g.loader()).unwrap();
        assert_no_dangling(&link(&graph.ordered_units()).unwrap());
    }
}

#[test]
fn entry_order_does_not_change_the_model() {
    let loader = demo_loader();
    let mut entries = demo_entries();
    let reference = {
        let g = resolve_imports(&entries, &loader).unwrap();
        msaforge::model::canonical_serialize(&link(&g.ordered_units()).unwrap())
    };
    for _ in 0..entries.len() {
        entries.rotate_left(1);
        let mut reversed = entries.clone();
        reversed.reverse();
        for e in [&entries, &reversed] {
            let g = resolve_imports(e, &loader).unwrap();
            let bytes = msaforge::model::canonical_serialize(&link(&g.ordered_units()).unwrap());
            assert_eq!(bytes, reference);
        }
    }
}
