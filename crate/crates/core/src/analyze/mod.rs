//! Service interaction analyses: the dependency graph induced by contracts
//! and parameter initializers, its cycles, coupling numbers and exports.

pub mod cycles;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use serde_json::{json, Value};

use crate::model::{Model, QualifiedName};

pub use cycles::{elementary_cycles, CycleSet, CYCLE_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum DependencyKind {
    /// Contract-driven: a contract requires an interface of another service.
    #[serde(rename = "CDID")]
    Cdid,
    /// Parameter-driven: a parameter is initialized by another service's
    /// operation.
    #[serde(rename = "PDID")]
    Pdid,
}

impl DependencyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DependencyKind::Cdid => "CDID",
            DependencyKind::Pdid => "PDID",
        }
    }
}

impl fmt::Display for DependencyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The model element that induced an edge.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Witness {
    Requirement {
        contract: QualifiedName,
        interface: QualifiedName,
    },
    Initializer {
        /// Operation name extended by the parameter name.
        parameter: QualifiedName,
        operation: QualifiedName,
    },
}

impl Witness {
    fn to_json(&self) -> Value {
        match self {
            Witness::Requirement {
                contract,
                interface,
            } => json!({
                "contract": contract.to_string(),
                "interface": interface.to_string(),
            }),
            Witness::Initializer {
                parameter,
                operation,
            } => json!({
                "parameter": parameter.to_string(),
                "operation": operation.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub consumer: QualifiedName,
    pub provider: QualifiedName,
    pub kind: DependencyKind,
    pub witness: Witness,
}

/// Microservice-level interaction graph. Nodes and edges are sorted; edges
/// are unique.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InteractionGraph {
    pub nodes: Vec<QualifiedName>,
    pub edges: Vec<Edge>,
}

impl InteractionGraph {
    /// Builds a graph from explicit parts, sorting and deduplicating. Edge
    /// endpoints missing from `nodes` are added.
    pub fn new(
        nodes: impl IntoIterator<Item = QualifiedName>,
        edges: impl IntoIterator<Item = Edge>,
    ) -> Self {
        let edges: BTreeSet<Edge> = edges.into_iter().collect();
        let mut nodes: BTreeSet<QualifiedName> = nodes.into_iter().collect();
        for e in &edges {
            nodes.insert(e.consumer.clone());
            nodes.insert(e.provider.clone());
        }
        InteractionGraph {
            nodes: nodes.into_iter().collect(),
            edges: edges.into_iter().collect(),
        }
    }

    fn index(&self) -> BTreeMap<&QualifiedName, usize> {
        self.nodes.iter().enumerate().map(|(i, n)| (n, i)).collect()
    }

    /// Distinct successors per node, by node index.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let index = self.index();
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            adj[index[&e.consumer]].push(index[&e.provider]);
        }
        for succ in &mut adj {
            succ.sort_unstable();
            succ.dedup();
        }
        adj
    }
}

/// One CDID edge per `requires` entry and one PDID edge per initializer.
pub fn dependency_graph(model: &Model) -> InteractionGraph {
    let mut edges = Vec::new();
    for svc in &model.services {
        for contract in &svc.contracts {
            let cname = svc.contract_name(contract);
            for req in &contract.requires {
                if let Some(provider) = model.owner_of(&req.name) {
                    edges.push(Edge {
                        consumer: svc.name.clone(),
                        provider: provider.clone(),
                        kind: DependencyKind::Cdid,
                        witness: Witness::Requirement {
                            contract: cname.clone(),
                            interface: req.name.clone(),
                        },
                    });
                }
            }
        }
        for iface in &svc.interfaces {
            let iname = svc.interface_name(iface);
            for op in &iface.operations {
                let oname = iname.child(&op.name);
                for p in &op.parameters {
                    let Some(init) = &p.initialized_by else {
                        continue;
                    };
                    if let Some(provider) = model.owner_of(&init.name) {
                        edges.push(Edge {
                            consumer: svc.name.clone(),
                            provider: provider.clone(),
                            kind: DependencyKind::Pdid,
                            witness: Witness::Initializer {
                                parameter: oname.child(&p.name),
                                operation: init.name.clone(),
                            },
                        });
                    }
                }
            }
        }
    }
    InteractionGraph::new(model.services.iter().map(|s| s.name.clone()), edges)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Cycles {
    /// Each cycle starts at its smallest node; the list is sorted.
    pub cycles: Vec<Vec<QualifiedName>>,
    pub truncated: bool,
}

/// Elementary cycles of the graph, at most [`CYCLE_CAP`] of them.
pub fn detect_cycles(g: &InteractionGraph) -> Cycles {
    let set = elementary_cycles(&g.adjacency(), CYCLE_CAP);
    let mut cycles: Vec<Vec<QualifiedName>> = set
        .cycles
        .into_iter()
        .map(|c| c.into_iter().map(|i| g.nodes[i].clone()).collect())
        .collect();
    cycles.sort();
    Cycles {
        cycles,
        truncated: set.truncated,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct NodeCoupling {
    #[serde(rename = "fanIn")]
    pub fan_in: usize,
    #[serde(rename = "fanOut")]
    pub fan_out: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CouplingMetrics {
    pub nodes: BTreeMap<QualifiedName, NodeCoupling>,
    pub edges_by_kind: BTreeMap<DependencyKind, usize>,
}

impl CouplingMetrics {
    pub fn total_edges(&self) -> usize {
        self.edges_by_kind.values().sum()
    }
}

/// Fan-in and fan-out over distinct partners, plus edge totals by kind.
pub fn coupling_metrics(g: &InteractionGraph) -> CouplingMetrics {
    let mut nodes: BTreeMap<QualifiedName, NodeCoupling> = g
        .nodes
        .iter()
        .map(|n| (n.clone(), NodeCoupling::default()))
        .collect();
    let pairs: BTreeSet<(&QualifiedName, &QualifiedName)> =
        g.edges.iter().map(|e| (&e.consumer, &e.provider)).collect();
    for (consumer, provider) in pairs {
        nodes.entry(consumer.clone()).or_default().fan_out += 1;
        nodes.entry(provider.clone()).or_default().fan_in += 1;
    }
    let mut edges_by_kind = BTreeMap::from([(DependencyKind::Cdid, 0), (DependencyKind::Pdid, 0)]);
    for e in &g.edges {
        *edges_by_kind.entry(e.kind).or_default() += 1;
    }
    CouplingMetrics {
        nodes,
        edges_by_kind,
    }
}

fn dot_id(name: &QualifiedName) -> String {
    let s = name.to_string().replace('\\', "\\\\").replace('"', "\\\"");
    format!("\"{s}\"")
}

/// Graphviz rendering: nodes, then edges, both in sorted order. Contract
/// dependencies are solid, parameter dependencies dashed.
pub fn export_dot(g: &InteractionGraph) -> String {
    let mut out = String::from("digraph msa {\n");
    for n in &g.nodes {
        let id = dot_id(n);
        out.push_str(&format!("  {id} [label={id}];\n"));
    }
    for e in &g.edges {
        let style = match e.kind {
            DependencyKind::Cdid => "solid",
            DependencyKind::Pdid => "dashed",
        };
        out.push_str(&format!(
            "  {} -> {} [style={style}, label=\"{}\"];\n",
            dot_id(&e.consumer),
            dot_id(&e.provider),
            e.kind
        ));
    }
    out.push_str("}\n");
    out
}

/// JSON rendering with `nodes` and `edges` arrays.
pub fn export_json(g: &InteractionGraph) -> String {
    let nodes: Vec<String> = g.nodes.iter().map(ToString::to_string).collect();
    let edges: Vec<Value> = g
        .edges
        .iter()
        .map(|e| {
            json!({
                "consumer": e.consumer.to_string(),
                "provider": e.provider.to_string(),
                "kind": e.kind.as_str(),
                "witness": e.witness.to_json(),
            })
        })
        .collect();
    crate::model::to_canonical_json(json!({ "nodes": nodes, "edges": edges }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qn(s: &str) -> QualifiedName {
        s.parse().unwrap()
    }

    fn cdid(a: &str, b: &str) -> Edge {
        Edge {
            consumer: qn(a),
            provider: qn(b),
            kind: DependencyKind::Cdid,
            witness: Witness::Requirement {
                contract: qn(&format!("{a}.C")),
                interface: qn(&format!("{b}.I")),
            },
        }
    }

    #[test]
    fn empty_dot() {
        assert_eq!(
            export_dot(&InteractionGraph::default()),
            "digraph msa {\n}\n"
        );
    }

    #[test]
    fn star_metrics() {
        let g = InteractionGraph::new([], [cdid("A", "B"), cdid("A", "C"), cdid("A", "D")]);
        let m = coupling_metrics(&g);
        assert_eq!(
            m.nodes[&qn("A")],
            NodeCoupling {
                fan_in: 0,
                fan_out: 3
            }
        );
        for n in ["B", "C", "D"] {
            assert_eq!(
                m.nodes[&qn(n)],
                NodeCoupling {
                    fan_in: 1,
                    fan_out: 0
                }
            );
        }
        assert_eq!(m.total_edges(), 3);
    }

    #[test]
    fn two_cycle() {
        let g = InteractionGraph::new([], [cdid("B", "A"), cdid("A", "B")]);
        assert_eq!(detect_cycles(&g).cycles, vec![vec![qn("A"), qn("B")]]);
    }
}
