use std::collections::BTreeMap;

use super::at;
use crate::analyze::{elementary_cycles, CYCLE_CAP};
use crate::diagnostic::{Code, Diagnostic};
use crate::model::{
    CommPattern, Microservice, Model, Parameter, QualifiedName, Reference, ServiceOperation,
};

struct ParamSite<'m> {
    service: &'m Microservice,
    operation: QualifiedName,
    param: &'m Parameter,
}

/// Every parameter carrying an initializer, with its context.
fn initialized_params(model: &Model) -> Vec<(ParamSite<'_>, &Reference)> {
    let mut out = Vec::new();
    for svc in &model.services {
        for iface in &svc.interfaces {
            let iname = svc.interface_name(iface);
            for op in &iface.operations {
                for p in &op.parameters {
                    if let Some(init) = &p.initialized_by {
                        let site = ParamSite {
                            service: svc,
                            operation: iname.child(&op.name),
                            param: p,
                        };
                        out.push((site, init));
                    }
                }
            }
        }
    }
    out
}

fn all_operations(model: &Model) -> Vec<(QualifiedName, &ServiceOperation)> {
    let mut out = Vec::new();
    for svc in &model.services {
        for iface in &svc.interfaces {
            let iname = svc.interface_name(iface);
            out.extend(
                iface
                    .operations
                    .iter()
                    .map(|op| (iname.child(&op.name), op)),
            );
        }
    }
    out
}

pub(super) fn services_without_interfaces(model: &Model, out: &mut Vec<Diagnostic>) {
    for svc in model.services.iter().filter(|s| s.interfaces.is_empty()) {
        out.push(Diagnostic::new(
            Code::ServiceWithoutInterfaces,
            format!("microservice `{}` declares no interface", svc.name),
            at(&svc.span),
        ));
    }
}

pub(super) fn interfaces_without_operations(model: &Model, out: &mut Vec<Diagnostic>) {
    for svc in &model.services {
        for iface in svc.interfaces.iter().filter(|i| i.operations.is_empty()) {
            out.push(Diagnostic::new(
                Code::InterfaceWithoutOperations,
                format!(
                    "interface `{}` declares no operation",
                    svc.interface_name(iface)
                ),
                at(&iface.span),
            ));
        }
    }
}

pub(super) fn contract_ownership(model: &Model, out: &mut Vec<Diagnostic>) {
    for svc in &model.services {
        for contract in &svc.contracts {
            let cname = svc.contract_name(contract);
            for r in &contract.provides {
                if model.owner_of(&r.name) != Some(&svc.name) {
                    out.push(Diagnostic::new(
                        Code::ProvidesForeignInterface,
                        format!(
                            "contract `{cname}` provides `{}`, which belongs to another microservice",
                            r.name
                        ),
                        at(&r.span),
                    ));
                }
            }
            for r in &contract.requires {
                if model.owner_of(&r.name) == Some(&svc.name) {
                    out.push(Diagnostic::new(
                        Code::RequiresOwnInterface,
                        format!(
                            "contract `{cname}` requires `{}`, an interface of its own microservice",
                            r.name
                        ),
                        at(&r.span),
                    ));
                }
            }
        }
    }
}

pub(super) fn initializer_same_service(model: &Model, out: &mut Vec<Diagnostic>) {
    for (site, init) in initialized_params(model) {
        if model.owner_of(&init.name) == Some(&site.service.name) {
            out.push(Diagnostic::new(
                Code::InitializerSameService,
                format!(
                    "parameter `{}` of `{}` is initialized by `{}` of the same microservice",
                    site.param.name, site.operation, init.name
                ),
                at(&init.span),
            ));
        }
    }
}

pub(super) fn initialized_outputs(model: &Model, out: &mut Vec<Diagnostic>) {
    for (site, init) in initialized_params(model) {
        if site.param.pattern == CommPattern::OutOnly {
            out.push(Diagnostic::new(
                Code::InitializedOutput,
                format!(
                    "output parameter `{}` of `{}` cannot be initialized by `{}`",
                    site.param.name, site.operation, init.name
                ),
                at(&init.span),
            ));
        }
    }
}

pub(super) fn initializer_not_implemented(model: &Model, out: &mut Vec<Diagnostic>) {
    for (site, init) in initialized_params(model) {
        let Some((_, _, op)) = model.operation(&init.name) else {
            continue;
        };
        if op.not_implemented {
            out.push(Diagnostic::new(
                Code::InitializerNotImplemented,
                format!(
                    "parameter `{}` of `{}` is initialized by `{}`, which is not implemented",
                    site.param.name, site.operation, init.name
                ),
                at(&init.span),
            ));
        }
    }
}

/// Operation-level initialization graph: an edge from the operation owning
/// a parameter to the operation initializing it.
pub fn initialization_graph(model: &Model) -> (Vec<QualifiedName>, Vec<Vec<usize>>) {
    let mut nodes: Vec<QualifiedName> = all_operations(model).into_iter().map(|(n, _)| n).collect();
    nodes.sort();
    let index: BTreeMap<&QualifiedName, usize> =
        nodes.iter().enumerate().map(|(i, n)| (n, i)).collect();
    let mut adj = vec![Vec::new(); nodes.len()];
    for (site, init) in initialized_params(model) {
        if let (Some(&from), Some(&to)) = (index.get(&site.operation), index.get(&init.name)) {
            adj[from].push(to);
        }
    }
    (nodes, adj)
}

pub(super) fn initialization_cycles(model: &Model, out: &mut Vec<Diagnostic>) {
    let (nodes, adj) = initialization_graph(model);
    let set = elementary_cycles(&adj, CYCLE_CAP);
    if set.cycles.is_empty() {
        return;
    }
    let params = initialized_params(model);
    for cycle in &set.cycles {
        let names: Vec<&QualifiedName> = cycle.iter().map(|&i| &nodes[i]).collect();
        let next = names.get(1).copied().unwrap_or(names[0]);
        let span = params
            .iter()
            .find(|(site, init)| site.operation == *names[0] && init.name == *next)
            .map(|(_, init)| at(&init.span))
            .unwrap_or_default();
        let mut path: Vec<String> = names.iter().map(ToString::to_string).collect();
        path.push(names[0].to_string());
        out.push(Diagnostic::new(
            Code::InitializationCycle,
            format!("parameter initialization cycle: {}", path.join(" -> ")),
            span,
        ));
    }
    if set.truncated {
        let span = out.last().map(|d| d.span.clone()).unwrap_or_default();
        out.push(Diagnostic::new(
            Code::InitializationCycle,
            format!("more than {CYCLE_CAP} initialization cycles; list truncated"),
            span,
        ));
    }
}

pub(super) fn operations_without_parameters(model: &Model, out: &mut Vec<Diagnostic>) {
    for (name, op) in all_operations(model) {
        if !op.not_implemented && op.parameters.is_empty() {
            out.push(Diagnostic::new(
                Code::OperationWithoutParameters,
                format!("operation `{name}` is implemented but has no parameters"),
                at(&op.span),
            ));
        }
    }
}

pub(super) fn initializer_types(model: &Model, out: &mut Vec<Diagnostic>) {
    for (site, init) in initialized_params(model) {
        let Some((_, _, op)) = model.operation(&init.name) else {
            continue;
        };
        let provides_value = op
            .parameters
            .iter()
            .any(|p| p.pattern.is_output() && p.data_type == site.param.data_type);
        if !provides_value {
            out.push(Diagnostic::new(
                Code::InitializerTypeUnclear,
                format!(
                    "`{}` has no output parameter of the type of `{}` in `{}`",
                    init.name, site.param.name, site.operation
                ),
                at(&init.span),
            ));
        }
    }
}
