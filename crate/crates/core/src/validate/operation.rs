use std::collections::{BTreeMap, BTreeSet};

use super::at;
use crate::diagnostic::{Code, Diagnostic};
use crate::model::{Model, QualifiedName, RefSlot};

pub(super) fn service_technology_count(model: &Model, out: &mut Vec<Diagnostic>) {
    for a in &model.artifacts {
        let n = a.service_technologies.len();
        if n != 1 {
            out.push(Diagnostic::new(
                Code::ServiceTechnologyCount,
                format!(
                    "artifact `{}` names {n} service technologies, expected exactly one",
                    a.name
                ),
                at(&a.span),
            ));
        }
    }
}

pub(super) fn mixed_artifact_contracts(model: &Model, out: &mut Vec<Diagnostic>) {
    for a in &model.artifacts {
        let owners: BTreeSet<&QualifiedName> = a
            .contracts
            .iter()
            .filter_map(|c| model.owner_of(&c.name))
            .collect();
        if owners.len() > 1 {
            let list: Vec<String> = owners.iter().map(|o| format!("`{o}`")).collect();
            out.push(Diagnostic::new(
                Code::MixedArtifactContracts,
                format!(
                    "artifact `{}` bundles contracts of several microservices: {}",
                    a.name,
                    list.join(", ")
                ),
                at(&a.span),
            ));
        }
    }
}

pub(super) fn instance_bounds(model: &Model, out: &mut Vec<Diagnostic>) {
    for c in &model.containers {
        let (min, max) = (c.min_instances, c.max_instances);
        if min < 1 || min > max {
            out.push(Diagnostic::new(
                Code::InstanceBounds,
                format!(
                    "container `{}` has instance bounds {min}..{max}; need 1 <= min <= max",
                    c.name
                ),
                at(&c.span),
            ));
        }
    }
}

pub(super) fn unsupported_service_technology(model: &Model, out: &mut Vec<Diagnostic>) {
    for c in &model.containers {
        let supported: BTreeSet<&QualifiedName> = c
            .environment
            .service_technologies
            .iter()
            .map(|r| &r.name)
            .collect();
        for d in &c.deploys {
            let Some(artifact) = model.artifact(&d.name) else {
                continue;
            };
            let [tech] = artifact.service_technologies.as_slice() else {
                continue;
            };
            if !supported.contains(&tech.name) {
                out.push(Diagnostic::new(
                    Code::UnsupportedServiceTechnology,
                    format!(
                        "container `{}` deploys `{}`, but its environment `{}` does not support `{}`",
                        c.name, artifact.name, c.environment.name, tech.name
                    ),
                    at(&d.span),
                ));
            }
        }
    }
}

pub(super) fn endpoint_targets(model: &Model, out: &mut Vec<Diagnostic>) {
    for a in &model.artifacts {
        for e in &a.endpoints {
            let problem = match (&e.operation, &e.contract) {
                (Some(_), Some(_)) => "targets both an operation and a contract",
                (None, None) => "has no target operation or contract",
                _ => continue,
            };
            out.push(Diagnostic::new(
                Code::EndpointTarget,
                format!("endpoint \"{}\" of `{}` {problem}", e.address, a.name),
                at(&e.span),
            ));
        }
    }
}

pub(super) fn technology_kinds(model: &Model, out: &mut Vec<Diagnostic>) {
    model.for_each_reference(|slot, r| {
        let RefSlot::Technology(expected) = slot else {
            return;
        };
        let Some(tech) = model.technology(&r.name) else {
            return;
        };
        if tech.kind != expected {
            out.push(Diagnostic::new(
                Code::TechnologyKind,
                format!(
                    "`{}` is a {} technology, but a {expected} technology is required here",
                    r.name, tech.kind
                ),
                at(&r.span),
            ));
        }
    });
}

pub(super) fn duplicate_endpoints(model: &Model, out: &mut Vec<Diagnostic>) {
    let mut seen: BTreeMap<_, &crate::span::NodeSpan> = BTreeMap::new();
    for a in &model.artifacts {
        for e in &a.endpoints {
            let key = (e.address.as_str(), &e.protocol.name);
            match seen.get(&key) {
                Some(first) => out.push(
                    Diagnostic::new(
                        Code::DuplicateEndpoint,
                        format!(
                            "endpoint \"{}\" with protocol `{}` is declared more than once",
                            e.address, e.protocol.name
                        ),
                        at(&e.span),
                    )
                    .with_related(at(first)),
                ),
                None => {
                    seen.insert(key, &e.span);
                }
            }
        }
    }
}

pub(super) fn endpoints_outside_artifact(model: &Model, out: &mut Vec<Diagnostic>) {
    for a in &model.artifacts {
        let bundled: BTreeSet<&QualifiedName> = a.contracts.iter().map(|c| &c.name).collect();
        let provided: BTreeSet<&QualifiedName> = a
            .contracts
            .iter()
            .filter_map(|c| model.contract(&c.name))
            .flat_map(|(_, c)| c.provides.iter().map(|r| &r.name))
            .collect();
        for e in &a.endpoints {
            if let Some(c) = &e.contract {
                if !bundled.contains(&c.name) {
                    out.push(Diagnostic::new(
                        Code::EndpointOutsideArtifact,
                        format!(
                            "endpoint targets contract `{}`, which `{}` does not bundle",
                            c.name, a.name
                        ),
                        at(&c.span),
                    ));
                }
            }
            if let Some(op) = &e.operation {
                let inside = op
                    .name
                    .parent()
                    .is_some_and(|iface| provided.contains(&iface));
                if !inside {
                    out.push(Diagnostic::new(
                        Code::EndpointOutsideArtifact,
                        format!(
                            "endpoint targets operation `{}`, which no contract bundled in `{}` provides",
                            op.name, a.name
                        ),
                        at(&op.span),
                    ));
                }
            }
        }
    }
}

pub(super) fn undeployed_services(model: &Model, out: &mut Vec<Diagnostic>) {
    let bundled: BTreeSet<&QualifiedName> = model
        .artifacts
        .iter()
        .flat_map(|a| a.contracts.iter().map(|c| &c.name))
        .collect();
    for svc in &model.services {
        if svc.contracts.is_empty() {
            continue;
        }
        let deployed = svc
            .contracts
            .iter()
            .any(|c| bundled.contains(&svc.contract_name(c)));
        if !deployed {
            out.push(Diagnostic::new(
                Code::UndeployedService,
                format!(
                    "no artifact bundles a contract of microservice `{}`",
                    svc.name
                ),
                at(&svc.span),
            ));
        }
    }
}

pub(super) fn undiscoverable_artifacts(model: &Model, out: &mut Vec<Diagnostic>) {
    let registered: BTreeSet<&QualifiedName> = model
        .registrations
        .iter()
        .flat_map(|r| r.registered.iter().map(|a| &a.name))
        .collect();
    for a in &model.artifacts {
        if !registered.contains(&a.name) {
            out.push(Diagnostic::new(
                Code::UndiscoverableArtifact,
                format!(
                    "artifact `{}` is registered with no service discovery and no API gateway",
                    a.name
                ),
                at(&a.span),
            ));
        }
    }
}
