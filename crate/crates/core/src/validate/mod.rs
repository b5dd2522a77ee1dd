//! The well-formedness rule catalog, evaluated over a linked model.
//!
//! Every rule runs on every model; findings never stop evaluation.

mod data;
mod operation;
mod service;

pub use service::initialization_graph;

use crate::diagnostic::{sort_diagnostics, Diagnostic};
use crate::model::Model;
use crate::span::{NodeSpan, SourceSpan};

type Rule = fn(&Model, &mut Vec<Diagnostic>);

const RULES: &[Rule] = &[
    data::duplicate_field_names,
    data::empty_objects,
    data::recursive_objects,
    service::services_without_interfaces,
    service::interfaces_without_operations,
    service::contract_ownership,
    service::initializer_same_service,
    service::initialized_outputs,
    service::initializer_not_implemented,
    service::initialization_cycles,
    service::operations_without_parameters,
    service::initializer_types,
    operation::service_technology_count,
    operation::mixed_artifact_contracts,
    operation::instance_bounds,
    operation::unsupported_service_technology,
    operation::endpoint_targets,
    operation::technology_kinds,
    operation::duplicate_endpoints,
    operation::endpoints_outside_artifact,
    operation::undeployed_services,
    operation::undiscoverable_artifacts,
];

/// Runs the whole catalog. Output is sorted by file, line, column, code and
/// message.
pub fn validate(model: &Model) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for rule in RULES {
        rule(model, &mut out);
    }
    sort_diagnostics(&mut out);
    out
}

/// ERROR-level findings only; empty for a valid model.
pub fn check_invariants(model: &Model) -> Vec<Diagnostic> {
    validate(model)
        .into_iter()
        .filter(Diagnostic::is_error)
        .collect()
}

fn at(span: &NodeSpan) -> SourceSpan {
    span.get().clone()
}
