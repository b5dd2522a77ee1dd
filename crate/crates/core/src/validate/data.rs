use std::collections::{BTreeMap, BTreeSet};

use super::at;
use crate::diagnostic::{Code, Diagnostic};
use crate::model::{Field, ListElement, Model, ObjectTarget, QualifiedName};

pub(super) fn duplicate_field_names(model: &Model, out: &mut Vec<Diagnostic>) {
    for dm in &model.data {
        for obj in &dm.objects {
            let mut seen = BTreeMap::new();
            for field in &obj.fields {
                if let Some(first) = seen.insert(field.name(), field.span()) {
                    out.push(
                        Diagnostic::new(
                            Code::DuplicateFieldName,
                            format!(
                                "field `{}` is declared more than once in `{}`",
                                field.name(),
                                dm.object_name(obj)
                            ),
                            at(field.span()),
                        )
                        .with_related(at(first)),
                    );
                }
            }
        }
    }
}

pub(super) fn empty_objects(model: &Model, out: &mut Vec<Diagnostic>) {
    for dm in &model.data {
        for obj in dm.objects.iter().filter(|o| o.fields.is_empty()) {
            out.push(Diagnostic::new(
                Code::EmptyDataObject,
                format!("structure `{}` has no fields", dm.object_name(obj)),
                at(&obj.span),
            ));
        }
    }
}

/// Structures an object nests directly, through object fields or through
/// lists of objects.
fn nested_objects(model: &Model) -> BTreeMap<QualifiedName, BTreeSet<QualifiedName>> {
    let mut graph = BTreeMap::new();
    for dm in &model.data {
        for obj in &dm.objects {
            let mut targets = BTreeSet::new();
            for field in &obj.fields {
                let Field::Object(f) = field else { continue };
                match &f.target {
                    ObjectTarget::Object(r) => {
                        targets.insert(r.name.clone());
                    }
                    ObjectTarget::List(r) => {
                        if let Some(ListElement::Object(e)) =
                            model.list_type(&r.name).map(|l| &l.element)
                        {
                            targets.insert(e.name.clone());
                        }
                    }
                }
            }
            graph.insert(dm.object_name(obj), targets);
        }
    }
    graph
}

pub(super) fn recursive_objects(model: &Model, out: &mut Vec<Diagnostic>) {
    let graph = nested_objects(model);
    for dm in &model.data {
        for obj in &dm.objects {
            let name = dm.object_name(obj);
            let mut seen = BTreeSet::new();
            let mut work: Vec<&QualifiedName> = graph[&name].iter().collect();
            let mut recursive = false;
            while let Some(n) = work.pop() {
                if *n == name {
                    recursive = true;
                    break;
                }
                if seen.insert(n) {
                    work.extend(graph.get(n).into_iter().flatten());
                }
            }
            if recursive {
                out.push(Diagnostic::new(
                    Code::RecursiveDataObject,
                    format!("structure `{name}` contains itself through nested fields"),
                    at(&obj.span),
                ));
            }
        }
    }
}
