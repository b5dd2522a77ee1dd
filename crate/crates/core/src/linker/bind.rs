//! Binds the references of parsed units and assembles the linked model.

use std::collections::{BTreeMap, BTreeSet};

use crate::diagnostic::{sort_diagnostics, Code, Diagnostic};
use crate::model::*;
use crate::span::{NodeSpan, SourceSpan};
use crate::syntax::ast::*;
use crate::syntax::{ParseUnit, Viewpoint};

use super::imports::resolve_import_path;

struct Symbol {
    kind: ElementKind,
    file: String,
    span: SourceSpan,
}

/// Name-resolution context of one file.
struct Scope<'u> {
    namespace: QualifiedName,
    /// Alias to the namespace of the imported file.
    aliases: BTreeMap<&'u str, QualifiedName>,
    /// Files whose definitions are visible: the file itself and its direct
    /// imports.
    visible: BTreeSet<&'u str>,
}

struct Linker<'u> {
    symbols: BTreeMap<QualifiedName, Symbol>,
    diags: Vec<Diagnostic>,
    units: &'u [&'u ParseUnit],
}

/// Links parse units, given in import order, into a single model.
///
/// Every reference is bound to a fully qualified name. Lookup of a written
/// name tries, in order: the enclosing microservice, the file namespace, an
/// import alias prefix, and finally the name as written. Only definitions
/// from the file itself and its direct imports are visible.
pub fn link(units: &[&ParseUnit]) -> Result<Model, Vec<Diagnostic>> {
    let mut linker = Linker {
        symbols: BTreeMap::new(),
        diags: Vec::new(),
        units,
    };
    for unit in units {
        if unit.has_errors() {
            linker.diags.extend(unit.diagnostics.iter().cloned());
        }
        if unit.namespace.is_none() && !unit.has_errors() {
            linker.diags.push(Diagnostic::new(
                Code::MissingNamespace,
                "model file has no `namespace` header",
                SourceSpan::file_start(&unit.file),
            ));
        }
    }
    if !linker.diags.is_empty() {
        sort_diagnostics(&mut linker.diags);
        return Err(linker.diags);
    }

    for unit in units {
        linker.declare(unit);
    }
    let mut parts = ModelParts::default();
    for unit in units {
        let scope = linker.scope(unit);
        linker.lower(unit, &scope, &mut parts);
    }
    if !linker.diags.is_empty() {
        sort_diagnostics(&mut linker.diags);
        return Err(linker.diags);
    }
    Model::assemble(parts).map_err(|errors| {
        errors
            .into_iter()
            .map(|e| {
                Diagnostic::new(
                    Code::UnresolvedReference,
                    format!("internal linking error: {e}"),
                    SourceSpan::default(),
                )
            })
            .collect()
    })
}

fn namespace_of(unit: &ParseUnit) -> &QualifiedName {
    &unit
        .namespace
        .as_ref()
        .expect("units without a namespace are rejected before binding")
        .name
}

impl<'u> Linker<'u> {
    fn define(&mut self, name: QualifiedName, kind: ElementKind, file: &str, span: &NodeSpan) {
        if let Some(prev) = self.symbols.get(&name) {
            let d = Diagnostic::new(
                Code::DuplicateDefinition,
                format!("`{name}` is already defined as a {}", prev.kind),
                span.get().clone(),
            )
            .with_related(prev.span.clone());
            self.diags.push(d);
            return;
        }
        self.symbols.insert(
            name,
            Symbol {
                kind,
                file: file.to_string(),
                span: span.get().clone(),
            },
        );
    }

    fn declare(&mut self, unit: &ParseUnit) {
        let ns = namespace_of(unit).clone();
        let file = unit.file.as_str();
        for decl in &unit.declarations {
            match decl {
                Decl::Structure(d) => self.define(
                    ns.child(&d.name.text),
                    ElementKind::DataObject,
                    file,
                    &d.name.span,
                ),
                Decl::List(d) => self.define(
                    ns.child(&d.name.text),
                    ElementKind::ListType,
                    file,
                    &d.name.span,
                ),
                Decl::Microservice(d) => {
                    let svc = ns.join(&d.name.name);
                    self.define(svc.clone(), ElementKind::Microservice, file, &d.name.span);
                    for iface in &d.interfaces {
                        let iname = svc.child(&iface.name.text);
                        self.define(
                            iname.clone(),
                            ElementKind::Interface,
                            file,
                            &iface.name.span,
                        );
                        for op in &iface.operations {
                            self.define(
                                iname.child(&op.name.text),
                                ElementKind::Operation,
                                file,
                                &op.name.span,
                            );
                        }
                    }
                    for c in &d.contracts {
                        self.define(
                            svc.child(&c.name.text),
                            ElementKind::Contract,
                            file,
                            &c.name.span,
                        );
                    }
                }
                Decl::Technology(d) => self.define(
                    ns.child(&d.name.text),
                    ElementKind::Technology,
                    file,
                    &d.name.span,
                ),
                Decl::Artifact(d) => self.define(
                    ns.child(&d.name.text),
                    ElementKind::Artifact,
                    file,
                    &d.name.span,
                ),
                Decl::Container(d) => self.define(
                    ns.child(&d.name.text),
                    ElementKind::Container,
                    file,
                    &d.name.span,
                ),
                Decl::Registration(d) => self.define(
                    ns.child(&d.name.text),
                    ElementKind::Registration,
                    file,
                    &d.name.span,
                ),
            }
        }
    }

    fn scope(&mut self, unit: &'u ParseUnit) -> Scope<'u> {
        let mut scope = Scope {
            namespace: namespace_of(unit).clone(),
            aliases: BTreeMap::new(),
            visible: BTreeSet::from([unit.file.as_str()]),
        };
        for import in &unit.imports {
            let target = resolve_import_path(&unit.file, &import.path);
            match self.units.iter().find(|u| u.file == target) {
                Some(imported) => {
                    scope.visible.insert(imported.file.as_str());
                    scope
                        .aliases
                        .insert(import.alias.text.as_str(), namespace_of(imported).clone());
                }
                None => self.diags.push(Diagnostic::new(
                    Code::FileNotFound,
                    format!("imported file `{target}` was not loaded"),
                    import.span.get().clone(),
                )),
            }
        }
        scope
    }

    fn visible(&self, scope: &Scope, name: &QualifiedName) -> Option<&Symbol> {
        self.symbols
            .get(name)
            .filter(|s| scope.visible.contains(s.file.as_str()))
    }

    /// Binds `written` to a visible element whose kind is in `accepted`.
    fn resolve(
        &mut self,
        scope: &Scope,
        enclosing: Option<&QualifiedName>,
        written: &NameRef,
        accepted: &[ElementKind],
    ) -> Option<(QualifiedName, ElementKind)> {
        let name = &written.name;
        let mut candidates = Vec::with_capacity(4);
        if let Some(enclosing) = enclosing {
            candidates.push(enclosing.join(name));
        }
        candidates.push(scope.namespace.join(name));
        if let (Some(ns), Some(rest)) = (scope.aliases.get(name.first()), name.tail()) {
            candidates.push(ns.join(&rest));
        }
        candidates.push(name.clone());

        // The first candidate of an acceptable kind wins; otherwise the first
        // existing one is reported as a kind mismatch.
        let existing: Vec<_> = candidates
            .into_iter()
            .filter_map(|c| self.visible(scope, &c).map(|s| (c, s.kind, s.span.clone())))
            .collect();
        let found = existing
            .iter()
            .find(|(_, kind, _)| accepted.contains(kind))
            .or(existing.first())
            .cloned();
        let span = written.span.get().clone();
        match found {
            Some((qn, kind, _)) if accepted.contains(&kind) => Some((qn, kind)),
            Some((qn, kind, def)) => {
                let expected: Vec<_> = accepted.iter().map(|k| k.describe()).collect();
                self.diags.push(
                    Diagnostic::new(
                        Code::KindMismatch,
                        format!("`{qn}` is a {kind}, expected a {}", expected.join(" or ")),
                        span,
                    )
                    .with_related(def),
                );
                None
            }
            None => {
                let suggestions = self.suggest(scope, name, accepted);
                let mut message = format!("unresolved reference `{name}`");
                if !suggestions.is_empty() {
                    let list: Vec<String> = suggestions.iter().map(|s| format!("`{s}`")).collect();
                    message.push_str(&format!("; did you mean {}?", list.join(", ")));
                }
                self.diags
                    .push(Diagnostic::new(Code::UnresolvedReference, message, span));
                None
            }
        }
    }

    /// Visible names of an accepted kind whose last segment is within edit
    /// distance 2 of the written one.
    fn suggest(
        &self,
        scope: &Scope,
        written: &QualifiedName,
        accepted: &[ElementKind],
    ) -> Vec<QualifiedName> {
        let mut scored: Vec<(usize, &QualifiedName)> = self
            .symbols
            .iter()
            .filter(|(_, s)| accepted.contains(&s.kind) && scope.visible.contains(s.file.as_str()))
            .filter_map(|(qn, _)| {
                let d = strsim::levenshtein(qn.last(), written.last());
                (d <= 2).then_some((d, qn))
            })
            .collect();
        scored.sort();
        scored.into_iter().take(3).map(|(_, q)| q.clone()).collect()
    }

    fn reference(
        &mut self,
        scope: &Scope,
        enclosing: Option<&QualifiedName>,
        written: &NameRef,
        kind: ElementKind,
    ) -> Option<Reference> {
        self.resolve(scope, enclosing, written, &[kind])
            .map(|(qn, _)| Reference::at(qn, written.span.clone()))
    }

    fn references(
        &mut self,
        scope: &Scope,
        enclosing: Option<&QualifiedName>,
        written: &[NameRef],
        kind: ElementKind,
    ) -> Vec<Reference> {
        written
            .iter()
            .filter_map(|w| self.reference(scope, enclosing, w, kind))
            .collect()
    }

    /// Resolves a structure-or-list type name.
    fn data_reference(
        &mut self,
        scope: &Scope,
        list_marker: bool,
        written: &NameRef,
    ) -> Option<(Reference, ElementKind)> {
        let accepted: &[ElementKind] = if list_marker {
            &[ElementKind::ListType]
        } else {
            &[ElementKind::DataObject, ElementKind::ListType]
        };
        self.resolve(scope, None, written, accepted)
            .map(|(qn, kind)| (Reference::at(qn, written.span.clone()), kind))
    }

    fn lower(&mut self, unit: &ParseUnit, scope: &Scope, parts: &mut ModelParts) {
        let ns = scope.namespace.clone();
        let unit_span: NodeSpan = SourceSpan::file_start(&unit.file).into();
        if unit.viewpoint == Viewpoint::Data {
            let mut dm = DataModel {
                namespace: ns.clone(),
                objects: Vec::new(),
                lists: Vec::new(),
                span: unit_span,
            };
            for decl in &unit.declarations {
                match decl {
                    Decl::Structure(d) => {
                        let fields = d
                            .fields
                            .iter()
                            .filter_map(|f| self.field(scope, f))
                            .collect();
                        dm.objects.push(DataObject {
                            name: d.name.text.clone(),
                            fields,
                            span: d.span.clone(),
                        });
                    }
                    Decl::List(d) => {
                        let element = match &d.element {
                            TypeExpr::Primitive(p, _) => Some(ListElement::Primitive(*p)),
                            TypeExpr::Named { name, .. } => self
                                .reference(scope, None, name, ElementKind::DataObject)
                                .map(ListElement::Object),
                        };
                        if let Some(element) = element {
                            dm.lists.push(ListType {
                                name: d.name.text.clone(),
                                element,
                                span: d.span.clone(),
                            });
                        }
                    }
                    _ => {}
                }
            }
            parts.data.push(dm);
            return;
        }
        for decl in &unit.declarations {
            match decl {
                Decl::Microservice(d) => {
                    let svc = self.microservice(scope, &ns, d);
                    parts.services.push(svc);
                }
                Decl::Technology(d) => parts.technologies.push(TechnologyDescriptor {
                    name: ns.child(&d.name.text),
                    kind: d.kind,
                    span: d.span.clone(),
                }),
                Decl::Artifact(d) => {
                    let artifact = self.artifact(scope, &ns, d);
                    parts.artifacts.push(artifact);
                }
                Decl::Container(d) => {
                    let env = &d.environment;
                    let tech = ElementKind::Technology;
                    let environment = OperatingEnvironment {
                        name: env.image.clone(),
                        container_technologies: self.references(scope, None, &env.containers, tech),
                        service_technologies: self.references(scope, None, &env.services, tech),
                        span: env.span.clone(),
                    };
                    let (min, max) = d.instances.unwrap_or((1, 1));
                    parts.containers.push(Container {
                        name: ns.child(&d.name.text),
                        environment,
                        min_instances: min,
                        max_instances: max,
                        deploys: self.references(scope, None, &d.deploys, ElementKind::Artifact),
                        span: d.span.clone(),
                    });
                }
                Decl::Registration(d) => {
                    let registered =
                        self.references(scope, None, &d.registered, ElementKind::Artifact);
                    parts.registrations.push(DiscoverabilityRegistration {
                        kind: d.kind,
                        name: ns.child(&d.name.text),
                        registered,
                        span: d.span.clone(),
                    });
                }
                Decl::Structure(_) | Decl::List(_) => {}
            }
        }
    }

    fn field(&mut self, scope: &Scope, f: &FieldDecl) -> Option<Field> {
        match &f.ty {
            TypeExpr::Primitive(p, _) => Some(Field::Data(DataField {
                name: f.name.text.clone(),
                primitive: *p,
                span: f.span.clone(),
            })),
            TypeExpr::Named { list, name } => {
                let (r, kind) = self.data_reference(scope, *list, name)?;
                let target = if kind == ElementKind::ListType {
                    ObjectTarget::List(r)
                } else {
                    ObjectTarget::Object(r)
                };
                Some(Field::Object(DataObjectField {
                    name: f.name.text.clone(),
                    target,
                    span: f.span.clone(),
                }))
            }
        }
    }

    fn microservice(
        &mut self,
        scope: &Scope,
        ns: &QualifiedName,
        d: &MicroserviceDecl,
    ) -> Microservice {
        let name = ns.join(&d.name.name);
        let mut interfaces = Vec::new();
        for iface in &d.interfaces {
            let mut operations = Vec::new();
            for op in &iface.operations {
                let mut seen = BTreeSet::new();
                let mut parameters = Vec::new();
                for p in &op.params {
                    if !seen.insert(p.name.text.as_str()) {
                        self.diags.push(Diagnostic::new(
                            Code::DuplicateDefinition,
                            format!(
                                "parameter `{}` is declared twice in operation `{}`",
                                p.name.text, op.name.text
                            ),
                            p.name.span.get().clone(),
                        ));
                        continue;
                    }
                    let data_type = match &p.ty {
                        TypeExpr::Primitive(prim, _) => Some(DataType::Primitive(*prim)),
                        TypeExpr::Named { list, name } => {
                            self.data_reference(scope, *list, name).map(|(r, kind)| {
                                if kind == ElementKind::ListType {
                                    DataType::List(r)
                                } else {
                                    DataType::Object(r)
                                }
                            })
                        }
                    };
                    let initialized_by = match &p.initialized_by {
                        Some(init) => {
                            match self.reference(scope, Some(&name), init, ElementKind::Operation) {
                                Some(r) => Some(r),
                                None => continue,
                            }
                        }
                        None => None,
                    };
                    let Some(data_type) = data_type else { continue };
                    parameters.push(Parameter {
                        name: p.name.text.clone(),
                        pattern: p.pattern,
                        comm_type: p.comm_type,
                        data_type,
                        initialized_by,
                        span: p.span.clone(),
                    });
                }
                operations.push(ServiceOperation {
                    name: op.name.text.clone(),
                    not_implemented: op.not_implemented,
                    parameters,
                    span: op.span.clone(),
                });
            }
            interfaces.push(ServiceInterface {
                name: iface.name.text.clone(),
                operations,
                span: iface.span.clone(),
            });
        }
        let contracts = d
            .contracts
            .iter()
            .map(|c| ServiceContract {
                name: c.name.text.clone(),
                provides: self.references(scope, Some(&name), &c.provides, ElementKind::Interface),
                requires: self.references(scope, Some(&name), &c.requires, ElementKind::Interface),
                span: c.span.clone(),
            })
            .collect();
        Microservice {
            name,
            kind: d.kind,
            interfaces,
            contracts,
            span: d.span.clone(),
        }
    }

    fn artifact(
        &mut self,
        scope: &Scope,
        ns: &QualifiedName,
        d: &ArtifactDecl,
    ) -> ServiceDeploymentArtifact {
        let tech = ElementKind::Technology;
        let endpoints = d
            .endpoints
            .iter()
            .filter_map(|e| {
                let protocol = self.reference(scope, None, &e.protocol, tech);
                let format = self.reference(scope, None, &e.format, tech);
                let operation = e
                    .operation
                    .as_ref()
                    .map(|o| self.reference(scope, None, o, ElementKind::Operation));
                let contract = e
                    .contract
                    .as_ref()
                    .map(|c| self.reference(scope, None, c, ElementKind::Contract));
                Some(Endpoint {
                    address: e.address.clone(),
                    protocol: protocol?,
                    format: format?,
                    operation: operation.map(|o| o.ok_or(())).transpose().ok()?,
                    contract: contract.map(|c| c.ok_or(())).transpose().ok()?,
                    span: e.span.clone(),
                })
            })
            .collect();
        ServiceDeploymentArtifact {
            name: ns.child(&d.name.text),
            contracts: self.references(scope, None, &d.contracts, ElementKind::Contract),
            service_technologies: self.references(scope, None, &d.services, tech),
            load_balancer: d
                .load_balancer
                .as_ref()
                .and_then(|r| self.reference(scope, None, r, tech)),
            circuit_breaker: d
                .circuit_breaker
                .as_ref()
                .and_then(|r| self.reference(scope, None, r, tech)),
            endpoints,
            span: d.span.clone(),
        }
    }
}
