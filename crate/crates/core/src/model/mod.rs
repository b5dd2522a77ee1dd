//! The linked metamodel: element types for all three viewpoints, the symbol
//! table, and reference checking.

mod canonical;
mod name;
mod types;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use canonical::{
    canonical_deserialize, canonical_serialize, to_canonical_json, CanonicalError, FORMAT_VERSION,
};
pub use name::{is_identifier, InvalidName, QualifiedName};
pub use types::*;

use crate::span::NodeSpan;

/// The element sequences of a model, without the derived symbol table.
///
/// This is the mutable form: build or edit parts, then call
/// [`Model::assemble`] to obtain a checked, immutable [`Model`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParts {
    pub data: Vec<DataModel>,
    pub services: Vec<Microservice>,
    pub technologies: Vec<TechnologyDescriptor>,
    pub artifacts: Vec<ServiceDeploymentArtifact>,
    pub containers: Vec<Container>,
    pub registrations: Vec<DiscoverabilityRegistration>,
}

/// Metatype of a named element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ElementKind {
    DataObject,
    ListType,
    Microservice,
    Interface,
    Operation,
    Contract,
    Technology,
    Artifact,
    Container,
    Registration,
}

impl ElementKind {
    pub fn describe(self) -> &'static str {
        match self {
            ElementKind::DataObject => "structure",
            ElementKind::ListType => "list type",
            ElementKind::Microservice => "microservice",
            ElementKind::Interface => "interface",
            ElementKind::Operation => "operation",
            ElementKind::Contract => "contract",
            ElementKind::Technology => "technology",
            ElementKind::Artifact => "artifact",
            ElementKind::Container => "container",
            ElementKind::Registration => "registration",
        }
    }
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.describe())
    }
}

/// Position of a named element inside [`ModelParts`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ElementId {
    DataObject {
        model: usize,
        index: usize,
    },
    ListType {
        model: usize,
        index: usize,
    },
    Microservice(usize),
    Interface {
        service: usize,
        index: usize,
    },
    Operation {
        service: usize,
        interface: usize,
        index: usize,
    },
    Contract {
        service: usize,
        index: usize,
    },
    Technology(usize),
    Artifact(usize),
    Container(usize),
    Registration(usize),
}

impl ElementId {
    pub fn kind(self) -> ElementKind {
        match self {
            ElementId::DataObject { .. } => ElementKind::DataObject,
            ElementId::ListType { .. } => ElementKind::ListType,
            ElementId::Microservice(_) => ElementKind::Microservice,
            ElementId::Interface { .. } => ElementKind::Interface,
            ElementId::Operation { .. } => ElementKind::Operation,
            ElementId::Contract { .. } => ElementKind::Contract,
            ElementId::Technology(_) => ElementKind::Technology,
            ElementId::Artifact(_) => ElementKind::Artifact,
            ElementId::Container(_) => ElementKind::Container,
            ElementId::Registration(_) => ElementKind::Registration,
        }
    }

    /// Index of the owning microservice for interfaces, operations and
    /// contracts.
    pub fn service_index(self) -> Option<usize> {
        match self {
            ElementId::Microservice(s)
            | ElementId::Interface { service: s, .. }
            | ElementId::Operation { service: s, .. }
            | ElementId::Contract { service: s, .. } => Some(s),
            _ => None,
        }
    }
}

/// A resolved element together with its owners.
#[derive(Debug, Clone, Copy)]
pub enum Element<'m> {
    DataObject(&'m DataModel, &'m DataObject),
    ListType(&'m DataModel, &'m ListType),
    Microservice(&'m Microservice),
    Interface(&'m Microservice, &'m ServiceInterface),
    Operation(&'m Microservice, &'m ServiceInterface, &'m ServiceOperation),
    Contract(&'m Microservice, &'m ServiceContract),
    Technology(&'m TechnologyDescriptor),
    Artifact(&'m ServiceDeploymentArtifact),
    Container(&'m Container),
    Registration(&'m DiscoverabilityRegistration),
}

impl<'m> Element<'m> {
    pub fn kind(&self) -> ElementKind {
        match self {
            Element::DataObject(..) => ElementKind::DataObject,
            Element::ListType(..) => ElementKind::ListType,
            Element::Microservice(_) => ElementKind::Microservice,
            Element::Interface(..) => ElementKind::Interface,
            Element::Operation(..) => ElementKind::Operation,
            Element::Contract(..) => ElementKind::Contract,
            Element::Technology(_) => ElementKind::Technology,
            Element::Artifact(_) => ElementKind::Artifact,
            Element::Container(_) => ElementKind::Container,
            Element::Registration(_) => ElementKind::Registration,
        }
    }

    pub fn span(&self) -> &'m NodeSpan {
        match *self {
            Element::DataObject(_, o) => &o.span,
            Element::ListType(_, l) => &l.span,
            Element::Microservice(m) => &m.span,
            Element::Interface(_, i) => &i.span,
            Element::Operation(_, _, o) => &o.span,
            Element::Contract(_, c) => &c.span,
            Element::Technology(t) => &t.span,
            Element::Artifact(a) => &a.span,
            Element::Container(c) => &c.span,
            Element::Registration(r) => &r.span,
        }
    }

    /// Microservice owning an interface, operation or contract (or the
    /// microservice itself).
    pub fn owning_service(&self) -> Option<&'m Microservice> {
        match *self {
            Element::Microservice(m)
            | Element::Interface(m, _)
            | Element::Operation(m, ..)
            | Element::Contract(m, _) => Some(m),
            _ => None,
        }
    }
}

/// Slot a reference occupies; determines which metatype it must name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RefSlot {
    FieldObject,
    FieldList,
    ListElement,
    ParameterObject,
    ParameterList,
    Initializer,
    Provides,
    Requires,
    ArtifactContract,
    Technology(TechnologyKind),
    EndpointOperation,
    EndpointContract,
    Deploys,
    Registered,
}

impl RefSlot {
    pub fn expected(self) -> ElementKind {
        match self {
            RefSlot::FieldObject | RefSlot::ListElement | RefSlot::ParameterObject => {
                ElementKind::DataObject
            }
            RefSlot::FieldList | RefSlot::ParameterList => ElementKind::ListType,
            RefSlot::Initializer | RefSlot::EndpointOperation => ElementKind::Operation,
            RefSlot::Provides | RefSlot::Requires => ElementKind::Interface,
            RefSlot::ArtifactContract | RefSlot::EndpointContract => ElementKind::Contract,
            RefSlot::Technology(_) => ElementKind::Technology,
            RefSlot::Deploys | RefSlot::Registered => ElementKind::Artifact,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("`{0}` is defined more than once")]
    DuplicateDefinition(QualifiedName),
    #[error("reference to undefined `{0}`")]
    DanglingReference(QualifiedName),
    #[error("`{name}` is a {found}, expected a {expected}")]
    KindMismatch {
        name: QualifiedName,
        expected: ElementKind,
        found: ElementKind,
    },
}

/// Every named element with its qualified name, in declaration order.
pub fn named_elements(parts: &ModelParts) -> Vec<(QualifiedName, ElementId, &NodeSpan)> {
    let mut out = Vec::new();
    for (m, dm) in parts.data.iter().enumerate() {
        for (index, o) in dm.objects.iter().enumerate() {
            out.push((
                dm.object_name(o),
                ElementId::DataObject { model: m, index },
                &o.span,
            ));
        }
        for (index, l) in dm.lists.iter().enumerate() {
            out.push((
                dm.list_name(l),
                ElementId::ListType { model: m, index },
                &l.span,
            ));
        }
    }
    for (s, svc) in parts.services.iter().enumerate() {
        out.push((svc.name.clone(), ElementId::Microservice(s), &svc.span));
        for (i, iface) in svc.interfaces.iter().enumerate() {
            let iname = svc.interface_name(iface);
            for (k, op) in iface.operations.iter().enumerate() {
                out.push((
                    iname.child(&op.name),
                    ElementId::Operation {
                        service: s,
                        interface: i,
                        index: k,
                    },
                    &op.span,
                ));
            }
            out.push((
                iname,
                ElementId::Interface {
                    service: s,
                    index: i,
                },
                &iface.span,
            ));
        }
        for (c, contract) in svc.contracts.iter().enumerate() {
            out.push((
                svc.contract_name(contract),
                ElementId::Contract {
                    service: s,
                    index: c,
                },
                &contract.span,
            ));
        }
    }
    for (i, t) in parts.technologies.iter().enumerate() {
        out.push((t.name.clone(), ElementId::Technology(i), &t.span));
    }
    for (i, a) in parts.artifacts.iter().enumerate() {
        out.push((a.name.clone(), ElementId::Artifact(i), &a.span));
    }
    for (i, c) in parts.containers.iter().enumerate() {
        out.push((c.name.clone(), ElementId::Container(i), &c.span));
    }
    for (i, r) in parts.registrations.iter().enumerate() {
        out.push((r.name.clone(), ElementId::Registration(i), &r.span));
    }
    out
}

/// Calls `f` for every reference in `parts`, in declaration order.
pub fn for_each_reference<'p>(parts: &'p ModelParts, mut f: impl FnMut(RefSlot, &'p Reference)) {
    for dm in &parts.data {
        for o in &dm.objects {
            for field in &o.fields {
                match field {
                    Field::Data(_) => {}
                    Field::Object(of) => match &of.target {
                        ObjectTarget::Object(r) => f(RefSlot::FieldObject, r),
                        ObjectTarget::List(r) => f(RefSlot::FieldList, r),
                    },
                }
            }
        }
        for l in &dm.lists {
            if let ListElement::Object(r) = &l.element {
                f(RefSlot::ListElement, r);
            }
        }
    }
    for svc in &parts.services {
        for iface in &svc.interfaces {
            for op in &iface.operations {
                for p in &op.parameters {
                    match &p.data_type {
                        DataType::Primitive(_) => {}
                        DataType::Object(r) => f(RefSlot::ParameterObject, r),
                        DataType::List(r) => f(RefSlot::ParameterList, r),
                    }
                    if let Some(r) = &p.initialized_by {
                        f(RefSlot::Initializer, r);
                    }
                }
            }
        }
        for c in &svc.contracts {
            c.provides.iter().for_each(|r| f(RefSlot::Provides, r));
            c.requires.iter().for_each(|r| f(RefSlot::Requires, r));
        }
    }
    for a in &parts.artifacts {
        a.contracts
            .iter()
            .for_each(|r| f(RefSlot::ArtifactContract, r));
        a.service_technologies
            .iter()
            .for_each(|r| f(RefSlot::Technology(TechnologyKind::Service), r));
        if let Some(r) = &a.load_balancer {
            f(RefSlot::Technology(TechnologyKind::LoadBalancer), r);
        }
        if let Some(r) = &a.circuit_breaker {
            f(RefSlot::Technology(TechnologyKind::CircuitBreaker), r);
        }
        for e in &a.endpoints {
            f(RefSlot::Technology(TechnologyKind::Protocol), &e.protocol);
            f(
                RefSlot::Technology(TechnologyKind::MessageFormat),
                &e.format,
            );
            if let Some(r) = &e.operation {
                f(RefSlot::EndpointOperation, r);
            }
            if let Some(r) = &e.contract {
                f(RefSlot::EndpointContract, r);
            }
        }
    }
    for c in &parts.containers {
        let env = &c.environment;
        env.container_technologies
            .iter()
            .for_each(|r| f(RefSlot::Technology(TechnologyKind::Container), r));
        env.service_technologies
            .iter()
            .for_each(|r| f(RefSlot::Technology(TechnologyKind::Service), r));
        c.deploys.iter().for_each(|r| f(RefSlot::Deploys, r));
    }
    for r in &parts.registrations {
        r.registered.iter().for_each(|a| f(RefSlot::Registered, a));
    }
}

/// A linked model: element sequences plus a symbol table covering every
/// named element exactly once, with every reference bound.
///
/// Read access goes through `Deref<Target = ModelParts>`; to change a model,
/// take its parts with [`Model::into_parts`] and assemble again.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Model {
    parts: ModelParts,
    symbols: BTreeMap<QualifiedName, ElementId>,
}

impl Deref for Model {
    type Target = ModelParts;

    fn deref(&self) -> &ModelParts {
        &self.parts
    }
}

impl Model {
    /// Builds the symbol table and checks that every reference names an
    /// element of the metatype its slot requires. Technology references
    /// only need to name a technology; kind agreement is a validation rule.
    pub fn assemble(parts: ModelParts) -> Result<Model, Vec<ModelError>> {
        let mut errors = Vec::new();
        let mut symbols = BTreeMap::new();
        for (name, id, _) in named_elements(&parts) {
            if symbols.insert(name.clone(), id).is_some() {
                errors.push(ModelError::DuplicateDefinition(name));
            }
        }
        for_each_reference(&parts, |slot, r| match symbols.get(&r.name) {
            None => errors.push(ModelError::DanglingReference(r.name.clone())),
            Some(id) if id.kind() != slot.expected() => errors.push(ModelError::KindMismatch {
                name: r.name.clone(),
                expected: slot.expected(),
                found: id.kind(),
            }),
            Some(_) => {}
        });
        if errors.is_empty() {
            Ok(Model { parts, symbols })
        } else {
            Err(errors)
        }
    }

    pub fn empty() -> Model {
        Model::default()
    }

    pub fn parts(&self) -> &ModelParts {
        &self.parts
    }

    pub fn into_parts(self) -> ModelParts {
        self.parts
    }

    pub fn symbols(&self) -> impl Iterator<Item = (&QualifiedName, ElementId)> {
        self.symbols.iter().map(|(k, v)| (k, *v))
    }

    pub fn lookup(&self, name: &QualifiedName) -> Option<ElementId> {
        self.symbols.get(name).copied()
    }

    /// The element named `name`, if any.
    pub fn resolve(&self, name: &QualifiedName) -> Option<Element<'_>> {
        self.lookup(name).map(|id| self.element(id))
    }

    pub fn element(&self, id: ElementId) -> Element<'_> {
        let p = &self.parts;
        match id {
            ElementId::DataObject { model, index } => {
                Element::DataObject(&p.data[model], &p.data[model].objects[index])
            }
            ElementId::ListType { model, index } => {
                Element::ListType(&p.data[model], &p.data[model].lists[index])
            }
            ElementId::Microservice(s) => Element::Microservice(&p.services[s]),
            ElementId::Interface { service, index } => {
                let svc = &p.services[service];
                Element::Interface(svc, &svc.interfaces[index])
            }
            ElementId::Operation {
                service,
                interface,
                index,
            } => {
                let svc = &p.services[service];
                let iface = &svc.interfaces[interface];
                Element::Operation(svc, iface, &iface.operations[index])
            }
            ElementId::Contract { service, index } => {
                let svc = &p.services[service];
                Element::Contract(svc, &svc.contracts[index])
            }
            ElementId::Technology(i) => Element::Technology(&p.technologies[i]),
            ElementId::Artifact(i) => Element::Artifact(&p.artifacts[i]),
            ElementId::Container(i) => Element::Container(&p.containers[i]),
            ElementId::Registration(i) => Element::Registration(&p.registrations[i]),
        }
    }

    pub fn technology(&self, name: &QualifiedName) -> Option<&TechnologyDescriptor> {
        match self.resolve(name)? {
            Element::Technology(t) => Some(t),
            _ => None,
        }
    }

    pub fn operation(
        &self,
        name: &QualifiedName,
    ) -> Option<(&Microservice, &ServiceInterface, &ServiceOperation)> {
        match self.resolve(name)? {
            Element::Operation(s, i, o) => Some((s, i, o)),
            _ => None,
        }
    }

    pub fn interface(&self, name: &QualifiedName) -> Option<(&Microservice, &ServiceInterface)> {
        match self.resolve(name)? {
            Element::Interface(s, i) => Some((s, i)),
            _ => None,
        }
    }

    pub fn contract(&self, name: &QualifiedName) -> Option<(&Microservice, &ServiceContract)> {
        match self.resolve(name)? {
            Element::Contract(s, c) => Some((s, c)),
            _ => None,
        }
    }

    pub fn artifact(&self, name: &QualifiedName) -> Option<&ServiceDeploymentArtifact> {
        match self.resolve(name)? {
            Element::Artifact(a) => Some(a),
            _ => None,
        }
    }

    pub fn data_object(&self, name: &QualifiedName) -> Option<&DataObject> {
        match self.resolve(name)? {
            Element::DataObject(_, o) => Some(o),
            _ => None,
        }
    }

    pub fn list_type(&self, name: &QualifiedName) -> Option<&ListType> {
        match self.resolve(name)? {
            Element::ListType(_, l) => Some(l),
            _ => None,
        }
    }

    /// Name of the microservice owning the interface, operation or contract
    /// called `name`.
    pub fn owner_of(&self, name: &QualifiedName) -> Option<&QualifiedName> {
        self.resolve(name)?.owning_service().map(|s| &s.name)
    }

    pub fn for_each_reference<'m>(&'m self, f: impl FnMut(RefSlot, &'m Reference)) {
        for_each_reference(&self.parts, f)
    }
}

/// True iff the two models have the same elements, attributes and reference
/// targets. Source locations are not compared.
pub fn structural_equals(a: &Model, b: &Model) -> bool {
    a == b
}
