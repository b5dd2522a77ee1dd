//! Metamodel element types for the Data, Service and Operation viewpoints.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::name::QualifiedName;
use crate::span::NodeSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PrimitiveType {
    Boolean,
    Int,
    Float,
    String,
    Date,
}

impl PrimitiveType {
    pub const ALL: [PrimitiveType; 5] = [
        PrimitiveType::Boolean,
        PrimitiveType::Int,
        PrimitiveType::Float,
        PrimitiveType::String,
        PrimitiveType::Date,
    ];

    /// Spelling in the modeling languages and in generated schemas.
    pub fn keyword(self) -> &'static str {
        match self {
            PrimitiveType::Boolean => "boolean",
            PrimitiveType::Int => "int",
            PrimitiveType::Float => "float",
            PrimitiveType::String => "string",
            PrimitiveType::Date => "date",
        }
    }

    pub fn from_keyword(s: &str) -> Option<PrimitiveType> {
        Self::ALL.into_iter().find(|p| p.keyword() == s)
    }
}

impl fmt::Display for PrimitiveType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// A bound reference to another element, by fully qualified name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reference {
    pub name: QualifiedName,
    pub span: NodeSpan,
}

impl Reference {
    pub fn new(name: QualifiedName) -> Self {
        Reference {
            name,
            span: NodeSpan::default(),
        }
    }

    pub fn at(name: QualifiedName, span: impl Into<NodeSpan>) -> Self {
        Reference {
            name,
            span: span.into(),
        }
    }
}

impl Serialize for Reference {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.name.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Reference {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        QualifiedName::deserialize(deserializer).map(Reference::new)
    }
}

/// Primitive-typed field of a structure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataField {
    pub name: String,
    #[serde(rename = "type")]
    pub primitive: PrimitiveType,
    #[serde(skip)]
    pub span: NodeSpan,
}

/// What an object-typed field points at.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectTarget {
    Object(Reference),
    List(Reference),
}

impl ObjectTarget {
    pub fn reference(&self) -> &Reference {
        match self {
            ObjectTarget::Object(r) | ObjectTarget::List(r) => r,
        }
    }
}

/// Field whose type is another structure or a list type; this is what makes
/// structures nest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataObjectField {
    pub name: String,
    pub target: ObjectTarget,
    #[serde(skip)]
    pub span: NodeSpan,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Field {
    Data(DataField),
    Object(DataObjectField),
}

impl Field {
    pub fn name(&self) -> &str {
        match self {
            Field::Data(f) => &f.name,
            Field::Object(f) => &f.name,
        }
    }

    pub fn span(&self) -> &NodeSpan {
        match self {
            Field::Data(f) => &f.span,
            Field::Object(f) => &f.span,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataObject {
    pub name: String,
    pub fields: Vec<Field>,
    #[serde(skip)]
    pub span: NodeSpan,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ListElement {
    Primitive(PrimitiveType),
    Object(Reference),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ListType {
    pub name: String,
    pub element: ListElement,
    #[serde(skip)]
    pub span: NodeSpan,
}

/// The Data viewpoint content of one namespace declaration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct DataModel {
    pub namespace: QualifiedName,
    pub objects: Vec<DataObject>,
    pub lists: Vec<ListType>,
    #[serde(skip)]
    pub span: NodeSpan,
}

impl DataModel {
    pub fn object_name(&self, object: &DataObject) -> QualifiedName {
        self.namespace.child(&object.name)
    }

    pub fn list_name(&self, list: &ListType) -> QualifiedName {
        self.namespace.child(&list.name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CommPattern {
    #[serde(rename = "IN_ONLY")]
    InOnly,
    #[serde(rename = "OUT_ONLY")]
    OutOnly,
    #[serde(rename = "INOUT")]
    InOut,
}

impl CommPattern {
    pub fn keyword(self) -> &'static str {
        match self {
            CommPattern::InOnly => "in",
            CommPattern::OutOnly => "out",
            CommPattern::InOut => "inout",
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CommPattern::InOnly => "IN_ONLY",
            CommPattern::OutOnly => "OUT_ONLY",
            CommPattern::InOut => "INOUT",
        }
    }

    /// True if the parameter receives data.
    pub fn is_input(self) -> bool {
        matches!(self, CommPattern::InOnly | CommPattern::InOut)
    }

    /// True if the parameter provides data back to the caller.
    pub fn is_output(self) -> bool {
        matches!(self, CommPattern::OutOnly | CommPattern::InOut)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CommType {
    Sync,
    Async,
}

impl CommType {
    pub fn keyword(self) -> &'static str {
        match self {
            CommType::Sync => "sync",
            CommType::Async => "async",
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CommType::Sync => "SYNC",
            CommType::Async => "ASYNC",
        }
    }
}

/// The type exchanged through a parameter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataType {
    Primitive(PrimitiveType),
    Object(Reference),
    List(Reference),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct Parameter {
    pub name: String,
    pub pattern: CommPattern,
    pub comm_type: CommType,
    pub data_type: DataType,
    /// Operation of another microservice that supplies this parameter's value.
    pub initialized_by: Option<Reference>,
    #[serde(skip)]
    pub span: NodeSpan,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct ServiceOperation {
    pub name: String,
    pub not_implemented: bool,
    pub parameters: Vec<Parameter>,
    #[serde(skip)]
    pub span: NodeSpan,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceInterface {
    pub name: String,
    pub operations: Vec<ServiceOperation>,
    #[serde(skip)]
    pub span: NodeSpan,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceContract {
    pub name: String,
    pub provides: Vec<Reference>,
    pub requires: Vec<Reference>,
    #[serde(skip)]
    pub span: NodeSpan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MicroserviceType {
    Functional,
    Infrastructure,
}

impl MicroserviceType {
    pub fn keyword(self) -> &'static str {
        match self {
            MicroserviceType::Functional => "functional",
            MicroserviceType::Infrastructure => "infrastructure",
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MicroserviceType::Functional => "FUNCTIONAL",
            MicroserviceType::Infrastructure => "INFRASTRUCTURE",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Microservice {
    pub name: QualifiedName,
    #[serde(rename = "type")]
    pub kind: MicroserviceType,
    pub interfaces: Vec<ServiceInterface>,
    pub contracts: Vec<ServiceContract>,
    #[serde(skip)]
    pub span: NodeSpan,
}

impl Microservice {
    pub fn interface_name(&self, interface: &ServiceInterface) -> QualifiedName {
        self.name.child(&interface.name)
    }

    pub fn contract_name(&self, contract: &ServiceContract) -> QualifiedName {
        self.name.child(&contract.name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TechnologyKind {
    Service,
    Container,
    Protocol,
    MessageFormat,
    LoadBalancer,
    CircuitBreaker,
}

impl TechnologyKind {
    pub const ALL: [TechnologyKind; 6] = [
        TechnologyKind::Service,
        TechnologyKind::Container,
        TechnologyKind::Protocol,
        TechnologyKind::MessageFormat,
        TechnologyKind::LoadBalancer,
        TechnologyKind::CircuitBreaker,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            TechnologyKind::Service => "service",
            TechnologyKind::Container => "container",
            TechnologyKind::Protocol => "protocol",
            TechnologyKind::MessageFormat => "message-format",
            TechnologyKind::LoadBalancer => "load-balancer",
            TechnologyKind::CircuitBreaker => "circuit-breaker",
        }
    }

    pub fn from_keyword(s: &str) -> Option<TechnologyKind> {
        Self::ALL.into_iter().find(|k| k.keyword() == s)
    }
}

impl fmt::Display for TechnologyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TechnologyDescriptor {
    pub name: QualifiedName,
    pub kind: TechnologyKind,
    #[serde(skip)]
    pub span: NodeSpan,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Endpoint {
    pub address: String,
    pub protocol: Reference,
    pub format: Reference,
    pub operation: Option<Reference>,
    pub contract: Option<Reference>,
    #[serde(skip)]
    pub span: NodeSpan,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct ServiceDeploymentArtifact {
    pub name: QualifiedName,
    pub contracts: Vec<Reference>,
    pub service_technologies: Vec<Reference>,
    pub load_balancer: Option<Reference>,
    pub circuit_breaker: Option<Reference>,
    pub endpoints: Vec<Endpoint>,
    #[serde(skip)]
    pub span: NodeSpan,
}

impl ServiceDeploymentArtifact {
    /// The single service technology, when exactly one is assigned.
    pub fn service_technology(&self) -> Option<&Reference> {
        match self.service_technologies.as_slice() {
            [one] => Some(one),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct OperatingEnvironment {
    /// Container image identifier.
    pub name: String,
    pub container_technologies: Vec<Reference>,
    pub service_technologies: Vec<Reference>,
    #[serde(skip)]
    pub span: NodeSpan,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct Container {
    pub name: QualifiedName,
    pub environment: OperatingEnvironment,
    pub min_instances: u32,
    pub max_instances: u32,
    pub deploys: Vec<Reference>,
    #[serde(skip)]
    pub span: NodeSpan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RegistrationKind {
    ServiceDiscovery,
    ApiGateway,
}

impl RegistrationKind {
    pub fn keyword(self) -> &'static str {
        match self {
            RegistrationKind::ServiceDiscovery => "service-discovery",
            RegistrationKind::ApiGateway => "api-gateway",
        }
    }
}

/// Makes artifacts internally (service discovery) or externally (API
/// gateway) discoverable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscoverabilityRegistration {
    pub kind: RegistrationKind,
    pub name: QualifiedName,
    pub registered: Vec<Reference>,
    #[serde(skip)]
    pub span: NodeSpan,
}
