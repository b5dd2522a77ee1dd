//! Unlinked per-file syntax trees. References are kept exactly as written.

use std::fmt;
use std::path::Path;

use crate::diagnostic::Diagnostic;
use crate::model::{
    CommPattern, CommType, MicroserviceType, PrimitiveType, QualifiedName, RegistrationKind,
    TechnologyKind,
};
use crate::span::NodeSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Viewpoint {
    Data,
    Service,
    Operation,
}

impl Viewpoint {
    pub const ALL: [Viewpoint; 3] = [Viewpoint::Data, Viewpoint::Service, Viewpoint::Operation];

    pub fn extension(self) -> &'static str {
        match self {
            Viewpoint::Data => "msad",
            Viewpoint::Service => "msas",
            Viewpoint::Operation => "msao",
        }
    }

    pub fn from_path(path: impl AsRef<Path>) -> Option<Viewpoint> {
        let ext = path.as_ref().extension()?.to_str()?;
        Self::ALL.into_iter().find(|v| v.extension() == ext)
    }

    /// Whether a file of this viewpoint may import one of `other`.
    pub fn may_import(self, other: Viewpoint) -> bool {
        matches!(
            (self, other),
            (Viewpoint::Data, Viewpoint::Data)
                | (Viewpoint::Service, Viewpoint::Data | Viewpoint::Service)
                | (
                    Viewpoint::Operation,
                    Viewpoint::Service | Viewpoint::Operation
                )
        )
    }
}

impl fmt::Display for Viewpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Viewpoint::Data => "data",
            Viewpoint::Service => "service",
            Viewpoint::Operation => "operation",
        })
    }
}

/// A declared identifier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Name {
    pub text: String,
    pub span: NodeSpan,
}

/// A qualified name as written at a use site, not yet resolved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NameRef {
    pub name: QualifiedName,
    pub span: NodeSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeExpr {
    Primitive(PrimitiveType, NodeSpan),
    /// A structure or list type; `list` records an explicit `list` marker,
    /// which restricts the target to list types.
    Named {
        list: bool,
        name: NameRef,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Import {
    pub path: String,
    pub alias: Name,
    pub span: NodeSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldDecl {
    pub name: Name,
    pub ty: TypeExpr,
    pub span: NodeSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureDecl {
    pub name: Name,
    pub fields: Vec<FieldDecl>,
    pub span: NodeSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ListDecl {
    pub name: Name,
    pub element: TypeExpr,
    pub span: NodeSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamDecl {
    pub pattern: CommPattern,
    pub comm_type: CommType,
    pub name: Name,
    pub ty: TypeExpr,
    pub initialized_by: Option<NameRef>,
    pub span: NodeSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperationDecl {
    pub name: Name,
    pub not_implemented: bool,
    pub params: Vec<ParamDecl>,
    pub span: NodeSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterfaceDecl {
    pub name: Name,
    pub operations: Vec<OperationDecl>,
    pub span: NodeSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractDecl {
    pub name: Name,
    pub provides: Vec<NameRef>,
    pub requires: Vec<NameRef>,
    pub span: NodeSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MicroserviceDecl {
    pub kind: MicroserviceType,
    /// Declared name, relative to the file namespace.
    pub name: NameRef,
    pub interfaces: Vec<InterfaceDecl>,
    pub contracts: Vec<ContractDecl>,
    pub span: NodeSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TechnologyDecl {
    pub name: Name,
    pub kind: TechnologyKind,
    pub span: NodeSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndpointDecl {
    pub address: String,
    pub protocol: NameRef,
    pub format: NameRef,
    pub operation: Option<NameRef>,
    pub contract: Option<NameRef>,
    pub span: NodeSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArtifactDecl {
    pub name: Name,
    pub contracts: Vec<NameRef>,
    pub services: Vec<NameRef>,
    pub load_balancer: Option<NameRef>,
    pub circuit_breaker: Option<NameRef>,
    pub endpoints: Vec<EndpointDecl>,
    pub span: NodeSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnvironmentDecl {
    pub image: String,
    pub containers: Vec<NameRef>,
    pub services: Vec<NameRef>,
    pub span: NodeSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContainerDecl {
    pub name: Name,
    pub environment: EnvironmentDecl,
    pub instances: Option<(u32, u32)>,
    pub deploys: Vec<NameRef>,
    pub span: NodeSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegistrationDecl {
    pub kind: RegistrationKind,
    pub name: Name,
    pub registered: Vec<NameRef>,
    pub span: NodeSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decl {
    Structure(StructureDecl),
    List(ListDecl),
    Microservice(MicroserviceDecl),
    Technology(TechnologyDecl),
    Artifact(ArtifactDecl),
    Container(ContainerDecl),
    Registration(RegistrationDecl),
}

/// Result of parsing one file. Always produced, even for malformed input;
/// problems are recorded in `diagnostics`.
#[derive(Debug, Clone)]
pub struct ParseUnit {
    pub file: String,
    pub viewpoint: Viewpoint,
    /// `None` only when the mandatory header is missing.
    pub namespace: Option<NameRef>,
    pub imports: Vec<Import>,
    pub declarations: Vec<Decl>,
    pub diagnostics: Vec<Diagnostic>,
}

impl ParseUnit {
    pub fn has_errors(&self) -> bool {
        crate::diagnostic::has_errors(&self.diagnostics)
    }
}

/// Structural equality: viewpoint, namespace, imports and declarations.
/// File path, locations and diagnostics are ignored.
impl PartialEq for ParseUnit {
    fn eq(&self, other: &Self) -> bool {
        self.viewpoint == other.viewpoint
            && self.namespace == other.namespace
            && self.imports == other.imports
            && self.declarations == other.declarations
    }
}
