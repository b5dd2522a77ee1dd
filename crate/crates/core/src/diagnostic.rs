//! Coded findings shared by the parser, linker and validator.

use std::fmt;

use serde::Serialize;
use serde_json::json;

use crate::span::SourceSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

macro_rules! catalog {
    ($($variant:ident = $code:literal, $severity:ident, $title:literal;)*) => {
        /// Every diagnostic code the toolchain can emit.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum Code {
            $($variant,)*
        }

        impl Code {
            pub const ALL: &'static [Code] = &[$(Code::$variant,)*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(Code::$variant => $code,)*
                }
            }

            pub fn severity(self) -> Severity {
                match self {
                    $(Code::$variant => Severity::$severity,)*
                }
            }

            /// One-line description used in the published catalog.
            pub fn title(self) -> &'static str {
                match self {
                    $(Code::$variant => $title,)*
                }
            }
        }
    };
}

catalog! {
    UnexpectedToken = "P001", Error, "unexpected token";
    LexError = "P002", Error, "malformed token";
    MissingNamespace = "P003", Error, "missing namespace header";
    InvalidLiteral = "P004", Error, "invalid literal";
    DuplicateAlias = "P005", Error, "duplicate import alias";
    DuplicateClause = "P006", Error, "clause given more than once";
    MissingClause = "P007", Error, "required clause missing";
    ImportCycle = "P010", Error, "import cycle";
    FileNotFound = "P011", Error, "imported file not found";
    ViewpointLayerViolation = "P012", Error, "import violates viewpoint layering";
    UnknownExtension = "P013", Error, "unrecognized model file extension";
    UnresolvedReference = "P020", Error, "unresolved reference";
    DuplicateDefinition = "P021", Error, "duplicate definition";
    KindMismatch = "P022", Error, "reference names an element of the wrong kind";
    DuplicateFieldName = "D001", Error, "duplicate field name in a structure";
    EmptyDataObject = "D002", Error, "structure without fields";
    RecursiveDataObject = "D003", Warning, "structure reachable from itself through object fields";
    ServiceWithoutInterfaces = "S001", Error, "microservice without interfaces";
    InterfaceWithoutOperations = "S002", Error, "interface without operations";
    ProvidesForeignInterface = "S003a", Error, "contract provides an interface of another microservice";
    RequiresOwnInterface = "S003b", Error, "contract requires an interface of its own microservice";
    InitializerSameService = "S004", Error, "parameter initialized by an operation of the same microservice";
    InitializedOutput = "S005", Error, "output-only parameter carries an initializer";
    InitializerNotImplemented = "S006", Error, "initializer operation is not implemented";
    InitializationCycle = "S007", Error, "cycle in parameter initialization";
    OperationWithoutParameters = "S008", Warning, "implemented operation without parameters";
    InitializerTypeUnclear = "S009", Warning, "initializer returns no value of the parameter's type";
    ServiceTechnologyCount = "O001", Error, "artifact without exactly one service technology";
    MixedArtifactContracts = "O002", Error, "artifact bundles contracts of different microservices";
    InstanceBounds = "O003", Error, "invalid container instance bounds";
    UnsupportedServiceTechnology = "O004", Error, "container environment does not support the artifact's service technology";
    EndpointTarget = "O005", Error, "endpoint must target exactly one operation or contract";
    TechnologyKind = "O006", Error, "technology of the wrong kind";
    DuplicateEndpoint = "O007", Error, "duplicate endpoint address and protocol";
    EndpointOutsideArtifact = "O008", Error, "endpoint target outside the artifact's contracts";
    UndeployedService = "O009", Warning, "microservice contracts are not bundled in any artifact";
    UndiscoverableArtifact = "O010", Warning, "artifact is neither internally nor externally discoverable";
}

impl Code {
    /// Codes emitted by the semantic validator.
    pub fn validator_rules() -> impl Iterator<Item = Code> {
        Code::ALL
            .iter()
            .copied()
            .filter(|c| !c.as_str().starts_with('P'))
    }

    pub fn parse(s: &str) -> Option<Code> {
        Code::ALL.iter().copied().find(|c| c.as_str() == s)
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub code: Code,
    pub severity: Severity,
    pub message: String,
    pub span: SourceSpan,
    pub related: Vec<SourceSpan>,
}

impl Diagnostic {
    pub fn new(code: Code, message: impl Into<String>, span: SourceSpan) -> Self {
        Diagnostic {
            code,
            severity: code.severity(),
            message: message.into(),
            span,
            related: Vec::new(),
        }
    }

    pub fn with_related(mut self, span: SourceSpan) -> Self {
        self.related.push(span);
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// `file:line:col: severity[CODE] message`
    pub fn render(&self) -> String {
        format!(
            "{}: {}[{}] {}",
            self.span, self.severity, self.code, self.message
        )
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "code": self.code.as_str(),
            "severity": self.severity,
            "message": self.message,
            "file": self.span.file,
            "line": self.span.start_line,
            "column": self.span.start_col,
            "endLine": self.span.end_line,
            "endColumn": self.span.end_col,
            "related": self.related.iter().map(|s| json!({
                "file": s.file,
                "line": s.start_line,
                "column": s.start_col,
            })).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Sorts into the published order: file, line, column, code, then message.
pub fn sort_diagnostics(diags: &mut [Diagnostic]) {
    diags.sort_by(|a, b| {
        a.span
            .sort_key()
            .cmp(&b.span.sort_key())
            .then(a.code.as_str().cmp(b.code.as_str()))
            .then_with(|| a.message.cmp(&b.message))
    });
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}
