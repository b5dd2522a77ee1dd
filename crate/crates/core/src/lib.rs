//! Viewpoint-based modeling of microservice architectures: three textual
//! languages (data, service, operation), a linker that joins them into one
//! model, a rule-based validator, interaction analyses and generators.

pub mod analyze;
pub mod codegen;
pub mod diagnostic;
pub mod linker;
pub mod model;
pub mod span;
pub mod syntax;
#[cfg(feature = "testkit")]
pub mod testkit;
pub mod validate;

pub use diagnostic::{Code, Diagnostic, Severity};
pub use linker::{link, resolve_imports, FsLoader, MemoryLoader, SourceLoader};
pub use model::{Model, QualifiedName};
pub use span::SourceSpan;
pub use validate::validate;

/// A linked model together with the warnings and errors the validator found.
#[derive(Debug, Clone)]
pub struct Compilation {
    pub model: Model,
    pub diagnostics: Vec<Diagnostic>,
}

impl Compilation {
    pub fn has_errors(&self) -> bool {
        diagnostic::has_errors(&self.diagnostics)
    }
}

/// Parses, links and validates the import closure of `entries`.
///
/// Fails with parse and link diagnostics; validation findings are returned
/// alongside the model.
pub fn compile<S: AsRef<str>>(
    entries: &[S],
    loader: &dyn SourceLoader,
) -> Result<Compilation, Vec<Diagnostic>> {
    let graph = resolve_imports(entries, loader)?;
    let model = link(&graph.ordered_units())?;
    let diagnostics = validate(&model);
    Ok(Compilation { model, diagnostics })
}
