//! Canonical JSON document for linked models.
//!
//! Object keys are emitted in lexicographic order, sequences in declaration
//! order, two-space indentation, trailing newline. Source locations are not
//! part of the document.

use serde_json::{Map, Value};
use thiserror::Error;

use super::{Model, ModelError, ModelParts, QualifiedName};
use crate::diagnostic::{Code, Severity};

pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CanonicalError {
    #[error("malformed model document: {0}")]
    MalformedDocument(String),
    #[error("dangling reference to `{0}`")]
    DanglingReference(QualifiedName),
    #[error("invariant {code} violated: {message}")]
    InvariantViolation { code: Code, message: String },
}

fn sorted(value: Value) -> Value {
    match value {
        Value::Object(map) => {
            let mut entries: Vec<(String, Value)> = map.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            Value::Object(
                entries
                    .into_iter()
                    .map(|(k, v)| (k, sorted(v)))
                    .collect::<Map<_, _>>(),
            )
        }
        Value::Array(items) => Value::Array(items.into_iter().map(sorted).collect()),
        other => other,
    }
}

/// Renders a JSON value with sorted keys, two-space indentation and a
/// trailing newline.
pub fn to_canonical_json(value: Value) -> String {
    let mut text =
        serde_json::to_string_pretty(&sorted(value)).expect("JSON values always serialize");
    text.push('\n');
    text
}

pub fn canonical_serialize(model: &Model) -> Vec<u8> {
    let mut value = serde_json::to_value(model.parts()).expect("model parts always serialize");
    value
        .as_object_mut()
        .expect("model parts serialize to an object")
        .insert("version".into(), Value::String(FORMAT_VERSION.into()));
    to_canonical_json(value).into_bytes()
}

/// Parses a canonical document and re-checks every model invariant.
pub fn canonical_deserialize(bytes: &[u8]) -> Result<Model, CanonicalError> {
    let malformed = |msg: String| CanonicalError::MalformedDocument(msg);
    let text = std::str::from_utf8(bytes).map_err(|e| malformed(e.to_string()))?;
    let mut value: Value = serde_json::from_str(text).map_err(|e| malformed(e.to_string()))?;
    let object = value
        .as_object_mut()
        .ok_or_else(|| malformed("top level must be an object".into()))?;
    match object.remove("version") {
        Some(Value::String(v)) if v == FORMAT_VERSION => {}
        Some(other) => return Err(malformed(format!("unsupported version {other}"))),
        None => return Err(malformed("missing `version`".into())),
    }
    let parts: ModelParts = serde_json::from_value(value).map_err(|e| malformed(e.to_string()))?;
    let model = Model::assemble(parts).map_err(|errors| match errors.into_iter().next() {
        Some(ModelError::DanglingReference(name)) => CanonicalError::DanglingReference(name),
        Some(e @ ModelError::DuplicateDefinition(_)) => CanonicalError::InvariantViolation {
            code: Code::DuplicateDefinition,
            message: e.to_string(),
        },
        Some(e @ ModelError::KindMismatch { .. }) => CanonicalError::InvariantViolation {
            code: Code::KindMismatch,
            message: e.to_string(),
        },
        None => unreachable!("assemble reports at least one error on failure"),
    })?;
    if let Some(d) = crate::validate::validate(&model)
        .into_iter()
        .find(|d| d.severity == Severity::Error)
    {
        return Err(CanonicalError::InvariantViolation {
            code: d.code,
            message: d.message,
        });
    }
    Ok(model)
}
