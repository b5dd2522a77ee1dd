//! Generators for per-service interface descriptors and a container
//! deployment manifest. Both refuse models with validation errors.

mod descriptor;
mod manifest;

use std::collections::BTreeMap;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::diagnostic::has_errors;
use crate::model::Model;
use crate::validate::validate;

pub use descriptor::{gen_interface_descriptors, type_schema};
pub use manifest::{gen_deployment_manifest, parse_port, Manifest, MANIFEST_FILE};

#[derive(Debug, Error)]
pub enum CodegenError {
    #[error("generation refused: the model has {0} validation error(s)")]
    GenerationRefused(usize),
    #[error("{} already exists; pass --overwrite to replace it", .0.display())]
    OutputConflict(PathBuf),
    #[error("cannot write {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

/// Non-fatal findings raised while generating.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GenerationWarning {
    /// An endpoint address has no `host:port` shape, so no port is published.
    AddressUnparsable { container: String, address: String },
}

impl std::fmt::Display for GenerationWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GenerationWarning::AddressUnparsable { container, address } => write!(
                f,
                "container `{container}`: endpoint address \"{address}\" has no host:port; no port published"
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    InterfaceDescriptors,
    DeploymentManifest,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationRequest {
    pub target: Target,
    pub output_dir: PathBuf,
    pub overwrite: bool,
}

/// Files written by [`generate`], plus generator warnings.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GenerationReport {
    pub written: Vec<PathBuf>,
    pub warnings: Vec<GenerationWarning>,
}

fn refuse_invalid(model: &Model) -> Result<(), CodegenError> {
    let diags = validate(model);
    if has_errors(&diags) {
        let n = diags.iter().filter(|d| d.is_error()).count();
        return Err(CodegenError::GenerationRefused(n));
    }
    Ok(())
}

/// Generates the requested documents and writes them below the output
/// directory. Nothing is written if any target file exists and overwriting
/// is off.
pub fn generate(
    model: &Model,
    request: &GenerationRequest,
) -> Result<GenerationReport, CodegenError> {
    let (files, warnings) = match request.target {
        Target::InterfaceDescriptors => (gen_interface_descriptors(model)?, Vec::new()),
        Target::DeploymentManifest => {
            let m = gen_deployment_manifest(model)?;
            (
                BTreeMap::from([(MANIFEST_FILE.to_string(), m.text)]),
                m.warnings,
            )
        }
    };
    let written = write_outputs(&request.output_dir, &files, request.overwrite)?;
    Ok(GenerationReport { written, warnings })
}

/// Writes `files` (relative path to content) below `dir`.
pub fn write_outputs(
    dir: &Path,
    files: &BTreeMap<String, String>,
    overwrite: bool,
) -> Result<Vec<PathBuf>, CodegenError> {
    let paths: Vec<PathBuf> = files.keys().map(|name| dir.join(name)).collect();
    if !overwrite {
        if let Some(existing) = paths.iter().find(|p| p.exists()) {
            return Err(CodegenError::OutputConflict(existing.clone()));
        }
    }
    std::fs::create_dir_all(dir).map_err(|source| CodegenError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    for (path, content) in paths.iter().zip(files.values()) {
        std::fs::write(path, content).map_err(|source| CodegenError::Io {
            path: path.clone(),
            source,
        })?;
    }
    Ok(paths)
}
