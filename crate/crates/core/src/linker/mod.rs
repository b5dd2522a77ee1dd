//! Import resolution and name binding across model files.

mod bind;
mod imports;

pub use bind::link;
pub use imports::{
    normalize_path, resolve_import_path, resolve_imports, FsLoader, ImportGraph, MemoryLoader,
    SourceLoader,
};
