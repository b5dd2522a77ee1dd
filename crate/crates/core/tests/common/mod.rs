#![allow(dead_code)]

use std::path::{Path, PathBuf};

use msaforge::{compile, Compilation, FsLoader};

pub fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

/// Directories holding one self-contained model each: the demo plus every
/// corpus project.
pub fn projects() -> Vec<PathBuf> {
    let root = workspace_root();
    let mut dirs = vec![root.join("demo")];
    let mut corpus: Vec<PathBuf> = std::fs::read_dir(root.join("corpus"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_dir())
        .collect();
    corpus.sort();
    dirs.extend(corpus);
    dirs
}

/// Model file names in `dir`, sorted.
pub fn model_files(dir: &Path) -> Vec<String> {
    let mut files: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".msad") || n.ends_with(".msas") || n.ends_with(".msao"))
        .collect();
    files.sort();
    files
}

/// `(path, source)` for every model file of every project.
pub fn corpus_sources() -> Vec<(PathBuf, String)> {
    projects()
        .into_iter()
        .flat_map(|dir| {
            model_files(&dir)
                .into_iter()
                .map(move |f| dir.join(f))
                .collect::<Vec<_>>()
        })
        .map(|p| {
            let src = std::fs::read_to_string(&p).unwrap();
            (p, src)
        })
        .collect()
}

pub fn compile_project(dir: &Path) -> Compilation {
    let files = model_files(dir);
    compile(&files, &FsLoader::new(dir)).unwrap_or_else(|d| panic!("{}: {:#?}", dir.display(), d))
}

pub fn qn(s: &str) -> msaforge::QualifiedName {
    s.parse().unwrap()
}
