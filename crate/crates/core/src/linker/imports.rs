//! Import closure and ordering across model files.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::io;
use std::path::{Path, PathBuf};

use crate::diagnostic::{sort_diagnostics, Code, Diagnostic};
use crate::span::SourceSpan;
use crate::syntax::{parse_source, ParseUnit, Viewpoint};

/// Source text access for model files, addressed by normalized `/`-separated
/// paths.
pub trait SourceLoader {
    fn load(&self, path: &str) -> io::Result<String>;
}

/// Loads files from disk, resolving relative paths against `root`.
#[derive(Debug, Clone)]
pub struct FsLoader {
    root: PathBuf,
}

impl FsLoader {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        FsLoader { root: root.into() }
    }
}

impl SourceLoader for FsLoader {
    fn load(&self, path: &str) -> io::Result<String> {
        std::fs::read_to_string(self.root.join(Path::new(path)))
    }
}

/// In-memory file set, mostly for tests and tooling.
#[derive(Debug, Clone, Default)]
pub struct MemoryLoader {
    files: BTreeMap<String, String>,
}

impl MemoryLoader {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, path: &str, source: impl Into<String>) -> Self {
        self.insert(path, source);
        self
    }

    pub fn insert(&mut self, path: &str, source: impl Into<String>) {
        self.files.insert(normalize_path(path), source.into());
    }

    pub fn paths(&self) -> impl Iterator<Item = &str> {
        self.files.keys().map(String::as_str)
    }
}

impl<S: AsRef<str>> FromIterator<(S, String)> for MemoryLoader {
    fn from_iter<I: IntoIterator<Item = (S, String)>>(iter: I) -> Self {
        let mut loader = MemoryLoader::new();
        for (path, src) in iter {
            loader.insert(path.as_ref(), src);
        }
        loader
    }
}

impl SourceLoader for MemoryLoader {
    fn load(&self, path: &str) -> io::Result<String> {
        self.files
            .get(path)
            .cloned()
            .ok_or_else(|| io::Error::new(io::ErrorKind::NotFound, format!("{path}: not found")))
    }
}

/// Lexically normalizes a path: `/` separators, no `.` segments, `..`
/// folded where possible.
pub fn normalize_path(path: &str) -> String {
    let path = path.replace('\\', "/");
    let absolute = path.starts_with('/');
    let mut parts: Vec<&str> = Vec::new();
    for seg in path.split('/') {
        match seg {
            "" | "." => {}
            ".." => match parts.last() {
                Some(&last) if last != ".." => {
                    parts.pop();
                }
                _ if absolute => {}
                _ => parts.push(".."),
            },
            s => parts.push(s),
        }
    }
    let joined = parts.join("/");
    if absolute {
        format!("/{joined}")
    } else if joined.is_empty() {
        ".".to_string()
    } else {
        joined
    }
}

/// Resolves an import path written in `importer` to a normalized path.
pub fn resolve_import_path(importer: &str, import: &str) -> String {
    if import.starts_with('/') {
        return normalize_path(import);
    }
    match importer.rfind('/') {
        Some(i) => normalize_path(&format!("{}/{}", &importer[..i], import)),
        None => normalize_path(import),
    }
}

/// Files reachable from the entry files, with their parse results.
#[derive(Debug, Clone)]
pub struct ImportGraph {
    /// Sorted file paths.
    pub nodes: Vec<String>,
    /// Sorted `(importer, imported)` pairs.
    pub edges: Vec<(String, String)>,
    /// Imported files before their importers; ties broken by path.
    pub order: Vec<String>,
    pub units: BTreeMap<String, ParseUnit>,
}

impl ImportGraph {
    /// Parse units in topological order.
    pub fn ordered_units(&self) -> Vec<&ParseUnit> {
        self.order.iter().map(|p| &self.units[p]).collect()
    }
}

/// Loads and parses the transitive import closure of `entries`.
///
/// Fails with every parse, load, layering and cycle diagnostic found.
pub fn resolve_imports<S: AsRef<str>>(
    entries: &[S],
    loader: &dyn SourceLoader,
) -> Result<ImportGraph, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let mut units = BTreeMap::new();
    let mut edges = BTreeSet::new();
    let mut queue: VecDeque<(String, Option<SourceSpan>)> = entries
        .iter()
        .map(|e| normalize_path(e.as_ref()))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(|p| (p, None))
        .collect();
    let mut seen: BTreeSet<String> = queue.iter().map(|(p, _)| p.clone()).collect();

    while let Some((path, origin)) = queue.pop_front() {
        let at = || {
            origin
                .clone()
                .unwrap_or_else(|| SourceSpan::file_start(&path))
        };
        let Some(viewpoint) = Viewpoint::from_path(&path) else {
            diags.push(Diagnostic::new(
                Code::UnknownExtension,
                format!("`{path}` is not a .msad, .msas or .msao file"),
                at(),
            ));
            continue;
        };
        let source = match loader.load(&path) {
            Ok(s) => s,
            Err(e) => {
                diags.push(Diagnostic::new(
                    Code::FileNotFound,
                    format!("cannot read `{path}`: {e}"),
                    at(),
                ));
                continue;
            }
        };
        let unit = parse_source(&source, &path, viewpoint);
        diags.extend(unit.diagnostics.iter().cloned());
        for import in &unit.imports {
            let target = resolve_import_path(&path, &import.path);
            let span = import.span.get().clone();
            match Viewpoint::from_path(&target) {
                Some(tv) if !viewpoint.may_import(tv) => {
                    diags.push(Diagnostic::new(
                        Code::ViewpointLayerViolation,
                        format!("a {viewpoint} model may not import the {tv} model `{target}`"),
                        span,
                    ));
                    continue;
                }
                _ => {}
            }
            edges.insert((path.clone(), target.clone()));
            if seen.insert(target.clone()) {
                queue.push_back((target, Some(span)));
            }
        }
        units.insert(path, unit);
    }

    let edges: Vec<(String, String)> = edges
        .into_iter()
        .filter(|(a, b)| units.contains_key(a) && units.contains_key(b))
        .collect();
    let nodes: Vec<String> = units.keys().cloned().collect();
    diags.extend(import_cycles(&nodes, &edges, &units));

    if crate::diagnostic::has_errors(&diags) {
        sort_diagnostics(&mut diags);
        return Err(diags);
    }
    let order = topological_order(&nodes, &edges);
    Ok(ImportGraph {
        nodes,
        edges,
        order,
        units,
    })
}

fn adjacency(edges: &[(String, String)]) -> BTreeMap<&str, Vec<&str>> {
    let mut adj: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (a, b) in edges {
        adj.entry(a).or_default().push(b);
    }
    adj
}

/// One diagnostic per distinct cycle found by depth-first search.
fn import_cycles(
    nodes: &[String],
    edges: &[(String, String)],
    units: &BTreeMap<String, ParseUnit>,
) -> Vec<Diagnostic> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Unvisited,
        Active,
        Done,
    }
    fn visit<'a>(
        node: &'a str,
        adj: &BTreeMap<&'a str, Vec<&'a str>>,
        marks: &mut BTreeMap<&'a str, Mark>,
        stack: &mut Vec<&'a str>,
        cycles: &mut BTreeSet<Vec<String>>,
    ) {
        marks.insert(node, Mark::Active);
        stack.push(node);
        for &next in adj.get(node).map(Vec::as_slice).unwrap_or_default() {
            match marks.get(next).copied().unwrap_or(Mark::Unvisited) {
                Mark::Unvisited => visit(next, adj, marks, stack, cycles),
                Mark::Active => {
                    let from = stack
                        .iter()
                        .position(|&n| n == next)
                        .expect("active node on stack");
                    let mut cycle: Vec<String> =
                        stack[from..].iter().map(|s| s.to_string()).collect();
                    let min = cycle
                        .iter()
                        .enumerate()
                        .min_by(|a, b| a.1.cmp(b.1))
                        .map(|(i, _)| i)
                        .unwrap_or(0);
                    cycle.rotate_left(min);
                    cycles.insert(cycle);
                }
                Mark::Done => {}
            }
        }
        stack.pop();
        marks.insert(node, Mark::Done);
    }

    let adj = adjacency(edges);
    let mut marks = BTreeMap::new();
    let mut cycles = BTreeSet::new();
    for n in nodes {
        if marks.get(n.as_str()).copied().unwrap_or(Mark::Unvisited) == Mark::Unvisited {
            visit(n, &adj, &mut marks, &mut Vec::new(), &mut cycles);
        }
    }
    cycles
        .into_iter()
        .map(|cycle| {
            let first = &cycle[0];
            let next = cycle.get(1).unwrap_or(first);
            let span = units[first]
                .imports
                .iter()
                .find(|i| &resolve_import_path(first, &i.path) == next)
                .map(|i| i.span.get().clone())
                .unwrap_or_else(|| SourceSpan::file_start(first));
            let mut shown = cycle.clone();
            shown.push(first.clone());
            Diagnostic::new(
                Code::ImportCycle,
                format!("import cycle: {}", shown.join(" -> ")),
                span,
            )
        })
        .collect()
}

/// Kahn's algorithm; among ready files the lexicographically smallest goes
/// first.
fn topological_order(nodes: &[String], edges: &[(String, String)]) -> Vec<String> {
    let mut pending: BTreeMap<&str, usize> = nodes.iter().map(|n| (n.as_str(), 0)).collect();
    let mut importers: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (a, b) in edges {
        *pending
            .get_mut(a.as_str())
            .expect("edge endpoints are nodes") += 1;
        importers.entry(b).or_default().push(a);
    }
    let mut ready: BTreeSet<&str> = pending
        .iter()
        .filter(|(_, &n)| n == 0)
        .map(|(&k, _)| k)
        .collect();
    let mut order = Vec::with_capacity(nodes.len());
    while let Some(next) = ready.pop_first() {
        order.push(next.to_string());
        for &importer in importers.get(next).map(Vec::as_slice).unwrap_or_default() {
            let n = pending.get_mut(importer).expect("importer is a node");
            *n -= 1;
            if *n == 0 {
                ready.insert(importer);
            }
        }
    }
    order
}
