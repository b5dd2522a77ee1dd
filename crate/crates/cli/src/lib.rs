//! The `msaforge` command line: check, graph, generate and fmt over model
//! files.

mod config;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use msaforge::analyze::{coupling_metrics, dependency_graph, detect_cycles, export_dot};
use msaforge::codegen::{self, CodegenError, GenerationRequest, Target};
use msaforge::diagnostic::{has_errors, sort_diagnostics, Diagnostic, Severity};
use msaforge::linker::normalize_path;
use msaforge::model::to_canonical_json;
use msaforge::syntax::{self, lex, parse_file, TokenKind, Viewpoint};
use msaforge::{Compilation, FsLoader};

pub use config::{Config, CONFIG_FILE};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "msaforge",
    version,
    about = "Check, analyze and generate from microservice architecture models"
)]
struct Cli {
    /// Machine-readable JSON output on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Treat validation warnings as failures.
    #[arg(long, global = true)]
    fail_on_warning: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse, link and validate models.
    Check(Files),
    /// Print the service interaction graph (DOT by default).
    Graph {
        #[command(flatten)]
        files: Files,
        /// Graphviz output (the default).
        #[arg(long, conflicts_with = "json")]
        dot: bool,
    },
    /// Generate interface descriptors or a deployment manifest.
    Generate {
        #[command(flatten)]
        files: Files,
        #[arg(long, value_enum)]
        target: TargetArg,
        /// Output directory (default `out`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Replace existing output files.
        #[arg(long)]
        overwrite: bool,
    },
    /// Print model files in canonical layout.
    Fmt {
        #[command(flatten)]
        files: Files,
        /// Rewrite files in place.
        #[arg(long, conflicts_with = "check")]
        write: bool,
        /// List files that are not in canonical layout.
        #[arg(long)]
        check: bool,
    },
}

#[derive(Debug, Args)]
struct Files {
    /// Model files (.msad, .msas, .msao); imports are followed.
    files: Vec<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TargetArg {
    Interfaces,
    Deployment,
}

struct Ctx<'a> {
    cwd: &'a Path,
    color: bool,
    json: bool,
    fail_on_warning: bool,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

/// Runs the command line `args` (program name first) in directory `cwd` and
/// returns the process exit code.
pub fn run<I, T>(args: I, cwd: &Path, color: bool, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_IO
                }
            };
        }
    };
    let config = match Config::load(cwd) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            return EXIT_IO;
        }
    };
    let mut ctx = Ctx {
        cwd,
        color,
        json: cli.json || config.json,
        fail_on_warning: cli.fail_on_warning || config.fail_on_warning,
        out,
        err,
    };
    let result = match cli.command {
        Command::Check(files) => {
            entries(&files, &config, &mut ctx).and_then(|f| check(&f, &mut ctx))
        }
        Command::Graph { files, .. } => {
            entries(&files, &config, &mut ctx).and_then(|f| graph(&f, &mut ctx))
        }
        Command::Generate {
            files,
            target,
            out,
            overwrite,
        } => entries(&files, &config, &mut ctx).and_then(|f| {
            let dir = out
                .or_else(|| config.output_dir.clone())
                .unwrap_or_else(|| PathBuf::from("out"));
            let target = match target {
                TargetArg::Interfaces => Target::InterfaceDescriptors,
                TargetArg::Deployment => Target::DeploymentManifest,
            };
            generate(&f, target, &dir, overwrite, &mut ctx)
        }),
        Command::Fmt {
            files,
            write,
            check,
        } => entries(&files, &config, &mut ctx).and_then(|f| fmt(&f, write, check, &mut ctx)),
    };
    result.unwrap_or_else(|code| code)
}

type Exit = Result<i32, i32>;

/// Entry files from the command line, else from the config file. Every
/// entry must have a model extension and exist.
fn entries(files: &Files, config: &Config, ctx: &mut Ctx) -> Result<Vec<String>, i32> {
    let list = if files.files.is_empty() {
        config.entry_files.clone()
    } else {
        files.files.clone()
    };
    if list.is_empty() {
        let _ = writeln!(
            ctx.err,
            "error: no model files given\n\nUsage: msaforge [OPTIONS] <COMMAND> <FILES>..."
        );
        return Err(EXIT_IO);
    }
    let mut out = Vec::new();
    for f in list {
        if Viewpoint::from_path(&f).is_none() {
            let _ = writeln!(ctx.err, "error: {f}: not a .msad, .msas or .msao file");
            return Err(EXIT_IO);
        }
        if !ctx.cwd.join(&f).is_file() {
            let _ = writeln!(ctx.err, "error: {f}: no such file");
            return Err(EXIT_IO);
        }
        out.push(normalize_path(&f));
    }
    out.sort();
    out.dedup();
    Ok(out)
}

fn paint(ctx: &Ctx, severity: Severity, text: &str) -> String {
    if !ctx.color {
        return text.to_string();
    }
    let code = match severity {
        Severity::Error => "31",
        Severity::Warning => "33",
    };
    format!("\x1b[1;{code}m{text}\x1b[0m")
}

fn render(ctx: &Ctx, d: &Diagnostic) -> String {
    let tag = format!("{}[{}]", d.severity, d.code);
    format!("{}: {} {}", d.span, paint(ctx, d.severity, &tag), d.message)
}

fn summary(diags: &[Diagnostic], files: usize) -> Value {
    let errors = diags.iter().filter(|d| d.is_error()).count();
    json!({
        "errors": errors,
        "warnings": diags.len() - errors,
        "files": files,
    })
}

/// Prints a JSON document carrying the diagnostics, a summary and `extra`.
fn emit_json(ctx: &mut Ctx, diags: &[Diagnostic], files: usize, extra: Value) {
    let mut doc = json!({
        "diagnostics": diags.iter().map(Diagnostic::to_json).collect::<Vec<_>>(),
        "summary": summary(diags, files),
    });
    if let (Value::Object(doc), Value::Object(extra)) = (&mut doc, extra) {
        doc.extend(extra);
    }
    let _ = write!(ctx.out, "{}", to_canonical_json(doc));
}

fn emit_human(ctx: &mut Ctx, diags: &[Diagnostic]) {
    for d in diags {
        let line = render(ctx, d);
        let _ = writeln!(ctx.err, "{line}");
    }
}

/// Parses, links and validates. On failure the diagnostics are already
/// reported and the exit code is returned.
fn load(files: &[String], ctx: &mut Ctx) -> Result<(Compilation, usize), i32> {
    let loader = FsLoader::new(ctx.cwd);
    let (n_files, diags) = match msaforge::resolve_imports(files, &loader) {
        Ok(g) => {
            let n = g.nodes.len();
            match msaforge::link(&g.ordered_units()) {
                Ok(model) => {
                    let diagnostics = msaforge::validate(&model);
                    return Ok((Compilation { model, diagnostics }, n));
                }
                Err(d) => (n, d),
            }
        }
        Err(d) => (files.len(), d),
    };
    if ctx.json {
        emit_json(ctx, &diags, n_files, json!({}));
    } else {
        emit_human(ctx, &diags);
    }
    Err(EXIT_PARSE)
}

/// Exit code implied by validation findings alone.
fn validation_code(ctx: &Ctx, diags: &[Diagnostic]) -> i32 {
    if has_errors(diags) || (ctx.fail_on_warning && !diags.is_empty()) {
        EXIT_INVALID
    } else {
        EXIT_OK
    }
}

fn check(files: &[String], ctx: &mut Ctx) -> Exit {
    let (c, n) = load(files, ctx)?;
    if ctx.json {
        emit_json(ctx, &c.diagnostics, n, json!({}));
    } else {
        emit_human(ctx, &c.diagnostics);
    }
    Ok(validation_code(ctx, &c.diagnostics))
}

/// Reports validation findings and stops unless the model is fit for
/// analysis or generation.
fn require_valid(c: &Compilation, n: usize, ctx: &mut Ctx) -> Result<(), i32> {
    let code = validation_code(ctx, &c.diagnostics);
    if code != EXIT_OK {
        if ctx.json {
            emit_json(ctx, &c.diagnostics, n, json!({}));
        } else {
            emit_human(ctx, &c.diagnostics);
        }
        return Err(code);
    }
    Ok(())
}

fn graph(files: &[String], ctx: &mut Ctx) -> Exit {
    let (c, n) = load(files, ctx)?;
    require_valid(&c, n, ctx)?;
    let g = dependency_graph(&c.model);
    if ctx.json {
        let cycles = detect_cycles(&g);
        let metrics = coupling_metrics(&g);
        let graph: Value = serde_json::from_str(&msaforge::analyze::export_json(&g))
            .expect("graph export is valid JSON");
        let mut extra = graph;
        extra["cycles"] = json!(cycles
            .cycles
            .iter()
            .map(|c| c.iter().map(ToString::to_string).collect::<Vec<_>>())
            .collect::<Vec<_>>());
        extra["cyclesTruncated"] = json!(cycles.truncated);
        extra["metrics"] = json!(metrics
            .nodes
            .iter()
            .map(|(k, v)| (k.to_string(), json!(v)))
            .collect::<BTreeMap<_, _>>());
        emit_json(ctx, &c.diagnostics, n, extra);
    } else {
        emit_human(ctx, &c.diagnostics);
        let _ = write!(ctx.out, "{}", export_dot(&g));
    }
    Ok(EXIT_OK)
}

fn generate(files: &[String], target: Target, dir: &Path, overwrite: bool, ctx: &mut Ctx) -> Exit {
    let (c, n) = load(files, ctx)?;
    require_valid(&c, n, ctx)?;
    let request = GenerationRequest {
        target,
        output_dir: ctx.cwd.join(dir),
        overwrite,
    };
    let report = match codegen::generate(&c.model, &request) {
        Ok(r) => r,
        Err(e) => {
            let msg = match &e {
                CodegenError::OutputConflict(p) => {
                    let rel = p.strip_prefix(ctx.cwd).unwrap_or(p);
                    format!(
                        "{} already exists; pass --overwrite to replace it",
                        rel.display()
                    )
                }
                _ => e.to_string(),
            };
            let _ = writeln!(ctx.err, "error: {msg}");
            return Err(match e {
                CodegenError::GenerationRefused(_) => EXIT_INVALID,
                CodegenError::OutputConflict(_) | CodegenError::Io { .. } => EXIT_IO,
            });
        }
    };
    // Report paths as given, relative to the working directory.
    let written: Vec<String> = report
        .written
        .iter()
        .map(|p| {
            let rel = p.strip_prefix(ctx.cwd).unwrap_or(p);
            normalize_path(&rel.to_string_lossy())
        })
        .collect();
    let warnings: Vec<String> = report.warnings.iter().map(ToString::to_string).collect();
    if ctx.json {
        emit_json(
            ctx,
            &c.diagnostics,
            n,
            json!({ "written": written, "warnings": warnings }),
        );
    } else {
        emit_human(ctx, &c.diagnostics);
        for w in &warnings {
            let tag = paint(ctx, Severity::Warning, "warning");
            let _ = writeln!(ctx.err, "{tag}: {w}");
        }
        for p in &written {
            let _ = writeln!(ctx.out, "wrote {p}");
        }
    }
    Ok(EXIT_OK)
}

fn has_comments(source: &str, file: &str) -> bool {
    lex(source, file)
        .0
        .iter()
        .any(|t| t.kind == TokenKind::Comment)
}

fn fmt(files: &[String], write: bool, check: bool, ctx: &mut Ctx) -> Exit {
    let mut diags = Vec::new();
    let mut formatted = Vec::new();
    for f in files {
        let path = ctx.cwd.join(f);
        let source = match std::fs::read_to_string(&path) {
            Ok(s) => s,
            Err(e) => {
                let _ = writeln!(ctx.err, "error: {f}: {e}");
                return Err(EXIT_IO);
            }
        };
        match parse_file(&source, f) {
            Ok(unit) if unit.has_errors() => diags.extend(unit.diagnostics),
            Ok(unit) => formatted.push((f, path, source, syntax::format(&unit))),
            Err(d) => diags.push(d),
        }
    }
    if !diags.is_empty() {
        sort_diagnostics(&mut diags);
        if ctx.json {
            emit_json(ctx, &diags, files.len(), json!({}));
        } else {
            emit_human(ctx, &diags);
        }
        return Err(EXIT_PARSE);
    }

    let changed: Vec<&String> = formatted
        .iter()
        .filter(|(_, _, src, text)| src != text)
        .map(|(f, ..)| *f)
        .collect();
    let mut code = EXIT_OK;
    let mut skipped = Vec::new();
    if write {
        for (f, path, src, text) in &formatted {
            if src == text {
                continue;
            }
            if has_comments(src, f) {
                // Comments are not kept by the formatter; leave such files alone.
                skipped.push(f.to_string());
                code = EXIT_INVALID;
                continue;
            }
            if let Err(e) = std::fs::write(path, text) {
                let _ = writeln!(ctx.err, "error: {f}: {e}");
                return Err(EXIT_IO);
            }
        }
    } else if check && !changed.is_empty() {
        code = EXIT_INVALID;
    }

    if ctx.json {
        let extra = json!({
            "unformatted": changed,
            "skipped": skipped,
        });
        emit_json(ctx, &[], files.len(), extra);
    } else if write {
        for f in &skipped {
            let _ = writeln!(
                ctx.err,
                "{f}: contains comments, which formatting would drop; not rewritten"
            );
        }
    } else if check {
        for f in &changed {
            let _ = writeln!(ctx.out, "{f}");
        }
    } else {
        for (i, (_, _, _, text)) in formatted.iter().enumerate() {
            if i > 0 {
                let _ = writeln!(ctx.out);
            }
            let _ = write!(ctx.out, "{text}");
        }
    }
    Ok(code)
}
