//! Canonical pretty-printer. Output uses two-space indentation, one blank
//! line between declarations and keeps declaration order. Comments are not
//! preserved.

use std::fmt::Write;

use super::ast::*;
use super::lexer::escape;

pub fn format(unit: &ParseUnit) -> String {
    let mut out = String::new();
    if let Some(ns) = &unit.namespace {
        writeln!(out, "namespace {}", ns.name).unwrap();
    }
    if !unit.imports.is_empty() {
        out.push('\n');
        for import in &unit.imports {
            writeln!(
                out,
                "import {} as {}",
                escape(&import.path),
                import.alias.text
            )
            .unwrap();
        }
    }
    for decl in &unit.declarations {
        if !out.is_empty() {
            out.push('\n');
        }
        match decl {
            Decl::Structure(d) => structure(&mut out, d),
            Decl::List(d) => {
                writeln!(out, "list {} {{", d.name.text).unwrap();
                writeln!(out, "  element {}", type_expr(&d.element)).unwrap();
                out.push_str("}\n");
            }
            Decl::Microservice(d) => microservice(&mut out, d),
            Decl::Technology(d) => {
                writeln!(out, "technology {}: {}", d.name.text, d.kind.keyword()).unwrap();
            }
            Decl::Artifact(d) => artifact(&mut out, d),
            Decl::Container(d) => container(&mut out, d),
            Decl::Registration(d) => {
                writeln!(
                    out,
                    "{} {} registers {}",
                    d.kind.keyword(),
                    d.name.text,
                    names(&d.registered)
                )
                .unwrap();
            }
        }
    }
    out
}

fn names(refs: &[NameRef]) -> String {
    refs.iter()
        .map(|r| r.name.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

fn type_expr(ty: &TypeExpr) -> String {
    match ty {
        TypeExpr::Primitive(p, _) => p.keyword().to_string(),
        TypeExpr::Named { list: true, name } => format!("list {}", name.name),
        TypeExpr::Named { list: false, name } => name.name.to_string(),
    }
}

fn structure(out: &mut String, d: &StructureDecl) {
    if d.fields.is_empty() {
        writeln!(out, "structure {} {{\n}}", d.name.text).unwrap();
        return;
    }
    writeln!(out, "structure {} {{", d.name.text).unwrap();
    for f in &d.fields {
        writeln!(out, "  {}: {}", f.name.text, type_expr(&f.ty)).unwrap();
    }
    out.push_str("}\n");
}

fn parameter(p: &ParamDecl) -> String {
    let mut s = format!(
        "{} {} {}: {}",
        p.pattern.keyword(),
        p.comm_type.keyword(),
        p.name.text,
        type_expr(&p.ty)
    );
    if let Some(init) = &p.initialized_by {
        write!(s, " initialized by {}", init.name).unwrap();
    }
    s
}

fn microservice(out: &mut String, d: &MicroserviceDecl) {
    writeln!(out, "{} microservice {} {{", d.kind.keyword(), d.name.name).unwrap();
    let mut first = true;
    for iface in &d.interfaces {
        if !first {
            out.push('\n');
        }
        first = false;
        writeln!(out, "  interface {} {{", iface.name.text).unwrap();
        for op in &iface.operations {
            let params: Vec<String> = op.params.iter().map(parameter).collect();
            writeln!(
                out,
                "    {}operation {}({})",
                if op.not_implemented {
                    "not-implemented "
                } else {
                    ""
                },
                op.name.text,
                params.join(", ")
            )
            .unwrap();
        }
        out.push_str("  }\n");
    }
    for contract in &d.contracts {
        if !first {
            out.push('\n');
        }
        first = false;
        writeln!(out, "  contract {} {{", contract.name.text).unwrap();
        writeln!(out, "    provides {}", names(&contract.provides)).unwrap();
        if !contract.requires.is_empty() {
            writeln!(out, "    requires {}", names(&contract.requires)).unwrap();
        }
        out.push_str("  }\n");
    }
    out.push_str("}\n");
}

fn artifact(out: &mut String, d: &ArtifactDecl) {
    writeln!(out, "artifact {} {{", d.name.text).unwrap();
    writeln!(out, "  contracts {}", names(&d.contracts)).unwrap();
    for s in &d.services {
        writeln!(out, "  service {}", s.name).unwrap();
    }
    if let Some(lb) = &d.load_balancer {
        writeln!(out, "  load-balancer {}", lb.name).unwrap();
    }
    if let Some(cb) = &d.circuit_breaker {
        writeln!(out, "  circuit-breaker {}", cb.name).unwrap();
    }
    for e in &d.endpoints {
        write!(
            out,
            "  endpoint {} protocol {} format {}",
            escape(&e.address),
            e.protocol.name,
            e.format.name
        )
        .unwrap();
        let mut targets = Vec::new();
        if let Some(op) = &e.operation {
            targets.push(format!("operation {}", op.name));
        }
        if let Some(c) = &e.contract {
            targets.push(format!("contract {}", c.name));
        }
        if !targets.is_empty() {
            write!(out, " for {}", targets.join(", ")).unwrap();
        }
        out.push('\n');
    }
    out.push_str("}\n");
}

fn container(out: &mut String, d: &ContainerDecl) {
    writeln!(out, "container {} {{", d.name.text).unwrap();
    let env = &d.environment;
    writeln!(
        out,
        "  environment {} container {} service {}",
        escape(&env.image),
        names(&env.containers),
        names(&env.services)
    )
    .unwrap();
    if let Some((min, max)) = d.instances {
        writeln!(out, "  instances {min}..{max}").unwrap();
    }
    writeln!(out, "  deploys {}", names(&d.deploys)).unwrap();
    out.push_str("}\n");
}
