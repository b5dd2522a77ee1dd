use std::collections::BTreeSet;
use std::fmt::Write;

use super::{refuse_invalid, CodegenError, GenerationWarning};
use crate::model::{Model, RegistrationKind};

pub const MANIFEST_FILE: &str = "compose.yaml";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub text: String,
    pub warnings: Vec<GenerationWarning>,
}

/// Port of a `[scheme://]host:port[/path]` address.
pub fn parse_port(address: &str) -> Option<u16> {
    let rest = address.split_once("://").map_or(address, |(_, r)| r);
    let authority = rest.split('/').next()?;
    let (host, port) = authority.rsplit_once(':')?;
    if host.is_empty() || port.is_empty() || !port.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    port.parse().ok()
}

/// Renders a YAML scalar, quoting anything that is not plainly a name.
fn scalar(s: &str) -> String {
    const RESERVED: &[&str] = &["true", "false", "yes", "no", "on", "off", "null", "y", "n"];
    let plain = s.starts_with(|c: char| c.is_ascii_alphabetic())
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.' | '/'))
        && !RESERVED.contains(&s.to_ascii_lowercase().as_str());
    if plain {
        s.to_string()
    } else {
        serde_json::to_string(s).expect("strings always serialize")
    }
}

fn list(out: &mut String, key: &str, items: &BTreeSet<String>) {
    if items.is_empty() {
        return;
    }
    let _ = writeln!(out, "    {key}:");
    for item in items {
        let _ = writeln!(out, "      - {}", scalar(item));
    }
}

/// A Compose-style manifest with one service per container, sorted by
/// container name.
pub fn gen_deployment_manifest(model: &Model) -> Result<Manifest, CodegenError> {
    refuse_invalid(model)?;
    let mut warnings = Vec::new();
    let mut containers: Vec<_> = model.containers.iter().collect();
    containers.sort_by(|a, b| a.name.cmp(&b.name));

    let mut out = String::from("version: \"3.8\"\n");
    if containers.is_empty() {
        out.push_str("services: {}\n");
        return Ok(Manifest {
            text: out,
            warnings,
        });
    }
    out.push_str("services:\n");
    for c in containers {
        let artifacts: Vec<_> = c
            .deploys
            .iter()
            .filter_map(|d| model.artifact(&d.name))
            .collect();
        let mut ports = BTreeSet::new();
        let mut balancers = BTreeSet::new();
        let mut breakers = BTreeSet::new();
        for a in &artifacts {
            for e in &a.endpoints {
                match parse_port(&e.address) {
                    Some(p) => {
                        ports.insert(p);
                    }
                    None => warnings.push(GenerationWarning::AddressUnparsable {
                        container: c.name.to_string(),
                        address: e.address.clone(),
                    }),
                }
            }
            if let Some(lb) = &a.load_balancer {
                balancers.insert(lb.name.to_string());
            }
            if let Some(cb) = &a.circuit_breaker {
                breakers.insert(cb.name.to_string());
            }
        }
        let registered_by = |kind: RegistrationKind| -> BTreeSet<String> {
            model
                .registrations
                .iter()
                .filter(|r| r.kind == kind)
                .filter(|r| {
                    r.registered
                        .iter()
                        .any(|a| c.deploys.iter().any(|d| d.name == a.name))
                })
                .map(|r| r.name.to_string())
                .collect()
        };

        let _ = writeln!(out, "  {}:", scalar(&c.name.to_string()));
        let _ = writeln!(out, "    image: {}", scalar(&c.environment.name));
        out.push_str("    deploy:\n");
        let _ = writeln!(out, "      replicas: {}", c.min_instances);
        let _ = writeln!(out, "    x-msa-max-instances: {}", c.max_instances);
        if !ports.is_empty() {
            out.push_str("    ports:\n");
            for p in &ports {
                let _ = writeln!(out, "      - \"{p}:{p}\"");
            }
        }
        if !balancers.is_empty() || !breakers.is_empty() {
            out.push_str("    labels:\n");
            let joined = |s: &BTreeSet<String>| s.iter().cloned().collect::<Vec<_>>().join(",");
            if !breakers.is_empty() {
                let _ = writeln!(
                    out,
                    "      msa.circuit-breaker: {}",
                    scalar(&joined(&breakers))
                );
            }
            if !balancers.is_empty() {
                let _ = writeln!(
                    out,
                    "      msa.load-balancer: {}",
                    scalar(&joined(&balancers))
                );
            }
        }
        list(
            &mut out,
            "x-msa-discovery",
            &registered_by(RegistrationKind::ServiceDiscovery),
        );
        list(
            &mut out,
            "x-msa-gateway",
            &registered_by(RegistrationKind::ApiGateway),
        );
    }
    Ok(Manifest {
        text: out,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ports() {
        assert_eq!(parse_port("http://checkout:8080/orders"), Some(8080));
        assert_eq!(parse_port("checkout:80"), Some(80));
        assert_eq!(parse_port("amqp://broker:5672"), Some(5672));
        assert_eq!(parse_port("http://checkout/orders"), None);
        assert_eq!(parse_port(":8080"), None);
        assert_eq!(parse_port("host:99999"), None);
        assert_eq!(parse_port("host:80a"), None);
    }

    #[test]
    fn scalars() {
        assert_eq!(scalar("openjdk"), "openjdk");
        assert_eq!(scalar("shop.CheckoutBox"), "shop.CheckoutBox");
        assert_eq!(scalar("openjdk:17"), "\"openjdk:17\"");
        assert_eq!(scalar("yes"), "\"yes\"");
        assert_eq!(scalar("1abc"), "\"1abc\"");
        assert_eq!(scalar(""), "\"\"");
    }
}
