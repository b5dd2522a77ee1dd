//! Random generation of valid multi-file models, as DSL source text, for
//! property tests and benchmarks.

use std::fmt::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagnostic::Code;
use crate::linker::MemoryLoader;

/// Size knobs for [`generate_model`].
#[derive(Debug, Clone)]
pub struct GenConfig {
    pub max_structures: usize,
    pub max_services: usize,
    pub max_services_per_file: usize,
    pub max_operations: usize,
    pub max_parameters: usize,
    /// Probability that an eligible input parameter gets an initializer.
    pub initializer_rate: f64,
    /// Probability that a contract requires a given visible interface.
    pub requires_rate: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_structures: 4,
            max_services: 6,
            max_services_per_file: 3,
            max_operations: 3,
            max_parameters: 3,
            initializer_rate: 0.35,
            requires_rate: 0.3,
        }
    }
}

/// Generated sources plus counts recorded while generating.
#[derive(Debug, Clone)]
pub struct GeneratedModel {
    /// `(path, source)` pairs.
    pub files: Vec<(String, String)>,
    /// Files to pass as entry points (every file).
    pub entries: Vec<String>,
    pub requires_count: usize,
    pub initializer_count: usize,
}

impl GeneratedModel {
    pub fn loader(&self) -> MemoryLoader {
        self.files.iter().cloned().collect()
    }
}

const PRIMITIVES: [&str; 5] = ["boolean", "int", "float", "string", "date"];

#[derive(Clone)]
struct Op {
    service: usize,
    /// `(Interface, operation)` names.
    iface: String,
    name: String,
    not_implemented: bool,
    /// Types of output parameters, as written in the data file namespace.
    outputs: Vec<String>,
}

struct Svc {
    name: String,
    file: usize,
    interfaces: Vec<String>,
}

/// A valid model: no validation errors and no warnings. The returned
/// sources spread services over several files connected by imports.
pub fn generate_model(seed: u64, cfg: &GenConfig) -> GeneratedModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut files = Vec::new();

    // Data viewpoint: structures may nest earlier ones, so nesting is acyclic.
    let n_structs = rng.gen_range(1..=cfg.max_structures.max(1));
    let mut data = String::from("namespace gen.data\n");
    let mut types: Vec<String> = PRIMITIVES.iter().map(|p| p.to_string()).collect();
    for i in 0..n_structs {
        let _ = writeln!(data, "\nstructure S{i} {{");
        for f in 0..rng.gen_range(1..=3) {
            let ty = if i > 0 && rng.gen_bool(0.3) {
                format!("S{}", rng.gen_range(0..i))
            } else if i > 0 && rng.gen_bool(0.2) {
                format!("list L{}", rng.gen_range(0..i))
            } else {
                PRIMITIVES.choose(&mut rng).unwrap().to_string()
            };
            let _ = writeln!(data, "  f{f}: {ty}");
        }
        data.push_str("}\n");
        let elem = if rng.gen_bool(0.5) {
            format!("S{i}")
        } else {
            PRIMITIVES.choose(&mut rng).unwrap().to_string()
        };
        let _ = write!(data, "\nlist L{i} {{\n  element {elem}\n}}\n");
        types.push(format!("d.S{i}"));
        types.push(format!("list d.L{i}"));
    }
    files.push(("gen/data.msad".to_string(), data));

    // Service viewpoint.
    let n_services = rng.gen_range(1..=cfg.max_services.max(1));
    let mut services: Vec<Svc> = Vec::new();
    let mut file = 0;
    let mut in_file = 0;
    for s in 0..n_services {
        if in_file == cfg.max_services_per_file.max(1) || (in_file > 0 && rng.gen_bool(0.3)) {
            file += 1;
            in_file = 0;
        }
        in_file += 1;
        let interfaces = (0..rng.gen_range(1..=2)).map(|i| format!("I{i}")).collect();
        services.push(Svc {
            name: format!("Svc{s}"),
            file,
            interfaces,
        });
    }
    let n_files = file + 1;

    // Operations get a global order; initializers only point backwards,
    // which rules out initialization cycles.
    let mut ops: Vec<Op> = Vec::new();
    let mut op_params: Vec<Vec<String>> = Vec::new();
    let mut requires_count = 0;
    let mut initializer_count = 0;
    for (s, svc) in services.iter().enumerate() {
        for iface in &svc.interfaces {
            for o in 0..rng.gen_range(1..=cfg.max_operations.max(1)) {
                let not_implemented = rng.gen_bool(0.15);
                let mut params = Vec::new();
                let mut outputs = Vec::new();
                let n_params = if not_implemented {
                    rng.gen_range(0..=1)
                } else {
                    rng.gen_range(1..=cfg.max_parameters.max(1))
                };
                for p in 0..n_params {
                    let pattern = ["in", "out", "inout"].choose(&mut rng).unwrap();
                    let comm = if rng.gen_bool(0.7) { "sync" } else { "async" };
                    let mut ty = types.choose(&mut rng).unwrap().clone();
                    let mut init = None;
                    if *pattern != "out" && rng.gen_bool(cfg.initializer_rate) {
                        let sources: Vec<&Op> = ops
                            .iter()
                            .filter(|op| {
                                op.service != s
                                    && !op.not_implemented
                                    && !op.outputs.is_empty()
                                    && services[op.service].file <= svc.file
                            })
                            .collect();
                        if let Some(src) = sources.choose(&mut rng) {
                            ty = src.outputs.choose(&mut rng).unwrap().clone();
                            let target = op_ref(&services, src, svc.file, &mut rng);
                            init = Some(target);
                            initializer_count += 1;
                        }
                    }
                    if *pattern != "in" {
                        outputs.push(ty.clone());
                    }
                    let mut text = format!("{pattern} {comm} p{p}: {ty}");
                    if let Some(init) = init {
                        let _ = write!(text, " initialized by {init}");
                    }
                    params.push(text);
                }
                ops.push(Op {
                    service: s,
                    iface: iface.clone(),
                    name: format!("op{o}"),
                    not_implemented,
                    outputs,
                });
                op_params.push(params);
            }
        }
    }

    let mut contracts: Vec<Vec<String>> = vec![Vec::new(); services.len()];
    let mut service_src = vec![String::new(); n_files];
    for (f, src) in service_src.iter_mut().enumerate() {
        let _ = writeln!(src, "namespace gen.f{f}\n");
        let _ = writeln!(src, "import \"data.msad\" as d");
        for g in 0..f {
            let _ = writeln!(src, "import \"svc{g}.msas\" as f{g}");
        }
    }
    for (s, svc) in services.iter().enumerate() {
        let src = &mut service_src[svc.file];
        let kind = if rng.gen_bool(0.8) {
            "functional"
        } else {
            "infrastructure"
        };
        let _ = writeln!(src, "\n{kind} microservice {} {{", svc.name);
        for iface in &svc.interfaces {
            let _ = writeln!(src, "  interface {iface} {{");
            for (op, params) in ops.iter().zip(&op_params) {
                if op.service == s && op.iface == *iface {
                    let ni = if op.not_implemented {
                        "not-implemented "
                    } else {
                        ""
                    };
                    let _ = writeln!(src, "    {ni}operation {}({})", op.name, params.join(", "));
                }
            }
            src.push_str("  }\n");
        }
        if rng.gen_bool(0.8) {
            let provides: Vec<&String> = svc.interfaces.iter().collect();
            let mut requires = Vec::new();
            for (t, other) in services.iter().enumerate() {
                if t == s || other.file > svc.file {
                    continue;
                }
                for iface in &other.interfaces {
                    if rng.gen_bool(cfg.requires_rate) {
                        requires.push(iface_ref(other, iface, svc.file, &mut rng));
                    }
                }
            }
            requires_count += requires.len();
            let _ = writeln!(src, "  contract C0 {{");
            let _ = writeln!(
                src,
                "    provides {}",
                provides
                    .iter()
                    .map(|s| s.as_str())
                    .collect::<Vec<_>>()
                    .join(", ")
            );
            if !requires.is_empty() {
                let _ = writeln!(src, "    requires {}", requires.join(", "));
            }
            src.push_str("  }\n");
            contracts[s].push("C0".to_string());
        }
        src.push_str("}\n");
    }
    for (f, src) in service_src.into_iter().enumerate() {
        files.push((format!("gen/svc{f}.msas"), src));
    }

    // Operation viewpoint.
    let mut ops_src = String::from("namespace gen.ops\n\n");
    for f in 0..n_files {
        let _ = writeln!(ops_src, "import \"svc{f}.msas\" as f{f}");
    }
    ops_src.push_str(
        "\ntechnology java-spring: service\n\ntechnology nodejs: service\n\n\
         technology docker: container\n\ntechnology rest: protocol\n\n\
         technology amqp: protocol\n\ntechnology json: message-format\n\n\
         technology ribbon: load-balancer\n\ntechnology hystrix: circuit-breaker\n",
    );
    let mut artifacts = Vec::new();
    let mut port = 8000;
    for (s, svc) in services.iter().enumerate() {
        if contracts[s].is_empty() {
            continue;
        }
        let art = format!("{}Artifact", svc.name);
        let tech = if rng.gen_bool(0.5) {
            "java-spring"
        } else {
            "nodejs"
        };
        let _ = writeln!(ops_src, "\nartifact {art} {{");
        let _ = writeln!(ops_src, "  contracts f{}.{}.C0", svc.file, svc.name);
        let _ = writeln!(ops_src, "  service {tech}");
        if rng.gen_bool(0.5) {
            ops_src.push_str("  load-balancer ribbon\n");
        }
        if rng.gen_bool(0.5) {
            ops_src.push_str("  circuit-breaker hystrix\n");
        }
        port += 1;
        let host = svc.name.to_ascii_lowercase();
        let _ = writeln!(
            ops_src,
            "  endpoint \"http://{host}:{port}/\" protocol rest format json for contract f{}.{}.C0",
            svc.file, svc.name
        );
        for (k, op) in ops.iter().filter(|o| o.service == s).enumerate() {
            if rng.gen_bool(0.3) {
                let _ = writeln!(
                    ops_src,
                    "  endpoint \"http://{host}:{port}/{k}\" protocol rest format json for operation f{}.{}.{}.{}",
                    svc.file, svc.name, op.iface, op.name
                );
            }
        }
        ops_src.push_str("}\n");
        artifacts.push((art, tech));
    }
    for (i, chunk) in artifacts.chunks(2).enumerate() {
        let (min, max) = (rng.gen_range(1..=3), rng.gen_range(3..=6));
        let names: Vec<&str> = chunk.iter().map(|(a, _)| a.as_str()).collect();
        let _ = writeln!(
            ops_src,
            "\ncontainer Box{i} {{\n  environment \"openjdk\" container docker service java-spring, nodejs\n  instances {min}..{max}\n  deploys {}\n}}",
            names.join(", ")
        );
    }
    if !artifacts.is_empty() {
        let names: Vec<&str> = artifacts.iter().map(|(a, _)| a.as_str()).collect();
        let _ = writeln!(
            ops_src,
            "\nservice-discovery registry registers {}",
            names.join(", ")
        );
        let public: Vec<&str> = names
            .iter()
            .copied()
            .filter(|_| rng.gen_bool(0.4))
            .collect();
        if !public.is_empty() {
            let _ = writeln!(
                ops_src,
                "\napi-gateway gateway registers {}",
                public.join(", ")
            );
        }
    }
    files.push(("gen/ops.msao".to_string(), ops_src));

    let entries = files.iter().map(|(p, _)| p.clone()).collect();
    GeneratedModel {
        files,
        entries,
        requires_count,
        initializer_count,
    }
}

/// Writes a reference to an interface as seen from file `from`, using one of
/// the equivalent spellings.
fn iface_ref(svc: &Svc, iface: &str, from: usize, rng: &mut impl Rng) -> String {
    if svc.file == from {
        match rng.gen_range(0..2) {
            0 => format!("{}.{iface}", svc.name),
            _ => format!("gen.f{from}.{}.{iface}", svc.name),
        }
    } else {
        match rng.gen_range(0..2) {
            0 => format!("f{}.{}.{iface}", svc.file, svc.name),
            _ => format!("gen.f{}.{}.{iface}", svc.file, svc.name),
        }
    }
}

fn op_ref(services: &[Svc], op: &Op, from: usize, rng: &mut impl Rng) -> String {
    let svc = &services[op.service];
    format!("{}.{}", iface_ref(svc, &op.iface, from, rng), op.name)
}

/// A model with one single-operation service per node and an initializer
/// for each edge `(from, to)`: a parameter of node `from` is initialized by
/// the operation of node `to`.
pub fn initializer_model(nodes: usize, edges: &[(usize, usize)]) -> GeneratedModel {
    let mut src = String::from("namespace gen.pdid\n");
    for i in 0..nodes {
        let mut params = vec!["out sync r: int".to_string()];
        for (k, &(_, to)) in edges.iter().enumerate().filter(|(_, e)| e.0 == i) {
            params.push(format!("in sync p{k}: int initialized by N{to}.I.op"));
        }
        let _ = write!(
            src,
            "\nfunctional microservice N{i} {{\n  interface I {{\n    operation op({})\n  }}\n}}\n",
            params.join(", ")
        );
    }
    let path = "pdid.msas".to_string();
    GeneratedModel {
        files: vec![(path.clone(), src)],
        entries: vec![path],
        requires_count: 0,
        initializer_count: edges.len(),
    }
}

/// The shop demo model shipped in the repository's `demo/` directory.
pub const DEMO: &[(&str, &str)] = &[
    ("shop.msad", include_str!("../../../demo/shop.msad")),
    ("pricing.msas", include_str!("../../../demo/pricing.msas")),
    ("payment.msas", include_str!("../../../demo/payment.msas")),
    ("checkout.msas", include_str!("../../../demo/checkout.msas")),
    (
        "deployment.msao",
        include_str!("../../../demo/deployment.msao"),
    ),
];

pub fn demo_loader() -> MemoryLoader {
    DEMO.iter().map(|(p, s)| (*p, s.to_string())).collect()
}

pub fn demo_entries() -> Vec<String> {
    DEMO.iter().map(|(p, _)| p.to_string()).collect()
}

/// A textual edit of one demo file that breaks exactly one validation rule.
#[derive(Debug, Clone)]
pub struct Mutation {
    pub code: Code,
    pub file: &'static str,
    /// `(find, replace)` pairs, each applied to the first occurrence.
    pub edits: Vec<(&'static str, &'static str)>,
}

impl Mutation {
    /// Demo sources with the edit applied.
    pub fn apply(&self) -> MemoryLoader {
        let mut loader = demo_loader();
        let (_, src) = DEMO
            .iter()
            .find(|(p, _)| *p == self.file)
            .expect("demo file");
        let mut src = src.to_string();
        for (find, replace) in &self.edits {
            assert!(src.contains(find), "{}: `{find}` not found", self.file);
            src = src.replacen(find, replace, 1);
        }
        loader.insert(self.file, src);
        loader
    }
}

/// One mutation per validator rule.
pub fn rule_mutations() -> Vec<Mutation> {
    let m = |code, file, find, replace| Mutation {
        code,
        file,
        edits: vec![(find, replace)],
    };
    vec![
        m(Code::DuplicateFieldName, "shop.msad", "  name: string\n", "  name: string\n  name: int\n"),
        m(Code::EmptyDataObject, "shop.msad", "structure Price {", "structure Empty {\n}\n\nstructure Price {"),
        m(Code::RecursiveDataObject, "shop.msad", "  email: string\n", "  email: string\n  referrer: Customer\n"),
        m(
            Code::ServiceWithoutInterfaces,
            "pricing.msas",
            "infrastructure microservice PricingService {",
            "functional microservice AuditService {\n}\n\ninfrastructure microservice PricingService {",
        ),
        m(
            Code::InterfaceWithoutOperations,
            "pricing.msas",
            "  interface Pricing {",
            "  interface Admin {\n  }\n\n  interface Pricing {",
        ),
        m(Code::ProvidesForeignInterface, "checkout.msas", "provides Orders", "provides Orders, pay.PaymentService.Payment"),
        m(
            Code::RequiresOwnInterface,
            "checkout.msas",
            "requires pay.PaymentService.Payment",
            "requires pay.PaymentService.Payment, CheckoutService.Orders",
        ),
        m(
            Code::InitializerSameService,
            "payment.msas",
            "refund(in async orderId: int)",
            "refund(in async orderId: int, in sync original: Payment initialized by Payment.pay)",
        ),
        m(
            Code::InitializedOutput,
            "checkout.msas",
            "out async confirmation: data.Order)",
            "out async confirmation: data.Order, out sync total: Price initialized by PricingService.Pricing.quote)",
        ),
        m(Code::InitializerNotImplemented, "pricing.msas", "    operation quote(", "    not-implemented operation quote("),
        Mutation {
            code: Code::InitializationCycle,
            file: "checkout.msas",
            edits: vec![
                (
                    "out async confirmation: data.Order)",
                    "out async confirmation: data.Order, in sync bonus: Order initialized by LoyaltyService.Points.award)",
                ),
                (
                    "    requires pay.PaymentService.Payment\n  }\n}\n",
                    "    requires pay.PaymentService.Payment\n  }\n}\n\nfunctional microservice LoyaltyService {\n  \
                     interface Points {\n    operation award(in sync order: Order initialized by \
                     CheckoutService.Orders.placeOrder, out sync bonus: Order)\n  }\n}\n",
                ),
            ],
        },
        m(Code::OperationWithoutParameters, "pricing.msas", "    operation quote(", "    operation ping()\n    operation quote("),
        m(
            Code::InitializerTypeUnclear,
            "checkout.msas",
            "out async confirmation: data.Order)",
            "out async confirmation: data.Order, in sync discount: float initialized by PricingService.Pricing.quote)",
        ),
        m(
            Code::ServiceTechnologyCount,
            "deployment.msao",
            "contracts pricing.PricingService.PricingApi\n  service java-spring\n",
            "contracts pricing.PricingService.PricingApi\n  service java-spring\n  service nodejs\n",
        ),
        m(
            Code::MixedArtifactContracts,
            "deployment.msao",
            "contracts shop.CheckoutService.CheckoutApi",
            "contracts shop.CheckoutService.CheckoutApi, shop.PricingService.PricingApi",
        ),
        m(Code::InstanceBounds, "deployment.msao", "instances 1..5", "instances 5..2"),
        m(
            Code::UnsupportedServiceTechnology,
            "deployment.msao",
            "environment \"openjdk\" container docker service java-spring\n  deploys PricingArtifact",
            "environment \"openjdk\" container docker service nodejs\n  deploys PricingArtifact",
        ),
        m(
            Code::EndpointTarget,
            "deployment.msao",
            "for contract shop.CheckoutService.CheckoutApi",
            "for operation checkout.CheckoutService.Orders.placeOrder, contract shop.CheckoutService.CheckoutApi",
        ),
        m(
            Code::TechnologyKind,
            "deployment.msao",
            "\"http://pricing:8082/quote\" protocol rest",
            "\"http://pricing:8082/quote\" protocol json",
        ),
        m(Code::DuplicateEndpoint, "deployment.msao", "http://payments:8081/payments", "http://checkout:8080/orders"),
        m(
            Code::EndpointOutsideArtifact,
            "deployment.msao",
            "for operation pricing.PricingService.Pricing.quote",
            "for operation payment.PaymentService.Payment.refund",
        ),
        m(
            Code::UndeployedService,
            "pricing.msas",
            "infrastructure microservice PricingService {",
            "functional microservice AuditService {\n  interface Audit {\n    operation record(in async entry: string)\n  }\n\n  \
             contract AuditApi {\n    provides Audit\n  }\n}\n\ninfrastructure microservice PricingService {",
        ),
        m(
            Code::UndiscoverableArtifact,
            "deployment.msao",
            "registers CheckoutArtifact, PaymentArtifact, PricingArtifact",
            "registers CheckoutArtifact, PaymentArtifact",
        ),
    ]
}
