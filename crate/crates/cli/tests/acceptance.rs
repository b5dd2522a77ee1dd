//! Acceptance suite: one PASS/FAIL line per criterion.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use msaforge::analyze::{
    coupling_metrics, dependency_graph, detect_cycles, DependencyKind, Edge, InteractionGraph,
    Witness,
};
use msaforge::diagnostic::Code;
use msaforge::model::{
    canonical_deserialize, canonical_serialize, structural_equals, QualifiedName,
};
use msaforge::syntax::{format, parse_file};
use msaforge::testkit::{
    demo_entries, demo_loader, generate_model, initializer_model, rule_mutations, GenConfig, DEMO,
};
use msaforge::{compile, Model};
use msaforge_cli::{run, EXIT_OK};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn demo() -> Model {
    compile(&demo_entries(), &demo_loader())
        .expect("demo links")
        .model
}

fn workspace() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn demo_dir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().expect("temp dir");
    for (path, src) in DEMO {
        std::fs::write(dir.path().join(path), src).expect("write demo");
    }
    dir
}

struct Run {
    code: i32,
    stdout: Vec<u8>,
    stderr: Vec<u8>,
}

fn cli(dir: &Path, args: &[&str]) -> Run {
    let (mut stdout, mut stderr) = (Vec::new(), Vec::new());
    let argv = std::iter::once("msaforge").chain(args.iter().copied());
    let code = run(argv, dir, false, &mut stdout, &mut stderr);
    Run {
        code,
        stdout,
        stderr,
    }
}

/// Every metamodel concept occurs in the demo's canonical document.
fn metamodel_coverage() -> Outcome {
    let doc: Value =
        serde_json::from_slice(&canonical_serialize(&demo())).map_err(|e| e.to_string())?;
    let mut seen = BTreeSet::new();
    fn walk(v: &Value, path: &str, seen: &mut BTreeSet<String>) {
        match v {
            Value::Object(map) => {
                for (k, child) in map {
                    if !child.is_null() {
                        seen.insert(format!("{path}.{k}"));
                    }
                    walk(child, &format!("{path}.{k}"), seen);
                }
            }
            Value::Array(items) => items.iter().for_each(|i| walk(i, path, seen)),
            Value::String(s) => {
                seen.insert(format!("{path}={s}"));
            }
            Value::Bool(b) => {
                seen.insert(format!("{path}={b}"));
            }
            _ => {}
        }
    }
    walk(&doc, "", &mut seen);
    let concepts: &[(&str, &str)] = &[
        ("ListType", ".data.lists.element"),
        ("DataObject", ".data.objects.fields"),
        ("DataField", ".data.objects.fields.kind=data"),
        ("DataObjectField", ".data.objects.fields.kind=object"),
        ("namespace", ".data.namespace"),
        ("Microservice", ".services.name"),
        ("type FUNCTIONAL", ".services.type=FUNCTIONAL"),
        ("type INFRASTRUCTURE", ".services.type=INFRASTRUCTURE"),
        ("ServiceInterface", ".services.interfaces.operations"),
        ("Operation", ".services.interfaces.operations.parameters"),
        (
            "notImplemented",
            ".services.interfaces.operations.notImplemented=true",
        ),
        (
            "Parameter",
            ".services.interfaces.operations.parameters.dataType",
        ),
        (
            "IN_ONLY",
            ".services.interfaces.operations.parameters.pattern=IN_ONLY",
        ),
        (
            "OUT_ONLY",
            ".services.interfaces.operations.parameters.pattern=OUT_ONLY",
        ),
        (
            "INOUT",
            ".services.interfaces.operations.parameters.pattern=INOUT",
        ),
        (
            "SYNC",
            ".services.interfaces.operations.parameters.commType=SYNC",
        ),
        (
            "ASYNC",
            ".services.interfaces.operations.parameters.commType=ASYNC",
        ),
        (
            "initializedBy",
            ".services.interfaces.operations.parameters.initializedBy",
        ),
        ("ServiceContract provides", ".services.contracts.provides"),
        ("ServiceContract requires", ".services.contracts.requires"),
        ("TD SERVICE", ".technologies.kind=SERVICE"),
        ("TD CONTAINER", ".technologies.kind=CONTAINER"),
        ("TD PROTOCOL", ".technologies.kind=PROTOCOL"),
        ("TD MESSAGE_FORMAT", ".technologies.kind=MESSAGE_FORMAT"),
        ("TD LOAD_BALANCER", ".technologies.kind=LOAD_BALANCER"),
        ("TD CIRCUIT_BREAKER", ".technologies.kind=CIRCUIT_BREAKER"),
        ("Endpoint for operation", ".artifacts.endpoints.operation"),
        ("Endpoint for contract", ".artifacts.endpoints.contract"),
        (
            "ServiceDeploymentArtifact",
            ".artifacts.serviceTechnologies",
        ),
        ("load balancer", ".artifacts.loadBalancer"),
        ("circuit breaker", ".artifacts.circuitBreaker"),
        ("Container", ".containers.deploys"),
        ("minInstances", ".containers.minInstances"),
        ("maxInstances", ".containers.maxInstances"),
        ("OperatingEnvironment", ".containers.environment.name"),
        ("ServiceDiscovery", ".registrations.kind=SERVICE_DISCOVERY"),
        ("ApiGateway", ".registrations.kind=API_GATEWAY"),
    ];
    let missing: Vec<&str> = concepts
        .iter()
        .filter(|(_, key)| !seen.contains(*key))
        .map(|(name, _)| *name)
        .collect();
    ensure!(missing.is_empty(), "missing concepts: {missing:?}");
    Ok(format!("{} concepts present", concepts.len()))
}

/// The worked deployment example checks clean and yields the expected
/// manifest entry.
fn worked_example() -> Outcome {
    let model = demo();
    let tech = |n: &str| {
        model
            .technology(&n.parse::<QualifiedName>().unwrap())
            .map(|t| t.kind.keyword())
    };
    ensure!(
        tech("shop.ops.java-spring") == Some("service"),
        "no Spring-style service technology"
    );
    ensure!(
        tech("shop.ops.docker") == Some("container"),
        "no container technology"
    );
    ensure!(
        tech("shop.ops.rest") == Some("protocol"),
        "no REST protocol"
    );
    ensure!(
        tech("shop.ops.json") == Some("message-format"),
        "no JSON format"
    );
    let box_ = model
        .containers
        .iter()
        .find(|c| c.environment.name == "openjdk" && (c.min_instances, c.max_instances) == (1, 5))
        .ok_or("no openjdk 1..5 container")?;

    let dir = demo_dir();
    let files: Vec<&str> = DEMO.iter().map(|(p, _)| *p).collect();
    let r = cli(dir.path(), &[&["check"], files.as_slice()].concat());
    ensure!(
        r.code == EXIT_OK && r.stderr.is_empty(),
        "check: exit {} {}",
        r.code,
        String::from_utf8_lossy(&r.stderr)
    );
    let r = cli(
        dir.path(),
        &[&["generate", "--target", "deployment"], files.as_slice()].concat(),
    );
    ensure!(r.code == EXIT_OK, "generate: exit {}", r.code);
    let text =
        std::fs::read_to_string(dir.path().join("out/compose.yaml")).map_err(|e| e.to_string())?;
    let yaml: serde_yaml::Value = serde_yaml::from_str(&text).map_err(|e| e.to_string())?;
    let entry = &yaml["services"][box_.name.to_string().as_str()];
    ensure!(
        entry["image"].as_str() == Some("openjdk"),
        "image is {:?}",
        entry["image"]
    );
    ensure!(
        entry["deploy"]["replicas"].as_u64() == Some(1),
        "replicas is {:?}",
        entry["deploy"]["replicas"]
    );
    ensure!(
        text.contains("image: openjdk") && text.contains("replicas: 1"),
        "manifest text lacks the entry"
    );
    Ok(format!("{} -> image: openjdk, replicas: 1", box_.name))
}

fn corpus_dirs() -> Vec<PathBuf> {
    let mut dirs = vec![workspace().join("demo")];
    let mut corpus: Vec<PathBuf> = std::fs::read_dir(workspace().join("corpus"))
        .expect("corpus dir")
        .map(|e| e.expect("dir entry").path())
        .filter(|p| p.is_dir())
        .collect();
    corpus.sort();
    dirs.extend(corpus);
    dirs
}

fn model_files(dir: &Path) -> Vec<String> {
    let mut files: Vec<String> = std::fs::read_dir(dir)
        .expect("model dir")
        .map(|e| {
            e.expect("dir entry")
                .file_name()
                .to_string_lossy()
                .into_owned()
        })
        .filter(|n| [".msad", ".msas", ".msao"].iter().any(|x| n.ends_with(x)))
        .collect();
    files.sort();
    files
}

/// Each catalog rule has a mutation raising exactly its code; the valid
/// corpus raises nothing.
fn validator_soundness() -> Outcome {
    let mutations = rule_mutations();
    let catalog: BTreeSet<Code> = Code::validator_rules().collect();
    let covered: BTreeSet<Code> = mutations.iter().map(|m| m.code).collect();
    ensure!(
        covered == catalog,
        "uncovered rules: {:?}",
        catalog.difference(&covered).collect::<Vec<_>>()
    );
    for m in &mutations {
        let c = compile(&demo_entries(), &m.apply())
            .map_err(|d| format!("{}: link failed: {d:?}", m.code))?;
        let codes: BTreeSet<Code> = c.diagnostics.iter().map(|d| d.code).collect();
        ensure!(
            codes == BTreeSet::from([m.code]),
            "{} mutation raised {:?}",
            m.code,
            codes
        );
    }
    let dirs = corpus_dirs();
    for dir in &dirs {
        let c = compile(&model_files(dir), &msaforge::FsLoader::new(dir))
            .map_err(|d| format!("{}: {d:?}", dir.display()))?;
        ensure!(
            c.diagnostics.is_empty(),
            "{}: {:?}",
            dir.display(),
            c.diagnostics
        );
    }
    Ok(format!(
        "{} rules, {} clean projects",
        catalog.len(),
        dirs.len()
    ))
}

fn brute_force_cycles(adj: &[BTreeSet<usize>]) -> BTreeSet<Vec<usize>> {
    fn walk(adj: &[BTreeSet<usize>], path: &mut Vec<usize>, out: &mut BTreeSet<Vec<usize>>) {
        let last = *path.last().expect("non-empty path");
        for &next in &adj[last] {
            if next == path[0] {
                out.insert(path.clone());
            } else if next > path[0] && !path.contains(&next) {
                path.push(next);
                walk(adj, path, out);
                path.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    for s in 0..adj.len() {
        walk(adj, &mut vec![s], &mut out);
    }
    out
}

fn random_edges(rng: &mut ChaCha8Rng, n: usize, self_loops: bool) -> Vec<(usize, usize)> {
    let density: f64 = rng.gen_range(0.05..0.5);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if (a != b || self_loops) && rng.gen_bool(density) {
                edges.push((a, b));
            }
        }
    }
    edges
}

fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<BTreeSet<usize>> {
    let mut adj = vec![BTreeSet::new(); n];
    for &(a, b) in edges {
        adj[a].insert(b);
    }
    adj
}

/// S007 and detect_cycles agree with exhaustive enumeration.
fn cycle_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut cycles_seen = 0;
    for trial in 0..500 {
        let n = rng.gen_range(2..=8);
        let edges = random_edges(&mut rng, n, false);
        let expected = brute_force_cycles(&adjacency(n, &edges));
        let g = initializer_model(n, &edges);
        let c = compile(&g.entries, &g.loader()).map_err(|d| format!("PDID set {trial}: {d:?}"))?;
        let got: BTreeSet<Vec<usize>> = c
            .diagnostics
            .iter()
            .filter(|d| d.code == Code::InitializationCycle)
            .map(|d| {
                let path = d.message.split_once(": ").map_or("", |p| p.1);
                let mut cycle: Vec<usize> = path
                    .split(" -> ")
                    .filter_map(|s| {
                        s.strip_prefix("gen.pdid.N")?
                            .strip_suffix(".I.op")?
                            .parse()
                            .ok()
                    })
                    .collect();
                cycle.pop();
                let min = (0..cycle.len()).min_by_key(|&i| cycle[i]).unwrap_or(0);
                cycle.rotate_left(min);
                cycle
            })
            .collect();
        ensure!(
            got == expected,
            "PDID set {trial} ({n} ops, {edges:?}): S007 {got:?} vs {expected:?}"
        );
        cycles_seen += expected.len();
    }
    for trial in 0..500 {
        let n = rng.gen_range(1..=8);
        let edges = random_edges(&mut rng, n, true);
        let name = |i: usize| {
            format!("g.S{i}")
                .parse::<QualifiedName>()
                .expect("valid name")
        };
        let graph = InteractionGraph::new(
            (0..n).map(name),
            edges.iter().map(|&(a, b)| Edge {
                consumer: name(a),
                provider: name(b),
                kind: DependencyKind::Cdid,
                witness: Witness::Requirement {
                    contract: name(a).child("C"),
                    interface: name(b).child("I"),
                },
            }),
        );
        let expected: BTreeSet<Vec<QualifiedName>> = brute_force_cycles(&adjacency(n, &edges))
            .into_iter()
            .map(|c| c.into_iter().map(name).collect())
            .collect();
        let got = detect_cycles(&graph);
        ensure!(!got.truncated, "graph {trial} truncated");
        let got_set: BTreeSet<_> = got.cycles.iter().cloned().collect();
        ensure!(
            got_set.len() == got.cycles.len(),
            "graph {trial}: duplicate cycles"
        );
        ensure!(
            got_set == expected,
            "graph {trial} ({n} nodes, {edges:?}) disagrees"
        );
        cycles_seen += expected.len();
    }
    Ok(format!("1000 instances, {cycles_seen} cycles compared"))
}

/// parse -> format -> parse over the corpus; serialize -> deserialize ->
/// serialize over generated models.
fn round_trips() -> Outcome {
    let mut files = 0;
    for dir in corpus_dirs() {
        for f in model_files(&dir) {
            let path = dir.join(&f);
            let src = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
            let name = path.to_string_lossy().into_owned();
            let a = parse_file(&src, &name).map_err(|d| d.message)?;
            ensure!(!a.has_errors(), "{name}: {:?}", a.diagnostics);
            let text = format(&a);
            let b = parse_file(&text, &name).map_err(|d| d.message)?;
            ensure!(a == b, "{name}: reparse differs");
            ensure!(format(&b) == text, "{name}: format not idempotent");
            files += 1;
        }
    }
    ensure!(files >= 30, "corpus has only {files} files");
    for seed in 0..500 {
        let g = generate_model(seed, &GenConfig::default());
        let model = compile(&g.entries, &g.loader())
            .map_err(|d| format!("seed {seed}: {d:?}"))?
            .model;
        let bytes = canonical_serialize(&model);
        let back = canonical_deserialize(&bytes).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure!(
            structural_equals(&model, &back),
            "seed {seed}: structure changed"
        );
        ensure!(
            canonical_serialize(&back) == bytes,
            "seed {seed}: bytes changed"
        );
    }
    Ok(format!("{files} corpus files, 500 generated models"))
}

/// Outputs are byte-identical across repeated runs and entry orders.
fn determinism() -> Outcome {
    let dir = demo_dir();
    let base: Vec<&str> = DEMO.iter().map(|(p, _)| *p).collect();
    let mut orders = vec![base.clone()];
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..4 {
        let mut o = base.clone();
        for i in (1..o.len()).rev() {
            o.swap(i, rng.gen_range(0..=i));
        }
        orders.push(o);
    }
    // A model with findings, so the diagnostics document is not empty.
    let m = rule_mutations()
        .into_iter()
        .find(|m| m.code == Code::DuplicateEndpoint)
        .ok_or("no O007 mutation")?;
    let noisy = demo_dir();
    let src = msaforge::SourceLoader::load(&m.apply(), m.file).map_err(|e| e.to_string())?;
    std::fs::write(noisy.path().join(m.file), src).map_err(|e| e.to_string())?;

    let commands: [(&str, &Path, &[&str]); 5] = [
        ("graph --dot", dir.path(), &["graph", "--dot"]),
        ("graph --json", dir.path(), &["--json", "graph"]),
        ("check --json", noisy.path(), &["--json", "check"]),
        (
            "interfaces",
            dir.path(),
            &["generate", "--target", "interfaces", "--overwrite", "--out"],
        ),
        (
            "deployment",
            dir.path(),
            &["generate", "--target", "deployment", "--overwrite", "--out"],
        ),
    ];
    for (label, cwd, args) in commands {
        let mut reference: Option<Vec<u8>> = None;
        for (i, order) in orders.iter().enumerate() {
            let mut argv: Vec<&str> = args.to_vec();
            let out = format!("out{i}");
            let generating = args[0] == "generate";
            if generating {
                argv.push(&out);
            }
            argv.extend(order.iter().copied());
            let r = cli(cwd, &argv);
            ensure!(
                !r.stdout.is_empty() || !r.stderr.is_empty(),
                "{label}: no output"
            );
            let bytes = if generating {
                let mut all = Vec::new();
                let gen_dir = cwd.join(&out);
                let mut names: Vec<_> = std::fs::read_dir(&gen_dir)
                    .map_err(|e| e.to_string())?
                    .map(|e| e.map(|e| e.path()))
                    .collect::<Result<_, _>>()
                    .map_err(|e| e.to_string())?;
                names.sort();
                for p in names {
                    all.extend(
                        p.file_name()
                            .map(|n| n.to_string_lossy().into_owned())
                            .unwrap_or_default()
                            .bytes(),
                    );
                    all.extend(std::fs::read(&p).map_err(|e| e.to_string())?);
                }
                all
            } else {
                r.stdout
            };
            match &reference {
                None => reference = Some(bytes),
                Some(first) => ensure!(first == &bytes, "{label}: run {i} differs"),
            }
        }
    }
    Ok(format!(
        "5 commands x {} runs with permuted entries",
        orders.len()
    ))
}

/// CDID + PDID edge count equals requires entries plus initializers.
fn edge_count_law() -> Outcome {
    let mut total = 0;
    for seed in 1000..1500 {
        let g = generate_model(seed, &GenConfig::default());
        let c = compile(&g.entries, &g.loader()).map_err(|d| format!("seed {seed}: {d:?}"))?;
        ensure!(
            c.diagnostics.is_empty(),
            "seed {seed}: model has findings {:?}",
            c.diagnostics
        );
        let graph = dependency_graph(&c.model);
        let expected = g.requires_count + g.initializer_count;
        ensure!(
            graph.edges.len() == expected,
            "seed {seed}: {} edges, expected {expected}",
            graph.edges.len()
        );
        ensure!(
            coupling_metrics(&graph).total_edges() == expected,
            "seed {seed}: metrics disagree"
        );
        total += expected;
    }
    Ok(format!("500 models, {total} edges"))
}

fn main() {
    let criteria: [Criterion; 7] = [
        (
            "1 metamodel coverage",
            Duration::from_secs(1),
            metamodel_coverage,
        ),
        (
            "2 worked deployment example",
            Duration::from_secs(5),
            worked_example,
        ),
        (
            "3 validator soundness",
            Duration::from_secs(5),
            validator_soundness,
        ),
        (
            "4 cycle-oracle equivalence",
            Duration::from_secs(30),
            cycle_oracle,
        ),
        (
            "5 round-trip properties",
            Duration::from_secs(60),
            round_trips,
        ),
        ("6 determinism", Duration::from_secs(30), determinism),
        ("7 edge-count law", Duration::from_secs(60), edge_count_law),
    ];
    let mut failed = 0;
    for (name, budget, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if took > budget => Err(format!("{detail}; took longer than {budget:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS criterion {name} ({detail}) [{:.2?}]", took),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why} [{:.2?}]", took);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 7 acceptance criteria passed");
}
