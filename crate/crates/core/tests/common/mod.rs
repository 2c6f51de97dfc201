#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;
use reqonto::classgen::generate_schema_ontology;
use reqonto::instancegen::{populate_instances, BuildReport};
use reqonto::ontology::{
    DataAssertion, DataPropertyDecl, Datatype, Iri, IriKind, Literal, ObjectAssertion, ObjectPropertyDecl,
    OntologyGraph,
};
use reqonto::refine::MergeGraph;
use reqonto::schema::{parse_schema, SchemaModel};
use reqonto::vault::{build_graph, Note, NoteGraph};

pub const BASE: &str = "http://example.org/requirements";

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(rel)
}

pub fn read(rel: &str) -> Vec<u8> {
    std::fs::read(fixture(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

pub fn schema(rel: &str) -> SchemaModel {
    parse_schema(&read(rel)).unwrap()
}

pub fn expected() -> serde_json::Value {
    serde_json::from_slice(&read("corpus/expected.json")).unwrap()
}

/// Classes from `xsd`, then instances from `xml`.
pub fn build(xsd: &str, xml: &str) -> (OntologyGraph, BuildReport) {
    let model = schema(xsd);
    let classes = generate_schema_ontology(&model, BASE).unwrap();
    populate_instances(classes, &read(xml), &model).unwrap()
}

pub fn corpus() -> (OntologyGraph, BuildReport) {
    build("schema/requirements.xsd", "corpus/requirements.xml")
}

pub fn iri(local: &str) -> Iri {
    Iri::new(format!("{BASE}#{local}"))
}

/// Random undirected graph on `n` vertices named v00, v01, ...
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, p: f64) -> MergeGraph {
    let vs: Vec<Iri> = (0..n).map(|i| iri(&format!("v{i:02}"))).collect();
    let mut g = MergeGraph {
        vertices: vs.iter().cloned().collect(),
        edges: BTreeSet::new(),
    };
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                g.edges.insert((vs[i].clone(), vs[j].clone()));
            }
        }
    }
    g
}

/// Maximal cliques of size >= 2 by checking every vertex subset.
pub fn brute_force_cliques(g: &MergeGraph) -> BTreeSet<BTreeSet<Iri>> {
    let vs: Vec<&Iri> = g.vertices.iter().collect();
    let n = vs.len();
    assert!(n <= 16);
    let adj = |a: usize, b: usize| {
        let (x, y) = if vs[a] < vs[b] { (vs[a], vs[b]) } else { (vs[b], vs[a]) };
        g.edges.contains(&(x.clone(), y.clone()))
    };
    let is_clique: Vec<bool> = (0usize..(1 << n))
        .map(|mask| {
            let members: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            mask != 0
                && members
                    .iter()
                    .enumerate()
                    .all(|(k, &a)| members[k + 1..].iter().all(|&b| adj(a, b)))
        })
        .collect();
    let mut out = BTreeSet::new();
    for mask in 1usize..(1 << n) {
        if mask.count_ones() < 2 || !is_clique[mask] {
            continue;
        }
        let maximal = (0..n).all(|v| mask & (1 << v) != 0 || !is_clique[mask | (1 << v)]);
        if maximal {
            out.insert((0..n).filter(|i| mask & (1 << i) != 0).map(|i| vs[i].clone()).collect());
        }
    }
    out
}

/// Note graph with `n` notes and the given directed edges.
pub fn note_graph(n: usize, edges: &[(usize, usize)]) -> NoteGraph {
    let mut bodies = vec![String::new(); n];
    for &(s, t) in edges {
        bodies[s].push_str(&format!("[[n{t:02}]]\n"));
    }
    let notes = bodies
        .into_iter()
        .enumerate()
        .map(|(i, b)| Note::new(format!("n{i:02}.md"), b));
    build_graph(notes).unwrap().graph
}

/// PageRank by dense matrix power iteration run to a fixed point: column
/// stochastic transition matrix with dangling columns spread uniformly.
pub fn dense_pagerank(n: usize, edges: &[(usize, usize)], d: f64) -> Vec<f64> {
    let mut out: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for &(s, t) in edges {
        if s != t {
            out[s].insert(t);
        }
    }
    let mut m = vec![vec![0.0; n]; n];
    for (j, targets) in out.iter().enumerate() {
        if targets.is_empty() {
            for row in m.iter_mut() {
                row[j] = 1.0 / n as f64;
            }
        } else {
            for &i in targets {
                m[i][j] = 1.0 / targets.len() as f64;
            }
        }
    }
    let g: Vec<Vec<f64>> = m
        .iter()
        .map(|row| row.iter().map(|x| d * x + (1.0 - d) / n as f64).collect())
        .collect();
    let mut x = vec![1.0 / n as f64; n];
    for _ in 0..5000 {
        let y: Vec<f64> = g
            .iter()
            .map(|row| row.iter().zip(&x).map(|(a, b)| a * b).sum())
            .collect();
        let delta: f64 = y.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
        x = y;
        if delta < 1e-15 {
            break;
        }
    }
    let s: f64 = x.iter().sum();
    x.iter().map(|v| v / s).collect()
}

const ODD: &[&str] = &[
    "é", "ü", "∑", "\"", "'", "\\", "<", ">", "&", " ", "\t", "\n", "\r", "日本", "#", "%", "/",
];

fn random_text<R: Rng>(rng: &mut R) -> String {
    let mut s = String::new();
    for _ in 0..rng.gen_range(0..8) {
        if rng.gen_bool(0.3) {
            s.push_str(ODD.choose(rng).unwrap());
        } else {
            s.push(rng.gen_range(b'a'..=b'z') as char);
        }
    }
    s
}

fn random_local<R: Rng>(rng: &mut R, prefix: &str, i: usize, xml_name: bool) -> String {
    if xml_name || rng.gen_bool(0.6) {
        format!("{prefix}{i}")
    } else {
        // percent-encoded or otherwise not a Turtle prefixed name
        let odd = ["%C3%A9", ".", "-x", "~", "%2F"].choose(rng).unwrap();
        format!("{prefix}{i}{odd}")
    }
}

/// A valid ontology with classes, subclass axioms, both property kinds,
/// instances, assertions and retired instances. Property names are XML
/// names so the graph can be written as RDF/XML.
pub fn random_ontology<R: Rng>(rng: &mut R) -> OntologyGraph {
    let mut o = OntologyGraph::new(BASE);
    let ns = |l: String| Iri::new(format!("{BASE}#{l}"));
    let classes: Vec<Iri> = (0..rng.gen_range(1..6))
        .map(|i| ns(random_local(rng, "C", i, false)))
        .collect();
    o.classes.extend(classes.iter().cloned());
    for (i, c) in classes.iter().enumerate().skip(1) {
        if rng.gen_bool(0.5) {
            o.subclass_axioms
                .insert((c.clone(), classes[rng.gen_range(0..i)].clone()));
        }
    }
    let pick = |rng: &mut R, v: &[Iri], max: usize| -> BTreeSet<Iri> {
        (0..rng.gen_range(0..=max))
            .map(|_| v.choose(rng).unwrap().clone())
            .collect()
    };
    let objs: Vec<Iri> = (0..rng.gen_range(0..4))
        .map(|i| ns(random_local(rng, "op", i, true)))
        .collect();
    for p in &objs {
        let decl = ObjectPropertyDecl {
            domains: pick(rng, &classes, 2),
            ranges: pick(rng, &classes, 2),
        };
        o.object_properties.insert(p.clone(), decl);
    }
    let types = [Datatype::String, Datatype::Boolean, Datatype::AnyUri];
    let datas: Vec<(Iri, Datatype)> = (0..rng.gen_range(0..4))
        .map(|i| (ns(random_local(rng, "dp", i, true)), *types.choose(rng).unwrap()))
        .collect();
    for (p, dt) in &datas {
        o.data_properties.insert(
            p.clone(),
            DataPropertyDecl {
                domains: pick(rng, &classes, 2),
                datatype: *dt,
            },
        );
    }
    let insts: Vec<Iri> = (0..rng.gen_range(0..10))
        .map(|i| ns(random_local(rng, "i", i, false)))
        .collect();
    for i in &insts {
        o.instances.insert(i.clone(), classes.choose(rng).unwrap().clone());
    }
    if !insts.is_empty() {
        for _ in 0..rng.gen_range(0..15) {
            if let Some(p) = objs.choose(rng) {
                o.object_assertions.insert(ObjectAssertion {
                    subject: insts.choose(rng).unwrap().clone(),
                    property: p.clone(),
                    object: insts.choose(rng).unwrap().clone(),
                });
            }
            if let Some((p, dt)) = datas.choose(rng) {
                let value = match dt {
                    Datatype::Boolean => if rng.gen_bool(0.5) { "true" } else { "false" }.to_string(),
                    Datatype::AnyUri => format!("https://example.com/{}", rng.gen_range(0..100)),
                    Datatype::String => random_text(rng),
                };
                o.data_assertions.insert(DataAssertion {
                    subject: insts.choose(rng).unwrap().clone(),
                    property: p.clone(),
                    value: Literal::new(value, *dt),
                });
            }
        }
        for k in 0..rng.gen_range(0..3) {
            o.merged_into
                .insert(ns(format!("gone{k}")), insts.choose(rng).unwrap().clone());
        }
    }
    o.validate().expect("generator builds valid ontologies");
    o
}

/// Random ontology shaped for merging: a few classes with several instances
/// each and assertions between them.
pub fn random_merge_fixture<R: Rng>(rng: &mut R) -> OntologyGraph {
    let mut o = OntologyGraph::new(BASE);
    let classes: Vec<Iri> = (0..rng.gen_range(1..4))
        .map(|i| o.mint(&format!("K{i}"), IriKind::Class).unwrap())
        .collect();
    o.classes.extend(classes.iter().cloned());
    let link = o.mint("link", IriKind::Property).unwrap();
    let name = o.mint("name", IriKind::Property).unwrap();
    o.object_properties.insert(link.clone(), ObjectPropertyDecl::default());
    o.data_properties.insert(
        name.clone(),
        DataPropertyDecl {
            domains: BTreeSet::new(),
            datatype: Datatype::String,
        },
    );
    let n = rng.gen_range(2..14);
    let insts: Vec<Iri> = (0..n)
        .map(|i| o.mint(&format!("x{i}"), IriKind::Instance).unwrap())
        .collect();
    for i in &insts {
        o.instances.insert(i.clone(), classes.choose(rng).unwrap().clone());
        if rng.gen_bool(0.7) {
            o.data_assertions.insert(DataAssertion {
                subject: i.clone(),
                property: name.clone(),
                value: Literal::new(
                    ["alpha", "beta", "gamma", "delta"].choose(rng).unwrap().to_string(),
                    Datatype::String,
                ),
            });
        }
    }
    for _ in 0..rng.gen_range(0..3 * n) {
        o.object_assertions.insert(ObjectAssertion {
            subject: insts.choose(rng).unwrap().clone(),
            property: link.clone(),
            object: insts.choose(rng).unwrap().clone(),
        });
    }
    o
}

/// Random partition of some active instances into disjoint groups of at
/// least two.
pub fn random_plan<R: Rng>(rng: &mut R, o: &OntologyGraph) -> Vec<BTreeSet<Iri>> {
    let mut insts: Vec<Iri> = o.instances.keys().cloned().collect();
    insts.shuffle(rng);
    let mut out = Vec::new();
    while insts.len() >= 2 && rng.gen_bool(0.8) {
        let k = rng.gen_range(2..=insts.len().min(4));
        out.push(insts.drain(..k).collect());
    }
    out
}

pub fn count_by<T: Ord + Clone>(xs: impl IntoIterator<Item = T>) -> BTreeMap<T, usize> {
    let mut m = BTreeMap::new();
    for x in xs {
        *m.entry(x).or_insert(0) += 1;
    }
    m
}

/// Temp workspace whose config points at the corpus fixtures by absolute path.
pub fn workspace(schema_rel: &str) -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let f = |rel: &str| fixture(rel).display().to_string();
    let cfg = format!(
        "schema_path = {:?}\nxml_path = {:?}\nground_truth_path = {:?}\noutput_dir = \"out\"\nvault_root = {:?}\n\n\
         [oracle]\nkind = \"stub\"\nstub_path = {:?}\nprice_per_call = 0.002\n",
        f(schema_rel),
        f("corpus/requirements.xml"),
        f("corpus/ground_truth.json"),
        f("vault"),
        f("corpus/stub_oracle.json"),
    );
    let path = dir.path().join("reqonto.toml");
    std::fs::write(&path, cfg).unwrap();
    (dir, path)
}

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn reqonto(config: &std::path::Path, args: &[&str]) -> Run {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_reqonto"))
        .arg("--config")
        .arg(config)
        .args(args)
        .output()
        .unwrap();
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

pub const PIPELINE: &[&[&str]] = &[
    &["build", "all"],
    &["refine", "candidates"],
    &["refine", "judge"],
    &["refine", "cliques"],
    &["refine", "review-export"],
    &["refine", "apply", "--approve-all", "--timestamp", "0"],
    &["eval", "pairwise"],
];

/// Run every pipeline step, failing on the first non-zero exit.
pub fn pipeline(config: &std::path::Path) -> std::time::Duration {
    let t = std::time::Instant::now();
    for step in PIPELINE {
        let r = reqonto(config, step);
        assert_eq!(r.code, 0, "{step:?}\n{}\n{}", r.stdout, r.stderr);
    }
    t.elapsed()
}

/// Every file under `out`, with wall-clock fields of the build report dropped.
pub fn outputs(out: &std::path::Path) -> BTreeMap<String, Vec<u8>> {
    let mut files = BTreeMap::new();
    for entry in walkdir::WalkDir::new(out).sort_by_file_name() {
        let entry = entry.unwrap();
        if !entry.file_type().is_file() {
            continue;
        }
        let name = entry.path().strip_prefix(out).unwrap().display().to_string();
        let mut bytes = std::fs::read(entry.path()).unwrap();
        if name == "build_report.json" {
            let mut v: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
            let o = v.as_object_mut().unwrap();
            o.remove("wall_time_seconds");
            o.remove("stage_seconds");
            bytes = serde_json::to_vec(&v).unwrap();
        }
        files.insert(name, bytes);
    }
    files
}

pub struct Recorded {
    pub request_line: String,
    pub headers: Vec<(String, String)>,
    pub body: String,
}

/// Serve one scripted `(status, body)` per connection, recording requests.
pub fn mock(
    script: Vec<(u16, String)>,
) -> (
    String,
    std::sync::Arc<std::sync::Mutex<Vec<Recorded>>>,
    std::thread::JoinHandle<()>,
) {
    let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1/chat/completions", listener.local_addr().unwrap());
    let seen = std::sync::Arc::new(std::sync::Mutex::new(Vec::new()));
    let log = seen.clone();
    let handle = std::thread::spawn(move || {
        for (status, body) in script {
            let (stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut request_line = String::new();
            reader.read_line(&mut request_line).unwrap();
            let mut headers = Vec::new();
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                let line = line.trim_end();
                if line.is_empty() {
                    break;
                }
                let (k, v) = line.split_once(':').unwrap();
                headers.push((k.trim().to_ascii_lowercase(), v.trim().to_string()));
            }
            let len: usize = headers
                .iter()
                .find(|(k, _)| k == "content-length")
                .map(|(_, v)| v.parse().unwrap())
                .unwrap_or(0);
            let mut buf = vec![0; len];
            reader.read_exact(&mut buf).unwrap();
            log.lock().unwrap().push(Recorded {
                request_line: request_line.trim_end().to_string(),
                headers,
                body: String::from_utf8(buf).unwrap(),
            });
            let mut stream = stream;
            write!(
                stream,
                "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            )
            .unwrap();
            stream.flush().unwrap();
        }
    });
    (url, seen, handle)
}

/// Drop whitespace outside JSON strings.
pub fn strip_insignificant_whitespace(json: &str) -> String {
    let mut out = String::new();
    let (mut in_string, mut escaped) = (false, false);
    for c in json.chars() {
        if in_string {
            out.push(c);
            match (escaped, c) {
                (true, _) => escaped = false,
                (false, '\\') => escaped = true,
                (false, '"') => in_string = false,
                _ => {}
            }
        } else if c == '"' {
            in_string = true;
            out.push(c);
        } else if !c.is_whitespace() {
            out.push(c);
        }
    }
    out
}
