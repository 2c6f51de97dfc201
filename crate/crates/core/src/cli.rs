//! Command-line front end. `run` returns the process exit status: 0 on
//! success, 1 when the stage found violations or failed, 2 on usage errors
//! and missing inputs.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::classgen::{generate_schema_ontology, ClassSummary, ClassgenError};
use crate::config::{ConfigError, OracleKind, PipelineConfig};
use crate::eval::{self, GroundTruth, GroundTruthFile};
use crate::fsutil::write_atomic;
use crate::instancegen::{populate_instances, timing_csv};
use crate::ontology::{mint_iri, Iri, IriKind, OntologyGraph};
use crate::rdfio::{self, Format};
use crate::refine::{
    self, CandidatePair, HttpOracle, HttpOracleConfig, Judgment, MergeLog, Oracle, ReviewEntry, StubOracle, StubTable,
};
use crate::schema::{parse_schema, validate_authoring_rules, SchemaModel};
use crate::vault;

#[derive(Parser, Debug)]
#[command(
    name = "reqonto",
    version,
    about = "Build, refine and evaluate a requirements ontology"
)]
struct Cli {
    /// Pipeline configuration file (TOML).
    #[arg(long, short, global = true, default_value = "reqonto.toml")]
    config: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Markdown vault of clause and concept notes.
    #[command(subcommand)]
    Vault(VaultCmd),
    /// Requirement schema checks.
    #[command(subcommand)]
    Schema(SchemaCmd),
    /// Ontology generation from the schema and the XML requirements.
    #[command(subcommand)]
    Build(BuildCmd),
    /// Oracle-assisted instance merging.
    #[command(subcommand)]
    Refine(RefineCmd),
    /// Oracle scoring against a ground truth.
    #[command(subcommand)]
    Eval(EvalCmd),
    /// RDF export.
    #[command(subcommand)]
    Export(ExportCmd),
}

#[derive(Subcommand, Debug)]
enum VaultCmd {
    /// Parse every note and resolve links.
    Scan,
    /// Copy clause paragraphs into the concept notes they link to.
    Populate,
    /// PageRank over the link graph.
    Rank {
        #[arg(long, default_value_t = 20)]
        top: usize,
    },
    /// Gather clause text around a concept.
    Context {
        #[arg(long)]
        concept: String,
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
}

#[derive(Subcommand, Debug)]
enum SchemaCmd {
    /// Parse the schema and check the authoring rules.
    Check,
}

#[derive(Subcommand, Debug)]
enum BuildCmd {
    /// Classes and properties from the schema.
    Classes,
    /// Instances from the XML, on top of classes.ttl.
    Instances {
        /// Repeat population this many extra times and write timings.csv.
        #[arg(long, default_value_t = 0)]
        timing_runs: usize,
    },
    /// Classes then instances.
    All {
        #[arg(long, default_value_t = 0)]
        timing_runs: usize,
    },
}

#[derive(Subcommand, Debug)]
enum RefineCmd {
    /// Shortlist same-class instance pairs.
    Candidates,
    /// Ask the oracle about every candidate pair.
    Judge,
    /// Mergeability graph and its maximal cliques.
    Cliques,
    /// Write the editable review file.
    ReviewExport {
        /// Overwrite an existing review file.
        #[arg(long)]
        force: bool,
    },
    /// Merge the approved cliques.
    Apply {
        /// Review file; defaults to review.json in the output directory.
        #[arg(long)]
        review: Option<PathBuf>,
        /// Treat every review entry as approved.
        #[arg(long)]
        approve_all: bool,
        /// Unix time recorded in the merge log; defaults to now.
        #[arg(long)]
        timestamp: Option<u64>,
    },
    /// Undo merges recorded in merge_log.json.
    Revert {
        #[arg(long, required_unless_present = "all", conflicts_with = "all")]
        index: Option<usize>,
        #[arg(long)]
        all: bool,
    },
}

#[derive(Subcommand, Debug)]
enum EvalCmd {
    /// Score judgments.json.
    Pairwise {
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Score a grouping (JSON list of instance-id lists).
    Grouping {
        #[arg(long)]
        groups: PathBuf,
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Extend the positives to their clique closure first.
        #[arg(long)]
        adapt: bool,
    },
    /// Latency histogram of judgments.json.
    Latency {
        #[arg(long, default_value_t = 1.0)]
        bin_width: f64,
    },
}

#[derive(Subcommand, Debug)]
enum ExportCmd {
    /// Write export/ontology.ttl.
    Turtle {
        /// Turtle file to export; defaults to the refined ontology if present.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Write export/ontology.owl as RDF/XML.
    Rdfxml {
        /// Turtle file to export; defaults to the refined ontology if present.
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Failed(String),
}

type Outcome = Result<(), Failure>;

fn failed(e: impl std::fmt::Display) -> Failure {
    Failure::Failed(e.to_string())
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Usage(e.to_string())
    }
}

/// Parse `args` (including the program name) and run the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(Failure::Failed(m)) => {
            eprintln!("error: {m}");
            1
        }
        Err(Failure::Usage(m)) => {
            eprintln!("usage error: {m}");
            2
        }
    }
}

fn dispatch(cli: &Cli) -> Outcome {
    let cfg = PipelineConfig::load(&cli.config)?;
    let ctx = Ctx { cfg };
    match &cli.command {
        Command::Vault(c) => ctx.vault(c),
        Command::Schema(SchemaCmd::Check) => ctx.schema_check(),
        Command::Build(BuildCmd::Classes) => ctx.build_classes().map(|_| ()),
        Command::Build(BuildCmd::Instances { timing_runs }) => {
            let classes = ctx.load_turtle(&ctx.out("classes.ttl"), "run `build classes` first")?;
            ctx.build_instances(classes, *timing_runs)
        }
        Command::Build(BuildCmd::All { timing_runs }) => {
            let classes = ctx.build_classes()?;
            ctx.build_instances(classes, *timing_runs)
        }
        Command::Refine(c) => ctx.refine(c),
        Command::Eval(c) => ctx.eval(c),
        Command::Export(ExportCmd::Turtle { input }) => ctx.export(input.as_deref(), Format::Turtle),
        Command::Export(ExportCmd::Rdfxml { input }) => ctx.export(input.as_deref(), Format::RdfXml),
    }
}

struct Ctx {
    cfg: PipelineConfig,
}

fn read_input(path: &Path, hint: &str) -> Result<Vec<u8>, Failure> {
    if !path.is_file() {
        let hint = if hint.is_empty() {
            String::new()
        } else {
            format!(" ({hint})")
        };
        return Err(Failure::Usage(format!("missing input {}{hint}", path.display())));
    }
    std::fs::read(path).map_err(|e| failed(format!("reading {}: {e}", path.display())))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, hint: &str) -> Result<T, Failure> {
    let bytes = read_input(path, hint)?;
    serde_json::from_slice(&bytes).map_err(|e| failed(format!("{}: {e}", path.display())))
}

fn now_unix() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

impl Ctx {
    fn out(&self, name: &str) -> PathBuf {
        self.cfg.output_dir.join(name)
    }

    fn write(&self, name: &str, bytes: &[u8]) -> Outcome {
        let path = self.out(name);
        write_atomic(&path, bytes).map_err(|e| failed(format!("writing {}: {e}", path.display())))
    }

    fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Outcome {
        let mut text = serde_json::to_string_pretty(value).map_err(failed)?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    fn write_ontology(&self, name: &str, onto: &OntologyGraph, format: Format) -> Outcome {
        let bytes = rdfio::serialize(onto, format).map_err(failed)?;
        self.write(name, &bytes)
    }

    fn load_turtle(&self, path: &Path, hint: &str) -> Result<OntologyGraph, Failure> {
        let bytes = read_input(path, hint)?;
        rdfio::parse(&bytes, Format::Turtle).map_err(|e| failed(format!("{}: {e}", path.display())))
    }

    fn path_of(&self, value: &Option<PathBuf>, key: &'static str) -> Result<PathBuf, Failure> {
        Ok(PipelineConfig::require(value, key)?.clone())
    }

    /// Ground-truth and group ids: full IRIs pass through, anything else is
    /// an instance name minted the way `build` mints it.
    fn resolve_id(&self, id: &str) -> Iri {
        if id.contains("://") || id.starts_with("urn:") {
            Iri::new(id)
        } else {
            mint_iri(&self.cfg.base_iri, id, IriKind::Instance).unwrap_or_else(|_| Iri::new(id))
        }
    }

    fn schema(&self) -> Result<SchemaModel, Failure> {
        let path = self.path_of(&self.cfg.schema_path, "schema_path")?;
        let bytes = read_input(&path, "")?;
        parse_schema(&bytes).map_err(|e| failed(format!("{}: {e}", path.display())))
    }

    // vault

    fn vault(&self, cmd: &VaultCmd) -> Outcome {
        let root = self.path_of(&self.cfg.vault_root, "vault_root")?;
        if !root.is_dir() {
            return Err(Failure::Usage(format!("missing input {}", root.display())));
        }
        let scan = vault::scan_vault(&root).map_err(failed)?;
        match cmd {
            VaultCmd::Scan => {
                let violations = scan.violations().count();
                let notes: Vec<_> = scan
                    .graph
                    .notes
                    .values()
                    .map(|n| json!({"id": n.id, "path": n.path, "kind": n.kind, "tags": n.tags}))
                    .collect();
                self.write_json(
                    "vault_scan.json",
                    &json!({
                        "notes": notes,
                        "edges": scan.graph.edges(),
                        "diagnostics": scan.diagnostics,
                        "violations": violations,
                    }),
                )?;
                println!(
                    "{} notes, {} edges, {} diagnostics",
                    scan.graph.notes.len(),
                    scan.graph.edges().len(),
                    scan.diagnostics.len()
                );
                if violations > 0 {
                    return Err(failed(format!("{violations} unresolved link(s); see vault_scan.json")));
                }
                Ok(())
            }
            VaultCmd::Populate => {
                let report = vault::populate_concept_notes(&scan.graph, &root);
                self.write_json("population_report.json", &report)?;
                println!(
                    "{} sections appended to {} notes, {} created",
                    report.sections_appended,
                    report.notes_touched,
                    report.created_notes.len()
                );
                match report
                    .diagnostics
                    .iter()
                    .find(|d| matches!(d, vault::Diagnostic::WriteFailed { .. }))
                {
                    Some(d) => Err(failed(format!("{d:?}"))),
                    None => Ok(()),
                }
            }
            VaultCmd::Rank { top } => {
                let table = vault::pagerank(&scan.graph, &self.cfg.pagerank).map_err(failed)?;
                let ranked: Vec<_> = table
                    .ranked()
                    .into_iter()
                    .map(|(id, score)| json!({"note_id": id, "score": score}))
                    .collect();
                self.write_json(
                    "rank.json",
                    &json!({
                        "params": self.cfg.pagerank,
                        "iterations": table.iterations,
                        "converged": table.converged,
                        "ranked": ranked,
                    }),
                )?;
                self.write("rank.csv", table.to_csv().as_bytes())?;
                for (id, score) in table.ranked().into_iter().take(*top) {
                    println!("{score:.6}  {id}");
                }
                Ok(())
            }
            VaultCmd::Context { concept, depth } => {
                let bundle = vault::collect_context(&scan.graph, concept, *depth).map_err(failed)?;
                self.write_json("context.json", &bundle)?;
                print!("{}", bundle.render());
                Ok(())
            }
        }
    }

    // schema and build

    fn schema_check(&self) -> Outcome {
        let path = self.path_of(&self.cfg.schema_path, "schema_path")?;
        let bytes = read_input(&path, "")?;
        let (model, error) = match parse_schema(&bytes) {
            Ok(m) => (Some(m), None),
            Err(e) => (None, Some(e.to_string())),
        };
        let violations = model.as_ref().map(validate_authoring_rules).unwrap_or_default();
        let ok = error.is_none() && violations.is_empty();
        self.write_json(
            "schema_check.json",
            &json!({
                "schema": path,
                "ok": ok,
                "error": error,
                "types": model.as_ref().map(|m| m.types.len()),
                "violations": violations,
            }),
        )?;
        if let Some(e) = error {
            return Err(failed(e));
        }
        for v in &violations {
            println!("{:?} at {}: {}", v.rule, v.location, v.message);
        }
        if ok {
            println!("schema ok");
            Ok(())
        } else {
            Err(failed(format!("{} authoring rule violation(s)", violations.len())))
        }
    }

    fn build_classes(&self) -> Result<OntologyGraph, Failure> {
        let model = self.schema()?;
        match generate_schema_ontology(&model, &self.cfg.base_iri) {
            Ok(onto) => {
                self.write_ontology("classes.ttl", &onto, Format::Turtle)?;
                let summary = ClassSummary::of(&onto);
                self.write_json("classes_summary.json", &summary)?;
                println!(
                    "{} classes, {} object properties, {} data properties",
                    summary.classes, summary.object_properties, summary.data_properties
                );
                Ok(onto)
            }
            Err(ClassgenError::RuleViolations(v)) => {
                self.write_json("classes_summary.json", &json!({"ok": false, "violations": v}))?;
                Err(failed(format!(
                    "{} authoring rule violation(s); see classes_summary.json",
                    v.len()
                )))
            }
            Err(e) => Err(failed(e)),
        }
    }

    fn build_instances(&self, classes: OntologyGraph, timing_runs: usize) -> Outcome {
        let model = self.schema()?;
        let xml_path = self.path_of(&self.cfg.xml_path, "xml_path")?;
        let xml = read_input(&xml_path, "")?;
        let (onto, report) = populate_instances(classes.clone(), &xml, &model)
            .map_err(|e| failed(format!("{}: {e}", xml_path.display())))?;
        self.write_ontology("ontology.ttl", &onto, Format::Turtle)?;
        self.write_json("build_report.json", &report)?;
        if timing_runs > 0 {
            let mut samples = Vec::with_capacity(timing_runs);
            for _ in 0..timing_runs {
                let t = Instant::now();
                populate_instances(classes.clone(), &xml, &model).map_err(failed)?;
                samples.push(t.elapsed().as_secs_f64());
            }
            self.write("timings.csv", timing_csv(&samples).as_bytes())?;
        }
        println!(
            "{} elements, {} instances created, {} duplicates referenced",
            report.elements_seen, report.instances_created, report.duplicates_referenced
        );
        Ok(())
    }

    // refine

    fn oracle(&self) -> Result<Box<dyn Oracle>, Failure> {
        let o = &self.cfg.oracle;
        match o.kind {
            OracleKind::Stub => {
                let path = self.path_of(&o.stub_path, "oracle.stub_path")?;
                let table: StubTable = read_json(&path, "")?;
                Ok(Box::new(StubOracle::new(table, o.price_per_call)))
            }
            OracleKind::Http => {
                let api_key = match &o.api_key_env {
                    None => None,
                    Some(var) => Some(std::env::var(var).map_err(|_| {
                        Failure::Usage(format!("environment variable {var} (oracle.api_key_env) is not set"))
                    })?),
                };
                let oracle = HttpOracle::new(HttpOracleConfig {
                    endpoint: PipelineConfig::require(&o.endpoint, "oracle.endpoint")?.clone(),
                    model: o.model.clone(),
                    api_key,
                    timeout_seconds: o.timeout_seconds,
                    retries: o.retries,
                    backoff_seconds: o.backoff_seconds,
                    price_per_call: o.price_per_call,
                })
                .map_err(|e| Failure::Usage(e.to_string()))?;
                Ok(Box::new(oracle))
            }
        }
    }

    fn refine(&self, cmd: &RefineCmd) -> Outcome {
        match cmd {
            RefineCmd::Candidates => {
                let onto = self.load_turtle(&self.out("ontology.ttl"), "run `build all` first")?;
                let pairs = refine::enumerate_candidates(&onto, &self.cfg.blocking);
                self.write_json("candidates.json", &pairs)?;
                println!("{} candidate pairs", pairs.len());
                Ok(())
            }
            RefineCmd::Judge => {
                let pairs: Vec<CandidatePair> =
                    read_json(&self.out("candidates.json"), "run `refine candidates` first")?;
                let oracle = self.oracle()?;
                let outcome = refine::judge_all(oracle.as_ref(), &pairs, self.cfg.oracle.max_parallel);
                let report = outcome.report();
                self.write_json("judgments.json", &outcome.judgments)?;
                let failures: Vec<_> = outcome
                    .failures
                    .iter()
                    .map(|(p, e)| json!({"pair": p, "error": e.to_string()}))
                    .collect();
                self.write_json("judge_report.json", &json!({"report": report, "failures": failures}))?;
                println!(
                    "{} judged, {} mergeable, {} invalid, {} failed",
                    report.judged, report.mergeable, report.invalid, report.failed
                );
                if report.failed > 0 {
                    return Err(failed(format!("{} oracle call(s) failed", report.failed)));
                }
                Ok(())
            }
            RefineCmd::Cliques => {
                let judgments: Vec<Judgment> = read_json(&self.out("judgments.json"), "run `refine judge` first")?;
                let graph = refine::build_merge_graph(&judgments);
                let maximal = refine::maximal_cliques(&graph);
                let resolved = refine::resolve_overlaps(&maximal);
                self.write_json("merge_graph.json", &graph)?;
                self.write_json("cliques.json", &json!({"maximal": maximal, "resolved": resolved}))?;
                println!(
                    "{} vertices, {} edges, {} maximal cliques, {} after overlap resolution",
                    graph.vertices.len(),
                    graph.edges.len(),
                    maximal.len(),
                    resolved.len()
                );
                Ok(())
            }
            RefineCmd::ReviewExport { force } => {
                #[derive(serde::Deserialize)]
                struct Cliques {
                    maximal: Vec<BTreeSet<Iri>>,
                    resolved: Vec<BTreeSet<Iri>>,
                }
                let cliques: Cliques = read_json(&self.out("cliques.json"), "run `refine cliques` first")?;
                let onto = self.load_turtle(&self.out("ontology.ttl"), "run `build all` first")?;
                let target = self.out("review.json");
                if target.exists() && !force {
                    return Err(failed(format!(
                        "{} exists; pass --force to overwrite",
                        target.display()
                    )));
                }
                let entries = refine::review_entries(&cliques.resolved, &onto, &cliques.maximal).map_err(failed)?;
                self.write_json("review.json", &entries)?;
                println!("{} cliques written for review", entries.len());
                Ok(())
            }
            RefineCmd::Apply {
                review,
                approve_all,
                timestamp,
            } => {
                let review_path = review.clone().unwrap_or_else(|| self.out("review.json"));
                let mut entries: Vec<ReviewEntry> = read_json(&review_path, "run `refine review-export` first")?;
                if *approve_all {
                    entries.iter_mut().for_each(|e| e.approved = true);
                }
                let cliques = refine::approved_cliques(&entries).map_err(failed)?;
                let onto = self.load_turtle(&self.out("ontology.ttl"), "run `build all` first")?;
                let (merged, log) =
                    refine::apply_merges(&onto, &cliques, timestamp.unwrap_or_else(now_unix)).map_err(failed)?;
                let before = onto.instances.len();
                let after = merged.instances.len();
                self.write_ontology("ontology_refined.ttl", &merged, Format::Turtle)?;
                self.write_json("merge_log.json", &log)?;
                self.write_json(
                    "refine_report.json",
                    &json!({
                        "cliques_applied": cliques.len(),
                        "instances_before": before,
                        "instances_after": after,
                        "reduction_ratio": if before == 0 { 0.0 } else { (before - after) as f64 / before as f64 },
                    }),
                )?;
                println!("{} cliques merged: {before} -> {after} instances", cliques.len());
                Ok(())
            }
            RefineCmd::Revert { index, all } => {
                let onto = self.load_turtle(&self.out("ontology_refined.ttl"), "run `refine apply` first")?;
                let mut log: MergeLog = read_json(&self.out("merge_log.json"), "run `refine apply` first")?;
                let reverted = if *all {
                    refine::revert_all(&onto, &mut log)
                } else {
                    refine::revert(&onto, &mut log, index.expect("clap enforces --index or --all"))
                }
                .map_err(failed)?;
                self.write_ontology("ontology_refined.ttl", &reverted, Format::Turtle)?;
                self.write_json("merge_log.json", &log)?;
                println!("{} active instances", reverted.instances.len());
                Ok(())
            }
        }
    }

    // eval

    fn truth(&self, flag: &Option<PathBuf>) -> Result<GroundTruth, Failure> {
        let path = match flag {
            Some(p) => p.clone(),
            None => self.path_of(&self.cfg.ground_truth_path, "ground_truth_path")?,
        };
        let file: GroundTruthFile = read_json(&path, "")?;
        GroundTruth::from_file(&file, |s| self.resolve_id(s)).map_err(failed)
    }

    fn eval(&self, cmd: &EvalCmd) -> Outcome {
        match cmd {
            EvalCmd::Pairwise { truth } => {
                let truth = self.truth(truth)?;
                let judgments: Vec<Judgment> = read_json(&self.out("judgments.json"), "run `refine judge` first")?;
                let report = eval::score_pairwise(&judgments, &truth).map_err(failed)?;
                self.write_json("eval_pairwise.json", &report)?;
                print_report(&report);
                Ok(())
            }
            EvalCmd::Grouping { groups, truth, adapt } => {
                let mut truth = self.truth(truth)?;
                if *adapt {
                    truth = eval::adapt_ground_truth_to_groups(&truth);
                }
                let raw: Vec<Vec<String>> = read_json(groups, "")?;
                let groups: Vec<BTreeSet<Iri>> = raw
                    .iter()
                    .map(|g| g.iter().map(|id| self.resolve_id(id)).collect())
                    .collect();
                let report = eval::score_grouping(&groups, &truth).map_err(failed)?;
                self.write_json("eval_grouping.json", &json!({"adapted": adapt, "report": report}))?;
                print_report(&report);
                Ok(())
            }
            EvalCmd::Latency { bin_width } => {
                let judgments: Vec<Judgment> = read_json(&self.out("judgments.json"), "run `refine judge` first")?;
                let latencies: Vec<f64> = judgments.iter().map(|j| j.latency_seconds).collect();
                let hist =
                    eval::latency_histogram(&latencies, *bin_width).map_err(|e| Failure::Usage(e.to_string()))?;
                self.write("latency_histogram.csv", hist.to_csv().as_bytes())?;
                self.write_json("latency.json", &hist)?;
                match hist.mean {
                    Some(m) => println!("{} calls, mean latency {m:.3} s", hist.count),
                    None => println!("no judgments"),
                }
                Ok(())
            }
        }
    }

    fn export(&self, input: Option<&Path>, format: Format) -> Outcome {
        let path = match input {
            Some(p) => p.to_path_buf(),
            None => {
                let refined = self.out("ontology_refined.ttl");
                if refined.is_file() {
                    refined
                } else {
                    self.out("ontology.ttl")
                }
            }
        };
        let onto = self.load_turtle(&path, "run `build all` first")?;
        let name = format!("export/ontology.{}", format.extension());
        self.write_ontology(&name, &onto, format)?;
        println!("wrote {}", self.out(&name).display());
        Ok(())
    }
}

fn print_report(r: &eval::EvalReport) {
    let f = |x: Option<f64>| x.map_or("undefined".to_string(), |v| format!("{v:.4}"));
    println!(
        "tp={} fp={} fn={} tn={} precision={} recall={} f_score={}",
        r.tp,
        r.fp,
        r.fn_,
        r.tn,
        f(r.precision),
        f(r.recall),
        f(r.f_score)
    );
}
