//! Markdown note vaults: clause notes holding copied specification text,
//! concept notes they link to, and the graph formed by their wikilinks.

mod context;
pub mod markdown;
mod populate;
mod rank;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use context::{collect_context, ContextBundle, ContextSection};
pub use markdown::{extract_links, RawLink};
pub use populate::{populate_concept_notes, PopulationReport};
pub use rank::{pagerank, PageRankParams, RankTable};

#[derive(Debug, thiserror::Error)]
pub enum VaultError {
    #[error("vault root {0} does not exist or is not a directory")]
    MissingRoot(PathBuf),
    #[error("duplicate note id {id:?}: {first} and {second}")]
    DuplicateId { id: String, first: String, second: String },
    #[error("unknown note {0:?}")]
    UnknownNote(String),
    #[error("graph has no notes")]
    EmptyGraph,
    #[error("invalid pagerank parameter: {0}")]
    InvalidParameter(String),
    #[error("walking vault: {0}")]
    Walk(#[from] walkdir::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NoteKind {
    Clause,
    Concept,
}

/// `#spec/<spec_id>/<clause_path>` split into its two segments.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ClauseTag {
    pub spec_id: String,
    pub clause_path: String,
}

impl ClauseTag {
    /// Parse tag text (without the leading `#`).
    pub fn parse(tag: &str) -> Option<Self> {
        let rest = tag.strip_prefix("spec/")?;
        let (spec_id, clause_path) = rest.split_once('/')?;
        if spec_id.is_empty() || clause_path.is_empty() {
            return None;
        }
        Some(Self {
            spec_id: spec_id.to_string(),
            clause_path: clause_path.to_string(),
        })
    }

    pub fn heading(&self) -> String {
        format!("## {} {}", self.spec_id, self.clause_path)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Note {
    pub id: String,
    /// Path relative to the vault root, `/`-separated.
    pub path: String,
    pub body: String,
    pub tags: BTreeSet<String>,
    pub kind: NoteKind,
}

impl Note {
    pub fn new(path: impl Into<String>, body: impl Into<String>) -> Self {
        let path = path.into();
        let body = body.into();
        let stem = path
            .rsplit('/')
            .next()
            .unwrap_or(&path)
            .trim_end_matches(".md")
            .to_string();
        let tags: BTreeSet<String> = markdown::extract_tags(&body).into_iter().collect();
        let kind = if tags.iter().any(|t| t.starts_with("spec/")) {
            NoteKind::Clause
        } else {
            NoteKind::Concept
        };
        Self {
            id: normalize_id(&stem),
            path,
            body,
            tags,
            kind,
        }
    }

    /// First well-formed clause tag, by tag order.
    pub fn clause_tag(&self) -> Option<ClauseTag> {
        self.tags.iter().find_map(|t| ClauseTag::parse(t))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LinkRef {
    pub source: String,
    pub target: String,
    pub alias: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostic {
    UnreadableFile { path: String, message: String },
    MalformedLink { note: String, line: usize, message: String },
    SelfLoop { note: String },
    UnresolvedLink { source: String, target: String },
    WriteFailed { path: String, message: String },
}

impl Diagnostic {
    /// Unresolved links are data-quality violations; everything else is a
    /// warning.
    pub fn is_violation(&self) -> bool {
        matches!(self, Diagnostic::UnresolvedLink { .. })
    }
}

/// Notes keyed by id, plus every resolved link occurrence.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoteGraph {
    pub notes: BTreeMap<String, Note>,
    /// One entry per resolved link occurrence; duplicates are kept.
    pub links: Vec<LinkRef>,
}

impl NoteGraph {
    /// Distinct directed edges.
    pub fn edges(&self) -> BTreeSet<(String, String)> {
        self.links
            .iter()
            .map(|l| (l.source.clone(), l.target.clone()))
            .collect()
    }

    pub fn undirected_adjacency(&self) -> BTreeMap<&str, BTreeSet<&str>> {
        let mut adj: BTreeMap<&str, BTreeSet<&str>> =
            self.notes.keys().map(|k| (k.as_str(), BTreeSet::new())).collect();
        for l in &self.links {
            adj.entry(&l.source).or_default().insert(&l.target);
            adj.entry(&l.target).or_default().insert(&l.source);
        }
        adj
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanOutput {
    pub graph: NoteGraph,
    pub diagnostics: Vec<Diagnostic>,
}

impl ScanOutput {
    pub fn violations(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| d.is_violation())
    }
}

/// Note ids compare case-insensitively after trimming.
pub fn normalize_id(name: &str) -> String {
    name.trim().to_lowercase()
}

/// Map a wikilink target to the note id it refers to: drops a `#heading`
/// anchor, a folder prefix and a trailing `.md`.
pub fn normalize_target(target: &str) -> String {
    let no_anchor = target.split('#').next().unwrap_or(target);
    let last = no_anchor.rsplit('/').next().unwrap_or(no_anchor);
    let last = last.trim();
    normalize_id(last.strip_suffix(".md").unwrap_or(last))
}

fn relative_path(root: &Path, path: &Path) -> String {
    path.strip_prefix(root)
        .unwrap_or(path)
        .components()
        .map(|c| c.as_os_str().to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join("/")
}

/// Read every `.md` file under `root` and build the note graph.
pub fn scan_vault(root: &Path) -> Result<ScanOutput, VaultError> {
    if !root.is_dir() {
        return Err(VaultError::MissingRoot(root.to_path_buf()));
    }
    let mut files = Vec::new();
    for entry in walkdir::WalkDir::new(root).sort_by_file_name() {
        let entry = entry?;
        if entry.file_type().is_file() && entry.path().extension().and_then(|e| e.to_str()) == Some("md") {
            files.push(entry.into_path());
        }
    }

    let parsed: Vec<Result<Note, Diagnostic>> = files
        .par_iter()
        .map(|path| {
            let rel = relative_path(root, path);
            fs::read(path)
                .map_err(|e| e.to_string())
                .and_then(|bytes| String::from_utf8(bytes).map_err(|e| e.to_string()))
                .map(|body| Note::new(rel.clone(), body))
                .map_err(|message| Diagnostic::UnreadableFile { path: rel, message })
        })
        .collect();

    let mut diagnostics = Vec::new();
    let mut graph = NoteGraph::default();
    for item in parsed {
        match item {
            Ok(note) => {
                if let Some(prev) = graph.notes.get(&note.id) {
                    return Err(VaultError::DuplicateId {
                        id: note.id.clone(),
                        first: prev.path.clone(),
                        second: note.path,
                    });
                }
                graph.notes.insert(note.id.clone(), note);
            }
            Err(d) => diagnostics.push(d),
        }
    }

    let (links, mut link_diags) = resolve_links(&graph.notes);
    graph.links = links;
    diagnostics.append(&mut link_diags);
    Ok(ScanOutput { graph, diagnostics })
}

/// Build the graph for notes already in memory; used by scan and by tests.
pub fn build_graph(notes: impl IntoIterator<Item = Note>) -> Result<ScanOutput, VaultError> {
    let mut map = BTreeMap::new();
    for note in notes {
        let path = note.path.clone();
        if let Some(prev) = map.insert(note.id.clone(), note) {
            return Err(VaultError::DuplicateId {
                id: prev.id,
                first: prev.path,
                second: path,
            });
        }
    }
    let (links, diagnostics) = resolve_links(&map);
    Ok(ScanOutput {
        graph: NoteGraph { notes: map, links },
        diagnostics,
    })
}

fn resolve_links(notes: &BTreeMap<String, Note>) -> (Vec<LinkRef>, Vec<Diagnostic>) {
    let mut links = Vec::new();
    let mut diagnostics = Vec::new();
    for note in notes.values() {
        let (raw, warnings) = markdown::extract_links(&note.body);
        diagnostics.extend(warnings.into_iter().map(|w| Diagnostic::MalformedLink {
            note: note.id.clone(),
            line: w.line,
            message: w.message,
        }));
        for link in raw {
            let target = normalize_target(&link.target);
            if target == note.id {
                diagnostics.push(Diagnostic::SelfLoop { note: note.id.clone() });
            } else if notes.contains_key(&target) {
                links.push(LinkRef {
                    source: note.id.clone(),
                    target,
                    alias: link.alias,
                });
            } else {
                diagnostics.push(Diagnostic::UnresolvedLink {
                    source: note.id.clone(),
                    target: link.target,
                });
            }
        }
    }
    (links, diagnostics)
}
